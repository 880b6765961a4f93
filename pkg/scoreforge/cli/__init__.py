from scoreforge.cli.main import main

__all__ = ["main"]
