import sys
from pathlib import Path
from typing import Any, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def test_version_number_match() -> None:
    import scoreforge
    assert hasattr(scoreforge, "__version__")

    project_root: Path = Path(__file__).parent.parent.parent
    with (project_root / "pyproject.toml").open("rb") as fp:
        pyproject_data: dict[str, Any] = tomllib.load(fp)

    pyproject_version: Union[str, None] = pyproject_data.get("project", {}).get("version", None)
    assert isinstance(pyproject_version, str)
    assert scoreforge.__version__ == pyproject_version


def test_console_script_points_at_cli() -> None:
    from scoreforge.cli import main

    project_root: Path = Path(__file__).parent.parent.parent
    with (project_root / "pyproject.toml").open("rb") as fp:
        scripts: dict[str, str] = tomllib.load(fp)["project"]["scripts"]

    assert scripts == {"scoreforge": "scoreforge.cli:main"}
    assert callable(main)
