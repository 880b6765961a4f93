import json
import logging
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from functools import wraps
from typing import TYPE_CHECKING, Any, Callable, Union

import pydantic
from typeguard import TypeCheckError as TypeCheckError
from typeguard import check_type as typeguard_check_type

from scoreforge.exceptions import InputValidationError, json_pointer

logger = logging.getLogger(__name__)


if TYPE_CHECKING:
    # When type-checking, `safe_cast` is just an alias to `cast`
    from typing import cast as cast
    safe_cast = cast
else:
    # When not type-checking, `safe_cast` is a function that actually performs runtime type checking
    def safe_cast(typ: Any, value: object) -> Any:
        """Check at runtime that parsed JSON has the expected shape, then return it unchanged.

        Stands in for `typing.cast` where the value comes from outside the type checker's view (``json.loads`` in
        `scoreforge.cli.document.load_schema`).

        Raises:
            TypeCheckError: if ``value`` does not match ``typ``.
        """
        return typeguard_check_type(value, typ)


def parse_decimal(text: Union[str, int, Decimal]) -> tuple[Fraction, int]:
    """Parse a reported decimal exactly.

    Returns the exact rational value and the number of digits after the decimal point
    ("0.6801" -> (6801/10000, 4), "19" -> (19, 0), "1.5e-3" -> (3/2000, 4)).

    Raises:
        ValueError: if the text is not a finite decimal number.
    """
    try:
        decimal = text if isinstance(text, Decimal) else Decimal(str(text).strip())
    except InvalidOperation:
        raise ValueError(f"not a decimal number: {text!r}") from None
    if not decimal.is_finite():
        raise ValueError(f"not a finite decimal number: {text!r}")
    exponent = decimal.as_tuple().exponent
    assert isinstance(exponent, int)
    return Fraction(decimal), max(0, -exponent)


def decimal_text(value: Union[str, int, float, Decimal]) -> str:
    """Normalize a JSON scalar to the decimal string it was written as."""
    if isinstance(value, bool):
        raise ValueError(f"not a decimal number: {value!r}")
    if isinstance(value, float):
        # Shortest repr round-trips, so "0.1" stays "0.1"
        return repr(value)
    return str(value)


def _handle_json_error(e: json.JSONDecodeError, source: str) -> None:
    logger.error(f"Invalid JSON in {source}: {e}")
    raise InputValidationError(
        message=f"{source}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}",
        error_code="VAL_JSON",
        details={"line": e.lineno, "column": e.colno},
        suggestion="Please check the document is well-formed JSON",
    )


def _handle_pydantic_error(e: pydantic.ValidationError, source: str) -> None:
    errors = [{"pointer": json_pointer(error["loc"]), "message": error["msg"]} for error in e.errors()]
    first = errors[0] if errors else {"pointer": "", "message": str(e)}
    logger.error(f"Invalid problem document {source}: {first['pointer']}: {first['message']}")
    raise InputValidationError(
        message=f"{first['pointer'] or '(root)'}: {first['message']}",
        error_code="VAL_MODEL",
        details={"pointer": first["pointer"], "errors": errors},
    )


def input_error_handler(func: Callable[..., Any]) -> Callable[..., Any]:
    """Decorator to report document-loading failures consistently.

    Converts I/O errors, JSON syntax errors and pydantic validation errors raised by the wrapped
    loader into :class:`InputValidationError`. The first positional argument is used as the source name.
    """

    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        source = str(args[0]) if args else "<input>"
        try:
            return func(*args, **kwargs)
        except OSError as e:
            logger.error(f"Cannot read {source}: {e}")
            raise InputValidationError(
                message=f"{source}: cannot read input: {e.strerror or e}",
                error_code="VAL_IO",
                suggestion="Please check the file path and permissions",
            ) from e
        except json.JSONDecodeError as e:
            _handle_json_error(e, source)
        except pydantic.ValidationError as e:
            _handle_pydantic_error(e, source)

    return wrapper
