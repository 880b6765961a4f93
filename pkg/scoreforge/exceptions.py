"""Structured exception classes for scoreforge with error codes, suggestions, and debug information.

Every failure a caller can act on is raised as a subclass of :class:`ScoreForgeError`. Each exception
carries an error code for programmatic handling, a suggestion for the person running the check, and
debug information for bug reports.

Example:
    Basic usage:
        try:
            document = load_document(path)
        except UnknownScoreError as e:
            # Point the user at the closest known score name
            print(f"{e.message} ({e.suggestion})")
        except InputValidationError as e:
            for error in e.details.get("errors", []):
                print(f"{error['pointer']}: {error['message']}")

    Numerical edge cases:
        try:
            value = evaluate(definition, counts, params)
        except UndefinedScoreError as e:
            logger.debug(f"Score undefined at {e.details}: {e.message}")
"""

from typing import Any, Optional

from typing_extensions import override


class ScoreForgeError(Exception):
    """Base exception for all scoreforge errors.

    Attributes:
        message (str): Human-readable error message.
        error_code (str): Unique error identifier for programmatic handling.
        details (dict): Additional context about the error.
        suggestion (str): User-friendly suggestion for resolving the error.
        debug_info (dict): Technical debugging information.

    Example:
        raise ScoreForgeError(
            message="Consistency check failed",
            error_code="SF_001",
            details={"problem": "ehg"},
            suggestion="Re-run with --log-level DEBUG for details",
        )
    """

    def __init__(
        self,
        message: str,
        error_code: str,
        details: Optional[dict[str, Any]] = None,
        suggestion: Optional[str] = None,
        debug_info: Optional[dict[str, Any]] = None,
    ):
        """Initialize a ScoreForgeError.

        Args:
            message: Human-readable error message.
            error_code: Unique error identifier.
            details: Additional context about the error.
            suggestion: User-friendly suggestion for resolving the error.
            debug_info: Technical debugging information.
        """
        self.message: str = message
        self.error_code: str = error_code
        self.details: dict[str, Any] = details or {}
        self.suggestion: Optional[str] = suggestion
        self.debug_info: dict[str, Any] = debug_info or {}
        super().__init__(self.message)

    @override
    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}("
            f"message={self.message!r}, "
            f"error_code={self.error_code!r}, "
            f"details={self.details!r}, "
            f"suggestion={self.suggestion!r}, "
            f"debug_info={self.debug_info!r})"
        )


class InputValidationError(ScoreForgeError):
    """Raised when a problem document or a programmatic problem fails validation.

    Common scenarios:
        - Document is not valid JSON
        - Schema violation (the JSON pointer is in ``details["pointer"]``)
        - Fold counts that do not add up to the dataset totals
        - Duplicate score names

    Example:
        raise InputValidationError(
            message="-0.1 is less than or equal to the minimum of 0",
            error_code="VAL_RANGE",
            details={"pointer": "/problems/0/eps"},
            suggestion="eps must be a positive number",
        )
    """

    def __init__(
        self,
        message: str,
        error_code: str = "VAL_001",
        details: Optional[dict[str, Any]] = None,
        suggestion: Optional[str] = "Please check the problem document against schema/problem.v1.json",
        debug_info: Optional[dict[str, Any]] = None,
    ):
        super().__init__(message, error_code, details, suggestion, debug_info)


class UnknownScoreError(InputValidationError):
    """Raised when a score name resolves to none of the registered scores or aliases.

    The suggestion names the closest canonical score id, if any is close enough.

    Example:
        raise UnknownScoreError(
            message="Unknown score 'acuracy'",
            details={"name": "acuracy"},
            suggestion="Did you mean 'acc'?",
        )
    """

    def __init__(
        self,
        message: str,
        error_code: str = "VAL_SCORE",
        details: Optional[dict[str, Any]] = None,
        suggestion: Optional[str] = None,
        debug_info: Optional[dict[str, Any]] = None,
    ):
        super().__init__(message, error_code, details, suggestion, debug_info)


class UndefinedScoreError(ScoreForgeError):
    """Raised when a score does not exist for a confusion matrix (a denominator vanishes).

    A reported score asserts that it was computable, so matrices raising this error are never witnesses.

    Example:
        raise UndefinedScoreError(
            message="ppv is undefined: no positive predictions",
            details={"score": "ppv", "tp": 0, "tn": 10, "p": 5, "n": 10},
        )
    """

    def __init__(
        self,
        message: str,
        error_code: str = "SCORE_UNDEFINED",
        details: Optional[dict[str, Any]] = None,
        suggestion: Optional[str] = None,
        debug_info: Optional[dict[str, Any]] = None,
    ):
        super().__init__(message, error_code, details, suggestion, debug_info)


class EmptyDomainError(ScoreForgeError):
    """Raised when an interval operation has no real result, e.g. the square root of a negative interval."""

    def __init__(
        self,
        message: str,
        error_code: str = "INTERVAL_EMPTY",
        details: Optional[dict[str, Any]] = None,
        suggestion: Optional[str] = None,
        debug_info: Optional[dict[str, Any]] = None,
    ):
        super().__init__(message, error_code, details, suggestion, debug_info)


class NonlinearScoreError(ScoreForgeError):
    """Raised when a score that is not linear in (tp, tn) is used to build a mean-of-scores system.

    Only acc, sens, spec and bacc average into linear constraints.

    Example:
        raise NonlinearScoreError(
            message="mcc cannot be tested under mean-of-scores aggregation",
            details={"score": "mcc"},
            suggestion="Test it under score-of-means aggregation instead",
        )
    """

    def __init__(
        self,
        message: str,
        error_code: str = "MOS_NONLINEAR",
        details: Optional[dict[str, Any]] = None,
        suggestion: Optional[str] = "Only acc, sens, spec and bacc are supported under mean-of-scores aggregation",
        debug_info: Optional[dict[str, Any]] = None,
    ):
        super().__init__(message, error_code, details, suggestion, debug_info)


class TooLargeError(ScoreForgeError):
    """Raised when an exhaustive (brute-force) search would exceed its guard rail."""

    def __init__(
        self,
        message: str,
        error_code: str = "GUARD_TOO_LARGE",
        details: Optional[dict[str, Any]] = None,
        suggestion: Optional[str] = "Use the inverse-solution test or the branch-and-bound solver instead",
        debug_info: Optional[dict[str, Any]] = None,
    ):
        super().__init__(message, error_code, details, suggestion, debug_info)


class ConfigurationError(ScoreForgeError):
    """Raised when the checker configuration is invalid.

    Common scenarios:
        - SCOREFORGE_JOBS is not a positive integer
        - Budgets that are not positive

    Example:
        raise ConfigurationError(
            message="SCOREFORGE_JOBS must be a positive integer, got 'many'",
            error_code="CFG_JOBS",
            suggestion="Set SCOREFORGE_JOBS to a number such as 4, or pass --jobs",
        )
    """

    def __init__(
        self,
        message: str,
        error_code: str = "CFG_001",
        details: Optional[dict[str, Any]] = None,
        suggestion: Optional[str] = None,
        debug_info: Optional[dict[str, Any]] = None,
    ):
        super().__init__(message, error_code, details, suggestion, debug_info)


class CombinatorialBlowupWarning(UserWarning):
    """Emitted when the estimated number of fold-configuration bundles exceeds the configured budget."""


# Mapping of JSON schema validator keywords to error codes
SCHEMA_KEYWORD_TO_ERROR_CODE = {
    "required": "VAL_REQUIRED",
    "additionalProperties": "VAL_UNKNOWN_FIELD",
    "type": "VAL_TYPE",
    "enum": "VAL_ENUM",
    "const": "VAL_ENUM",
    "pattern": "VAL_FORMAT",
    "minimum": "VAL_RANGE",
    "exclusiveMinimum": "VAL_RANGE",
    "maximum": "VAL_RANGE",
    "minItems": "VAL_RANGE",
    "minProperties": "VAL_RANGE",
    "oneOf": "VAL_SHAPE",
    "anyOf": "VAL_SHAPE",
}


def json_pointer(path: Any) -> str:
    """Render a sequence of keys and indices as a JSON pointer (RFC 6901)."""
    parts = [str(part).replace("~", "~0").replace("/", "~1") for part in path]
    return "/" + "/".join(parts) if parts else ""


def create_exception_from_schema_error(
    keyword: str,
    path: Any,
    message: str,
    debug_info: Optional[dict[str, Any]] = None,
) -> InputValidationError:
    """Create an InputValidationError for one JSON schema violation.

    Args:
        keyword: The schema keyword that failed (``jsonschema.ValidationError.validator``).
        path: The absolute path of the offending instance.
        message: The validator's message.
        debug_info: Debug information.

    Returns:
        An InputValidationError whose details carry the JSON pointer of the violation.

    Example:
        exception = create_exception_from_schema_error("exclusiveMinimum", ["problems", 0, "eps"], "-1 is too small")
        # exception.details == {"pointer": "/problems/0/eps", "keyword": "exclusiveMinimum"}
    """
    error_code = SCHEMA_KEYWORD_TO_ERROR_CODE.get(keyword, "VAL_SCHEMA")
    pointer = json_pointer(path)

    suggestions = {
        "VAL_REQUIRED": "Add the missing field",
        "VAL_UNKNOWN_FIELD": "Remove the field or check its spelling",
        "VAL_TYPE": "Check the type of the value",
        "VAL_ENUM": "Use one of the allowed values",
        "VAL_FORMAT": "Decimal values must be written like 0.8290",
        "VAL_RANGE": "Check that the value is within its allowed range",
    }

    return InputValidationError(
        message=f"{pointer or '(root)'}: {message}",
        error_code=error_code,
        details={"pointer": pointer, "keyword": keyword},
        suggestion=suggestions.get(error_code, "Please check the problem document against schema/problem.v1.json"),
        debug_info=debug_info,
    )
