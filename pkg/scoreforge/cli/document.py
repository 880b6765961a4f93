"""Problem documents: loading, schema validation and conversion to test problems."""

import json
import logging
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from importlib.resources import files
from pathlib import Path
from typing import Any, ClassVar, Literal, Optional, Union

from jsonschema import Draft202012Validator
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field
from typing_extensions import Annotated

from scoreforge.aggregated import AggregatedProblem, Aggregation, FoldExtremes
from scoreforge.exceptions import InputValidationError, UnknownScoreError, create_exception_from_schema_error, json_pointer
from scoreforge.folds import Dataset, ExperimentSpec, FoldConfiguration, FoldingStrategy
from scoreforge.scores import DEFAULT_REGISTRY, ScoreParams, ScoreRegistry
from scoreforge.single import ReportedScore, SingleProblem, default_uncertainty
from scoreforge.utils import decimal_text, input_error_handler, parse_decimal, safe_cast

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"

DecimalText = Annotated[str, BeforeValidator(decimal_text)]


def load_schema() -> dict[str, Any]:
    text = files("scoreforge").joinpath("schema", "problem.v1.json").read_text(encoding="utf-8")
    return safe_cast(dict[str, Any], json.loads(text))


class TestSetModel(BaseModel):
    __test__: ClassVar[bool] = False

    p: int = Field(ge=1, description="Number of positive samples")
    n: int = Field(ge=1, description="Number of negative samples")

    model_config: ClassVar[ConfigDict] = ConfigDict(validate_assignment=True, extra="forbid")


class FoldModel(BaseModel):
    p: int = Field(ge=0, description="Positives in the fold")
    n: int = Field(ge=0, description="Negatives in the fold")

    model_config: ClassVar[ConfigDict] = ConfigDict(validate_assignment=True, extra="forbid")


class DatasetModel(BaseModel):
    p: int = Field(ge=1, description="Number of positive samples")
    n: int = Field(ge=1, description="Number of negative samples")
    folds: Optional[list[FoldModel]] = Field(default=None, description="Folds under explicit folding")

    model_config: ClassVar[ConfigDict] = ConfigDict(validate_assignment=True, extra="forbid")


class FoldingModel(BaseModel):
    k: int = Field(ge=2, description="Number of folds")
    repeats: int = Field(default=1, ge=1, description="Number of repetitions of the k-fold split")
    strategy: Optional[Literal["explicit", "stratified", "unknown"]] = Field(
        default=None, description="Folding strategy; explicit when folds are listed, unknown otherwise"
    )
    folds: Optional[list[FoldModel]] = Field(default=None, description="Folds of the single test set under explicit folding")

    model_config: ClassVar[ConfigDict] = ConfigDict(validate_assignment=True, extra="forbid")


class ExtremesModel(BaseModel):
    min: DecimalText = Field(description="Smallest per-fold value reported")
    max: DecimalText = Field(description="Largest per-fold value reported")

    model_config: ClassVar[ConfigDict] = ConfigDict(validate_assignment=True, extra="forbid")


class ParamsModel(BaseModel):
    beta_plus: Optional[DecimalText] = Field(default=None, description="beta of the positive F-score")
    beta_minus: Optional[DecimalText] = Field(default=None, description="beta of the negative F-score")

    model_config: ClassVar[ConfigDict] = ConfigDict(validate_assignment=True, extra="forbid")


class ProblemModel(BaseModel):
    id: str = Field(min_length=1, description="Problem identifier, echoed in the output")
    testset: Optional[TestSetModel] = Field(default=None, description="Class sizes of a single test set")
    datasets: Optional[list[DatasetModel]] = Field(default=None, description="Datasets of a multi-dataset experiment")
    folding: Optional[FoldingModel] = Field(default=None, description="k-fold structure; absent for a single test set")
    aggregation: Optional[Literal["mos", "som", "unknown"]] = Field(default=None, description="How per-fold results were aggregated")
    scores: dict[str, DecimalText] = Field(description="Reported scores by name, as decimal strings")
    eps: Optional[DecimalText] = Field(default=None, description="Numerical uncertainty applied to every score")
    eps_mode: Optional[Literal["round", "floor_ceil"]] = Field(default=None, description="How the uncertainty follows from the digits")
    fold_score_extremes: Optional[dict[str, ExtremesModel]] = Field(default=None, description="Reported per-fold minimum and maximum")
    params: Optional[ParamsModel] = Field(default=None, description="Score parameters")

    model_config: ClassVar[ConfigDict] = ConfigDict(validate_assignment=True, extra="forbid")


class ProblemDocument(BaseModel):
    schema_version: Literal["1"] = Field(description="Document format version")
    problems: list[ProblemModel] = Field(min_length=1, description="Problems to test")

    model_config: ClassVar[ConfigDict] = ConfigDict(validate_assignment=True, extra="forbid")

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json", exclude_none=True), sort_keys=True, indent=2)


def validate_against_schema(data: Any) -> None:
    """Check a parsed document against the shipped schema.

    Raises:
        InputValidationError: for the first violation (in document order); ``details["errors"]`` lists all.
    """
    validator = Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: [str(part) for part in e.absolute_path])
    if not errors:
        return
    first = errors[0]
    exception = create_exception_from_schema_error(
        first.validator if isinstance(first.validator, str) else "schema",
        first.absolute_path,
        first.message,
        debug_info={"schema_path": json_pointer(first.absolute_schema_path)},
    )
    exception.details["errors"] = [{"pointer": json_pointer(e.absolute_path), "message": e.message} for e in errors]
    raise exception


def parse_document(data: Any) -> ProblemDocument:
    validate_against_schema(data)
    return ProblemDocument.model_validate(data)


@input_error_handler
def load_document(path: Union[str, Path]) -> ProblemDocument:
    """Read, schema-check and parse a problem document; numbers are kept as exact decimals."""
    text = Path(path).read_text(encoding="utf-8")
    data = json.loads(text, parse_float=Decimal)
    return parse_document(data)


@dataclass(frozen=True)
class BuiltProblem:
    id: str
    problem: Union[SingleProblem, AggregatedProblem]


def _exact(text: str, pointer: str) -> tuple[Fraction, int]:
    try:
        return parse_decimal(text)
    except ValueError as e:
        raise InputValidationError(message=f"{pointer}: {e}", error_code="VAL_FORMAT", details={"pointer": pointer}) from e


def _positive(text: str, pointer: str) -> Fraction:
    value, _ = _exact(text, pointer)
    if value <= 0:
        raise InputValidationError(
            message=f"{pointer}: must be positive, got {text}",
            error_code="VAL_RANGE",
            details={"pointer": pointer},
            suggestion="Check that the value is within its allowed range",
        )
    return value


def _scores(model: ProblemModel, base: str, params: ScoreParams, eps_mode: str, registry: ScoreRegistry) -> tuple[ReportedScore, ...]:
    eps = _positive(model.eps, f"{base}/eps") if model.eps is not None else None
    scores: list[ReportedScore] = []
    seen: dict[str, str] = {}
    for name, text in model.scores.items():
        pointer = f"{base}/scores/{json_pointer([name])[1:]}"
        try:
            resolved = registry.resolve(name)
        except UnknownScoreError as e:
            e.message = f"{pointer}: {e.message}"
            e.details["pointer"] = pointer
            raise
        score_id = resolved.definition.id
        if score_id in seen:
            raise InputValidationError(
                message=f"{pointer}: '{name}' and '{seen[score_id]}' both name {score_id}",
                error_code="VAL_DUPLICATE",
                details={"pointer": pointer, "score": score_id},
                suggestion="Report each score once",
            )
        seen[score_id] = name
        value, digits = _exact(text, pointer)
        uncertainty = eps if eps is not None else default_uncertainty(digits, eps_mode)
        pinned = resolved.params_for(params) if resolved.overrides else None
        scores.append(ReportedScore(score_id, value, uncertainty, pinned))
    return tuple(scores)


def _extremes(model: ProblemModel, base: str, eps_mode: str, registry: ScoreRegistry) -> tuple[FoldExtremes, ...]:
    result: list[FoldExtremes] = []
    for name, extremes in (model.fold_score_extremes or {}).items():
        pointer = f"{base}/fold_score_extremes/{json_pointer([name])[1:]}"
        try:
            score_id = registry.resolve(name).definition.id
        except UnknownScoreError as e:
            e.message = f"{pointer}: {e.message}"
            e.details["pointer"] = pointer
            raise
        minimum, min_digits = _exact(extremes.min, f"{pointer}/min")
        maximum, max_digits = _exact(extremes.max, f"{pointer}/max")
        if minimum > maximum:
            raise InputValidationError(message=f"{pointer}: min exceeds max", error_code="VAL_RANGE", details={"pointer": pointer})
        if model.eps is not None:
            uncertainty = _positive(model.eps, f"{base}/eps")
        else:
            uncertainty = default_uncertainty(min(min_digits, max_digits), eps_mode)
        result.append(FoldExtremes(score_id, minimum, maximum, uncertainty))
    return tuple(result)


def _folds(folds: Optional[list[FoldModel]]) -> Optional[FoldConfiguration]:
    if folds is None:
        return None
    return FoldConfiguration.of((fold.p, fold.n) for fold in folds)


def _experiment(model: ProblemModel, base: str) -> ExperimentSpec:
    folding = model.folding
    assert folding is not None
    if model.testset is not None:
        datasets = [Dataset(model.testset.p, model.testset.n, _folds(folding.folds))]
    else:
        if folding.folds is not None:
            raise InputValidationError(
                message=f"{base}/folding/folds: list the folds under each dataset",
                error_code="VAL_FOLDS",
                details={"pointer": f"{base}/folding/folds"},
            )
        datasets = [Dataset(dataset.p, dataset.n, _folds(dataset.folds)) for dataset in model.datasets or []]
    has_folds = [dataset.folds is not None for dataset in datasets]
    strategy = folding.strategy or ("explicit" if all(has_folds) else "unknown")
    if strategy != "explicit" and any(has_folds):
        raise InputValidationError(
            message=f"{base}/folding/strategy: folds are listed but the strategy is {strategy}",
            error_code="VAL_FOLDS",
            details={"pointer": f"{base}/folding/strategy"},
            suggestion="Use the explicit strategy or remove the folds",
        )
    try:
        return ExperimentSpec(tuple(datasets), folding.k, folding.repeats, FoldingStrategy(strategy))
    except ValueError as e:
        raise InputValidationError(message=f"{base}/folding: {e}", error_code="VAL_RANGE", details={"pointer": f"{base}/folding"}) from e


def build_problem(
    model: ProblemModel,
    index: int,
    eps_mode: str = "floor_ceil",
    registry: ScoreRegistry = DEFAULT_REGISTRY,
) -> BuiltProblem:
    """Turn one validated problem into a single-matrix or an aggregated test problem.

    The problem's own eps_mode takes precedence over ``eps_mode``; an explicit eps overrides both.

    Raises:
        InputValidationError: for semantic errors the schema cannot express (unknown scores, inconsistent folds).
    """
    base = f"/problems/{index}"
    mode = model.eps_mode or eps_mode
    params = ScoreParams(
        beta_plus=_positive(model.params.beta_plus, f"{base}/params/beta_plus") if model.params and model.params.beta_plus else Fraction(1),
        beta_minus=_positive(model.params.beta_minus, f"{base}/params/beta_minus") if model.params and model.params.beta_minus else Fraction(1),
    )
    scores = _scores(model, base, params, mode, registry)

    if model.folding is None:
        if model.testset is None:
            raise InputValidationError(
                message=f"{base}: several datasets need a folding description",
                error_code="VAL_SHAPE",
                details={"pointer": base},
                suggestion="Add a folding object, or use testset for a single test set",
            )
        if model.aggregation is not None or model.fold_score_extremes:
            raise InputValidationError(
                message=f"{base}: aggregation and fold extremes need a folding description",
                error_code="VAL_SHAPE",
                details={"pointer": base},
            )
        return BuiltProblem(model.id, SingleProblem(model.testset.p, model.testset.n, scores, params, registry))

    experiment = _experiment(model, base)
    aggregation = Aggregation(model.aggregation or "unknown")
    extremes = _extremes(model, base, mode, registry)
    return BuiltProblem(model.id, AggregatedProblem(experiment, scores, aggregation, extremes, params, registry))


def build_problems(document: ProblemDocument, eps_mode: str = "floor_ceil", registry: ScoreRegistry = DEFAULT_REGISTRY) -> list[BuiltProblem]:
    ids = [problem.id for problem in document.problems]
    for index, problem_id in enumerate(ids):
        if ids.index(problem_id) != index:
            raise InputValidationError(
                message=f"/problems/{index}/id: duplicate problem id '{problem_id}'",
                error_code="VAL_DUPLICATE",
                details={"pointer": f"/problems/{index}/id"},
            )
    return [build_problem(model, index, eps_mode, registry) for index, model in enumerate(document.problems)]
