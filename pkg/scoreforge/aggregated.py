"""Consistency tests for scores aggregated over several evaluation sets (folds, repetitions, datasets).

Under score-of-means (SoM) aggregation the confusion matrices are pooled before the score is computed, and
every score is invariant to scaling the pooled matrix, so the test reduces to the single-matrix test on the
total class counts. Under mean-of-scores (MoS) aggregation the per-fold scores are averaged; for the scores
linear in (tp, tn) (acc, sens, spec, bacc) the reported means become an integer linear system over the
per-fold counts, solved exactly by :mod:`scoreforge.lp`. When the fold configuration is unknown every
admissible configuration is tried.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import islice
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from scoreforge.config import CheckConfig
from scoreforge.exceptions import NonlinearScoreError, UndefinedScoreError
from scoreforge.folds import ConfigurationBundle, ExperimentSpec, Fold, FoldingStrategy, FoldPruning, bundle_folds, expand_experiment
from scoreforge.lp import Constraint, FeasibilityStatus, LinearSystem, Variable, solve_feasibility
from scoreforge.scores import DEFAULT_PARAMS, DEFAULT_REGISTRY, LINEAR_SCORE_IDS, ScoreParams, ScoreRegistry
from scoreforge.single import ReportedScore, SingleProblem, Verdict, test_single

logger = logging.getLogger(__name__)

# bundles handed to the worker pool at once, per worker
CHUNK_PER_JOB = 64


class Aggregation(str, Enum):
    MOS = "mos"
    SOM = "som"
    UNKNOWN = "unknown"


class AssumptionStatus(str, Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"
    INDETERMINATE = "indeterminate"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class FoldExtremes:
    """Reported minimum and maximum of a score across the folds."""

    score: str
    minimum: Fraction
    maximum: Fraction
    uncertainty: Fraction

    def __post_init__(self) -> None:
        if self.minimum > self.maximum:
            raise ValueError(f"{self.score}: fold minimum {self.minimum} exceeds maximum {self.maximum}")
        if self.uncertainty <= 0:
            raise ValueError(f"{self.score}: the uncertainty must be positive")


@dataclass(frozen=True)
class AggregatedProblem:
    experiment: ExperimentSpec
    scores: tuple[ReportedScore, ...]
    aggregation: Aggregation = Aggregation.UNKNOWN
    fold_extremes: tuple[FoldExtremes, ...] = ()
    params: ScoreParams = DEFAULT_PARAMS
    registry: ScoreRegistry = field(default=DEFAULT_REGISTRY, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "scores", tuple(self.scores))
        object.__setattr__(self, "fold_extremes", tuple(self.fold_extremes))
        object.__setattr__(self, "aggregation", Aggregation(self.aggregation))


@dataclass(frozen=True)
class AssumptionVerdict:
    """Outcome of testing one aggregation assumption.

    A consistent MoS entry carries the witness configuration bundle and the per-fold (tp, tn) counts in
    the order of :func:`bundle_folds`; a consistent SoM entry carries the single-matrix verdict on the totals.
    """

    status: AssumptionStatus
    bundle: Optional[ConfigurationBundle] = None
    fold_counts: tuple[tuple[int, int], ...] = ()
    single: Optional[Verdict] = None
    configurations_examined: int = 0
    feasible_configurations: Optional[int] = None
    not_applicable: tuple[str, ...] = ()
    reason: str = ""

    @property
    def applicable(self) -> bool:
        return self.status is not AssumptionStatus.NOT_APPLICABLE


@dataclass(frozen=True)
class AggregatedVerdict:
    per_assumption: Mapping[Aggregation, AssumptionVerdict]

    @property
    def status(self) -> AssumptionStatus:
        return combine_statuses([verdict.status for verdict in self.per_assumption.values()])


def combine_statuses(statuses: Sequence[AssumptionStatus]) -> AssumptionStatus:
    """Inconsistent only if every applicable assumption is; otherwise the most favorable outcome wins."""
    applicable = [status for status in statuses if status is not AssumptionStatus.NOT_APPLICABLE]
    if not applicable:
        return AssumptionStatus.NOT_APPLICABLE
    if all(status is AssumptionStatus.INCONSISTENT for status in applicable):
        return AssumptionStatus.INCONSISTENT
    if AssumptionStatus.CONSISTENT in applicable:
        return AssumptionStatus.CONSISTENT
    return AssumptionStatus.INDETERMINATE


def _fold_coefficients(score_id: str, fold: Fold, index: int) -> dict[str, Fraction]:
    """Coefficients of the score of one fold in its (tp_i, tn_i)."""
    tp, tn = f"tp_{index}", f"tn_{index}"
    if score_id == "acc":
        return {tp: Fraction(1, fold.size), tn: Fraction(1, fold.size)}
    if score_id in ("sens", "bacc") and fold.p == 0:
        raise UndefinedScoreError(message=f"{score_id} is undefined on fold {index} without positives", details={"fold": index})
    if score_id in ("spec", "bacc") and fold.n == 0:
        raise UndefinedScoreError(message=f"{score_id} is undefined on fold {index} without negatives", details={"fold": index})
    if score_id == "sens":
        return {tp: Fraction(1, fold.p)}
    if score_id == "spec":
        return {tn: Fraction(1, fold.n)}
    if score_id == "bacc":
        return {tp: Fraction(1, 2 * fold.p), tn: Fraction(1, 2 * fold.n)}
    raise NonlinearScoreError(
        message=f"{score_id} cannot be tested under mean-of-scores aggregation",
        details={"score": score_id},
    )


def build_system(
    folds: Sequence[Fold],
    scores: Sequence[ReportedScore],
    fold_extremes: Sequence[FoldExtremes] = (),
) -> LinearSystem:
    """The integer system whose solutions are the per-fold counts reproducing the reported means.

    Variables tp_i in [0, p_i] and tn_i in [0, n_i] (all tp before all tn). Each reported mean gives one
    two-sided row; reported fold extremes add a two-sided row per fold.

    Raises:
        NonlinearScoreError: for a score that is not linear in (tp, tn).
        UndefinedScoreError: when a fold lacks the class a score divides by.
    """
    count = len(folds)
    variables = [Variable(f"tp_{i}", 0, fold.p) for i, fold in enumerate(folds)]
    variables += [Variable(f"tn_{i}", 0, fold.n) for i, fold in enumerate(folds)]
    constraints: list[Constraint] = []
    for score in scores:
        coefficients: dict[str, Fraction] = {}
        for i, fold in enumerate(folds):
            for name, value in _fold_coefficients(score.id, fold, i).items():
                coefficients[name] = value / count
        constraints.append(
            Constraint.of(coefficients, score.value - score.uncertainty, score.value + score.uncertainty, label=f"mean {score.id}")
        )
    for extremes in fold_extremes:
        for i, fold in enumerate(folds):
            constraints.append(
                Constraint.of(
                    _fold_coefficients(extremes.score, fold, i),
                    extremes.minimum - extremes.uncertainty,
                    extremes.maximum + extremes.uncertainty,
                    label=f"fold {i} {extremes.score} extremes",
                )
            )
    return LinearSystem(tuple(variables), tuple(constraints))


def fold_score_means(folds: Sequence[Fold], counts: Sequence[tuple[int, int]]) -> dict[str, Fraction]:
    """Exact mean of each linear score over the folds, for the scores defined on every fold."""
    means: dict[str, Fraction] = {}
    for score_id in sorted(LINEAR_SCORE_IDS):
        try:
            total = sum(
                (sum(c * (tp if name.startswith("tp") else tn) for name, c in _fold_coefficients(score_id, fold, i).items())
                 for i, (fold, (tp, tn)) in enumerate(zip(folds, counts))),
                Fraction(0),
            )
        except UndefinedScoreError:
            continue
        means[score_id] = total / len(folds)
    return means


def mos_pruning(score_ids: Iterable[str]) -> FoldPruning:
    """Per-fold sensitivity needs positives in every fold; specificity needs negatives."""
    ids = set(score_ids)
    return FoldPruning(
        require_positive=bool(ids & {"sens", "bacc"}),
        require_negative=bool(ids & {"spec", "bacc"}),
    )


_BundleOutcome = tuple[FeasibilityStatus, Optional[tuple[tuple[int, int], ...]]]


def _solve_bundle(args: tuple[ConfigurationBundle, tuple[ReportedScore, ...], tuple[FoldExtremes, ...], int]) -> _BundleOutcome:
    bundle, scores, extremes, node_budget = args
    folds = bundle_folds(bundle)
    try:
        system = build_system(folds, scores, extremes)
    except UndefinedScoreError:
        return FeasibilityStatus.INFEASIBLE, None
    result = solve_feasibility(system, node_budget)
    if not result.feasible:
        logger.debug(f"Configuration {[c.pairs() for c in bundle]}: {result.status.value}")
        return result.status, None
    assert result.assignment is not None
    return result.status, tuple((result.assignment[f"tp_{i}"], result.assignment[f"tn_{i}"]) for i in range(len(folds)))


def _outcomes(
    bundles: Iterator[ConfigurationBundle],
    payload: tuple[tuple[ReportedScore, ...], tuple[FoldExtremes, ...], int],
    jobs: int,
) -> Iterator[tuple[ConfigurationBundle, _BundleOutcome]]:
    """Solve each bundle, in stream order; with several jobs the bundles are fanned out in chunks."""
    if jobs <= 1:
        for bundle in bundles:
            yield bundle, _solve_bundle((bundle, *payload))
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        while True:
            chunk = list(islice(bundles, jobs * CHUNK_PER_JOB))
            if not chunk:
                return
            yield from zip(chunk, pool.map(_solve_bundle, [(bundle, *payload) for bundle in chunk]))


def test_mos(problem: AggregatedProblem, config: Optional[CheckConfig] = None) -> AssumptionVerdict:
    """Test the reported means under mean-of-scores aggregation.

    Scores that are not linear in (tp, tn) are listed as not applicable; if none is linear the whole
    assumption is not applicable.
    """
    config = config or CheckConfig()
    linear = tuple(score for score in problem.scores if score.id in LINEAR_SCORE_IDS)
    skipped = tuple(score.id for score in problem.scores if score.id not in LINEAR_SCORE_IDS)
    extremes = tuple(e for e in problem.fold_extremes if e.score in LINEAR_SCORE_IDS)
    skipped += tuple(e.score for e in problem.fold_extremes if e.score not in LINEAR_SCORE_IDS and e.score not in skipped)
    if skipped:
        logger.info(f"Not testable under mean-of-scores aggregation: {', '.join(skipped)}")
    if not linear:
        return AssumptionVerdict(AssumptionStatus.NOT_APPLICABLE, not_applicable=skipped, reason="no score linear in (tp, tn) reported")

    pruning = mos_pruning([score.id for score in linear] + [e.score for e in extremes])
    expanded = expand_experiment(problem.experiment, pruning, config.blowup_threshold)
    bundles = expanded.mos

    if problem.experiment.folding is not FoldingStrategy.UNKNOWN:
        bundle = next(bundles)
        if not all(configuration.satisfies(pruning) for configuration in bundle):
            return AssumptionVerdict(
                AssumptionStatus.INCONSISTENT,
                configurations_examined=1,
                not_applicable=skipped,
                reason="a fold lacks the class a reported score divides by",
            )
        bundles = iter([bundle])

    examined = 0
    feasible = 0
    witness: Optional[tuple[ConfigurationBundle, tuple[tuple[int, int], ...]]] = None
    indeterminate = False
    exhausted_budget = False
    if config.config_budget is not None:
        bundles = islice(bundles, config.config_budget + 1)

    for bundle, (status, counts) in _outcomes(bundles, (linear, extremes, config.node_budget), config.jobs):
        if config.config_budget is not None and examined >= config.config_budget:
            exhausted_budget = True
            break
        examined += 1
        if status is FeasibilityStatus.INDETERMINATE:
            indeterminate = True
        elif status is FeasibilityStatus.FEASIBLE:
            feasible += 1
            if witness is None:
                assert counts is not None
                witness = (bundle, counts)
            if not config.count_all_configurations:
                break

    feasible_count = feasible if config.count_all_configurations and not exhausted_budget else None
    logger.info(f"Mean-of-scores test examined {examined} configuration bundle(s), witness found: {witness is not None}")
    if witness is not None:
        return AssumptionVerdict(
            AssumptionStatus.CONSISTENT,
            bundle=witness[0],
            fold_counts=witness[1],
            configurations_examined=examined,
            feasible_configurations=feasible_count,
            not_applicable=skipped,
        )
    if exhausted_budget or indeterminate:
        reason = "configuration budget exhausted" if exhausted_budget else "node budget exhausted"
        logger.warning(f"Mean-of-scores test indeterminate: {reason}")
        return AssumptionVerdict(
            AssumptionStatus.INDETERMINATE,
            configurations_examined=examined,
            not_applicable=skipped,
            reason=reason,
        )
    return AssumptionVerdict(
        AssumptionStatus.INCONSISTENT,
        configurations_examined=examined,
        feasible_configurations=feasible_count,
        not_applicable=skipped,
    )


def test_som(problem: AggregatedProblem, config: Optional[CheckConfig] = None) -> AssumptionVerdict:
    """Test the scores under score-of-means aggregation: the single-matrix test on the pooled totals."""
    config = config or CheckConfig()
    p, n = problem.experiment.totals
    single = SingleProblem(p, n, problem.scores, problem.params, problem.registry)
    verdict = test_single(single, config.witness_cap)
    status = AssumptionStatus.CONSISTENT if verdict.consistent else AssumptionStatus.INCONSISTENT
    return AssumptionVerdict(status, single=verdict)


def test_aggregated(problem: AggregatedProblem, config: Optional[CheckConfig] = None) -> AggregatedVerdict:
    """Test under the stated aggregation, or under both when it is unknown."""
    config = config or CheckConfig()
    per_assumption: dict[Aggregation, AssumptionVerdict] = {}
    if problem.aggregation in (Aggregation.MOS, Aggregation.UNKNOWN):
        per_assumption[Aggregation.MOS] = test_mos(problem, config)
    if problem.aggregation in (Aggregation.SOM, Aggregation.UNKNOWN):
        per_assumption[Aggregation.SOM] = test_som(problem, config)
    verdict = AggregatedVerdict(per_assumption)
    logger.info(f"Aggregated test ({problem.aggregation.value}): {verdict.status.value}")
    return verdict


test_mos.__test__ = False  # type: ignore[attr-defined]
test_som.__test__ = False  # type: ignore[attr-defined]
test_aggregated.__test__ = False  # type: ignore[attr-defined]
