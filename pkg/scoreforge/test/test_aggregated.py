import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Optional

import pytest
from pytest_mock import MockerFixture

from scoreforge.aggregated import (
    AggregatedProblem,
    Aggregation,
    AssumptionStatus,
    AssumptionVerdict,
    FoldExtremes,
    build_system,
    combine_statuses,
    fold_score_means,
    mos_pruning,
    test_aggregated,
    test_mos,
    test_som,
)
from scoreforge.config import CheckConfig
from scoreforge.exceptions import NonlinearScoreError, UndefinedScoreError
from scoreforge.folds import Dataset, ExperimentSpec, Fold, FoldConfiguration, FoldingStrategy
from scoreforge.lp import check_assignment
from scoreforge.single import ReportedScore, SingleProblem, test_single

FIVE_FOLDS = FoldConfiguration.of([(100, 201), (100, 200), (100, 200), (101, 200), (101, 200)])

EHG_SCORES = {"acc": "0.9447", "sens": "0.9139", "spec": "0.9733"}
EHG_ALTERNATIVE_FOLDS = FoldConfiguration.of([(1, 101), (4, 97), (40, 61), (99, 2), (100, 1)])
EHG_ALTERNATIVE_WITNESS = {"tp": [1, 3, 38, 90, 96], "tn": [96, 92, 59, 2, 1]}


def scores(values: dict[str, str], eps: Optional[Fraction] = Fraction(1, 10**4)) -> tuple[ReportedScore, ...]:
    return tuple(ReportedScore.from_decimal(name, value, eps=eps) for name, value in values.items())


def five_fold_problem(values: dict[str, str], aggregation: Aggregation = Aggregation.MOS) -> AggregatedProblem:
    experiment = ExperimentSpec((Dataset(502, 1001, FIVE_FOLDS),), k=5, folding=FoldingStrategy.EXPLICIT)
    return AggregatedProblem(experiment, scores(values), aggregation)


def ehg_problem(p: int = 38, eps: Fraction = Fraction(1, 10**4), folds: Optional[FoldConfiguration] = None) -> AggregatedProblem:
    strategy = FoldingStrategy.EXPLICIT if folds is not None else FoldingStrategy.UNKNOWN
    experiment = ExperimentSpec((Dataset(p, 262, folds),), k=5, folding=strategy)
    return AggregatedProblem(experiment, scores(EHG_SCORES, eps), Aggregation.MOS)


@pytest.mark.timeout(10)
def test_reported_fold_means_are_feasible() -> None:
    verdict = test_mos(five_fold_problem({"acc": "0.8290", "sens": "0.7391", "spec": "0.8741"}))
    assert verdict.status is AssumptionStatus.CONSISTENT
    assert verdict.bundle == (FIVE_FOLDS,)
    means = fold_score_means(FIVE_FOLDS.folds, verdict.fold_counts)
    assert abs(means["acc"] - Fraction("0.8290")) <= Fraction(1, 10**4)
    assert abs(means["sens"] - Fraction("0.7391")) <= Fraction(1, 10**4)
    assert abs(means["spec"] - Fraction("0.8741")) <= Fraction(1, 10**4)


@pytest.mark.timeout(10)
def test_misreported_accuracy_is_infeasible() -> None:
    verdict = test_mos(five_fold_problem({"acc": "0.8280", "sens": "0.7391", "spec": "0.8741"}))
    assert verdict.status is AssumptionStatus.INCONSISTENT
    assert verdict.configurations_examined == 1


def test_score_of_means_uses_pooled_counts() -> None:
    problem = five_fold_problem({"acc": "0.8290", "sens": "0.7390", "spec": "0.8741"}, Aggregation.SOM)
    verdict = test_som(problem, CheckConfig(witness_cap=None))
    assert verdict.status is AssumptionStatus.CONSISTENT
    assert verdict.single is not None
    assert (371, 875) in verdict.single.witnesses


def test_unknown_aggregation_tests_both() -> None:
    verdict = test_aggregated(five_fold_problem({"acc": "0.8290", "sens": "0.7391", "spec": "0.8741"}, Aggregation.UNKNOWN))
    assert set(verdict.per_assumption) == {Aggregation.MOS, Aggregation.SOM}
    assert verdict.per_assumption[Aggregation.MOS].status is AssumptionStatus.CONSISTENT
    assert verdict.status is AssumptionStatus.CONSISTENT


def test_nonlinear_scores_are_not_applicable_under_mean_of_scores() -> None:
    problem = five_fold_problem({"mcc": "0.6215"}, Aggregation.UNKNOWN)
    verdict = test_aggregated(problem)
    mos = verdict.per_assumption[Aggregation.MOS]
    assert mos.status is AssumptionStatus.NOT_APPLICABLE
    assert not mos.applicable
    assert mos.not_applicable == ("mcc",)
    som = verdict.per_assumption[Aggregation.SOM]
    assert som.applicable
    assert verdict.status is som.status


def test_linear_scores_are_tested_next_to_skipped_ones() -> None:
    verdict = test_mos(five_fold_problem({"acc": "0.8290", "mcc": "0.6215"}))
    assert verdict.status is AssumptionStatus.CONSISTENT
    assert verdict.not_applicable == ("mcc",)


@pytest.mark.timeout(60)
@pytest.mark.parametrize("eps", [Fraction(1, 10**4), Fraction(5, 10**5)])
def test_ehg_report_is_inconsistent_over_every_configuration(eps: Fraction) -> None:
    verdict = test_mos(ehg_problem(eps=eps))
    assert verdict.status is AssumptionStatus.INCONSISTENT
    assert verdict.configurations_examined == 918


def test_alternative_class_sizes_admit_a_witness() -> None:
    verdict = test_mos(ehg_problem(p=244, folds=EHG_ALTERNATIVE_FOLDS))
    assert verdict.status is AssumptionStatus.CONSISTENT

    system = build_system(EHG_ALTERNATIVE_FOLDS.folds, scores(EHG_SCORES))
    assignment = {f"{figure}_{i}": value for figure, values in EHG_ALTERNATIVE_WITNESS.items() for i, value in enumerate(values)}
    assert check_assignment(system, assignment)

    strict = build_system(EHG_ALTERNATIVE_FOLDS.folds, scores(EHG_SCORES, Fraction(5, 10**5)))
    assert not check_assignment(strict, assignment)


def test_explicit_fold_without_positives_is_inconsistent_with_sensitivity() -> None:
    folds = FoldConfiguration.of([(0, 10), (5, 5), (5, 5)])
    experiment = ExperimentSpec((Dataset(10, 20, folds),), k=3, folding=FoldingStrategy.EXPLICIT)
    verdict = test_mos(AggregatedProblem(experiment, scores({"sens": "0.5"}), Aggregation.MOS))
    assert verdict.status is AssumptionStatus.INCONSISTENT
    assert "lacks" in verdict.reason


def test_stratified_folding_is_a_single_bundle() -> None:
    experiment = ExperimentSpec((Dataset(5, 8),), k=3, folding=FoldingStrategy.STRATIFIED)
    # folds (1, 3), (2, 2), (2, 3) all correct
    verdict = test_mos(AggregatedProblem(experiment, scores({"acc": "1.0000"}), Aggregation.MOS))
    assert verdict.status is AssumptionStatus.CONSISTENT
    assert verdict.fold_counts == ((1, 3), (2, 2), (2, 3))


def test_configuration_budget_makes_the_verdict_indeterminate() -> None:
    verdict = test_mos(ehg_problem(), CheckConfig(config_budget=10))
    assert verdict.status is AssumptionStatus.INDETERMINATE
    assert verdict.configurations_examined == 10
    assert "budget" in verdict.reason


def test_counting_feasible_configurations() -> None:
    experiment = ExperimentSpec((Dataset(4, 6),), k=2)
    problem = AggregatedProblem(experiment, scores({"acc": "0.5"}, eps=Fraction(1, 10)), Aggregation.MOS)
    counted = test_mos(problem, CheckConfig(count_all_configurations=True))
    first = test_mos(problem)
    assert counted.status is first.status is AssumptionStatus.CONSISTENT
    assert first.feasible_configurations is None
    assert counted.feasible_configurations is not None
    assert 1 <= counted.feasible_configurations <= counted.configurations_examined


def test_parallel_fan_out_gives_the_same_verdict(mocker: MockerFixture) -> None:
    mocker.patch("scoreforge.aggregated.ProcessPoolExecutor", ThreadPoolExecutor)
    sequential = test_mos(ehg_problem(), CheckConfig(jobs=1))
    parallel = test_mos(ehg_problem(), CheckConfig(jobs=3))
    assert parallel == sequential


def test_fold_extremes_add_per_fold_rows() -> None:
    folds = (Fold(5, 5), Fold(5, 5))
    extremes = (FoldExtremes("sens", Fraction("0.4"), Fraction("0.6"), Fraction(1, 100)),)
    system = build_system(folds, scores({"sens": "0.5"}), extremes)
    assert len(system.constraints) == 3
    assert check_assignment(system, {"tp_0": 2, "tp_1": 3, "tn_0": 0, "tn_1": 0})
    assert not check_assignment(system, {"tp_0": 1, "tp_1": 4, "tn_0": 0, "tn_1": 0})


def test_fold_extremes_must_be_ordered() -> None:
    with pytest.raises(ValueError):
        FoldExtremes("acc", Fraction("0.9"), Fraction("0.8"), Fraction(1, 100))


def test_build_system_rejects_nonlinear_and_undefined_scores() -> None:
    with pytest.raises(NonlinearScoreError):
        build_system((Fold(5, 5), Fold(5, 5)), scores({"ppv": "0.5"}))
    with pytest.raises(UndefinedScoreError):
        build_system((Fold(0, 5), Fold(5, 5)), scores({"sens": "0.5"}))


def test_mos_pruning() -> None:
    assert mos_pruning(["acc"]).require_positive is False
    assert mos_pruning(["sens"]).require_positive is True
    assert mos_pruning(["bacc"]).require_negative is True


@pytest.mark.parametrize(
    ("statuses", "expected"),
    [
        ([AssumptionStatus.INCONSISTENT, AssumptionStatus.INCONSISTENT], AssumptionStatus.INCONSISTENT),
        ([AssumptionStatus.INCONSISTENT, AssumptionStatus.CONSISTENT], AssumptionStatus.CONSISTENT),
        ([AssumptionStatus.INCONSISTENT, AssumptionStatus.INDETERMINATE], AssumptionStatus.INDETERMINATE),
        ([AssumptionStatus.NOT_APPLICABLE, AssumptionStatus.INCONSISTENT], AssumptionStatus.INCONSISTENT),
        ([AssumptionStatus.NOT_APPLICABLE], AssumptionStatus.NOT_APPLICABLE),
    ],
)
def test_combine_statuses(statuses: list[AssumptionStatus], expected: AssumptionStatus) -> None:
    assert combine_statuses(statuses) is expected


@pytest.mark.timeout(10)
def test_configuration_budget_bounds_repeated_unknown_folds() -> None:
    experiment = ExperimentSpec((Dataset(38, 262),), k=5, repeats=3)
    # no fold counts give zero sensitivity and perfect balanced accuracy at once
    problem = AggregatedProblem(experiment, scores({"sens": "0.0000", "bacc": "1.0000"}), Aggregation.MOS)
    verdict = test_mos(problem, CheckConfig(config_budget=10, blowup_threshold=10**30))
    assert verdict.status is AssumptionStatus.INDETERMINATE
    assert verdict.configurations_examined == 10
    assert verdict.reason == "configuration budget exhausted"


IRREGULAR_FOLDS = [(4, 17, 3, 12), (20, 6, 18, 4), (20, 19, 15, 17), (23, 1, 20, 1), (27, 13, 22, 10)]


def random_truth(rng: random.Random) -> tuple[FoldConfiguration, tuple[tuple[int, int], ...]]:
    configuration = FoldConfiguration.of([(rng.randint(1, 10), rng.randint(1, 10)) for _ in range(rng.randint(2, 4))])
    counts = tuple((rng.randint(0, fold.p), rng.randint(0, fold.n)) for fold in configuration.folds)
    return configuration, counts


def reported_means(configuration: FoldConfiguration, counts: tuple[tuple[int, int], ...]) -> dict[str, str]:
    return {score_id: f"{float(value):.4f}" for score_id, value in fold_score_means(configuration.folds, counts).items()}


def explicit_problem(
    configuration: FoldConfiguration, values: dict[str, str], eps: Fraction, aggregation: Aggregation = Aggregation.MOS
) -> AggregatedProblem:
    experiment = ExperimentSpec((Dataset(configuration.p, configuration.n, configuration),), k=len(configuration), folding=FoldingStrategy.EXPLICIT)
    return AggregatedProblem(experiment, scores(values, eps), aggregation)


def assert_witness_reproduces(configuration: FoldConfiguration, verdict: AssumptionVerdict, values: dict[str, str], eps: Fraction) -> None:
    assert verdict.bundle == (configuration,)
    means = fold_score_means(configuration.folds, verdict.fold_counts)
    for score_id, value in values.items():
        assert abs(means[score_id] - Fraction(value)) <= eps, score_id


@pytest.mark.timeout(120)
def test_means_of_true_fold_counts_are_consistent() -> None:
    rng = random.Random(7)
    for _ in range(40):
        configuration, counts = random_truth(rng)
        values = reported_means(configuration, counts)
        verdict = test_mos(explicit_problem(configuration, values, Fraction(1, 10**4)))
        assert verdict.status is AssumptionStatus.CONSISTENT, (configuration.pairs(), counts)
        assert_witness_reproduces(configuration, verdict, values, Fraction(1, 10**4))


@pytest.mark.timeout(60)
def test_means_of_irregular_folds_are_consistent() -> None:
    configuration = FoldConfiguration.of([(p, n) for p, n, _, _ in IRREGULAR_FOLDS])
    counts = tuple((tp, tn) for _, _, tp, tn in IRREGULAR_FOLDS)
    values = reported_means(configuration, counts)
    assert set(values) == {"acc", "bacc", "sens", "spec"}
    verdict = test_mos(explicit_problem(configuration, values, Fraction(1, 10**4)))
    assert verdict.status is AssumptionStatus.CONSISTENT
    assert_witness_reproduces(configuration, verdict, values, Fraction(1, 10**4))


def test_score_of_means_is_the_single_test_on_pooled_counts() -> None:
    rng = random.Random(11)
    for _ in range(20):
        configuration, counts = random_truth(rng)
        p, n = configuration.p, configuration.n
        tp, tn = sum(c[0] for c in counts), sum(c[1] for c in counts)
        pooled = {"acc": Fraction(tp + tn, p + n), "sens": Fraction(tp, p), "spec": Fraction(tn, n)}
        values = {score_id: f"{float(value + Fraction(rng.choice([0, 0, 3]), 100)):.4f}" for score_id, value in pooled.items()}
        som = test_som(explicit_problem(configuration, values, Fraction(1, 10**4), Aggregation.SOM), CheckConfig(witness_cap=None))
        single = test_single(SingleProblem(p, n, scores(values)), None)
        assert som.single == single
        assert (som.status is AssumptionStatus.CONSISTENT) == single.consistent


@pytest.mark.timeout(120)
def test_wider_uncertainty_keeps_every_witness() -> None:
    rng = random.Random(13)
    for _ in range(15):
        configuration, counts = random_truth(rng)
        values = {
            score_id: f"{min(1.0, max(0.0, float(Fraction(value) + Fraction(rng.randint(-30, 30), 10**4)))):.4f}"
            for score_id, value in reported_means(configuration, counts).items()
        }
        previous: Optional[AssumptionVerdict] = None
        for eps in (Fraction(1, 10**4), Fraction(1, 10**3), Fraction(1, 10**2)):
            verdict = test_mos(explicit_problem(configuration, values, eps))
            assert verdict.status in (AssumptionStatus.CONSISTENT, AssumptionStatus.INCONSISTENT)
            if previous is not None and previous.status is AssumptionStatus.CONSISTENT:
                assert verdict.status is AssumptionStatus.CONSISTENT
                system = build_system(configuration.folds, scores(values, eps))
                assignment = {f"{figure}_{i}": count[j] for i, count in enumerate(previous.fold_counts) for j, figure in enumerate(("tp", "tn"))}
                assert check_assignment(system, assignment)
            previous = verdict
