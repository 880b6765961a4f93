"""Batch execution of problems and rendering of the verdict document."""

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Sequence

from scoreforge.aggregated import (
    AggregatedProblem,
    AggregatedVerdict,
    AssumptionStatus,
    AssumptionVerdict,
    mos_pruning,
    test_aggregated,
)
from scoreforge.cli.document import SCHEMA_VERSION, BuiltProblem
from scoreforge.config import CheckConfig
from scoreforge.exceptions import ScoreForgeError
from scoreforge.folds import NO_PRUNING, FoldingStrategy, bundle_folds, count_configurations
from scoreforge.scores import LINEAR_SCORE_IDS
from scoreforge.single import SingleProblem, Verdict, test_single

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INCONSISTENT = 1
EXIT_UNDECIDED = 2
EXIT_INPUT_ERROR = 64

Result = dict[str, Any]


def _single_verdict(verdict: Verdict) -> Result:
    return {
        "status": (AssumptionStatus.CONSISTENT if verdict.consistent else AssumptionStatus.INCONSISTENT).value,
        "witnesses": [{"tp": tp, "tn": tn} for tp, tn in verdict.witnesses],
        "truncated": verdict.truncated,
    }


def _assumption_verdict(verdict: AssumptionVerdict) -> Result:
    if verdict.single is not None:
        result = _single_verdict(verdict.single)
    else:
        result = {"status": verdict.status.value}
    if verdict.bundle is not None:
        folds = bundle_folds(verdict.bundle)
        result["witness"] = [{"p": fold.p, "n": fold.n, "tp": tp, "tn": tn} for fold, (tp, tn) in zip(folds, verdict.fold_counts)]
    if verdict.single is None:
        result["configurations_examined"] = verdict.configurations_examined
    if verdict.feasible_configurations is not None:
        result["feasible_configurations"] = verdict.feasible_configurations
    if verdict.not_applicable:
        result["not_applicable"] = list(verdict.not_applicable)
    if verdict.reason:
        result["reason"] = verdict.reason
    return result


def _aggregated_result(verdict: AggregatedVerdict) -> Result:
    return {
        "status": verdict.status.value,
        "verdicts": {aggregation.value: _assumption_verdict(entry) for aggregation, entry in verdict.per_assumption.items()},
    }


def _count_result(problem: AggregatedProblem) -> Result:
    experiment = problem.experiment
    if experiment.folding is not FoldingStrategy.UNKNOWN:
        return {"reason": "fold configuration is given"}
    pruning = mos_pruning([score.id for score in problem.scores if score.id in LINEAR_SCORE_IDS])
    datasets = []
    for dataset in experiment.datasets:
        datasets.append(
            {
                "p": dataset.p,
                "n": dataset.n,
                "configurations": count_configurations(dataset.p, dataset.n, experiment.k, NO_PRUNING),
                "pruned_configurations": count_configurations(dataset.p, dataset.n, experiment.k, pruning),
            }
        )
    return {"k": experiment.k, "datasets": datasets}


def run_problem(built: BuiltProblem, config: CheckConfig, count_only: bool = False, timing: bool = False) -> Result:
    """Test one problem; failures are reported in the result rather than raised."""
    started = time.perf_counter()
    result: Result = {"id": built.id}
    problem = built.problem
    try:
        if isinstance(problem, SingleProblem):
            result["kind"] = "single"
            if count_only:
                result["reason"] = "no folding described"
            else:
                verdict = _single_verdict(test_single(problem, config.witness_cap))
                result["status"] = verdict["status"]
                result["verdicts"] = {"single": verdict}
        else:
            result["kind"] = "aggregated"
            result.update(_count_result(problem) if count_only else _aggregated_result(test_aggregated(problem, config)))
    except Exception as e:
        logger.exception(f"Problem {built.id} failed: {e}")
        result["status"] = AssumptionStatus.INDETERMINATE.value
        result["error"] = f"{e.error_code}: {e.message}" if isinstance(e, ScoreForgeError) else f"{type(e).__name__}: {e}"
    if timing:
        result["elapsed_seconds"] = round(time.perf_counter() - started, 6)
    logger.info(f"Problem {built.id}: {result.get('status', 'counted')}")
    return result


def _run_one(args: tuple[BuiltProblem, CheckConfig, bool, bool]) -> Result:
    return run_problem(*args)


def run_problems(problems: Sequence[BuiltProblem], config: CheckConfig, count_only: bool = False, timing: bool = False) -> list[Result]:
    """Run a batch, in parallel across problems when ``config.jobs`` allows; results keep input order."""
    if config.jobs > 1 and len(problems) > 1:
        # configuration fan-out inside a worker would nest pools
        inner = config.model_copy(update={"jobs": 1})
        with ProcessPoolExecutor(max_workers=min(config.jobs, len(problems))) as pool:
            return list(pool.map(_run_one, [(problem, inner, count_only, timing) for problem in problems]))
    return [run_problem(problem, config, count_only, timing) for problem in problems]


def exit_code(results: Sequence[Result]) -> int:
    """1 if any problem is inconsistent, else 2 if any is undecided, else 0; count-only results carry no status."""
    statuses = [AssumptionStatus(result["status"]) for result in results if "status" in result]
    if AssumptionStatus.INCONSISTENT in statuses:
        return EXIT_INCONSISTENT
    if any(status in (AssumptionStatus.INDETERMINATE, AssumptionStatus.NOT_APPLICABLE) for status in statuses):
        return EXIT_UNDECIDED
    return EXIT_OK


def render(results: Sequence[Result]) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, "results": list(results)}, sort_keys=True, indent=2)
