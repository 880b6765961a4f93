import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Iterator, Optional

import pytest
from pytest_mock import MockerFixture

from scoreforge import __version__
from scoreforge.cli import main, runner
from scoreforge.cli.document import build_problems, parse_document
from scoreforge.cli.runner import EXIT_INCONSISTENT, EXIT_INPUT_ERROR, EXIT_OK, EXIT_UNDECIDED, exit_code, run_problems
from scoreforge.config import CheckConfig
from scoreforge.exceptions import TooLargeError
from scoreforge.single import SingleProblem, Verdict

FIVE_FOLDS = [{"p": 100, "n": 201}, {"p": 100, "n": 200}, {"p": 100, "n": 200}, {"p": 101, "n": 200}, {"p": 101, "n": 200}]


@pytest.fixture(autouse=True)
def _restore_warnings() -> Iterator[None]:
    yield
    logging.captureWarnings(False)


def single_problem(accuracy: str = "0.6821", p: int = 1000) -> dict[str, Any]:
    return {"id": f"single-{p}-{accuracy}", "testset": {"p": p, "n": 6000}, "scores": {"acc": accuracy, "npv": "0.9401", "f1p": "0.4004"}}


def five_fold_problem(scores: dict[str, str], aggregation: str = "mos") -> dict[str, Any]:
    return {
        "id": "five-fold",
        "testset": {"p": 502, "n": 1001},
        "folding": {"k": 5, "folds": FIVE_FOLDS},
        "aggregation": aggregation,
        "scores": scores,
        "eps": "0.0001",
    }


def write(tmp_path: Path, *problems: dict[str, Any]) -> str:
    path = tmp_path / "problems.json"
    path.write_text(json.dumps({"schema_version": "1", "problems": list(problems)}))
    return str(path)


def run(tmp_path: Path, capsys: pytest.CaptureFixture[str], problems: list[dict[str, Any]], *options: str) -> tuple[int, dict[str, Any], str]:
    code = main(["run", write(tmp_path, *problems), *options])
    captured = capsys.readouterr()
    output = json.loads(captured.out) if captured.out else {}
    return code, output, captured.err


def test_consistent_single_report_lists_every_witness(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code, output, _ = run(tmp_path, capsys, [single_problem()], "--witnesses", "all")
    assert code == EXIT_OK
    assert output["schema_version"] == "1"
    (result,) = output["results"]
    assert result["kind"] == "single"
    assert result["status"] == "consistent"
    assert result["verdicts"]["single"]["witnesses"] == [{"tp": 743, "tn": 4031}, {"tp": 743, "tn": 4032}]
    assert result["verdicts"]["single"]["truncated"] is False


def test_first_witness_only(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    _, output, _ = run(tmp_path, capsys, [single_problem()], "--witnesses", "first")
    verdict = output["results"][0]["verdicts"]["single"]
    assert len(verdict["witnesses"]) == 1
    assert verdict["truncated"] is True


def test_any_inconsistent_problem_sets_exit_one(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code, output, _ = run(tmp_path, capsys, [single_problem(), single_problem("0.6801")])
    assert code == EXIT_INCONSISTENT
    assert [r["status"] for r in output["results"]] == ["consistent", "inconsistent"]
    assert output["results"][1]["verdicts"]["single"]["witnesses"] == []


def test_mean_of_scores_witness_is_reported_per_fold(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code, output, _ = run(tmp_path, capsys, [five_fold_problem({"acc": "0.8290", "sens": "0.7391", "spec": "0.8741"})])
    assert code == EXIT_OK
    mos = output["results"][0]["verdicts"]["mos"]
    assert mos["status"] == "consistent"
    assert mos["configurations_examined"] == 1
    assert [(fold["p"], fold["n"]) for fold in mos["witness"]] == [(f["p"], f["n"]) for f in FIVE_FOLDS]
    assert all(0 <= fold["tp"] <= fold["p"] and 0 <= fold["tn"] <= fold["n"] for fold in mos["witness"])


def test_misreported_mean_is_inconsistent(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code, output, _ = run(tmp_path, capsys, [five_fold_problem({"acc": "0.8280", "sens": "0.7391", "spec": "0.8741"})])
    assert code == EXIT_INCONSISTENT
    assert output["results"][0]["verdicts"]["mos"]["status"] == "inconsistent"


def test_not_applicable_sets_exit_two(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code, output, _ = run(tmp_path, capsys, [five_fold_problem({"mcc": "0.6215"})])
    assert code == EXIT_UNDECIDED
    result = output["results"][0]
    assert result["status"] == "not_applicable"
    assert result["verdicts"]["mos"]["not_applicable"] == ["mcc"]


def test_unknown_aggregation_reports_both_assumptions(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code, output, _ = run(tmp_path, capsys, [five_fold_problem({"acc": "0.8290", "sens": "0.7391", "spec": "0.8741"}, "unknown")])
    assert code == EXIT_OK
    assert set(output["results"][0]["verdicts"]) == {"mos", "som"}


def test_unknown_score_is_an_input_error_with_a_hint(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    problem = {"id": "typo", "testset": {"p": 10, "n": 10}, "scores": {"acuracy": "0.5"}}
    code, output, err = run(tmp_path, capsys, [problem])
    assert code == EXIT_INPUT_ERROR
    assert output == {}
    assert "/problems/0/scores/acuracy" in err
    assert "hint:" in err and "'acc'" in err


def test_negative_eps_is_an_input_error(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    problem = {"id": "eps", "testset": {"p": 10, "n": 10}, "scores": {"acc": "0.5"}, "eps": -0.1}
    code, _, err = run(tmp_path, capsys, [problem])
    assert code == EXIT_INPUT_ERROR
    assert "error: /problems/0/eps" in err


def test_every_schema_error_is_printed(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    problems = [
        {"id": "a", "testset": {"p": 0, "n": 10}, "scores": {"acc": "0.5"}},
        {"id": "b", "testset": {"p": 10, "n": 10}, "scores": {"acc": "0.5"}, "folding": {"k": 1}},
    ]
    code, _, err = run(tmp_path, capsys, problems)
    assert code == EXIT_INPUT_ERROR
    assert "/problems/0/testset/p" in err
    assert "/problems/1/folding/k" in err


@pytest.mark.parametrize("option", ["--jobs", "--budget-nodes", "--budget-configs"])
def test_nonpositive_option_is_a_configuration_error(tmp_path: Path, capsys: pytest.CaptureFixture[str], option: str) -> None:
    code, _, err = run(tmp_path, capsys, [single_problem()], option, "0")
    assert code == EXIT_INPUT_ERROR
    assert f"error: {option}" in err


def test_invalid_jobs_environment_is_a_configuration_error(
    tmp_path: Path, capsys: pytest.CaptureFixture[str], monkeypatch: pytest.MonkeyPatch
) -> None:
    monkeypatch.setenv("SCOREFORGE_JOBS", "many")
    code, _, err = run(tmp_path, capsys, [single_problem()])
    assert code == EXIT_INPUT_ERROR
    assert "SCOREFORGE_JOBS" in err


def test_missing_file_is_an_input_error(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["run", str(tmp_path / "absent.json")]) == EXIT_INPUT_ERROR
    assert "cannot read input" in capsys.readouterr().err


def test_count_configs(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    problem = {"id": "count", "testset": {"p": 30, "n": 300}, "folding": {"k": 5}, "aggregation": "mos", "scores": {"acc": "0.9"}}
    code, output, _ = run(tmp_path, capsys, [problem, single_problem()], "--count-configs")
    assert code == EXIT_OK
    counted, skipped = output["results"]
    assert "status" not in counted
    assert counted["k"] == 5
    assert counted["datasets"] == [{"p": 30, "n": 300, "configurations": 673, "pruned_configurations": 673}]
    assert skipped["reason"] == "no folding described"


def test_count_feasible(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    problem = {"id": "small", "testset": {"p": 4, "n": 6}, "folding": {"k": 2}, "aggregation": "mos", "scores": {"acc": "0.5"}, "eps": "0.1"}
    code, output, _ = run(tmp_path, capsys, [problem], "--count-feasible")
    assert code == EXIT_OK
    mos = output["results"][0]["verdicts"]["mos"]
    assert 1 <= mos["feasible_configurations"] <= mos["configurations_examined"]


def test_timing(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    _, output, _ = run(tmp_path, capsys, [single_problem()], "--timing")
    assert output["results"][0]["elapsed_seconds"] >= 0


def test_validate(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["validate", write(tmp_path, single_problem())]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert main(["validate", write(tmp_path, {"id": "x", "testset": {"p": 1, "n": 1}, "scores": {"acuracy": "1"}})]) == EXIT_INPUT_ERROR


def test_version(capsys: pytest.CaptureFixture[str]) -> None:
    with pytest.raises(SystemExit) as exc_info:
        main(["--version"])
    assert exc_info.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_failing_problem_does_not_stop_the_batch(mocker: MockerFixture) -> None:
    mocker.patch("scoreforge.cli.runner.test_single", side_effect=TooLargeError(message="search space too large"))
    document = parse_document({"schema_version": "1", "problems": [single_problem(), five_fold_problem({"acc": "0.8290"})]})
    failed, folded = run_problems(build_problems(document), CheckConfig())
    assert failed["status"] == "indeterminate"
    assert failed["error"] == "GUARD_TOO_LARGE: search space too large"
    assert folded["status"] == "consistent"
    assert exit_code([failed, folded]) == EXIT_UNDECIDED


def test_unexpected_error_is_reported_for_its_problem_only(mocker: MockerFixture, caplog: pytest.LogCaptureFixture) -> None:
    real = runner.test_single

    def fail_on_first(problem: SingleProblem, witness_cap: Optional[int]) -> Verdict:
        if problem.p == 1000:
            raise RuntimeError("boom")
        return real(problem, witness_cap)

    mocker.patch("scoreforge.cli.runner.test_single", side_effect=fail_on_first)
    problems = [single_problem(), five_fold_problem({"acc": "0.8290"}), single_problem(p=900)]
    document = parse_document({"schema_version": "1", "problems": problems})
    with caplog.at_level(logging.ERROR, logger="scoreforge"):
        failed, folded, single = run_problems(build_problems(document), CheckConfig())
    assert failed["status"] == "indeterminate"
    assert failed["error"] == "RuntimeError: boom"
    assert folded["status"] == "consistent"
    assert "error" not in single and single["status"] in ("consistent", "inconsistent")
    assert "Problem single-1000-0.6821 failed: boom" in caplog.text


def test_parallel_batch_keeps_input_order(mocker: MockerFixture) -> None:
    executor = mocker.patch("scoreforge.cli.runner.ProcessPoolExecutor", side_effect=ThreadPoolExecutor)
    problems = [single_problem(accuracy) for accuracy in ("0.6821", "0.6801", "0.6811", "0.6821")]
    problems[-1]["id"] = "last"
    built = build_problems(parse_document({"schema_version": "1", "problems": problems}))
    sequential = run_problems(built, CheckConfig(jobs=1))
    parallel = run_problems(built, CheckConfig(jobs=2))
    assert executor.call_count == 1
    assert parallel == sequential
    assert [r["status"] for r in parallel] == ["consistent", "inconsistent", "inconsistent", "consistent"]


@pytest.mark.parametrize(
    ("statuses", "expected"),
    [
        (["consistent", "consistent"], EXIT_OK),
        (["consistent", "not_applicable"], EXIT_UNDECIDED),
        (["indeterminate", "inconsistent"], EXIT_INCONSISTENT),
        ([None, "consistent"], EXIT_OK),
        ([], EXIT_OK),
    ],
)
def test_exit_code(statuses: list[Any], expected: int) -> None:
    results = [{"id": str(i)} if status is None else {"id": str(i), "status": status} for i, status in enumerate(statuses)]
    assert exit_code(results) == expected
