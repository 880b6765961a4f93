"""End-to-end runs of the documents in corpus/ through the command line."""

import json
import logging
from pathlib import Path
from typing import Any, Iterator

import pytest

from scoreforge.cli import main
from scoreforge.cli.runner import EXIT_INCONSISTENT, EXIT_OK, EXIT_UNDECIDED

CORPUS = Path(__file__).parent / "corpus"


@pytest.fixture(autouse=True)
def _restore_warnings() -> Iterator[None]:
    yield
    logging.captureWarnings(False)


def run(capsys: pytest.CaptureFixture[str], name: str, *options: str) -> tuple[int, list[dict[str, Any]]]:
    code = main(["run", str(CORPUS / name), *options])
    return code, json.loads(capsys.readouterr().out)["results"]


@pytest.mark.parametrize("name", sorted(path.name for path in CORPUS.glob("*.json")))
def test_corpus_documents_are_valid(name: str) -> None:
    assert main(["validate", str(CORPUS / name)]) == EXIT_OK


@pytest.mark.timeout(30)
def test_consistent_single_report(capsys: pytest.CaptureFixture[str]) -> None:
    code, (result,) = run(capsys, "single_consistent.json", "--witnesses", "all")
    assert code == EXIT_OK
    assert result["verdicts"]["single"]["witnesses"] == [{"tp": 743, "tn": 4031}, {"tp": 743, "tn": 4032}]


@pytest.mark.timeout(30)
def test_inconsistent_single_reports(capsys: pytest.CaptureFixture[str]) -> None:
    code, results = run(capsys, "single_inconsistent.json")
    assert code == EXIT_INCONSISTENT
    assert [r["status"] for r in results] == ["inconsistent", "inconsistent"]


@pytest.mark.timeout(30)
def test_five_fold_means_and_pooled_scores(capsys: pytest.CaptureFixture[str]) -> None:
    code, (mos, som) = run(capsys, "five_fold_means.json", "--witnesses", "all")
    assert code == EXIT_OK
    assert mos["verdicts"]["mos"]["status"] == "consistent"
    assert som["verdicts"]["som"]["status"] == "consistent"
    assert {"tp": 371, "tn": 875} in som["verdicts"]["som"]["witnesses"]


@pytest.mark.timeout(30)
def test_five_fold_misreported_accuracy(capsys: pytest.CaptureFixture[str]) -> None:
    code, (result,) = run(capsys, "five_fold_misreported.json")
    assert code == EXIT_INCONSISTENT
    assert result["verdicts"]["mos"]["configurations_examined"] == 1


@pytest.mark.timeout(120)
def test_reported_class_sizes_fit_no_fold_configuration(capsys: pytest.CaptureFixture[str]) -> None:
    code, (result,) = run(capsys, "ehg_unknown_folds.json")
    assert code == EXIT_INCONSISTENT
    assert result["verdicts"]["mos"] == {"status": "inconsistent", "configurations_examined": 918}


@pytest.mark.timeout(30)
def test_oversampled_positives_admit_a_witness(capsys: pytest.CaptureFixture[str]) -> None:
    code, (result,) = run(capsys, "ehg_alternative_folds.json")
    assert code == EXIT_OK
    witness = result["verdicts"]["mos"]["witness"]
    assert [(fold["p"], fold["n"]) for fold in witness] == [(1, 101), (4, 97), (40, 61), (99, 2), (100, 1)]


@pytest.mark.timeout(120)
def test_configuration_budget_leaves_the_verdict_open(capsys: pytest.CaptureFixture[str]) -> None:
    code, (result,) = run(capsys, "ehg_unknown_folds.json", "--budget-configs", "10")
    assert code == EXIT_UNDECIDED
    assert result["status"] == "indeterminate"
    assert result["verdicts"]["mos"]["reason"] == "configuration budget exhausted"
