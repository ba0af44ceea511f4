"""
Tests for the example corpus runner.
"""
import json

import pytest

from src.models.corpus import CheckKind, ExampleCase
from src.services.corpus import CorpusRunner, format_table, run_corpus

FAST_CASES = [
    "sech_closed_form",
    "sech_quadruple",
    "sqrt3_quadruple",
    "sqrt3_tail",
    "theta1_zero_trivial",
    "theta2_zero_trivial",
    "padded_reduction",
    "two_by_two_continuous_roundtrip",
    "two_by_two_discrete_quadruple",
]


def test_every_case_document_validates(corpus_dir):
    runner = CorpusRunner(str(corpus_dir))
    paths = runner.case_paths()
    assert len(paths) >= 20
    for path in paths:
        case = ExampleCase.model_validate_json(path.read_text(encoding="utf-8"))
        assert case.name == path.stem
        for ref in (case.realization, case.sweep):
            if ref is not None:
                assert (corpus_dir / ref).exists(), ref


def test_fast_cases_pass(corpus_dir):
    summary = run_corpus(str(corpus_dir), FAST_CASES)
    failures = [(row.name, row.deviation, row.message) for row in summary.rows if row.status != "pass"]
    assert not failures
    assert summary.passed == len(FAST_CASES)


@pytest.mark.slow
def test_full_corpus(corpus_dir):
    summary = run_corpus(str(corpus_dir))
    assert summary.failed == 0 and summary.errored == 0, format_table(summary)


def write_case(directory, name, **fields):
    (directory / "cases").mkdir(parents=True, exist_ok=True)
    payload = {"name": name, "provenance": "[TRIVIAL]", "tolerance": 1e-9, **fields}
    (directory / "cases" / f"{name}.json").write_text(json.dumps(payload), encoding="utf-8")


def test_broken_cases_only_affect_their_row(tmp_path, corpus_dir):
    write_case(tmp_path, "unknown_check", check="quadruple_level", realization="realizations/absent.json")
    write_case(tmp_path, "absent_realization", check=CheckKind.DECAY.value, realization="realizations/absent.json")
    (tmp_path / "cases" / "garbage.json").write_text("[]", encoding="utf-8")
    write_case(
        tmp_path,
        "trivial",
        check=CheckKind.TRIVIAL_POTENTIAL.value,
        quadruple=json.loads((corpus_dir / "cases" / "theta1_zero_trivial.json").read_text(encoding="utf-8"))["quadruple"],
    )
    summary = run_corpus(str(tmp_path))
    status = {row.name: row.status for row in summary.rows}
    assert status == {
        "absent_realization": "error",
        "garbage": "error",
        "unknown_check": "error",
        "trivial": "pass",
    }
    assert (summary.passed, summary.failed, summary.errored) == (1, 0, 3)


def test_format_table(corpus_dir):
    summary = run_corpus(str(corpus_dir), ["sech_quadruple"])
    table = format_table(summary)
    assert table.splitlines()[0].startswith("case")
    assert "sech_quadruple" in table
    assert table.endswith("passed=1 failed=0 errored=0")
