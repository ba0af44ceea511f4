"""
Runner for the example corpus under data/corpus/.

Layout:
    cases/*.json          ExampleCase documents (one row each)
    realizations/*.json   realization inputs referenced by cases and usable by the CLI
    stability/*.json      SweepConfig documents
"""
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import structlog

from src.config.settings import settings
from src.models.corpus import CheckKind, CorpusRow, CorpusSummary, ExampleCase
from src.models.exceptions import SchemaError
from src.models.schemas import Convention, Verdict
from src.models.sweep import SweepConfig
from src.services.forward_verify import weyl_defect_continuous, weyl_defect_discrete
from src.services.inverse_continuous import decay_profile, solve_inverse_continuous
from src.services.inverse_continuous import verify_pipeline as verify_continuous
from src.services.inverse_continuous import weyl_continuous
from src.services.inverse_discrete import asymptotics_check, c_k_sequence, solve_inverse_discrete
from src.services.inverse_discrete import verify_pipeline as verify_discrete
from src.services.inverse_discrete import weyl_discrete
from src.services.matcore import operator_norm
from src.services.quadruple import quadruple_distance, signature_matrix
from src.services.reduction import reduce_to_strongly_admissible
from src.services.serialization import load_document, load_realization, quadruple_from_document
from src.services.stability_harness import run_sweep, uniqueness_experiment

logger = structlog.get_logger()

CLOSED_FORMS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "two_sech_two_x": lambda xs: 2.0 / np.cosh(2.0 * xs),
}


class CorpusRunner:
    """Evaluates ExampleCase documents relative to a corpus directory."""

    def __init__(self, corpus_dir: Optional[str] = None):
        self.corpus_dir = Path(corpus_dir or settings.corpus_dir)

    def case_paths(self) -> List[Path]:
        return sorted((self.corpus_dir / "cases").glob("*.json"))

    def _realization(self, case: ExampleCase):
        if case.realization is None:
            raise SchemaError(f"case {case.name} has no realization")
        return load_realization(str(self.corpus_dir / case.realization))

    def _solve(self, case: ExampleCase):
        r = self._realization(case)
        if r.convention == Convention.CONTINUOUS:
            return r, solve_inverse_continuous(r, reduce=bool(case.parameters.get("reduce", False)))
        return r, solve_inverse_discrete(r, K=case.parameters.get("K"), reduce=bool(case.parameters.get("reduce", False)))

    def measure(self, case: ExampleCase) -> float:
        """Deviation of the case's measured quantity from its expected value."""
        if case.check == CheckKind.CLOSED_FORM:
            _, p = self._solve(case)
            xs = np.linspace(0.0, float(case.parameters.get("x_max", 5.0)), int(case.parameters.get("samples", 400)))
            norms = np.array([operator_norm(v) for v in p.sample(xs)])
            return float(np.max(np.abs(norms - CLOSED_FORMS[case.closed_form](xs))))

        if case.check == CheckKind.QUADRUPLE:
            _, p = self._solve(case)
            return quadruple_distance(p.quadruple, quadruple_from_document(case.expected_quadruple))

        if case.check == CheckKind.WEYL_ROUNDTRIP:
            r, p = self._solve(case)
            report = verify_continuous(p) if r.convention == Convention.CONTINUOUS else verify_discrete(p)
            return report.weyl_agreement

        if case.check == CheckKind.WEYL_DEFECT:
            return self._weyl_defect(case)

        if case.check == CheckKind.DECAY:
            _, p = self._solve(case)
            profile = decay_profile(p)
            return profile.final_norm / profile.peak_norm if profile.peak_norm > 0 else profile.final_norm

        if case.check == CheckKind.DISCRETE_TAIL:
            _, p = self._solve(case)
            report = asymptotics_check(p)
            return report.tail_value if report.tail_value is not None else float("inf")

        if case.check == CheckKind.TRIVIAL_POTENTIAL:
            q = quadruple_from_document(case.quadruple)
            K = int(case.parameters.get("K", settings.discrete_min_K))
            j = signature_matrix(q.m1, q.m2)
            return max((operator_norm(C - j) for C in c_k_sequence(q, K).C), default=0.0)

        if case.check == CheckKind.REDUCTION:
            q = quadruple_from_document(case.quadruple)
            K = int(case.parameters.get("K", settings.discrete_min_K))
            reduced, report = reduce_to_strongly_admissible(q)
            if reduced.n >= q.n:
                return float("inf")
            original = c_k_sequence(q, K, method="recursion").C
            shrunk = c_k_sequence(reduced, K).C
            return max(operator_norm(a - b) for a, b in zip(original, shrunk))

        if case.check == CheckKind.STABILITY:
            cfg = load_document(str(self.corpus_dir / case.sweep), SweepConfig)
            result = run_sweep(cfg)
            return 0.0 if result.verdict == Verdict.PASS else 1.0

        if case.check == CheckKind.UNIQUENESS:
            r = self._realization(case)
            report = uniqueness_experiment(r, trials=int(case.parameters.get("trials", 20)))
            return max((d / (1.0 + c) for d, c in zip(report.deviations, report.conditions)), default=0.0)

        raise SchemaError(f"unknown check {case.check}")

    def _weyl_defect(self, case: ExampleCase) -> float:
        r, p = self._solve(case)
        points = [complex(str(z).replace("i", "j")) for z in case.parameters.get("z", ["2i", "3i", "4i"])]
        worst = 0.0
        for z in points:
            if r.convention == Convention.CONTINUOUS:
                report = weyl_defect_continuous(p, lambda w: weyl_continuous(p.quadruple, w), z)
            else:
                report = weyl_defect_discrete(p, lambda w: weyl_discrete(p.quadruple, w), z)
            worst = max(worst, report.tail_ratio if report.verdict != Verdict.FAIL else float("inf"))
        return worst

    def run_case(self, path: Path) -> CorpusRow:
        try:
            case = load_document(str(path), ExampleCase)
        except SchemaError as e:
            return CorpusRow(name=path.stem, status="error", message=str(e))
        try:
            deviation = self.measure(case)
        except Exception as e:
            logger.warning("corpus_case_errored", case=case.name, error=str(e))
            return CorpusRow(name=case.name, check=case.check, provenance=case.provenance,
                             tolerance=case.tolerance, status="error", message=f"{type(e).__name__}: {e}")
        status = "pass" if deviation <= case.tolerance else "fail"
        return CorpusRow(name=case.name, check=case.check, provenance=case.provenance,
                         deviation=deviation, tolerance=case.tolerance, status=status)


def run_corpus(corpus_dir: Optional[str] = None, names: Optional[List[str]] = None) -> CorpusSummary:
    """
    Evaluate every case file; a failing or missing input only affects its own row.
    """
    runner = CorpusRunner(corpus_dir)
    paths = runner.case_paths()
    if names:
        paths = [p for p in paths if p.stem in names]
    logger.info("corpus_started", corpus_dir=str(runner.corpus_dir), cases=len(paths))
    rows = [runner.run_case(path) for path in paths]
    summary = CorpusSummary(
        rows=rows,
        passed=sum(r.status == "pass" for r in rows),
        failed=sum(r.status == "fail" for r in rows),
        errored=sum(r.status == "error" for r in rows),
    )
    logger.info("corpus_completed", passed=summary.passed, failed=summary.failed, errored=summary.errored)
    return summary


def format_table(summary: CorpusSummary) -> str:
    """Fixed-width pass/fail table."""
    lines = [f"{'case':<32} {'check':<18} {'deviation':>12} {'tolerance':>10}  status"]
    for row in summary.rows:
        deviation = "-" if row.deviation is None else f"{row.deviation:.3e}"
        tolerance = "-" if row.tolerance is None else f"{row.tolerance:.1e}"
        check = row.check.value if row.check else "-"
        lines.append(f"{row.name:<32} {check:<18} {deviation:>12} {tolerance:>10}  {row.status}")
    lines.append(f"passed={summary.passed} failed={summary.failed} errored={summary.errored}")
    return "\n".join(lines)
