"""
Command implementations behind main.py.

Every command computes all of its results before writing any file, so a
failure leaves only the run manifest behind.
"""
from argparse import Namespace
from datetime import datetime
from pathlib import Path
from typing import Callable, List, Optional, Tuple
import time

import numpy as np
import structlog

from src import __version__
from src.config.settings import settings
from src.models.exceptions import PipelineError, SchemaError
from src.models.reports import WeylDefectReport
from src.models.schemas import Convention, QuadrupleDocument, RunManifest, Verdict
from src.models.sweep import SweepConfig
from src.services.corpus import format_table, run_corpus
from src.services.forward_verify import weyl_defect_continuous, weyl_defect_discrete
from src.services import inverse_continuous, inverse_discrete
from src.services.realization import evaluate
from src.services.serialization import (
    c_sequence_payload,
    load_document,
    load_realization,
    quadruple_from_document,
    quadruple_to_document,
    write_json,
    write_potential_csv,
    write_sequence_csv,
    write_sweep_csv,
)
from src.services.stability_harness import run_sweep

logger = structlog.get_logger()

EXIT_OK = 0
EXIT_VERIFY_FAIL = 6
EXIT_INCONCLUSIVE = 7


class CommandRun:
    """Manifest bookkeeping and output paths for one command invocation."""

    def __init__(self, command: str, args: Namespace, inputs: List[str]):
        self.command = command
        self.inputs = inputs
        self.parameters = {
            key: value for key, value in vars(args).items()
            if key not in ("handler", "command") and isinstance(value, (str, int, float, bool, list, type(None)))
        }
        seed = getattr(args, "seed", None)
        self.seed = seed if seed is not None else settings.seed
        self.output_dir = Path(getattr(args, "output_dir", None) or settings.output_dir)
        self.stem = Path(inputs[0]).stem if inputs else command
        self.outputs: List[str] = []
        self.started_at = datetime.now()
        self._clock = time.time()

    def path(self, suffix: str) -> Path:
        return self.output_dir / f"{self.stem}_{suffix}"

    def record(self, path: Path) -> None:
        self.outputs.append(str(path))

    def finish(self, exit_code: int, message: Optional[str] = None) -> int:
        manifest = RunManifest(
            command=self.command,
            inputs=self.inputs,
            parameters=self.parameters,
            seed=self.seed,
            version=__version__,
            environment=settings.environment,
            started_at=self.started_at,
            wall_time_seconds=time.time() - self._clock,
            exit_code=exit_code,
            outputs=self.outputs,
            message=message,
        )
        write_json(self.output_dir / f"{self.stem}.{self.command}.manifest.json", manifest)
        logger.info("command_finished", command=self.command, exit_code=exit_code, outputs=len(self.outputs))
        return exit_code


def _execute(run: CommandRun, body: Callable[[CommandRun], Tuple[int, Optional[str]]]) -> int:
    """Run a command body; the manifest is written whatever happens, unexpected errors re-raise with exit 1."""
    logger.info("command_started", command=run.command, inputs=run.inputs)
    code, message = 1, None
    try:
        code, message = body(run)
    except PipelineError as e:
        logger.error("command_failed", command=run.command, error=str(e), exit_code=e.exit_code)
        code, message = e.exit_code, f"{type(e).__name__}: {e}"
    except Exception as e:
        logger.error("command_failed", command=run.command, error=str(e), exit_code=1)
        message = f"{type(e).__name__}: {e}"
        raise
    finally:
        run.finish(code, message)
    return code


def parse_grid(spec: Optional[str], default_end: float) -> np.ndarray:
    """'a:b:N' -> N points on [a, b]."""
    if spec is None:
        return np.linspace(0.0, default_end, settings.grid_samples)
    try:
        start, end, count = spec.split(":")
        start, end, count = float(start), float(end), int(count)
    except ValueError as e:
        raise SchemaError(f"--grid expects a:b:N, got '{spec}'") from e
    if start < 0 or end < start or count < 1:
        raise SchemaError(f"--grid needs 0 <= a <= b and N >= 1, got '{spec}'")
    return np.linspace(start, end, count)


def parse_complex(text: str) -> complex:
    """Accepts Python syntax or an 'i' suffix: '2j', '0+2i', '3i'."""
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError as e:
        raise SchemaError(f"cannot parse complex number '{text}'") from e


def cmd_invert_continuous(args: Namespace) -> int:
    """Realization JSON -> quadruple JSON, potential CSV and verification report."""
    run = CommandRun("invert-continuous", args, [args.input])

    def body(run: CommandRun):
        # Step 1: load and validate the realization
        r = load_realization(args.input)
        if r.convention != Convention.CONTINUOUS:
            raise SchemaError("invert-continuous needs a continuous-convention realization")

        # Step 2: Riccati -> quadruple -> potential
        potential = inverse_continuous.solve_inverse_continuous(r, reduce=args.reduce, method=args.method)
        xs = parse_grid(args.grid, potential.x_max)
        values = potential.sample(xs)

        # Step 3: invariant checks
        report = inverse_continuous.verify_pipeline(potential)

        # Step 4: write outputs
        run.record(write_json(run.path("quadruple.json"),
                              quadruple_to_document(potential.quadruple, Convention.CONTINUOUS)))
        run.record(write_potential_csv(run.path("potential.csv"), xs, values))
        run.record(write_json(run.path("report.json"), report))
        return EXIT_OK, None if report.passed else "; ".join(report.findings)

    return _execute(run, body)


def cmd_invert_discrete(args: Namespace) -> int:
    """Realization JSON -> quadruple JSON, C_k JSON, (k, ||C_k - j||, lambda_min(R_k)) CSV, report."""
    run = CommandRun("invert-discrete", args, [args.input])

    def body(run: CommandRun):
        r = load_realization(args.input)
        if r.convention != Convention.DISCRETE:
            raise SchemaError("invert-discrete needs a discrete-convention realization")
        if args.K is not None and args.K < 0:
            raise SchemaError(f"--K must be >= 0, got {args.K}")

        potential = inverse_discrete.solve_inverse_discrete(
            r, K=args.K, reduce=args.reduce, allow_i_in_spectrum=args.allow_i_in_spectrum, method=args.method
        )
        report = inverse_discrete.verify_pipeline(potential)
        distances = report.asymptotics.distances if report.asymptotics else []
        lambda_mins = inverse_discrete.r_k_lambda_min(potential)

        run.record(write_json(run.path("quadruple.json"),
                              quadruple_to_document(potential.quadruple, Convention.DISCRETE)))
        run.record(write_json(run.path("ck.json"), c_sequence_payload(potential.C)))
        run.record(write_sequence_csv(run.path("sequence.csv"), distances, lambda_mins))
        run.record(write_json(run.path("report.json"), report))
        return EXIT_OK, None if report.passed else "; ".join(report.findings)

    return _execute(run, body)


def _verification_target(args: Namespace):
    """(convention, potential, phi) from a realization or a quadruple input."""
    if args.quadruple:
        doc = load_document(args.input, QuadrupleDocument)
        convention = Convention(args.mode) if args.mode else doc.convention
        if convention is None:
            raise SchemaError("quadruple input needs a convention (document field or --mode)")
        q = quadruple_from_document(doc)
        if convention == Convention.CONTINUOUS:
            potential = inverse_continuous.build_potential(q)
            return convention, potential, lambda z: inverse_continuous.weyl_continuous(q, z)
        potential = inverse_discrete.c_k_sequence(
            q, args.K if args.K is not None else inverse_discrete.default_K(q.n),
            allow_i_in_spectrum=args.allow_i_in_spectrum,
        )
        return convention, potential, lambda z: inverse_discrete.weyl_discrete(q, z)

    r = load_realization(args.input)
    if r.convention == Convention.CONTINUOUS:
        potential = inverse_continuous.solve_inverse_continuous(r, reduce=args.reduce)
    else:
        potential = inverse_discrete.solve_inverse_discrete(
            r, K=args.K, reduce=args.reduce, allow_i_in_spectrum=args.allow_i_in_spectrum
        )
    return r.convention, potential, lambda z: evaluate(r, z)


def cmd_verify(args: Namespace) -> int:
    """Weyl defect checks at each --z; exit 6 on any fail, 7 on any inconclusive."""
    run = CommandRun("verify", args, [args.input])

    def body(run: CommandRun):
        convention, potential, phi = _verification_target(args)
        points = [parse_complex(z) for z in (args.z or ["2i", "3i", "4i"])]
        offset = args.phi_offset

        def phi_eval(z: complex) -> np.ndarray:
            value = np.array(phi(z), dtype=complex)
            if offset and value.size:
                value[0, 0] += offset
            return value

        reports: List[WeylDefectReport] = []
        for z in points:
            if convention == Convention.CONTINUOUS:
                reports.append(weyl_defect_continuous(potential, phi_eval, z, L=args.L, h=args.step))
            else:
                reports.append(weyl_defect_discrete(potential, phi_eval, z, K=args.verify_K))

        verdicts = [rep.verdict for rep in reports]
        run.record(write_json(run.path("verify.json"), {
            "convention": convention.value,
            "phi_offset": offset,
            "reports": [rep.model_dump(mode="json") for rep in reports],
        }))
        if Verdict.FAIL in verdicts:
            return EXIT_VERIFY_FAIL, "weyl defect check failed"
        if Verdict.INCONCLUSIVE in verdicts:
            return EXIT_INCONCLUSIVE, "weyl defect check inconclusive"
        return EXIT_OK, None

    return _execute(run, body)


def cmd_stability(args: Namespace) -> int:
    """SweepConfig JSON -> per-trial CSV and summary JSON with the trend verdict."""
    run = CommandRun("stability", args, [args.input])

    def body(run: CommandRun):
        cfg = load_document(args.input, SweepConfig)
        overrides = {}
        if args.trials is not None:
            overrides["trials"] = args.trials
        if args.seed is not None:
            overrides["seed"] = args.seed
        if overrides:
            try:
                cfg = SweepConfig.model_validate({**cfg.model_dump(), **overrides})
            except ValueError as e:
                raise SchemaError(f"invalid sweep override: {e}") from e
        run.seed = cfg.seed if cfg.seed is not None else settings.seed

        result = run_sweep(cfg)
        run.record(write_sweep_csv(run.path("sweep.csv"), result.records))
        summary = result.model_dump(mode="json", exclude={"records"})
        run.record(write_json(run.path("summary.json"), summary))
        if result.verdict == Verdict.FAIL:
            return EXIT_VERIFY_FAIL, result.message
        if result.verdict == Verdict.INCONCLUSIVE:
            return EXIT_INCONCLUSIVE, result.message
        return EXIT_OK, result.message

    return _execute(run, body)


def cmd_corpus(args: Namespace) -> int:
    """Run the example corpus and print the pass/fail table; exit 1 on any fail or error."""
    run = CommandRun("corpus", args, [])

    def body(run: CommandRun):
        summary = run_corpus(args.corpus_dir, args.case or None)
        print(format_table(summary))
        run.record(write_json(run.path("results.json"), summary))
        ok = summary.failed == 0 and summary.errored == 0
        return (EXIT_OK, None) if ok else (1, f"{summary.failed} failed, {summary.errored} errored")

    return _execute(run, body)
