#!/usr/bin/env python3
"""
lrd-predict command line.

Every subcommand writes CSV (header row, comma separated, 12 significant
digits) or key-value text to ``--output`` or standard output. Failures are
reported on standard error as a single line

    error: kind=<Class> exit=<code> message=<text>

with exit status 2 for usage and configuration errors and 3 for numerical
failures.
"""
import argparse
import csv
import io
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .baxter import baxter_sweep
from .config import ArMethod, Command, ErrorMode, QuadratureConfig
from .duality import beta_values, build_ar
from .errors import ConfigurationError, LrdError, NumericalError
from .kernels import build_kernel_table, h_closed_form
from .model import LrdModel, fbm, load_model
from .montecarlo import simulate_many, uniform_grid, validate_prediction
from .parallel import set_thread_cap
from .prediction import PredictionWindow, build_report
from .verify import SUITES, CheckResult, run_suite

logger = logging.getLogger("lrd-prediction.cli")


# =============================================================================
# Run configuration
# =============================================================================

@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs."""

    command: Command
    model_path: Optional[Path] = None
    output_path: Optional[Path] = None
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    seed: Optional[int] = None
    threads: Optional[int] = None
    options: Dict[str, Any] = field(default_factory=dict)

    def model(self) -> LrdModel:
        if self.model_path is None:
            raise ConfigurationError(f"{self.command.value} requires --model")
        return load_model(self.model_path)


class _Parser(argparse.ArgumentParser):
    """argparse parser that raises instead of exiting."""

    def error(self, message: str):
        raise ConfigurationError(message)


def _floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--model", type=Path, help="JSON model document")
    common.add_argument("--output", type=Path, help="output file (default: standard output)")
    common.add_argument("--threads", type=int, help="cap on worker threads")
    common.add_argument("--tol", type=float, help="relative tolerance for every integral")
    common.add_argument("--seed", type=_seed, help="random seed")

    parser = _Parser(prog="lrd-predict", description="Prediction kernels and errors for long-memory processes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    kernel = sub.add_parser(Command.KERNEL.value, parents=[common], help="tabulate b, b_2, b_3 and h")
    kernel.add_argument("--t2", type=float, required=True)
    kernel.add_argument("--s", type=_floats, help="s values in (0, t2)")
    kernel.add_argument("--u", type=_floats, help="u values > 0")

    ar = sub.add_parser(Command.AR.value, parents=[common], help="tabulate a, alpha and beta")
    ar.add_argument("--t", type=_floats, help="evaluation times")
    ar.add_argument("--method", choices=[m.value for m in ArMethod])

    predict = sub.add_parser(Command.PREDICT.value, parents=[common], help="predictor coefficients and errors")
    _window_flags(predict)

    baxter = sub.add_parser(Command.BAXTER.value, parents=[common], help="Baxter inequality sweep")
    baxter.add_argument("--H", type=float, help="fBm index (instead of --model)")
    baxter.add_argument("--t1", type=float, required=True)
    baxter.add_argument("--T", type=float, required=True)
    baxter.add_argument("--t0-list", type=_floats, required=True)

    simulate = sub.add_parser(Command.SIMULATE.value, parents=[common], help="exact Gaussian paths")
    simulate.add_argument("--start", type=float, required=True)
    simulate.add_argument("--stop", type=float, required=True)
    simulate.add_argument("--grid-step", type=float, required=True)
    simulate.add_argument("--replicates", type=int, default=1)

    validate = sub.add_parser(Command.VALIDATE.value, parents=[common], help="Monte Carlo check of the error formula")
    _window_flags(validate)
    validate.add_argument("--grid-step", type=float, required=True)
    validate.add_argument("--replicates", type=int, required=True)
    validate.add_argument("--mode", choices=[m.value for m in ErrorMode], default=ErrorMode.FINITE_PAST.value)
    validate.add_argument("--residuals", type=Path, help="write per-replicate residuals as CSV")

    verify = sub.add_parser(Command.VERIFY.value, parents=[common], help="run a self-check suite")
    verify.add_argument("--suite", choices=[*SUITES, "all"], required=True)
    return parser


def _window_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--t0", type=float, required=True)
    parser.add_argument("--t1", type=float, required=True)
    parser.add_argument("--T", type=float, required=True)


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """Translate command-line flags into a RunConfig."""
    args = build_parser().parse_args(argv)
    options = {k: v for k, v in vars(args).items() if k not in {"command", "model", "output", "threads", "tol", "seed"}}
    quadrature = QuadratureConfig()
    if args.tol is not None:
        quadrature = quadrature.with_rel_tol(args.tol)
    return RunConfig(
        command=Command(args.command),
        model_path=args.model,
        output_path=args.output,
        quadrature=quadrature,
        seed=args.seed,
        threads=args.threads,
        options=options,
    )


# =============================================================================
# Output
# =============================================================================

def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def _emit(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        path.write_text(text)
    except OSError as e:
        raise ConfigurationError(f"cannot write {path}: {e}")


# =============================================================================
# Commands
# =============================================================================

def _kernel(cfg: RunConfig) -> str:
    model, q, opts = cfg.model(), cfg.quadrature, cfg.options
    ar = build_ar(model, q)
    table = build_kernel_table(model, ar, opts["t2"], s_values=opts["s"], u_values=opts["u"], q=q)
    rows = []
    for i, s in enumerate(table.s_values):
        for j, u in enumerate(table.u_values):
            closed = float(h_closed_form(model.H, table.t2, s, u)) if model.is_fbm else None
            leading = [grid[i, j] for grid in table.bn_grids[1:3]]
            leading += [None] * (2 - len(leading))
            rows.append([s, u, table.b_grid[i, j], *leading, table.h_grid[i, j], closed])
    return write_csv(["t_or_s", "u", "b", "b2", "b3", "h", "h_closed_form"], rows)


def _ar(cfg: RunConfig) -> str:
    model, q, opts = cfg.model(), cfg.quadrature, cfg.options
    method = ArMethod(opts["method"]) if opts.get("method") else None
    ar = build_ar(model, q, method=method)
    t = np.asarray(opts["t"] or np.logspace(-2.0, 2.0, 9), dtype=float)
    if np.any(t <= 0):
        raise ConfigurationError("evaluation times must be positive")
    beta = beta_values(model, ar, t, q)
    return write_csv(["t", "a", "alpha", "beta"], zip(t, ar.a(t), ar.alpha(t), beta))


def _window(opts: Dict[str, Any]) -> PredictionWindow:
    return PredictionWindow(t0=opts["t0"], t1=opts["t1"], T=opts["T"])


def _predict(cfg: RunConfig) -> str:
    model, q = cfg.model(), cfg.quadrature
    ar = build_ar(model, q)
    return build_report(model, ar, _window(cfg.options), q).to_text()


def _baxter(cfg: RunConfig) -> str:
    q, opts = cfg.quadrature, cfg.options
    if opts.get("H") is not None:
        if cfg.model_path is not None:
            raise ConfigurationError("give either --H or --model, not both")
        model = fbm(opts["H"])
    else:
        model = cfg.model()
    ar = build_ar(model, q)
    sweep = baxter_sweep(model, ar, opts["t1"], opts["T"], opts["t0_list"], q)
    header = ["t0", "lhs", "rhs", "ratio", "limit_constant"]
    return write_csv(header, ([row[k] for k in header] for row in sweep.rows()))


def _simulate(cfg: RunConfig) -> str:
    model, q, opts = cfg.model(), cfg.quadrature, cfg.options
    times = uniform_grid(opts["start"], opts["stop"], opts["grid_step"])
    paths = simulate_many(model, times, cfg.seed or 0, opts["replicates"], q)
    rows = ((p.replicate_index, t, x) for p in paths for t, x in zip(p.times, p.values))
    return write_csv(["replicate", "t", "x"], rows)


def _validate(cfg: RunConfig) -> str:
    model, q, opts = cfg.model(), cfg.quadrature, cfg.options
    ar = build_ar(model, q)
    report = validate_prediction(
        model, ar, None, _window(opts),
        grid_step=opts["grid_step"],
        replicates=opts["replicates"],
        seed=cfg.seed or 0,
        q=q,
        mode=ErrorMode(opts["mode"]),
    )
    if opts.get("residuals") is not None:
        _emit(write_csv(["replicate", "residual"], report.residual_rows()), opts["residuals"])
    return report.to_text()


def _verify_text(results: List[CheckResult]) -> str:
    header = ["suite", "check", "value", "expected", "error", "tolerance", "status"]
    return write_csv(header, ([r.row()[k] for k in header] for r in results))


HANDLERS = {
    Command.KERNEL: _kernel,
    Command.AR: _ar,
    Command.PREDICT: _predict,
    Command.BAXTER: _baxter,
    Command.SIMULATE: _simulate,
    Command.VALIDATE: _validate,
}


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    try:
        set_thread_cap(cfg.threads)
        logger.info(f"Running {cfg.command.value}")
        failed = 0
        if cfg.command == Command.VERIFY:
            results = run_suite(cfg.options["suite"], cfg.quadrature)
            failed = sum(not r.passed for r in results)
            text = _verify_text(results)
        else:
            text = HANDLERS[cfg.command](cfg)
        _emit(text, cfg.output_path)
    except LrdError as e:
        report_error(e)
        return e.exit_code
    except (ArithmeticError, ValueError) as e:
        # Floating-point failures that escaped the library checks.
        logger.debug(f"Unhandled numerical failure in {cfg.command.value}", exc_info=True)
        wrapped = NumericalError(f"{type(e).__name__}: {e}")
        report_error(wrapped)
        return wrapped.exit_code
    finally:
        set_thread_cap(None)
    return 3 if failed else 0


def report_error(error: LrdError) -> None:
    info = error.to_dict()
    message = " ".join(str(info["message"]).split())
    sys.stderr.write(f"error: kind={info['kind']} exit={info['exit']} message={message}\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = parse_args(argv)
    except LrdError as e:
        report_error(e)
        return e.exit_code
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
