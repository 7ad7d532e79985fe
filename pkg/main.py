import argparse
import logging
import math
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from _types.data_models import LAMBDA, SCALE, THETA
from _types.errors import (
    GuardBandError, MaslovError, NonLagrangianError, ScenarioRejected
)
from _types.result_types import CROSSING_FORM, SPECTRAL_FLOW
from service.harness import (
    SUITES, check_morse_scaling, check_scaling_count_flow, exit_code, morse_hypothesis,
    run_suite
)
from service.maslov import maslov_index, rectangle_theta
from service.oracle import (
    bands, dlambda_dtheta, eigencurve, fd_spectrum, floquet_spectrum, lambda_floor
)
from service.potentials import potential_from_config
from service.propagation import LagrangianPlanes
from utils.functions import (
    CSV_FLOAT_FORMAT, dumps, load_environment, load_run_config, reports_frame, spectrum_frame,
    write_csv
)
from utils.plots import plot_bands, plot_curves, plot_rectangle

load_environment()

logger = logging.getLogger(__name__)

BACKEND_FLAGS = {"crossing-form": CROSSING_FORM, "spectral-flow": SPECTRAL_FLOW, "both": "both"}


def setup_logging(level: Optional[str]):
    level = (level or os.getenv("MASLOV_LOG_LEVEL", "WARNING")).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="JSON run configuration")
    common.add_argument("--out", type=Path, default=None, help="Output file (default: stdout)")
    common.add_argument("--seed", type=int, default=None, help="Seed for randomized scenarios")
    common.add_argument("--tol", type=float, default=None, help="Integrator tolerance")
    common.add_argument("--threads", type=int, default=None, help="Worker cap (default: MASLOV_THREADS)")
    common.add_argument("--backend", choices=sorted(BACKEND_FLAGS), default="both",
                        help="Maslov index backend")
    common.add_argument("--log-level", default=None, help="Logging level (default: MASLOV_LOG_LEVEL or WARNING)")

    parser = argparse.ArgumentParser(description="Maslov indices and spectral counts of theta-periodic Schrodinger operators.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="Eigenvalues below a cutoff as CSV")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--cutoff", type=float, required=True)
    p.add_argument("--method", choices=["monodromy", "finite-difference"], default="monodromy")

    p = sub.add_parser("maslov", parents=[common], help="Maslov index of the (lambda, theta) rectangle as JSON")
    p.add_argument("--theta1", type=float, required=True)
    p.add_argument("--theta2", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--closed", action="store_true", help="Evaluate the whole closed rectangle")
    p.add_argument("--plot", type=Path, default=None, help="SVG of the rectangle with its crossings")

    p = sub.add_parser("verify", parents=[common], help="Run a verification suite")
    p.add_argument("--suite", choices=list(SUITES) + ["all"], default="all")
    p.add_argument("--scenarios", type=int, default=50, help="Random scenarios per randomized suite")

    p = sub.add_parser("bands", parents=[common], help="Band edges as CSV plus an SVG diagram")
    p.add_argument("--k-max", type=int, required=True)

    p = sub.add_parser("curves", parents=[common], help="Eigenvalue branches as CSV plus an SVG")
    p.add_argument("--branches", type=int, nargs="+", default=[0])
    p.add_argument("--theta-steps", type=int, default=40)
    p.add_argument("--theta-min", type=float, default=0.1)
    p.add_argument("--theta-max", type=float, default=math.pi - 0.1)

    p = sub.add_parser("rescale", parents=[common], help="Rescaling counts and Morse indices as JSON")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--r", type=float, default=0.0)

    return parser.parse_args(argv)


def _emit_text(text: str, out: Optional[Path]):
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {out}")


def _emit_frame(frame: pd.DataFrame, out: Optional[Path]):
    if out is None:
        sys.stdout.write(frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"))
    else:
        write_csv(frame, str(out))


def _svg_path(out: Optional[Path], default: str) -> Path:
    return out.with_suffix(".svg") if out is not None else Path(default)


def cmd_spectrum(args, config) -> int:
    pot = potential_from_config(config.potential)
    if args.method == "finite-difference":
        result = fd_spectrum(pot, args.theta, args.t, config.numerics.fd_grid, args.cutoff)
    else:
        result = floquet_spectrum(pot, args.theta, args.t, (lambda_floor(pot), args.cutoff), config.numerics)
    _emit_frame(spectrum_frame(result), args.out)
    return 0


def cmd_maslov(args, config) -> int:
    pot = potential_from_config(config.potential)
    planes = LagrangianPlanes(pot, config.numerics)
    path = rectangle_theta(args.theta1, args.theta2, args.r, lambda_floor(pot), floor=pot.floor)
    target = path if args.closed else path.segments[1]
    result = maslov_index(target, planes, BACKEND_FLAGS[args.backend], config.numerics, config.threads)
    payload = {
        "index": result.index,
        "doubled_index": result.doubled_index,
        "half_index": result.index / 2,
        "method": result.method,
        "closed": args.closed,
        "crossings": [
            {"segment_id": c.segment_id, "s": c.s_star, "point": c.point, "dim_real": c.dim_real,
             "position": c.position, "signature": c.signature, "contribution": c.contribution}
            for c in result.crossings
        ],
        "diagnostics": result.diagnostics,
    }
    if args.plot is not None:
        floor = lambda_floor(pot)
        corners = [(args.theta1, floor), (args.theta1, args.r), (args.theta2, args.r), (args.theta2, floor)]
        points = [(c.point[THETA], c.point[LAMBDA]) for c in result.crossings]
        plot_rectangle(corners, points, str(args.plot))
    _emit_text(dumps(payload), args.out)
    return 0


def cmd_verify(args, config) -> int:
    logger.info(f"🚀 Running verification suite '{args.suite}'")
    reports = run_suite(args.suite, config, args.scenarios)
    code = exit_code(reports)
    payload = {"suite": args.suite, "exit_code": code, "reports": reports}
    _emit_text(dumps(payload), args.out)
    summary = reports_frame(reports)
    passed = int(summary["passed"].sum()) if len(summary) else 0
    rejected = int(summary["rejected"].sum()) if len(summary) else 0
    print(f"[verify] {args.suite}: {passed}/{len(reports)} passed, {rejected} rejected", file=sys.stderr)
    return code


def cmd_bands(args, config) -> int:
    pot = potential_from_config(config.potential)
    edges = bands(pot, args.k_max, config.numerics)
    frame = pd.DataFrame([{"k": k, "alpha_k": lo, "beta_k": hi} for k, (lo, hi) in enumerate(edges)],
                         columns=["k", "alpha_k", "beta_k"])
    plot_bands(edges, str(_svg_path(args.out, "bands.svg")))
    _emit_frame(frame, args.out)
    return 0


def cmd_curves(args, config) -> int:
    pot = potential_from_config(config.potential)
    step = (args.theta_max - args.theta_min) / max(1, args.theta_steps)
    rows: List[Dict[str, Any]] = []
    curves = {}
    for k in args.branches:
        points = eigencurve(pot, k, (args.theta_min, args.theta_max), step, numerics=config.numerics)
        curves[k] = [(p.theta, p.lambda_k) for p in points]
        for p in points:
            boundary, _, _ = dlambda_dtheta(p, pot, config.numerics)
            rows.append({"theta": p.theta, "k": k, "lambda": p.lambda_k, "dlambda_dtheta": boundary})
    frame = pd.DataFrame(rows, columns=["theta", "k", "lambda", "dlambda_dtheta"])
    plot_curves(curves, str(_svg_path(args.out, "curves.svg")))
    _emit_frame(frame, args.out)
    return 0


def cmd_rescale(args, config) -> int:
    pot = potential_from_config(config.potential)
    backend = BACKEND_FLAGS[args.backend]
    scaling = check_scaling_count_flow(pot, args.tau, args.theta, args.r, numerics=config.numerics,
                                       backend=backend, threads=config.threads)
    payload: Dict[str, Any] = {
        "tau": args.tau, "theta": args.theta, "r": args.r,
        "count_diff": scaling.lhs, "half_index": scaling.rhs, "scaling_passed": scaling.passed,
        "crossings": [c["point"][SCALE] for c in scaling.details.get("crossings", [])],
    }
    try:
        case = morse_hypothesis(pot, args.tau)
    except ScenarioRejected as e:
        payload["morse"] = {"hypothesis": "rejected", "reason": str(e)}
    else:
        report = check_morse_scaling(pot, args.tau, args.theta, config.numerics, backend, config.threads)
        payload["morse"] = {"hypothesis": case, "passed": report.passed, **report.details}
        payload["mor_diff"] = report.lhs
        payload["kernel_sum"] = report.rhs
    _emit_text(dumps(payload), args.out)
    return 0 if scaling.passed and payload["morse"].get("passed", True) else 1


COMMANDS = {
    "spectrum": cmd_spectrum,
    "maslov": cmd_maslov,
    "verify": cmd_verify,
    "bands": cmd_bands,
    "curves": cmd_curves,
    "rescale": cmd_rescale,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    setup_logging(args.log_level)

    try:
        config = load_run_config(
            str(args.config) if args.config else None,
            {"seed": args.seed, "threads": args.threads, "numerics.integrator_tol": args.tol},
        )
    except ValueError as e:
        print(f"[error] {e}", file=sys.stderr)
        return 2

    try:
        return COMMANDS[args.command](args, config)
    except (GuardBandError, ScenarioRejected, NonLagrangianError) as e:
        logger.error(f"❌ {args.command}: {e}")
        print(f"[error] {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"[error] {e}", file=sys.stderr)
        return 2
    except MaslovError as e:
        logger.error(f"❌ {args.command} failed: {e}")
        print(f"[error] {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
