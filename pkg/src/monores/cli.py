"""Command-line frontend: solvers, certificates, flows, convergence tables.

Every run is reproducible: all randomness flows from --seed, and numbers
are printed with shortest round-trip formatting so identical configs give
byte-identical output. Exit codes: 0 success / all certificates pass,
1 a certificate failed, 2 usage error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import NonConvergenceError, NumericalError, UsageError
from .fixedpoint import ContractionMap, iterate
from .linalg import HVector
from .operators import (
    OperatorSpec,
    monotonicity_certificate,
    natural_weight,
    operator_from_json,
    operator_to_json,
    unboundedness_probe,
)
from .evolution import FlowConfig, evolve
from .resolvent import (
    ResolventConfig,
    equation_residual,
    nonexpansiveness_certificate,
    resolve,
)

DEFAULT_LAMBDA_GRID = [0.01, 0.1, 1.0, 10.0, 100.0]

# Config-file key -> argparse dest, per subcommand. Unknown keys are
# rejected; command-line flags override file values.
_CONFIG_KEYS = {
    "resolve": {
        "operator": "operator", "rhs": "rhs", "lambda": "lam", "method": "method",
        "base-lambda": "base_lambda", "ratio": "ratio", "upward-ratio": "upward_ratio",
        "tol": "tol", "max-iters": "max_iters", "seed": "seed", "output": "output",
        "format": "format",
    },
    "bootstrap-demo": {
        "operator": "operator", "rhs": "rhs", "lambda": "lam",
        "base-lambda": "base_lambda", "ratio": "ratio", "upward-ratio": "upward_ratio",
        "tol": "tol", "max-iters": "max_iters", "seed": "seed", "output": "output",
        "format": "format",
    },
    "certify": {
        "operator": "operator", "lambda": "lam", "samples": "samples",
        "seed": "seed", "output": "output", "format": "format",
    },
    "banach-demo": {
        "contraction-k": "contraction_k", "dim": "dim", "tol": "tol",
        "max-iters": "max_iters", "seed": "seed", "output": "output", "format": "format",
    },
    "heat-flow": {
        "operator": "operator", "initial": "initial", "tau": "tau", "steps": "steps",
        "method": "method", "base-lambda": "base_lambda", "ratio": "ratio",
        "tol": "tol", "max-iters": "max_iters", "dump-states": "dump_states",
        "seed": "seed", "output": "output", "format": "format",
    },
    "probe-unbounded": {
        "max-n": "max_n", "output": "output", "format": "format",
    },
}


def fmt(x: float) -> str:
    """Shortest string that round-trips the float ('.' decimal, no grouping)."""
    return repr(float(x))


def _load_json_arg(value: str, what: str) -> dict:
    """Accept inline JSON (starts with '{') or a path to a JSON file."""
    text = value
    if not value.lstrip().startswith("{"):
        path = Path(value)
        if not path.is_file():
            raise UsageError(f"{what} file not found: {value}")
        text = path.read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON for {what}: {exc}") from exc
    if not isinstance(obj, dict):
        raise UsageError(f"{what} JSON must be an object")
    return obj


def _load_operator(value: str | None) -> OperatorSpec:
    if value is None:
        raise UsageError("an --operator is required (inline JSON or file path)")
    return operator_from_json(_load_json_arg(value, "operator"))


def _load_vector(value: str | None, op: OperatorSpec, seed: int) -> HVector:
    if value is None:
        rng = np.random.default_rng(seed)
        return HVector(rng.standard_normal(op.dim), natural_weight(op))
    return HVector.from_json(_load_json_arg(value, "vector"))


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(x) if isinstance(x, float) else str(x) for x in row))
    return "\n".join(lines) + "\n"


def _json_doc(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _resolvent_config(args, method: str) -> ResolventConfig:
    return ResolventConfig(
        lam=args.lam,
        method=method,
        base_lambda=args.base_lambda,
        stage_ratio=args.ratio,
        tol=args.tol,
        max_iters=args.max_iters,
        upward_ratio=getattr(args, "upward_ratio", None),
    )


def _cmd_resolve(args) -> int:
    op = _load_operator(args.operator)
    if args.lam is None:
        raise UsageError("resolve needs --lambda")
    f = _load_vector(args.rhs, op, args.seed)
    cfg = _resolvent_config(args, args.method)
    u, _ = resolve(op, f, cfg)
    residual = equation_residual(op, cfg.lam, f, u)
    if args.format == "json":
        doc = {
            "operator": operator_to_json(op),
            "lambda": cfg.lam,
            "method": cfg.method,
            "residual": residual,
            "u": u.to_json(),
        }
        _emit(_json_doc(doc), args.output)
    else:
        table = _csv(["index", "u"], [[j, float(c)] for j, c in enumerate(u.coeffs)])
        _emit(table, args.output)
        line = f"residual={fmt(residual)}\n"
        (sys.stdout if args.output else sys.stderr).write(line)
    return 0


def _cmd_bootstrap_demo(args) -> int:
    op = _load_operator(args.operator)
    if args.lam is None:
        raise UsageError("bootstrap-demo needs --lambda")
    f = _load_vector(args.rhs, op, args.seed)
    cfg = _resolvent_config(args, "bootstrap")
    _, trace = resolve(op, f, cfg)
    if args.format == "json":
        _emit(_json_doc(trace.to_json()), args.output)
    else:
        rows = []
        for i, s in enumerate(trace.stages):
            final_res = s.report.residual_history[-1] if s.report.residual_history else 0.0
            rows.append([i, float(s.lam), float(s.factor), s.report.iterations, float(final_res)])
        _emit(_csv(["stage", "lambda", "factor", "iterations", "final_residual"], rows), args.output)
    return 0


def _cmd_certify(args) -> int:
    op = _load_operator(args.operator)
    samples = 50 if args.samples is None else args.samples
    lambdas = DEFAULT_LAMBDA_GRID if args.lam is None else [args.lam]
    reports = [monotonicity_certificate(op, samples, args.seed)]
    skipped = None
    if op.monotone_expected:
        reports.append(nonexpansiveness_certificate(op, lambdas, samples, args.seed))
    else:
        skipped = "non-expansiveness: skipped (kind is not monotone)"
    failed = False
    for rep in reports:
        verdict = "pass" if rep.verdict else "fail"
        print(f"{rep.property}: {verdict} (worst_value={fmt(rep.worst_value)})")
        if not rep.verdict:
            failed = True
            print(f"witness={json.dumps(rep.witness.to_json())}")
    if skipped:
        print(skipped)
    if args.output or args.format == "json":
        if args.format == "json":
            _emit(_json_doc({"certificates": [r.to_json() for r in reports]}), args.output)
        else:
            rows = [[r.property, r.samples, float(r.worst_value),
                     "pass" if r.verdict else "fail"] for r in reports]
            _emit(_csv(["property", "samples", "worst_value", "verdict"], rows), args.output)
    return 1 if failed else 0


def _cmd_banach_demo(args) -> int:
    k = 0.5 if args.contraction_k is None else float(args.contraction_k)
    if not 0.0 <= k < 1.0:
        raise UsageError(f"--contraction-k must lie in [0, 1), got {k}")
    dim = 2 if args.dim is None else int(args.dim)
    shift = HVector(np.random.default_rng(args.seed).standard_normal(dim))
    affine = ContractionMap(lambda x: k * x + shift, k_claimed=k)
    x, report = iterate(affine, HVector.zeros(dim), args.tol, args.max_iters)
    if args.format == "json":
        doc = {
            "k": k,
            "iterations": report.iterations,
            "converged": report.converged,
            "residuals": report.residual_history,
            "apriori_bounds": report.apriori_bounds,
            "fixed_point": x.to_json(),
        }
        _emit(_json_doc(doc), args.output)
    else:
        rows = [[m, float(r), float(b)] for m, r, b in report.csv_rows()]
        _emit(_csv(["iter", "residual", "apriori_bound"], rows), args.output)
    return 0


def _cmd_heat_flow(args) -> int:
    op = _load_operator(args.operator)
    if args.tau is None:
        raise UsageError("heat-flow needs --tau")
    steps = 10 if args.steps is None else args.steps
    u0 = _load_vector(args.initial, op, args.seed)
    res_cfg = ResolventConfig(
        lam=args.tau, method=args.method, base_lambda=args.base_lambda,
        stage_ratio=args.ratio, tol=args.tol, max_iters=args.max_iters,
    )
    flow = FlowConfig(tau=args.tau, steps=steps, resolvent=res_cfg)
    traj = evolve(op, flow, u0)
    if args.format == "json":
        doc = {
            "rows": [
                {"step": s, "time": t, "norm": n} for s, t, n in traj.csv_rows()
            ],
        }
        if args.dump_states:
            doc["states"] = [state.to_json() for state in traj.states]
        _emit(_json_doc(doc), args.output)
    else:
        rows = [[s, float(t), float(n)] for s, t, n in traj.csv_rows()]
        _emit(_csv(["step", "time", "norm"], rows), args.output)
    return 0


def _cmd_probe_unbounded(args) -> int:
    max_n = 10 if args.max_n is None else int(args.max_n)
    table = unboundedness_probe(max_n)
    if args.format == "json":
        _emit(_json_doc({"rows": [[n, r] for n, r in table]}), args.output)
    else:
        _emit(_csv(["n", "ratio"], [[n, float(r)] for n, r in table]), args.output)
    return 0


_HANDLERS = {
    "resolve": _cmd_resolve,
    "bootstrap-demo": _cmd_bootstrap_demo,
    "certify": _cmd_certify,
    "banach-demo": _cmd_banach_demo,
    "heat-flow": _cmd_heat_flow,
    "probe-unbounded": _cmd_probe_unbounded,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monores",
        description="Resolvents, contraction iteration and implicit-Euler flows "
        "for monotone linear operators.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, *, operator=False, rhs=False, solver=False, stepping=False):
        if operator:
            p.add_argument("--operator", help="operator as inline JSON or a file path")
        if rhs:
            p.add_argument("--rhs", help="right-hand side vector, inline JSON or file path")
        if solver:
            p.add_argument("--lambda", dest="lam", type=float, default=None)
            p.add_argument("--base-lambda", dest="base_lambda", type=float, default=None)
            p.add_argument("--ratio", type=float, default=None)
            p.add_argument("--upward-ratio", dest="upward_ratio", type=float, default=None,
                           help="chain upward targets geometrically (off by default)")
        if solver or stepping:
            p.add_argument("--tol", type=float, default=None)
            p.add_argument("--max-iters", dest="max_iters", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--output", default=None)
        p.add_argument("--format", choices=["csv", "json"], default=None)
        p.add_argument("--config", default=None, help="JSON file mirroring the flags")
        p.add_argument("--json-errors", action="store_true")

    p = sub.add_parser("resolve", help="solve (I + lambda*A) u = f")
    common(p, operator=True, rhs=True, solver=True)
    p.add_argument("--method", choices=["direct", "bootstrap"], default=None)

    p = sub.add_parser("bootstrap-demo", help="staged contraction solve with per-stage table")
    common(p, operator=True, rhs=True, solver=True)

    p = sub.add_parser("certify", help="monotonicity and non-expansiveness sweeps")
    common(p, operator=True)
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="single shift for the non-expansiveness sweep (default: grid)")
    p.add_argument("--samples", type=int, default=None)

    p = sub.add_parser("banach-demo", help="affine contraction with error-bound table")
    common(p, stepping=True)
    p.add_argument("--contraction-k", dest="contraction_k", type=float, default=None)
    p.add_argument("--dim", type=int, default=None)

    p = sub.add_parser("heat-flow", help="implicit-Euler trajectory of u' + A u = 0")
    common(p, operator=True, stepping=True)
    p.add_argument("--initial", help="initial state vector, inline JSON or file path")
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--method", choices=["direct", "bootstrap"], default=None)
    p.add_argument("--base-lambda", dest="base_lambda", type=float, default=None)
    p.add_argument("--ratio", type=float, default=None)
    p.add_argument("--dump-states", dest="dump_states", action="store_true", default=None)

    p = sub.add_parser("probe-unbounded", help="growth table for the diagonal family")
    p.add_argument("--max-n", dest="max_n", type=int, default=None)
    p.add_argument("--output", default=None)
    p.add_argument("--format", choices=["csv", "json"], default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--json-errors", action="store_true")

    return parser


def _apply_config(args) -> None:
    """Merge a JSON config file under explicit command-line flags."""
    if getattr(args, "config", None) is None:
        return
    allowed = _CONFIG_KEYS[args.subcommand]
    doc = _load_json_arg(args.config, "config")
    unknown = set(doc) - set(allowed)
    if unknown:
        raise UsageError(f"unknown config fields: {sorted(unknown)}")
    for key, value in doc.items():
        dest = allowed[key]
        if getattr(args, dest, None) is None:
            setattr(args, dest, value)


def _fill_defaults(args) -> None:
    defaults = {
        "seed": 0, "format": "csv", "tol": 1e-10, "max_iters": 10_000,
        "base_lambda": 1.0, "ratio": 2.0 / 3.0, "method": "direct",
        "dump_states": False,
    }
    for dest, value in defaults.items():
        if hasattr(args, dest) and getattr(args, dest) is None:
            setattr(args, dest, value)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        _fill_defaults(args)
        return _HANDLERS[args.subcommand](args)
    except UsageError as exc:
        _report_error(args, "usage", exc)
        return 2
    except (NonConvergenceError, NumericalError) as exc:
        _report_error(args, "numerical", exc)
        return 3


def _report_error(args, category: str, exc: Exception) -> None:
    if getattr(args, "json_errors", False):
        sys.stderr.write(json.dumps({"error": category, "message": str(exc)}) + "\n")
    else:
        sys.stderr.write(f"monores: {category} error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
