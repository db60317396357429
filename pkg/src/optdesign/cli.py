"""Command-line entry point: ``optdesign <command> [--config FILE] [overrides]``.

Exit codes: 0 success or certified, 2 not certified, 3 numerical failure,
4 configuration or input error. Every outcome prints one JSON document on
stdout; progress lines go to stderr.
"""
import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .config import PRESETS, ConfigError, load_config
from .experiments import (
    BENCHMARK_COLUMNS,
    CONVERGE_COLUMNS,
    SCALING_COLUMNS,
    TickClock,
    benchmark,
    converge_n,
    quadratic_scaling,
)
from .linalg import NotPositiveDefinite
from .optimality import CertificateFault, certificate
from .solver import SupportCollapse, prng_metadata, run
from .spaces import RejectionStall, build_candidates

EXIT_OK = 0
EXIT_NOT_CERTIFIED = 2
EXIT_NUMERICAL = 3
EXIT_CONFIG = 4

WEIGHT_SUM_TOLERANCE = 1e-6
_NUMERICAL = (NotPositiveDefinite, SupportCollapse, CertificateFault, RejectionStall,
              FloatingPointError)


class InputError(ValueError):
    """Malformed or inconsistent input file."""


def _log(msg):
    print(msg, file=sys.stderr, flush=True)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def rows_to_csv(rows, columns, path=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def _write_json(doc, path):
    if path:
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _emit(doc):
    print(json.dumps(doc, sort_keys=True))


# ---------------------------------------------------------------- commands


def cmd_solve(cfg):
    fmap = cfg.feature_map()
    cands = build_candidates(cfg.space_spec(), fmap)
    scfg = cfg.solver_config()
    _log(f"solving {scfg.criterion} with {scfg.algorithm} on {cands.n} candidates (p={cands.p})")
    design, trace = run(cands, scfg)
    _log(f"objective {design.objective:.10g} after {design.iterations} iterations, "
         f"{design.restart_rounds + 1} phase(s), gap {design.equivalence_gap:.3e}")
    out = cfg.output
    doc = {
        "status": "ok",
        "design": design.to_dict(),
        "certificate": design.certificate.to_dict(cfg.certify_tolerance),
        "candidates": {"n": cands.n, "p": cands.p, "q": cands.q},
        "config": cfg.to_dict(),
        "prng": prng_metadata(cfg.seed),
        "version": __version__,
    }
    _write_json(doc, out.get("result"))
    if out.get("design"):
        design.to_csv(out["design"])
    if out.get("trace"):
        trace.to_csv(out["trace"])
    _emit({k: doc[k] for k in ("status", "design", "certificate")})
    return EXIT_OK if design.certificate.certified(cfg.certify_tolerance) else EXIT_NOT_CERTIFIED


def read_design_csv(path):
    """Parse an ``x1..xq,weight`` file into ``(points, weights)``."""
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise InputError(f"cannot read design file: {exc}") from None
    if len(rows) < 2:
        raise InputError("design CSV needs a header and at least one row")
    header = [h.strip() for h in rows[0]]
    q = len(header) - 1
    if q < 1 or header != [f"x{j + 1}" for j in range(q)] + ["weight"]:
        raise InputError(f"bad design header {header}")
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
    except ValueError as exc:
        raise InputError(f"non-numeric design entry: {exc}") from None
    if data.ndim != 2 or data.shape[1] != q + 1:
        raise InputError("ragged design rows")
    if not np.all(np.isfinite(data)):
        raise InputError("design contains non-finite values")
    return data[:, :q], data[:, q]


def verify_design(points, weights, cfg):
    """Certificate for an external design over the configured candidates.

    The design points are merged into the candidate set; weights must be
    nonnegative and sum to one within ``WEIGHT_SUM_TOLERANCE`` and are then
    renormalized exactly.
    """
    fmap = cfg.feature_map()
    spec = cfg.space_spec()
    if points.shape[1] != fmap.input_dim:
        raise InputError(f"design has {points.shape[1]} coordinates, model expects {fmap.input_dim}")
    if np.any(weights < 0):
        raise InputError("design weights must be nonnegative")
    total = float(np.sum(weights))
    if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
        raise InputError(f"design weights sum to {total:.17g}, not 1 within {WEIGHT_SUM_TOLERANCE}")
    member = spec.membership()
    if member is not None:
        outside = np.flatnonzero(~member(points))
        if outside.size:
            raise InputError(f"design rows {outside.tolist()} lie outside the {spec.kind} space")
    cands = build_candidates(spec, fmap).with_points(points)
    w = np.zeros(cands.n)
    for x, wt in zip(points, weights):
        w[cands.index_of(x)] += wt
    return certificate(w / w.sum(), cands, cfg.criterion), cands


def cmd_verify(cfg, design_path):
    points, weights = read_design_csv(design_path)
    cert, cands = verify_design(points, weights, cfg)
    doc = {"status": "ok", "certificate": cert.to_dict(cfg.certify_tolerance),
           "candidates": {"n": cands.n, "p": cands.p, "q": cands.q},
           "config": cfg.to_dict()}
    _write_json(doc, cfg.output.get("result"))
    _emit(doc)
    _log(f"{cfg.criterion} gap {cert.gap:.3e} (relative {cert.relative_gap:.3e}): "
         f"{'certified' if cert.certified(cfg.certify_tolerance) else 'not certified'}")
    return EXIT_OK if cert.certified(cfg.certify_tolerance) else EXIT_NOT_CERTIFIED


def cmd_benchmark(cfg, tick_clock=False):
    b = cfg.benchmark
    rows, summary = benchmark(
        cfg.feature_map(), cfg.space, b["sizes"], b["algorithms"], b["criteria"],
        max_seconds=b["max_seconds"], proposed_gamma=b["proposed_gamma"],
        baseline_gamma=b["baseline_gamma"], reference_gamma=b["reference_gamma"],
        trace_stride=b["trace_stride"], thread_count=cfg.thread_count, seed=cfg.seed,
        clock=TickClock if tick_clock else None, log=_log,
    )
    rows_to_csv(rows, BENCHMARK_COLUMNS, cfg.output.get("csv"))
    doc = {"status": "ok", "summary": summary, "rows": len(rows), "config": cfg.to_dict(),
           "prng": prng_metadata(cfg.seed)}
    _write_json(doc, cfg.output.get("result"))
    _emit(doc)
    return EXIT_OK


def cmd_converge_n(cfg):
    c = cfg.converge_n
    rows, ref = converge_n(cfg.feature_map(), cfg.space, c["n_schedule"], c["replicates"],
                           cfg.seed, c["reference_space"], cfg.solver_config(), log=_log)
    rows_to_csv(rows, CONVERGE_COLUMNS, cfg.output.get("csv"))
    medians = {}
    for n in c["n_schedule"]:
        medians[str(n)] = float(np.median([r["gap_to_continuous_reference"]
                                           for r in rows if r["n"] == int(n)]))
    doc = {"status": "ok", "reference_objective": ref, "median_gap": medians,
           "config": cfg.to_dict(), "prng": prng_metadata(cfg.seed)}
    _write_json(doc, cfg.output.get("result"))
    _emit(doc)
    return EXIT_OK


def cmd_quad_scaling(cfg):
    s = cfg.quad_scaling
    rows = quadratic_scaling(s["q_list"], s["iterations"], s["n_random"], s["n_factorial"],
                             cfg.seed, cfg.thread_count, log=_log)
    rows_to_csv(rows, SCALING_COLUMNS, cfg.output.get("csv"))
    final = {}
    for r in rows:
        final[str(r["q"])] = r["log_efficiency"]
    doc = {"status": "ok", "final_log_efficiency": final, "config": cfg.to_dict(),
           "prng": prng_metadata(cfg.seed)}
    _write_json(doc, cfg.output.get("result"))
    _emit(doc)
    return EXIT_OK


# ---------------------------------------------------------------- parsing


def _json_arg(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"not valid JSON: {exc}") from None


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common(p):
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--preset", choices=sorted(PRESETS),
                   help="standard model and space; --model/--space still override")
    p.add_argument("--model", type=_json_arg, help='feature map, e.g. \'{"kind": "full_quadratic", "q": 2}\'')
    p.add_argument("--space", type=_json_arg, help='space, e.g. \'{"kind": "square_grid", "side": 21}\'')
    p.add_argument("--criterion", choices=["D", "A"])
    p.add_argument("--algorithm", choices=["proposed", "vdm", "mul"])
    p.add_argument("--mul-lambda", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--max-restart-rounds", type=int)
    p.add_argument("--max-seconds", type=float)
    p.add_argument("--trace-stride", type=int)
    p.add_argument("--initial", choices=["uniform", "dirichlet"])
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", dest="thread_count", type=int)
    p.add_argument("--tolerance", dest="certify_tolerance", type=float,
                   help="relative certificate gap accepted as optimal (default 1e-2)")
    p.add_argument("--out-result", help="result JSON path")


def build_parser():
    parser = argparse.ArgumentParser(prog="optdesign", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute an approximate optimal design")
    _common(p)
    p.add_argument("--out-design", help="design CSV path (x1..xq, weight)")
    p.add_argument("--out-trace", help="convergence trace CSV path")

    p = sub.add_parser("verify", help="certify an external design CSV")
    _common(p)
    p.add_argument("design", help="design CSV (x1..xq, weight)")

    p = sub.add_parser("benchmark", help="time-to-efficiency comparison of the solvers")
    _common(p)
    p.add_argument("--sizes", type=_int_list, help="comma-separated size parameters")
    p.add_argument("--algorithms", help="comma-separated subset of proposed,vdm,mul")
    p.add_argument("--criteria", help="comma-separated subset of D,A")
    p.add_argument("--budget", type=float, help="seconds per algorithm run")
    p.add_argument("--tick-clock", action="store_true",
                   help="replace wall time with a deterministic tick counter")
    p.add_argument("--out-csv", help="long-format CSV path")

    p = sub.add_parser("converge-n", help="objective on growing random candidate sets")
    _common(p)
    p.add_argument("--n-schedule", type=_int_list)
    p.add_argument("--replicates", type=int)
    p.add_argument("--out-csv")

    p = sub.add_parser("quad-scaling", help="lower-bound efficiency per iteration for large q")
    _common(p)
    p.add_argument("--q-list", type=_int_list)
    p.add_argument("--iterations", type=int)
    p.add_argument("--out-csv")
    return parser


_FLAT = ("preset", "model", "space", "criterion", "algorithm", "mul_lambda", "gamma", "delta",
         "max_iterations", "max_restart_rounds", "max_seconds", "trace_stride", "initial",
         "seed", "thread_count", "certify_tolerance")


def config_from_args(args):
    overrides = {k: getattr(args, k, None) for k in _FLAT}
    base = {}
    if args.config:
        try:
            with open(args.config) as fh:
                base = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(["<file>"], f"config is not valid JSON: {exc}") from None
        except OSError as exc:
            raise ConfigError(["<file>"], f"cannot read config: {exc}") from None
        if not isinstance(base, dict):
            raise ConfigError(["<root>"], "config must be a JSON object")
    if overrides["preset"] is not None:
        base.pop("model", None)
        base.pop("space", None)
    output = dict(base.get("output") or {})
    for key in ("result", "design", "trace", "csv"):
        v = getattr(args, f"out_{key}", None)
        if v:
            output[key] = v
    base["output"] = output
    sections = {
        "benchmark": {"sizes": "sizes", "algorithms": "algorithms", "criteria": "criteria",
                      "budget": "max_seconds"},
        "converge_n": {"n_schedule": "n_schedule", "replicates": "replicates"},
        "quad_scaling": {"q_list": "q_list", "iterations": "iterations"},
    }
    for section, mapping in sections.items():
        block = dict(base.get(section) or {})
        for arg, key in mapping.items():
            v = getattr(args, arg, None)
            if v is None:
                continue
            if arg in ("algorithms", "criteria"):
                v = [s.strip() for s in v.split(",") if s.strip()]
            block[key] = v
        if block:
            base[section] = block
    return load_config(None, {**base, **{k: v for k, v in overrides.items() if v is not None}})


def _error(kind, exc, code, keys=None):
    doc = {"status": "error", "error": kind, "message": str(exc)}
    if keys is not None:
        doc["keys"] = keys
    _emit(doc)
    _log(f"error: {exc}")
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        return _error("ConfigError", exc, EXIT_CONFIG, exc.keys)
    try:
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.design)
        if args.command == "benchmark":
            return cmd_benchmark(cfg, args.tick_clock)
        if args.command == "converge-n":
            return cmd_converge_n(cfg)
        return cmd_quad_scaling(cfg)
    except _NUMERICAL as exc:
        code = _error(type(exc).__name__, exc, EXIT_NUMERICAL)
        _write_json({"status": "error", "error": type(exc).__name__, "message": str(exc),
                     "config": cfg.to_dict()}, cfg.output.get("result"))
        return code
    except (InputError, ConfigError, ValueError, OSError) as exc:
        return _error(type(exc).__name__, exc, EXIT_CONFIG, getattr(exc, "keys", None))


if __name__ == "__main__":
    sys.exit(main())
