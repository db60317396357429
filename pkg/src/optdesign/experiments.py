"""Experiment drivers behind the ``benchmark``, ``converge-n`` and
``quad-scaling`` commands. Each returns plain row dicts; writing is left to
the caller.
"""
import math
import warnings

import numpy as np
from scipy.stats import qmc

from .solver import IterationCapReached, SolverConfig, run, run_phase, solve
from .spaces import CandidateSet, FeatureMap, SpaceSpec, build_candidates

__all__ = [
    "BENCHMARK_COLUMNS",
    "CONVERGE_COLUMNS",
    "SCALING_COLUMNS",
    "TickClock",
    "resized",
    "efficiency_from_objective",
    "benchmark",
    "derive_seed",
    "converge_n",
    "scaling_candidates",
    "quadratic_scaling",
    "log_efficiency",
]

BENCHMARK_COLUMNS = ("criterion", "algorithm", "n", "iteration", "elapsed_s", "objective",
                     "efficiency_vs_reference")
CONVERGE_COLUMNS = ("n", "replicate", "seed", "objective", "gap_to_continuous_reference")
SCALING_COLUMNS = ("q", "p", "n", "iteration", "objective", "efficiency_lower_bound",
                   "best_lower_bound", "log_efficiency")

_SIZE_KEY = {"square_grid": "side", "cube_grid": "side", "disk_grid": "resolution",
             "wynn_grid": "resolution", "sphere_fibonacci": "n", "square_random": "n",
             "cube_random": "n", "disk_random": "n"}
_RANDOM_KINDS = ("square_random", "disk_random", "cube_random")
_REFERENCE_SPACE = {"square_random": {"kind": "square_grid", "side": 21},
                    "disk_random": {"kind": "disk_grid", "resolution": 51},
                    "cube_random": {"kind": "cube_grid", "side": 11}}
_REFERENCE_GAMMA = 1e-6


class TickClock:
    """Deterministic stand-in for a monotonic clock: every read advances ``tick`` seconds."""

    def __init__(self, tick=1e-3):
        self.tick = tick
        self._n = 0

    def __call__(self):
        self._n += 1
        return self._n * self.tick


def resized(space, size):
    """Copy of a space dict with its size parameter set to ``size``."""
    kind = space["kind"]
    if kind not in _SIZE_KEY:
        raise ValueError(f"space kind {kind!r} has no size parameter")
    return {**space, _SIZE_KEY[kind]: int(size)}


def efficiency_from_objective(objective, reference, criterion):
    """Efficiency in ``(0, 1]`` against an optimal reference objective.

    D: ``|M| / |M_ref| = exp(ref - obj)`` with ``obj = -log|M|``.
    A: ``tr(M_ref^-1) / tr(M^-1)``.
    """
    if criterion == "D":
        return math.exp(reference - objective)
    return reference / objective


def _quiet(fn, *args, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IterationCapReached)
        return fn(*args, **kwargs)


def benchmark(fmap, space, sizes, algorithms=("proposed", "vdm", "mul"), criteria=("D", "A"),
              max_seconds=60.0, proposed_gamma=1e-5, baseline_gamma=1e-4,
              reference_gamma=1e-8, trace_stride=10, thread_count=1, seed=None,
              clock=None, log=None):
    """Time-to-efficiency comparison of the solvers.

    For each criterion and candidate-set size the reference design is solved
    first with ``reference_gamma``; each algorithm then runs under a
    ``max_seconds`` budget and every recorded trace row is converted to an
    efficiency against the reference.

    Parameters
    ----------
    clock : callable, optional
        Zero-argument factory returning a fresh time source per run; defaults
        to ``time.perf_counter``. Pass :class:`TickClock` for byte-stable output.

    Returns
    -------
    rows : list of dict
        Keys as in ``BENCHMARK_COLUMNS``; one row per trace row.
    summary : list of dict
        Per (criterion, size, algorithm): final efficiency, time to 0.999,
        converged flag.
    """
    rows, summary = [], []
    for size in sizes:
        cands = build_candidates(SpaceSpec.from_dict(resized(space, size)), fmap)
        for crit in criteria:
            ref_cfg = SolverConfig(criterion=crit, gamma=reference_gamma, record_trace=False,
                                   thread_count=thread_count, seed=seed)
            ref, _ = _quiet(solve, cands, ref_cfg)
            if log:
                log(f"{crit} reference on n={cands.n}: objective {ref.objective:.10g}")
            for alg in algorithms:
                cfg = SolverConfig(
                    criterion=crit, algorithm=alg,
                    gamma=proposed_gamma if alg == "proposed" else baseline_gamma,
                    trace_stride=trace_stride, thread_count=thread_count,
                    max_seconds=max_seconds, seed=seed,
                )
                design, trace = _quiet(run, cands, cfg, clock() if clock else None)
                eff = [efficiency_from_objective(o, ref.objective, crit) for o in trace.objective]
                for it, el, obj, e in zip(trace.iteration, trace.elapsed_s, trace.objective, eff):
                    rows.append({"criterion": crit, "algorithm": alg, "n": cands.n,
                                 "iteration": it, "elapsed_s": el, "objective": obj,
                                 "efficiency_vs_reference": e})
                hit = [el for el, e in zip(trace.elapsed_s, eff) if e >= 0.999]
                summary.append({
                    "criterion": crit, "algorithm": alg, "n": cands.n,
                    "reference_objective": ref.objective,
                    "final_efficiency": efficiency_from_objective(design.objective,
                                                                  ref.objective, crit),
                    "seconds_to_0999": hit[0] if hit else None,
                    "iterations": design.iterations,
                    "converged": design.converged,
                })
                if log:
                    log(f"{crit} {alg} n={cands.n}: efficiency {summary[-1]['final_efficiency']:.6f}")
    return rows, summary


def derive_seed(base, n, replicate):
    """Per-run candidate seed, a pure function of the config seed, ``n`` and replicate."""
    return int(np.random.SeedSequence([int(base), int(n), int(replicate)]).generate_state(1)[0])


def converge_n(fmap, space, n_schedule, replicates=5, seed=0, reference_space=None,
               solver_config=None, log=None):
    """Objective of designs on growing random candidate sets.

    Returns
    -------
    rows : list of dict
        Keys as in ``CONVERGE_COLUMNS``.
    reference_objective : float
        Objective on the fine reference grid.
    """
    kind = space["kind"]
    if kind not in _RANDOM_KINDS:
        raise ValueError(f"space kind {kind!r} does not support random sampling; "
                         f"use one of {_RANDOM_KINDS}")
    cfg = solver_config or SolverConfig()
    ref_space = reference_space or _REFERENCE_SPACE[kind]
    ref_cands = build_candidates(SpaceSpec.from_dict(ref_space), fmap)
    ref_cfg = SolverConfig(criterion=cfg.criterion, gamma=_REFERENCE_GAMMA, record_trace=False)
    ref, _ = _quiet(solve, ref_cands, ref_cfg)
    if log:
        log(f"reference objective {ref.objective:.10g} on n={ref_cands.n}")
    rows = []
    for n in n_schedule:
        for r in range(replicates):
            s = derive_seed(seed, n, r)
            cands = build_candidates(SpaceSpec.from_dict({**space, "n": int(n), "seed": s}), fmap)
            design, _ = _quiet(solve, cands, cfg)
            rows.append({"n": int(n), "replicate": r, "seed": s, "objective": design.objective,
                         "gap_to_continuous_reference": design.objective - ref.objective})
        if log:
            med = np.median([row["gap_to_continuous_reference"] for row in rows[-replicates:]])
            log(f"n={n}: median gap {med:.6g}")
    return rows, ref.objective


def scaling_candidates(q, n_random=2000, n_factorial=1000, seed=0, fmap=None):
    """Latin-hypercube points in ``[-1, 1]^q`` plus sampled 3-level factorial points.

    The full ``3^q`` factorial is out of reach for large ``q``, so
    ``n_factorial`` of its points are drawn (with the centre always included).
    """
    fmap = fmap or FeatureMap.full_quadratic(q)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(q)])))
    lhs = qmc.LatinHypercube(d=q, seed=rng).random(n_random) * 2.0 - 1.0
    levels = rng.integers(-1, 2, size=(n_factorial, q)).astype(float)
    fact = np.unique(np.vstack([np.zeros((1, q)), levels]), axis=0)
    return CandidateSet.from_points(
        np.vstack([lhs, fact]), fmap,
        metadata={"space": "lhs_plus_factorial", "q": q, "seed": seed},
    )


def log_efficiency(gap, p):
    """``-log10(1 - eff)`` with ``eff = p / (p + gap)``, the D lower bound.

    ``1 - eff`` is floored at ``1e-16`` so an exact optimum maps to 16.
    """
    eff = p / (p + gap)
    return -math.log10(max(1.0 - eff, 1e-16))


def quadratic_scaling(q_list, iterations=200, n_random=2000, n_factorial=1000, seed=0,
                      thread_count=1, log=None):
    """Per-iteration D lower-bound efficiency of the proposed update for growing ``q``.

    Runs a single phase (no pruning) for exactly ``iterations`` steps unless
    the weights stop moving first.

    ``p / max_i d_i`` is not monotone along the iterations, but the objective
    is, so any earlier bound also bounds the current iterate. ``log_efficiency``
    is computed from that running maximum (``best_lower_bound``).
    """
    rows = []
    for q in q_list:
        if q < 1:
            raise ValueError("q must be >= 1")
        cands = scaling_candidates(q, n_random, n_factorial, seed)
        cfg = SolverConfig(criterion="D", gamma=np.finfo(float).tiny, max_iterations=iterations,
                           thread_count=thread_count)
        _, trace = _quiet(run_phase, np.full(cands.n, 1.0 / cands.n), cands, cfg)
        best = 0.0
        for it, obj, gap in zip(trace.iteration, trace.objective, trace.gap):
            eff = cands.p / (cands.p + gap)
            best = max(best, eff)
            rows.append({"q": q, "p": cands.p, "n": cands.n, "iteration": it, "objective": obj,
                         "efficiency_lower_bound": eff, "best_lower_bound": best,
                         "log_efficiency": log_efficiency(cands.p / best - cands.p, cands.p)})
        if log:
            log(f"q={q} p={cands.p} n={cands.n}: final -log10(1-eff) {rows[-1]['log_efficiency']:.4f}")
    return rows
