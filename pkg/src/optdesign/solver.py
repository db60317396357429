"""Multiplicative weight algorithms for approximate D- and A-optimal designs.

The proposed iterations update every candidate weight independently:

* D: ``w_i <- w_i * f_i^T M^{-1} f_i / p``
* A: ``w_i <- w_i * [(p-1)/p * f_i^T M^{-2} f_i / tr(M^{-1}) + 1/p]``

Both factors have weighted mean exactly one, so the simplex is preserved.
A phase iterates until the total absolute weight change drops below
``gamma``; :func:`solve` then prunes candidates with weight ``<= delta`` and
restarts on the survivors until the support stops changing.

:func:`solve_vdm` (Fedorov-Wynn vertex direction) and :func:`solve_mul`
(power-form multiplicative) are the baselines used for comparisons.
"""
import csv
import io
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .linalg import NotPositiveDefinite, cholesky, inverse_spd, log_det
from .optimality import SingularInformation, certificate, criterion_value
from .spaces import PRNG_ALGORITHM

__all__ = [
    "BLOCK_SIZE",
    "MERGE_RADIUS",
    "SupportCollapse",
    "IterationCapReached",
    "SolverConfig",
    "ConvergenceTrace",
    "Design",
    "initial_weights",
    "d_update",
    "a_update",
    "mul_update",
    "run_phase",
    "prune_support",
    "solve",
    "solve_vdm",
    "solve_mul",
    "run",
]

BLOCK_SIZE = 4096
MERGE_RADIUS = 1e-9
_CRITERIA = ("D", "A")
_ALGORITHMS = ("proposed", "vdm", "mul")


class SupportCollapse(ValueError):
    """Pruning left fewer than ``p`` support points (delta too large)."""


class IterationCapReached(RuntimeWarning):
    """A phase hit ``max_iterations`` (or the time budget) before converging."""


@dataclass
class SolverConfig:
    """Parameters shared by all algorithms.

    ``gamma`` is the stopping threshold: total absolute weight change for the
    proposed algorithm, equivalence gap for the VDM and MUL baselines.
    ``delta`` is the pruning threshold between restart rounds.
    """

    criterion: str = "D"
    algorithm: str = "proposed"
    gamma: float = 5e-4
    delta: float = 1e-4
    max_iterations: int = 100_000
    max_restart_rounds: int = 10
    mul_lambda: float = None
    record_trace: bool = True
    trace_stride: int = 1
    thread_count: int = 1
    max_seconds: float = None
    initial: str = "uniform"
    seed: int = None

    def __post_init__(self):
        errors = self.validate()
        if errors:
            raise ValueError("invalid solver config: " + "; ".join(errors))

    def validate(self):
        errors = []
        if self.criterion not in _CRITERIA:
            errors.append(f"criterion must be one of {_CRITERIA}")
        if self.algorithm not in _ALGORITHMS:
            errors.append(f"algorithm must be one of {_ALGORITHMS}")
        if not self.gamma > 0:
            errors.append("gamma must be > 0")
        if not 0 <= self.delta < 1:
            errors.append("delta must be in [0, 1)")
        for name in ("max_iterations", "max_restart_rounds", "trace_stride", "thread_count"):
            if int(getattr(self, name)) < 1:
                errors.append(f"{name} must be >= 1")
        if self.mul_lambda is not None and not 0 < self.mul_lambda <= 1:
            errors.append("mul_lambda must be in (0, 1]")
        if self.initial not in ("uniform", "dirichlet"):
            errors.append("initial must be 'uniform' or 'dirichlet'")
        if self.max_seconds is not None and not self.max_seconds > 0:
            errors.append("max_seconds must be > 0")
        return errors

    @property
    def effective_lambda(self):
        if self.mul_lambda is not None:
            return self.mul_lambda
        return 1.0 if self.criterion == "D" else 0.5

    def to_dict(self):
        return asdict(self)


# ------------------------------------------------------------------ traces

_TRACE_COLUMNS = ("iteration", "objective", "drift", "gap", "support_size", "elapsed_s")


@dataclass
class ConvergenceTrace:
    """Per-iteration record; ``phase`` tags rows with their restart round."""

    iteration: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    drift: list = field(default_factory=list)
    gap: list = field(default_factory=list)
    support_size: list = field(default_factory=list)
    elapsed_s: list = field(default_factory=list)
    phase: list = field(default_factory=list)
    converged: bool = False

    def append(self, iteration, objective, drift, gap, support_size, elapsed_s, phase):
        if self.iteration and iteration <= self.iteration[-1]:
            raise ValueError("trace iterations must be strictly increasing")
        self.iteration.append(int(iteration))
        self.objective.append(float(objective))
        self.drift.append(float(drift))
        self.gap.append(float(gap))
        self.support_size.append(int(support_size))
        self.elapsed_s.append(float(elapsed_s))
        self.phase.append(int(phase))

    def __len__(self):
        return len(self.iteration)

    def column(self, name):
        return np.asarray(getattr(self, name))

    def phases(self):
        """Yield ``(phase, row_indices)`` for each restart round."""
        ph = self.column("phase")
        for k in np.unique(ph):
            yield int(k), np.flatnonzero(ph == k)

    def to_csv(self, path=None):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(_TRACE_COLUMNS)
        for row in zip(*(getattr(self, c) for c in _TRACE_COLUMNS)):
            it, obj, dr, gap, k, el = row
            w.writerow([it, _fmt(obj), _fmt(dr), _fmt(gap), k, _fmt(el)])
        text = buf.getvalue()
        if path is None:
            return text
        with open(path, "w", newline="") as fh:
            fh.write(text)
        return None


def _fmt(v):
    return format(float(v), ".17g")


# ------------------------------------------------------------------ design


@dataclass
class Design:
    """Converged (or best-so-far) design on a candidate set."""

    support_points: np.ndarray
    support_weights: np.ndarray
    support_indices: np.ndarray
    weights: np.ndarray
    criterion: str
    algorithm: str
    objective: float
    iterations: int
    restart_rounds: int
    equivalence_gap: float
    certificate: object
    converged: bool

    @property
    def k(self):
        return len(self.support_weights)

    def merged_support(self, radius=MERGE_RADIUS):
        """Support with points closer than ``radius`` merged, sorted lexicographically."""
        order = np.lexsort(self.support_points.T[::-1])
        pts = self.support_points[order]
        wts = self.support_weights[order]
        # radius is far below any grid spacing, so near-duplicates sort adjacent
        new_group = np.ones(len(pts), dtype=bool)
        new_group[1:] = np.max(np.abs(np.diff(pts, axis=0)), axis=1) >= radius
        starts = np.flatnonzero(new_group)
        return pts[starts], np.add.reduceat(wts, starts)

    def to_csv(self, path=None):
        pts, wts = self.merged_support()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"x{j + 1}" for j in range(pts.shape[1])] + ["weight"])
        for x, wt in zip(pts, wts):
            w.writerow([_fmt(v) for v in x] + [_fmt(wt)])
        text = buf.getvalue()
        if path is None:
            return text
        with open(path, "w", newline="") as fh:
            fh.write(text)
        return None

    def to_dict(self):
        pts, wts = self.merged_support()
        return {
            "criterion": self.criterion,
            "algorithm": self.algorithm,
            "support_points": pts.tolist(),
            "support_weights": wts.tolist(),
            "objective": self.objective,
            "iterations": self.iterations,
            "restart_rounds": self.restart_rounds,
            "equivalence_gap": self.equivalence_gap,
            "converged": self.converged,
            "certificate": self.certificate.to_dict(),
        }


# ------------------------------------------------------------------ kernels


class _Kernel:
    """Blocked evaluation over candidate rows.

    Rows are split into fixed blocks of ``BLOCK_SIZE``; per-block partial
    results are combined by pairwise reduction in block order, so the output
    does not depend on ``threads``.
    """

    def __init__(self, regressors, threads=1):
        self.f = np.ascontiguousarray(regressors, dtype=float)
        n = self.f.shape[0]
        self.blocks = [slice(s, min(s + BLOCK_SIZE, n)) for s in range(0, n, BLOCK_SIZE)]
        self.threads = int(threads)
        self._pool = ThreadPoolExecutor(self.threads) if self.threads > 1 and len(self.blocks) > 1 else None

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()

    def _map(self, fn):
        if self._pool is None:
            return [fn(b) for b in self.blocks]
        return list(self._pool.map(fn, self.blocks))

    @staticmethod
    def _pairwise(parts):
        while len(parts) > 1:
            nxt = [parts[i] + parts[i + 1] for i in range(0, len(parts) - 1, 2)]
            if len(parts) % 2:
                nxt.append(parts[-1])
            parts = nxt
        return parts[0]

    def information(self, w):
        f = self.f

        def part(b):
            fb = f[b]
            return fb.T @ (w[b][:, None] * fb)

        m = self._pairwise(self._map(part))
        return 0.5 * (m + m.T)

    def factor(self, w):
        try:
            return cholesky(self.information(w))
        except NotPositiveDefinite as exc:
            raise SingularInformation(f"information matrix is singular: {exc}") from None

    def quad(self, m):
        f = self.f

        def part(b):
            g = f[b] @ m
            return np.einsum("ij,ij->i", g, f[b])

        return np.concatenate(self._map(part))

    def quad_squared(self, m):
        f = self.f

        def part(b):
            g = f[b] @ m
            return np.einsum("ij,ij->i", g, g)

        return np.concatenate(self._map(part))

    def abs_sum(self, v):
        return float(self._pairwise([np.sum(np.abs(v[b])) for b in self.blocks]))

    def total(self, v):
        return float(self._pairwise([np.sum(v[b]) for b in self.blocks]))


@dataclass
class _State:
    """Factor-derived quantities for the current weights."""

    objective: float
    stats: np.ndarray  # d_i for D, f_i^T M^-2 f_i for A
    minv: np.ndarray
    trace_inv: float
    gap: float


def _evaluate(kernel, w, criterion, p):
    fac = kernel.factor(w)
    minv = inverse_spd(fac)
    if criterion == "D":
        stats = kernel.quad(minv)
        return _State(-log_det(fac), stats, minv, float(np.trace(minv)), float(np.max(stats)) - p)
    stats = kernel.quad_squared(minv)
    tr = float(np.trace(minv))
    return _State(tr, stats, minv, tr, float(np.max(stats)) / tr - 1.0)


# ------------------------------------------------------------------ updates


def initial_weights(n, mode="uniform", seed=None):
    """Starting simplex vector: uniform ``1/n`` or a seeded flat Dirichlet draw."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if mode == "uniform":
        return np.full(n, 1.0 / n)
    if mode == "dirichlet":
        if seed is None:
            raise ValueError("dirichlet start needs a seed")
        rng = np.random.Generator(np.random.PCG64(seed))
        return rng.dirichlet(np.ones(n))
    raise ValueError(f"unknown initial weight mode {mode!r}")


def _renormalize(w):
    # the raw factors already have weighted mean 1; this only removes rounding drift
    return w / w.sum()


def _candidates_regressors(c):
    return c.regressors if hasattr(c, "regressors") else np.asarray(c, dtype=float)


def d_update(w, c):
    """One D-step ``w_i * f_i^T M^{-1} f_i / p`` on candidate set (or regressor array) ``c``."""
    f = _candidates_regressors(c)
    w = np.asarray(w, dtype=float)
    kernel = _Kernel(f)
    st = _evaluate(kernel, w, "D", f.shape[1])
    return _renormalize(w * st.stats / f.shape[1])


def _a_factor(stats, trace_inv, p):
    return (p - 1) / p * stats / trace_inv + 1.0 / p


def a_update(w, c):
    """One A-step ``w_i * [(p-1)/p * f_i^T M^-2 f_i / tr(M^-1) + 1/p]``."""
    f = _candidates_regressors(c)
    w = np.asarray(w, dtype=float)
    p = f.shape[1]
    st = _evaluate(_Kernel(f), w, "A", p)
    return _renormalize(w * _a_factor(st.stats, st.trace_inv, p))


def mul_update(w, c, criterion="D", lam=None):
    """Power-form multiplicative step ``w_i (s_i / sum_j w_j s_j)^lam``, renormalized."""
    f = _candidates_regressors(c)
    w = np.asarray(w, dtype=float)
    lam = (1.0 if criterion == "D" else 0.5) if lam is None else lam
    st = _evaluate(_Kernel(f), w, criterion, f.shape[1])
    return _mul_step(w, st.stats, lam)


def _mul_step(w, stats, lam):
    mean = float(np.dot(w, stats))
    ratio = stats / mean
    return _renormalize(w * (ratio if lam == 1.0 else ratio ** lam))


# ------------------------------------------------------------------ phases


class _Clock:
    def __init__(self, clock=None):
        self._now = clock or time.perf_counter
        self._t0 = self._now()

    def elapsed(self):
        return self._now() - self._t0


def run_phase(w0, c, cfg, trace=None, phase=0, iteration_offset=0, clock=None, monitor=None):
    """Iterate the proposed update until ``sum |w_h - w_{h-1}| < gamma``.

    Parameters
    ----------
    w0 : array_like (N,)
        Starting weights; zero weights stay zero.
    c : CandidateSet
    cfg : SolverConfig
    trace : ConvergenceTrace, optional
        Trace to extend; a new one is created otherwise.
    phase, iteration_offset : int
        Restart round tag and global iteration count before this phase.
    clock : callable or _Clock, optional
        Monotonic time source for ``elapsed_s``.
    monitor : callable, optional
        Called as ``monitor(iteration, phase, w, c)`` after every update.

    Returns
    -------
    weights : np.ndarray (N,)
    trace : ConvergenceTrace
        ``trace.converged`` is False if the iteration cap or time budget was hit;
        an :class:`IterationCapReached` warning is issued in that case.
    """
    clk = clock if isinstance(clock, _Clock) else _Clock(clock)
    trace = ConvergenceTrace() if trace is None else trace
    f = c.regressors
    p = f.shape[1]
    w = np.array(w0, dtype=float)
    kernel = _Kernel(f, cfg.thread_count)
    try:
        st = _evaluate(kernel, w, cfg.criterion, p)
        record = cfg.record_trace
        if record and (len(trace) == 0 or trace.iteration[-1] < iteration_offset):
            trace.append(iteration_offset, st.objective, math.nan, st.gap,
                         int(np.count_nonzero(w > cfg.delta)), clk.elapsed(), phase)
        converged = False
        h = 0
        for h in range(1, cfg.max_iterations + 1):
            if cfg.criterion == "D":
                w_new = _renormalize(w * st.stats / p)
            else:
                w_new = _renormalize(w * _a_factor(st.stats, st.trace_inv, p))
            drift = kernel.abs_sum(w_new - w)
            w = w_new
            if monitor is not None:
                monitor(iteration_offset + h, phase, w, c)
            st = _evaluate(kernel, w, cfg.criterion, p)
            converged = drift < cfg.gamma
            out_of_time = cfg.max_seconds is not None and clk.elapsed() > cfg.max_seconds
            last = converged or out_of_time or h == cfg.max_iterations
            if record and (h % cfg.trace_stride == 0 or last):
                trace.append(iteration_offset + h, st.objective, drift, st.gap,
                             int(np.count_nonzero(w > cfg.delta)), clk.elapsed(), phase)
            if converged or out_of_time:
                break
    finally:
        kernel.close()
    trace.converged = converged
    trace.last_iteration = iteration_offset + h
    if not converged:
        warnings.warn(
            f"phase {phase} stopped after {h} iterations without reaching gamma={cfg.gamma}",
            IterationCapReached, stacklevel=2,
        )
    return w, trace


def prune_support(w, c, delta):
    """Keep candidates with ``w_i > delta`` and renormalize their weights.

    Returns ``(subset, weights, kept_index)``.

    Raises
    ------
    SupportCollapse
        If fewer than ``p`` candidates survive.
    """
    w = np.asarray(w, dtype=float)
    keep = np.flatnonzero(w > delta)
    if keep.size < c.p:
        raise SupportCollapse(
            f"only {keep.size} weights exceed delta={delta}, need at least p={c.p}"
        )
    if keep.size == c.n:
        return c, w, keep
    wk = w[keep]
    return c.subset(keep), wk / wk.sum(), keep


def _finish(c, w, cfg, algorithm, iterations, rounds, converged, support_mask=None):
    w = np.asarray(w, dtype=float)
    mask = w > 0 if support_mask is None else support_mask
    idx = np.flatnonzero(mask)
    sw = w[idx] / w[idx].sum()
    full = np.zeros(c.n)
    full[idx] = sw
    cert = certificate(full, c, cfg.criterion)
    return Design(
        support_points=c.points[idx].copy(),
        support_weights=sw,
        support_indices=idx,
        weights=full,
        criterion=cfg.criterion,
        algorithm=algorithm,
        objective=criterion_value(full, c.regressors, cfg.criterion),
        iterations=int(iterations),
        restart_rounds=int(rounds),
        equivalence_gap=cert.gap,
        certificate=cert,
        converged=bool(converged),
    )


def _start(c, cfg):
    w = initial_weights(c.n, cfg.initial, cfg.seed)
    if c.n < c.p:
        raise SingularInformation(f"{c.n} candidates cannot span p={c.p} parameters")
    return w


def solve(c, cfg=None, clock=None, monitor=None):
    """Proposed algorithm with prune-and-restart.

    Runs a phase, prunes weights ``<= delta``, renormalizes the survivors
    (warm start) and repeats until a round prunes nothing or
    ``max_restart_rounds`` phases have run. The certificate and gap are
    evaluated over the full candidate set. ``monitor(iteration, phase, w, c)``
    sees the working weights and working candidate set after every update and
    after every pruning.

    Returns
    -------
    design : Design
    trace : ConvergenceTrace
    """
    cfg = cfg or SolverConfig()
    if cfg.algorithm != "proposed":
        return run(c, cfg, clock=clock)
    clk = _Clock(clock)
    w = _start(c, cfg)
    idx = np.arange(c.n)
    work = c
    trace = ConvergenceTrace()
    iterations = 0
    converged = False
    rounds = 0
    for rnd in range(cfg.max_restart_rounds):
        rounds = rnd
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IterationCapReached)
            w, trace = run_phase(w, work, cfg, trace, phase=rnd,
                                 iteration_offset=iterations, clock=clk, monitor=monitor)
        iterations = trace.last_iteration
        converged = trace.converged
        work_new, w, kept = prune_support(w, work, cfg.delta)
        if monitor is not None:
            monitor(iterations, rnd, w, work_new)
        if kept.size == work.n:
            break
        idx = idx[kept]
        work = work_new
    if not converged:
        warnings.warn("solve finished without meeting the stopping rule", IterationCapReached,
                      stacklevel=2)
    full = np.zeros(c.n)
    full[idx] = w
    trace.converged = converged
    return _finish(c, full, cfg, "proposed", iterations, rounds, converged), trace


# ------------------------------------------------------------------ baselines


def _golden_section(fn, lo, hi, tol=1e-12, max_iter=200):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    # the line search can only accept a step that does not increase the trace
    return x if fn(x) <= fn(lo) else lo


def _baseline_loop(c, cfg, step, name, clock):
    """Shared driver: ``step(state) -> (drift, state)`` until gap < gamma."""
    clk = _Clock(clock)
    trace = ConvergenceTrace()
    w = _start(c, cfg)
    kernel = _Kernel(c.regressors, cfg.thread_count)
    p = c.p
    converged = False
    h = 0
    try:
        st = _evaluate(kernel, w, cfg.criterion, p)
        if cfg.record_trace:
            trace.append(0, st.objective, math.nan, st.gap, int(np.count_nonzero(w > cfg.delta)),
                         clk.elapsed(), 0)
        for h in range(1, cfg.max_iterations + 1):
            if st.gap < cfg.gamma:
                converged = True
                h -= 1
                break
            w, st, drift = step(kernel, w, st, h)
            out_of_time = cfg.max_seconds is not None and clk.elapsed() > cfg.max_seconds
            done = st.gap < cfg.gamma or out_of_time or h == cfg.max_iterations
            if cfg.record_trace and (h % cfg.trace_stride == 0 or done):
                trace.append(h, st.objective, drift, st.gap,
                             int(np.count_nonzero(w > cfg.delta)), clk.elapsed(), 0)
            if st.gap < cfg.gamma:
                converged = True
                break
            if out_of_time:
                break
    finally:
        kernel.close()
    trace.converged = converged
    trace.last_iteration = h
    if not converged:
        warnings.warn(f"{name} stopped after {h} iterations with gap above gamma",
                      IterationCapReached, stacklevel=3)
    return _finish(c, w, cfg, name, h, 0, converged), trace


def solve_vdm(c, cfg=None, clock=None, refresh=200):
    """Fedorov-Wynn vertex direction method.

    Each step moves mass toward the candidate maximizing the directional
    derivative, ``w <- (1 - a) w + a e_j``. D uses the closed-form step
    ``a = (d_j - p) / (p (d_j - 1))``; A uses a golden-section line search on
    ``[0, 1)``. ``M^{-1}`` and the per-candidate statistics are updated by
    Sherman-Morrison and recomputed exactly every ``refresh`` steps.
    """
    cfg = cfg or SolverConfig(algorithm="vdm")
    p = c.p
    f = c.regressors

    def step(kernel, w, st, h):
        j = int(np.argmax(st.stats))
        fj = f[j]
        B = st.minv
        u = B @ fj
        dj = float(fj @ u)
        if cfg.criterion == "D":
            alpha = (dj - p) / (p * (dj - 1.0)) if dj > p else 0.0
        else:
            phij = float(u @ u)
            tr = st.trace_inv

            def trace_after(a):
                if a >= 1.0:
                    return math.inf
                beta = a / (1.0 - a)
                return (tr - beta * phij / (1.0 + beta * dj)) / (1.0 - a)

            alpha = _golden_section(trace_after, 0.0, 1.0 - 1e-12)
        alpha = min(max(alpha, 0.0), 1.0 - 1e-12)
        w_new = (1.0 - alpha) * w
        w_new[j] += alpha
        drift = 2.0 * alpha * (1.0 - w[j])
        if h % refresh == 0 or alpha == 0.0:
            return w_new, _evaluate(kernel, w_new, cfg.criterion, p), drift
        beta = alpha / (1.0 - alpha)
        cc = beta / (1.0 + beta * dj)
        g = f @ u
        minv = (B - cc * np.outer(u, u)) / (1.0 - alpha)
        minv = 0.5 * (minv + minv.T)
        tr = float(np.trace(minv))
        if cfg.criterion == "D":
            stats = (st.stats - cc * g * g) / (1.0 - alpha)
            obj = st.objective - p * math.log1p(-alpha) - math.log1p(beta * dj)
            gap = float(np.max(stats)) - p
        else:
            hvec = f @ (B @ u)
            uu = float(u @ u)
            stats = (st.stats - 2.0 * cc * g * hvec + cc * cc * uu * g * g) / (1.0 - alpha) ** 2
            obj = tr
            gap = float(np.max(stats)) / tr - 1.0
        return w_new, _State(obj, stats, minv, tr, gap), drift

    return _baseline_loop(c, cfg, step, "vdm", clock)


def solve_mul(c, cfg=None, lam=None, clock=None):
    """Power-form multiplicative algorithm without pruning.

    ``w_i <- w_i (s_i / sum_j w_j s_j)^lam`` with ``s_i = f_i^T M^{-1} f_i``
    (D) or ``f_i^T M^{-2} f_i`` (A). ``lam = 1`` with D is exactly the
    proposed D-step; the default for A is ``1/2``.
    """
    cfg = cfg or SolverConfig(algorithm="mul")
    lam = cfg.effective_lambda if lam is None else lam
    if not 0 < lam <= 1:
        raise ValueError("lambda must be in (0, 1]")
    p = c.p

    def step(kernel, w, st, h):
        w_new = _mul_step(w, st.stats, lam)
        drift = kernel.abs_sum(w_new - w)
        return w_new, _evaluate(kernel, w_new, cfg.criterion, p), drift

    return _baseline_loop(c, cfg, step, "mul", clock)


def run(c, cfg, clock=None):
    """Dispatch on ``cfg.algorithm``."""
    if cfg.algorithm == "proposed":
        return solve(c, cfg, clock=clock)
    if cfg.algorithm == "vdm":
        return solve_vdm(c, cfg, clock=clock)
    return solve_mul(c, cfg, clock=clock)


def prng_metadata(seed):
    return {"algorithm": PRNG_ALGORITHM, "seed": seed}
