"""Regressors and candidate-set generators.

A :class:`FeatureMap` turns a design point ``x`` in ``R^q`` into its regressor
``f(x)`` in ``R^p``; a :class:`CandidateSet` bundles ``N`` points with their
precomputed regressors. Generators cover the square, disk, Wynn polygon,
cube and sphere design spaces plus seeded uniform rejection sampling.
"""
import csv
import io
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PRNG_ALGORITHM",
    "RejectionStall",
    "FeatureMap",
    "CandidateSet",
    "SpaceSpec",
    "evaluate_features",
    "square_grid",
    "cube_grid",
    "disk_points",
    "wynn_polygon_points",
    "sphere_fibonacci",
    "random_candidates",
    "in_square",
    "in_cube",
    "in_disk",
    "in_wynn_polygon",
    "on_sphere",
    "WYNN_D_SUPPORT",
    "WYNN_A_SUPPORT",
    "build_candidates",
    "candidates_to_csv",
    "candidates_from_csv",
]

PRNG_ALGORITHM = "numpy.random.PCG64"

_SQRT2 = math.sqrt(2.0)
_MEMBERSHIP_TOL = 1e-12
_GOLDEN_CONJUGATE = (math.sqrt(5.0) - 1.0) / 2.0


class RejectionStall(RuntimeError):
    """Rejection sampling accepted too few proposals; the box is likely wrong."""


# ---------------------------------------------------------------- features


def _quadratic_terms(q, intercept):
    terms = []
    if intercept:
        terms.append((0,) * q)
    for j in range(q):
        e = [0] * q
        e[j] = 1
        terms.append(tuple(e))
    for j in range(q):
        for k in range(j, q):
            e = [0] * q
            e[j] += 1
            e[k] += 1
            terms.append(tuple(e))
    return tuple(terms)


@dataclass(frozen=True)
class FeatureMap:
    """Monomial regressor ``f(x) = (prod_j x_j^{e_j})`` over a fixed term list.

    Use :meth:`full_quadratic`, :meth:`quadratic_no_intercept` or
    :meth:`custom`. Quadratic term order is: intercept, ``x_1..x_q``, then
    ``x_j x_k`` for ``j <= k`` in lexicographic ``(j, k)`` order.
    """

    kind: str
    input_dim: int
    terms: tuple

    def __post_init__(self):
        if self.input_dim < 1:
            raise ValueError("input_dim must be >= 1")
        if not self.terms:
            raise ValueError("term list must be nonempty")
        for t in self.terms:
            if len(t) != self.input_dim or any(int(e) != e or e < 0 for e in t):
                raise ValueError(f"bad monomial exponent vector {t!r}")

    @classmethod
    def full_quadratic(cls, q):
        return cls("full_quadratic", q, _quadratic_terms(q, True))

    @classmethod
    def quadratic_no_intercept(cls, q):
        return cls("quadratic_no_intercept", q, _quadratic_terms(q, False))

    @classmethod
    def custom(cls, terms):
        terms = tuple(tuple(int(e) for e in t) for t in terms)
        if not terms:
            raise ValueError("term list must be nonempty")
        return cls("custom", len(terms[0]), terms)

    @property
    def output_dim(self):
        return len(self.terms)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[1] != self.input_dim:
            raise ValueError(
                f"points have dimension {x.shape[1]}, feature map expects {self.input_dim}"
            )
        out = np.empty((x.shape[0], self.output_dim))
        for col, t in enumerate(self.terms):
            v = np.ones(x.shape[0])
            for j, e in enumerate(t):
                # repeated products, not pow(), so x1*x1 matches x1**2 bit for bit
                for _ in range(e):
                    v = v * x[:, j]
            out[:, col] = v
        return out[0] if single else out

    def to_dict(self):
        if self.kind == "custom":
            return {"kind": "custom", "terms": [list(t) for t in self.terms]}
        return {"kind": self.kind, "q": self.input_dim}

    @classmethod
    def from_dict(cls, d):
        kind = d.get("kind")
        if kind == "full_quadratic":
            return cls.full_quadratic(int(d["q"]))
        if kind == "quadratic_no_intercept":
            return cls.quadratic_no_intercept(int(d["q"]))
        if kind == "custom":
            return cls.custom(d["terms"])
        raise ValueError(f"unknown feature map kind {kind!r}")


def evaluate_features(fmap, x):
    """Regressor vector ``f(x)`` for a single point."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("evaluate_features takes a single point")
    return fmap(x)


# ---------------------------------------------------------------- candidates


def _canonical_order(points):
    """Lexicographic row order (first coordinate most significant)."""
    if points.shape[0] == 0:
        return np.arange(0)
    return np.lexsort(points.T[::-1])


@dataclass(frozen=True, eq=False)
class CandidateSet:
    """``N`` design points with their regressors ``f(x_i)`` precomputed."""

    points: np.ndarray
    regressors: np.ndarray
    fmap: FeatureMap
    labels: tuple = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.points.ndim != 2 or self.points.shape[0] < 1:
            raise ValueError("a candidate set needs at least one point")
        if self.regressors.shape != (self.points.shape[0], self.fmap.output_dim):
            raise ValueError("regressors do not match points and feature map")
        self.points.setflags(write=False)
        self.regressors.setflags(write=False)

    @classmethod
    def from_points(cls, points, fmap, labels=None, sort=True, metadata=None):
        points = np.array(points, dtype=float, ndmin=2)
        if sort:
            order = _canonical_order(points)
            points = points[order]
            if labels is not None:
                labels = tuple(labels[i] for i in order)
        return cls(points, fmap(points), fmap, labels, dict(metadata or {}))

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def q(self):
        return self.points.shape[1]

    @property
    def p(self):
        return self.regressors.shape[1]

    def __len__(self):
        return self.n

    def subset(self, mask_or_index):
        idx = np.arange(self.n)[mask_or_index]
        labels = None if self.labels is None else tuple(self.labels[i] for i in idx)
        return CandidateSet(
            self.points[idx].copy(), self.regressors[idx].copy(), self.fmap, labels,
            dict(self.metadata),
        )

    def with_points(self, extra, tol=1e-9):
        """Append points not already present (within ``tol``), re-sorting."""
        extra = np.array(extra, dtype=float, ndmin=2)
        keep = [x for x in extra if np.min(np.max(np.abs(self.points - x), axis=1)) > tol]
        if not keep:
            return self
        return CandidateSet.from_points(
            np.vstack([self.points, np.array(keep)]), self.fmap, metadata=self.metadata
        )

    def index_of(self, x, tol=1e-9):
        """Index of the candidate within ``tol`` (max-norm) of ``x``, else -1."""
        dist = np.max(np.abs(self.points - np.asarray(x, dtype=float)), axis=1)
        i = int(np.argmin(dist))
        return i if dist[i] <= tol else -1


# ---------------------------------------------------------------- membership


def in_square(x):
    x = np.atleast_2d(x)
    return np.all(np.abs(x) <= 1.0 + _MEMBERSHIP_TOL, axis=1)


in_cube = in_square


def in_disk(x):
    x = np.atleast_2d(x)
    return np.sum(x * x, axis=1) <= 1.0 + _MEMBERSHIP_TOL


def in_wynn_polygon(x):
    """Wynn's polygon: the unit disk cut by ``x1, x2 >= -sqrt(2)/4`` and
    ``x1 <= (x2 + sqrt 2)/3``, ``x2 <= (x1 + sqrt 2)/3`` (symmetric in x1, x2)."""
    x = np.atleast_2d(x)
    x1, x2 = x[:, 0], x[:, 1]
    t = _MEMBERSHIP_TOL
    return (
        (x1 >= -_SQRT2 / 4 - t)
        & (x2 >= -_SQRT2 / 4 - t)
        & (x1 <= (x2 + _SQRT2) / 3 + t)
        & (x2 <= (x1 + _SQRT2) / 3 + t)
        & (x1 * x1 + x2 * x2 <= 1.0 + t)
    )


def on_sphere(x, tol=1e-9):
    x = np.atleast_2d(x)
    return np.abs(np.sqrt(np.sum(x * x, axis=1)) - 1.0) <= tol


# ---------------------------------------------------------------- generators


def _axis(side):
    if side < 2:
        raise ValueError("side must be >= 2")
    # -1 + 2k/(s-1); the middle entry of an odd grid is exactly 0
    k = np.arange(side)
    ax = -1.0 + 2.0 * k / (side - 1)
    ax[k * 2 == side - 1] = 0.0
    return ax


def _product(axis, q):
    return np.array(list(itertools.product(axis, repeat=q)), dtype=float)


def square_grid(side, fmap=None):
    """``side x side`` uniform grid on ``[-1, 1]^2``."""
    fmap = fmap or FeatureMap.full_quadratic(2)
    return CandidateSet.from_points(_product(_axis(side), 2), fmap,
                                    metadata={"space": "square_grid", "side": side})


def cube_grid(side, fmap=None):
    """``side^3`` uniform grid on ``[-1, 1]^3``."""
    fmap = fmap or FeatureMap.full_quadratic(3)
    return CandidateSet.from_points(_product(_axis(side), 3), fmap,
                                    metadata={"space": "cube_grid", "side": side})


def disk_points(resolution=None, n=None, seed=None, fmap=None):
    """Candidates in the unit disk.

    With ``resolution`` the square grid of that side is filtered to the disk;
    with ``n`` and ``seed`` points are rejection-sampled uniformly.
    """
    fmap = fmap or FeatureMap.full_quadratic(2)
    if resolution is not None:
        g = _product(_axis(resolution), 2)
        return CandidateSet.from_points(g[in_disk(g)], fmap,
                                        metadata={"space": "disk_grid", "resolution": resolution})
    if n is None or seed is None:
        raise ValueError("disk_points needs either resolution or (n, seed)")
    box = np.array([[-1.0, 1.0], [-1.0, 1.0]])
    return random_candidates(in_disk, n, seed, box, fmap)


# Support points reported for the D- and A-optimal designs on Wynn's polygon,
# to two decimals. They are injected so those designs are representable.
WYNN_D_SUPPORT = np.array([
    (-0.35, -0.35), (-0.35, 0.35), (0.12, 0.12), (0.18, 0.53),
    (0.35, -0.35), (0.53, 0.18), (0.70, 0.70),
])
WYNN_A_SUPPORT = np.array([
    (-0.35, -0.35), (-0.35, 0.35), (0.07, 0.07), (0.21, 0.54),
    (0.35, -0.35), (0.54, 0.21), (0.70, 0.70),
])


def wynn_polygon_points(resolution, inject=True, fmap=None):
    """Grid points ``k / resolution`` inside Wynn's polygon.

    The grid is anchored at the origin with spacing ``h = 1/resolution`` over
    the bounding box ``[-sqrt(2)/4, 1]^2``; ``resolution`` a multiple of 100
    contains every two-decimal point. With ``inject`` the reference support
    points in ``WYNN_D_SUPPORT`` and ``WYNN_A_SUPPORT`` are always added.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    fmap = fmap or FeatureMap.full_quadratic(2)
    lo = -_SQRT2 / 4
    k = np.arange(math.ceil(lo * resolution - 1e-9), resolution + 1)
    ax = k / resolution
    ax = ax[ax >= lo - _MEMBERSHIP_TOL]
    g = _product(ax, 2)
    g = g[in_wynn_polygon(g)]
    if inject:
        g = np.vstack([g, WYNN_D_SUPPORT, WYNN_A_SUPPORT])
        g = np.unique(np.round(g, 12), axis=0)
    return CandidateSet.from_points(
        g, fmap, metadata={"space": "wynn_grid", "resolution": resolution, "inject": inject}
    )


def sphere_fibonacci(n, fmap=None):
    """Fibonacci lattice on the unit sphere.

    ``z_i = 1 - (2i+1)/n`` and azimuth ``2 pi i phi`` with ``phi`` the golden
    ratio conjugate, ``i = 0..n-1``. The default regressor is the quadratic
    model without intercept (``p = 9``).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    fmap = fmap or FeatureMap.quadratic_no_intercept(3)
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    theta = 2.0 * np.pi * ((i * _GOLDEN_CONJUGATE) % 1.0)
    r = np.sqrt(1.0 - z * z)
    pts = np.column_stack([r * np.cos(theta), r * np.sin(theta), z])
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    return CandidateSet.from_points(pts, fmap, metadata={"space": "sphere_fibonacci", "n": n})


def random_candidates(member, n, seed, box, fmap, batch=None, stall_window=100_000,
                      min_acceptance=1e-4):
    """Uniform points from a region by rejection sampling in a proposal box.

    Parameters
    ----------
    member : callable
        Vectorized membership predicate, rows -> bool array.
    n : int
        Number of accepted points.
    seed : int
        Seed for a ``PCG64`` generator; identical seeds give identical sets.
    box : array_like (q, 2)
        Lower and upper bounds of the proposal box.

    Raises
    ------
    RejectionStall
        If fewer than ``min_acceptance`` of the first ``stall_window``
        proposals are accepted.
    """
    box = np.asarray(box, dtype=float)
    if box.ndim != 2 or box.shape[1] != 2 or np.any(box[:, 1] <= box[:, 0]):
        raise ValueError("proposal box must be (q, 2) with positive widths")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    q = box.shape[0]
    batch = batch or max(1024, 2 * n)
    accepted = []
    count = proposed = 0
    while count < n:
        u = rng.random((batch, q))
        x = box[:, 0] + u * (box[:, 1] - box[:, 0])
        keep = x[member(x)]
        accepted.append(keep)
        count += keep.shape[0]
        proposed += batch
        if proposed >= stall_window and count < min_acceptance * proposed:
            raise RejectionStall(
                f"accepted {count} of {proposed} proposals; check the proposal box"
            )
    pts = np.vstack(accepted)[:n]
    return CandidateSet.from_points(
        pts, fmap,
        metadata={"space": "random", "n": n, "seed": seed, "prng": PRNG_ALGORITHM,
                  "acceptance_rate": count / proposed},
    )


# ---------------------------------------------------------------- specs


_SPACE_KINDS = {
    "square_grid": ("side",),
    "cube_grid": ("side",),
    "disk_grid": ("resolution",),
    "disk_random": ("n", "seed"),
    "wynn_grid": ("resolution",),
    "sphere_fibonacci": ("n",),
    "square_random": ("n", "seed"),
    "cube_random": ("n", "seed"),
    "custom": ("points",),
}

_SPACE_OPTIONAL = {"wynn_grid": ("inject",)}

_MEMBERSHIP = {
    "square_grid": in_square,
    "square_random": in_square,
    "cube_grid": in_cube,
    "cube_random": in_cube,
    "disk_grid": in_disk,
    "disk_random": in_disk,
    "wynn_grid": in_wynn_polygon,
    "sphere_fibonacci": on_sphere,
}


@dataclass(frozen=True)
class SpaceSpec:
    """Serializable description of a candidate set: a kind plus parameters."""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _SPACE_KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")
        allowed = set(_SPACE_KINDS[self.kind]) | set(_SPACE_OPTIONAL.get(self.kind, ()))
        missing = [k for k in _SPACE_KINDS[self.kind] if k not in self.params]
        extra = [k for k in self.params if k not in allowed]
        if missing or extra:
            raise ValueError(
                f"space {self.kind!r}: missing {missing}, unexpected {extra}"
            )

    def membership(self):
        """Vectorized predicate for the continuous region, or None for custom."""
        return _MEMBERSHIP.get(self.kind)

    def to_dict(self):
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        kind = d.pop("kind", None)
        return cls(kind, d)


def build_candidates(spec, fmap):
    """Generate the candidate set described by ``spec`` under ``fmap``."""
    k, prm = spec.kind, spec.params
    if k == "square_grid":
        return square_grid(int(prm["side"]), fmap)
    if k == "cube_grid":
        return cube_grid(int(prm["side"]), fmap)
    if k == "disk_grid":
        return disk_points(resolution=int(prm["resolution"]), fmap=fmap)
    if k == "disk_random":
        return disk_points(n=int(prm["n"]), seed=int(prm["seed"]), fmap=fmap)
    if k == "wynn_grid":
        return wynn_polygon_points(int(prm["resolution"]), bool(prm.get("inject", True)), fmap)
    if k == "sphere_fibonacci":
        return sphere_fibonacci(int(prm["n"]), fmap)
    if k == "square_random":
        return random_candidates(in_square, int(prm["n"]), int(prm["seed"]),
                                 [[-1, 1], [-1, 1]], fmap)
    if k == "cube_random":
        return random_candidates(in_cube, int(prm["n"]), int(prm["seed"]),
                                 [[-1, 1]] * 3, fmap)
    return CandidateSet.from_points(np.array(prm["points"], dtype=float), fmap,
                                    metadata={"space": "custom"})


# ---------------------------------------------------------------- csv


def _fmt(v):
    return format(float(v), ".17g")


def candidates_to_csv(cands, path=None):
    """Write ``x1..xq`` rows; returns the text when ``path`` is None."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{j + 1}" for j in range(cands.q)])
    for row in cands.points:
        w.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if path is None:
        return text
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return None


def candidates_from_csv(path_or_text, fmap):
    """Read an ``x1..xq`` CSV and recompute regressors under ``fmap``."""
    if "\n" in str(path_or_text):
        text = str(path_or_text)
    else:
        with open(path_or_text, newline="") as fh:
            text = fh.read()
    rows = list(csv.reader(io.StringIO(text)))
    header = [h.strip() for h in rows[0]]
    expected = [f"x{j + 1}" for j in range(len(header))]
    if header != expected:
        raise ValueError(f"bad candidate header {header}, expected {expected}")
    pts = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    return CandidateSet.from_points(pts, fmap)
