"""Construction of predefined evenly-distributed class centroids.

Three generators are provided:

* :func:`generate_basic_recursive` -- closed-form recursive lift, any
  ``2 <= k <= n + 1``;
* :func:`generate_simplex_lange` -- the classic ``n + 1`` vertex regular
  simplex formula, kept as a cross-check;
* :func:`generate_iterative_charge` -- the legacy charge-repulsion
  relaxation, kept as a baseline.

:func:`generate_pedcc` composes the recursive set with a random rotation,
which is what a classifier should use.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from pedcc.errors import DegenerateState, InvalidShape, SamplingFailed
from pedcc.kernels import CONVERGED, DEGENERATE, get_backend
from pedcc.linalg import apply_rotation, make_rng, sample_rotation

ANALYTIC = "analytic-recursive"
LANGE = "simplex-lange"
ITERATIVE = "iterative-charge"
ROTATED = f"rotated({ANALYTIC})"

EXACT_PROVENANCES = (ANALYTIC, LANGE, ROTATED)

UNIT_TOL = 1e-10
COSINE_TOL = 1e-10
SUM_TOL = 1e-9

JITTER = 1e-6
MAX_JITTERS = 3
MAX_ROTATION_RETRIES = 8


def pairwise_cosine_deviation(points):
    """Largest ``|<a_i, a_j> + 1/(k-1)|`` over ``i != j``."""
    k = points.shape[0]
    g = points @ points.T
    off = g[~np.eye(k, dtype=bool)]
    return float(np.max(np.abs(off + 1.0 / (k - 1))))


@dataclass(frozen=True)
class PedccSet:
    """``k`` unit centroids in ``R^n``, one per row of ``points``.

    Exact provenances (analytic, Lange, rotated analytic) are checked on
    construction against the equal-angle and zero-sum properties; iterative
    sets are only checked for shape and unit norm.
    """

    points: np.ndarray
    provenance: str
    seed: Optional[int] = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise InvalidShape(f"points must be 2-D, got shape {pts.shape}")
        k, n = pts.shape
        if k < 2:
            raise InvalidShape(f"need at least 2 centroids, got {k}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("centroids contain non-finite values")
        norm_err = np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0))
        if norm_err > UNIT_TOL:
            raise ValueError(f"centroids are not unit norm (max error {norm_err:.3e})")
        if self.provenance != ITERATIVE:
            if k > n + 1:
                raise InvalidShape(f"k={k} exceeds n+1={n + 1}")
            dev = pairwise_cosine_deviation(pts)
            if dev > COSINE_TOL:
                raise ValueError(f"pairwise cosines deviate from -1/(k-1) by {dev:.3e}")
            total = np.linalg.norm(pts.sum(axis=0))
            if total > SUM_TOL * np.sqrt(k):
                raise ValueError(f"centroids do not sum to zero (norm {total:.3e})")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def k(self):
        return self.points.shape[0]

    @property
    def n(self):
        return self.points.shape[1]

    def gram(self):
        return self.points @ self.points.T

    def max_cosine_deviation(self):
        return pairwise_cosine_deviation(self.points)

    def centroid_sum_norm(self):
        return float(np.linalg.norm(self.points.sum(axis=0)))


def _check_k_n(k, n):
    if k < 2 or k > n + 1:
        raise InvalidShape(f"need 2 <= k <= n + 1, got k={k}, n={n}")


def basic_simplex(k):
    """The recursive ``k``-point set in its own ``k - 1`` coordinates.

    Level 2 is the antipodal pair on one axis. Level ``j`` keeps the new
    point ``a_j`` on a fresh last axis and lifts the previous level's points
    ``b_i`` to ``sqrt(j(j-2))/(j-1) * b_i - a_j/(j-1)``.
    """
    pts = np.array([[-1.0], [1.0]])
    for j in range(3, k + 1):
        lifted = np.empty((j, j - 1))
        lifted[: j - 1, : j - 2] = np.sqrt(j * (j - 2)) / (j - 1) * pts
        lifted[: j - 1, j - 2] = -1.0 / (j - 1)
        lifted[j - 1] = 0.0
        lifted[j - 1, j - 2] = 1.0
        pts = lifted
    return pts


def generate_basic_recursive(k, n):
    """Basic PEDCC set: ``k`` points in the trailing ``k - 1`` axes of ``R^n``."""
    _check_k_n(k, n)
    points = np.zeros((k, n))
    points[:, n - k + 1:] = basic_simplex(k)
    return PedccSet(points, ANALYTIC)


def generate_simplex_lange(n):
    """Regular simplex with ``n + 1`` vertices from the closed-form offsets."""
    if n < 1:
        raise InvalidShape(f"n must be >= 1, got {n}")
    c = -(1.0 + np.sqrt(n + 1.0)) / n**1.5
    d = np.sqrt((n + 1.0) / n)
    points = np.empty((n + 1, n))
    points[0] = n**-0.5
    points[1:] = c + d * np.eye(n)
    return PedccSet(points, LANGE)


def generate_pedcc(k, n, seed, *, backend=None):
    """Randomly rotated basic set with no coordinate shared-zero column.

    A rotation leaving some coordinate zero for every centroid would block
    gradient flow through that coordinate, so such a draw is replaced by
    one from ``seed + 1`` (and so on).
    """
    _check_k_n(k, n)
    basic = generate_basic_recursive(k, n)
    for attempt in range(MAX_ROTATION_RETRIES):
        s = seed + attempt
        rotated = apply_rotation(sample_rotation(n, s, backend=backend), basic.points)
        if not np.any(np.all(rotated == 0.0, axis=0)):
            return PedccSet(rotated, ROTATED, seed=s)
    raise SamplingFailed(f"every rotation from seed {seed} left a zero column")


@dataclass(frozen=True)
class ChargeSimConfig:
    step_size: float = 1e-2
    damping: float = 0.9
    max_iters: int = 10000
    stop_displacement: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")
        if self.stop_displacement < 0:
            raise ValueError("stop_displacement must be non-negative")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass
class ChargeRun:
    """Raw outcome of a charge relaxation."""

    points: np.ndarray
    iterations: int
    converged: bool
    last_displacement: float
    energies: Optional[np.ndarray] = field(default=None, repr=False)


def charge_relax(k, n, cfg=None, *, record_energy=False, backend=None):
    """Relax ``k`` like charges on the unit sphere of ``R^n``.

    Each charge feels ``(a_i - a_j) / |a_i - a_j|^3`` from every other one.
    The net force is projected on the tangent plane, fed into a damped
    velocity ``v <- damping * v + step * F`` and the point moves to
    ``normalize(a + v)``. A step that raises the total energy is undone
    and the velocity reset. Stops after ``max_iters`` or once no point
    moves more than ``stop_displacement`` in one step.
    """
    if k < 2 or n < 2:
        raise InvalidShape(f"need k >= 2 and n >= 2, got k={k}, n={n}")
    cfg = cfg or ChargeSimConfig()
    kern = get_backend(backend)
    rng = make_rng(cfg.seed)
    a = rng.standard_normal((k, n))
    a /= np.linalg.norm(a, axis=1)[:, None]
    v = np.zeros_like(a)
    energies = np.zeros(cfg.max_iters) if record_energy else None

    done, jitters = 0, 0
    while True:
        remaining = cfg.max_iters - done
        trace = energies[done:] if record_energy else None
        it, status, disp = kern.charge_relax(
            a, v, cfg.step_size, cfg.damping, remaining, cfg.stop_displacement, trace
        )
        done += it
        if status != DEGENERATE:
            break
        jitters += 1
        if jitters > MAX_JITTERS:
            raise DegenerateState(f"charges still coincide after {MAX_JITTERS} jitters")
        a += JITTER * rng.standard_normal(a.shape)
        a /= np.linalg.norm(a, axis=1)[:, None]
        v[...] = 0.0

    if record_energy:
        energies = energies[:done]
    return ChargeRun(a, done, status == CONVERGED, disp, energies)


def generate_iterative_charge(k, n, cfg=None, *, backend=None):
    """Centroids from the legacy charge model; no equal-angle guarantee."""
    cfg = cfg or ChargeSimConfig()
    run = charge_relax(k, n, cfg, backend=backend)
    return PedccSet(run.points, ITERATIVE, seed=cfg.seed)
