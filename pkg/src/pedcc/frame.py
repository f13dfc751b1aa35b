"""Tight-frame checks for centroid sets.

For ``k`` equal-angle unit centroids the squared projections of any ``f``
sum to ``k/(k-1) * |f|^2 * cos^2(alpha)``, where ``alpha`` is the angle
between ``f`` and its orthogonal projection ``p`` on the centroid span.
Per centroid, ``cos(gamma_i) = cos(beta_i) * cos(alpha)`` with ``gamma_i``
measured from ``f`` and ``beta_i`` from ``p``.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from pedcc.errors import DimensionMismatch, IllConditioned, ZeroVector
from pedcc.linalg import make_rng

COND_LIMIT = 1e8
ZERO_NORM = 1e-300
ZERO_PROJECTION = 1e-12


@dataclass(frozen=True)
class SubspaceProjector:
    """Orthogonal projector onto the span of the first ``k - 1`` centroids."""

    basis: np.ndarray
    projection: np.ndarray
    subspace_dim: int

    def project(self, f):
        return self.projection @ f


@dataclass(frozen=True)
class AngleDecomposition:
    alpha: float
    gammas: np.ndarray
    betas: Optional[np.ndarray]  # None when f is orthogonal to the span
    f_norm: float
    p_norm: float

    @property
    def betas_defined(self):
        return self.betas is not None

    def angle_law_residual(self):
        """``max_i |cos(gamma_i) - cos(beta_i) cos(alpha)|``, or NaN without betas."""
        if self.betas is None:
            return float("nan")
        return float(np.max(np.abs(np.cos(self.gammas) - np.cos(self.betas) * np.cos(self.alpha))))


@dataclass(frozen=True)
class FrameReport:
    frame_sum: float
    predicted: float
    relative_error: float
    max_pairwise_cosine_deviation: float
    centroid_sum_norm: float


def _check_vector(pedcc, f):
    f = np.asarray(f, dtype=np.float64).reshape(-1)
    if f.shape[0] != pedcc.n:
        raise DimensionMismatch(f"vector has dim {f.shape[0]}, centroids live in R^{pedcc.n}")
    return f


def build_projector(pedcc):
    """``P = A (A^T A)^{-1} A^T`` with ``A`` the first ``k - 1`` centroids as columns.

    For a true equal-angle set ``A^T A`` has eigenvalues ``k/(k-1)`` and
    ``1/(k-1)``, so it is always well conditioned; a large condition number
    means the input is not a valid centroid set.
    """
    basis = pedcc.points[:-1].T.copy()
    gram = basis.T @ basis
    cond = np.linalg.cond(gram)
    if not cond < COND_LIMIT:
        raise IllConditioned(f"basis Gram matrix condition number {cond:.3e}")
    # P = A G^{-1} A^T, via a solve rather than an explicit inverse
    coeffs = np.linalg.solve(gram, basis.T)
    proj = basis @ coeffs
    proj = 0.5 * (proj + proj.T)
    for arr in (basis, proj):
        arr.setflags(write=False)
    return SubspaceProjector(basis, proj, pedcc.k - 1)


def _cos_alpha(f_norm, p_norm):
    if f_norm <= ZERO_NORM:
        return 0.0
    return min(1.0, p_norm / f_norm)


def frame_sum(pedcc, f, projector=None):
    """Compare the direct frame sum for ``f`` with its closed form."""
    f = _check_vector(pedcc, f)
    projector = projector or build_projector(pedcc)
    k = pedcc.k
    direct = float(np.sum((pedcc.points @ f) ** 2))
    f_norm = float(np.linalg.norm(f))
    cos_a = _cos_alpha(f_norm, float(np.linalg.norm(projector.project(f))))
    predicted = (1.0 + 1.0 / (k - 1)) * f_norm**2 * cos_a**2
    return FrameReport(
        frame_sum=direct,
        predicted=predicted,
        relative_error=abs(direct - predicted) / max(predicted, 1e-300),
        max_pairwise_cosine_deviation=pedcc.max_cosine_deviation(),
        centroid_sum_norm=pedcc.centroid_sum_norm(),
    )


def decompose_angles(pedcc, f, projector=None):
    """Angles between ``f``, its projection ``p`` and every centroid (radians)."""
    f = _check_vector(pedcc, f)
    f_norm = float(np.linalg.norm(f))
    if f_norm <= ZERO_NORM:
        raise ZeroVector("cannot measure angles of a zero vector")
    projector = projector or build_projector(pedcc)
    p = projector.project(f)
    p_norm = float(np.linalg.norm(p))
    alpha = float(np.arccos(_cos_alpha(f_norm, p_norm)))
    gammas = np.arccos(np.clip(pedcc.points @ f / f_norm, -1.0, 1.0))
    betas = None
    if p_norm > ZERO_PROJECTION * f_norm:
        betas = np.arccos(np.clip(pedcc.points @ p / p_norm, -1.0, 1.0))
    return AngleDecomposition(alpha, gammas, betas, f_norm, p_norm)


def subspace_angles(pedcc, features, projector=None):
    """Angle ``alpha`` (radians) of every row of ``features`` to the centroid span."""
    features = np.asarray(features, dtype=np.float64)
    if features.shape[1] != pedcc.n:
        raise DimensionMismatch(f"features have dim {features.shape[1]}, expected {pedcc.n}")
    projector = projector or build_projector(pedcc)
    f_norm = np.linalg.norm(features, axis=1)
    if np.any(f_norm <= ZERO_NORM):
        raise ZeroVector("zero feature row")
    p_norm = np.linalg.norm(features @ projector.projection, axis=1)
    return np.arccos(np.clip(p_norm / f_norm, 0.0, 1.0))


def cosine_distance_table(pedcc):
    """Pairwise cosines above the diagonal; diagonal and lower triangle zero."""
    return np.triu(pedcc.gram(), 1)


def verify_pedcc(pedcc, trials, seed):
    """Worst frame report over ``trials`` Gaussian query vectors."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = make_rng(seed)
    projector = build_projector(pedcc)
    worst = None
    for _ in range(trials):
        rep = frame_sum(pedcc, rng.standard_normal(pedcc.n), projector)
        if worst is None or rep.relative_error > worst.relative_error:
            worst = rep
    return worst
