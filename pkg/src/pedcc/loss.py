"""PEDCC-Loss: additive-margin softmax on fixed centroids plus an MSE pull.

``total = L_AM + lam * (L_MSE + EPS) ** (1 / root_n)``

``L_AM`` is averaged over the batch while ``L_MSE`` is summed over it;
this asymmetry is intentional and follows the original definition. Features are
L2-normalized internally, so the loss only depends on their directions.
"""
from dataclasses import dataclass

import numpy as np

from pedcc.errors import DimensionMismatch, InvalidShape, ZeroFeature

EPS = 1e-12
SQUARED_COSINE = "squared-cosine"
EUCLIDEAN = "euclidean"


@dataclass(frozen=True)
class LossParams:
    s: float = 7.5
    m: float = 0.35
    lam: float = 1.0
    root_n: int = 1
    mse_variant: str = SQUARED_COSINE

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError("scale s must be positive")
        if not 0 <= self.m < 1:
            raise ValueError("margin m must lie in [0, 1)")
        if self.lam < 0:
            raise ValueError("lam must be non-negative")
        if self.root_n < 1:
            raise ValueError("root_n must be >= 1")
        if self.mse_variant not in (SQUARED_COSINE, EUCLIDEAN):
            raise ValueError(f"unknown mse_variant {self.mse_variant!r}")


@dataclass(frozen=True)
class LabeledBatch:
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels)
        if x.ndim != 2 or x.shape[0] < 1:
            raise InvalidShape(f"features must be (N, dim) with N >= 1, got {x.shape}")
        if y.shape != (x.shape[0],) or not np.issubdtype(y.dtype, np.integer):
            raise InvalidShape("labels must be N integer class indices")
        if np.any(y < 0):
            raise InvalidShape("labels must be non-negative")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y.astype(np.intp))


@dataclass
class LossReport:
    l_am: float
    l_mse: float
    total: float
    cos_logits: np.ndarray
    grad_features: np.ndarray


def _centroids(pedcc):
    return getattr(pedcc, "points", pedcc)


def _normalized(batch, centroids):
    x = batch.features
    if x.shape[1] != centroids.shape[1]:
        raise DimensionMismatch(
            f"features have dim {x.shape[1]}, centroids have dim {centroids.shape[1]}"
        )
    if np.any(batch.labels >= centroids.shape[0]):
        raise InvalidShape(f"label out of range for k={centroids.shape[0]}")
    norms = np.linalg.norm(x, axis=1)
    if np.any(norms <= 1e-300):
        raise ZeroFeature("feature row with zero norm")
    return x / norms[:, None], norms


def cos_logits(batch, pedcc):
    """``(N, k)`` cosines between each feature and each centroid."""
    a = _centroids(pedcc)
    xhat, _ = _normalized(batch, a)
    return np.clip(xhat @ a.T, -1.0, 1.0)


def _am_terms(cos, labels, params):
    """Per-sample AM-softmax loss and its derivative w.r.t. the cosines."""
    rows = np.arange(cos.shape[0])
    z = params.s * cos
    z[rows, labels] -= params.s * params.m
    zmax = z.max(axis=1, keepdims=True)
    ez = np.exp(z - zmax)
    lse = zmax[:, 0] + np.log(ez.sum(axis=1))
    per_sample = lse - z[rows, labels]
    soft = ez / ez.sum(axis=1, keepdims=True)
    soft[rows, labels] -= 1.0
    return per_sample, params.s * soft


def _mse_terms(cos, labels, params, xhat=None, a=None):
    rows = np.arange(cos.shape[0])
    target = cos[rows, labels]
    d_cos = np.zeros_like(cos)
    if params.mse_variant == SQUARED_COSINE:
        value = float(np.sum((1.0 - target) ** 2))
        d_cos[rows, labels] = -2.0 * (1.0 - target)
    else:
        value = 0.5 * float(np.sum((xhat - a[labels]) ** 2))
        d_cos[rows, labels] = -1.0
    return value, d_cos


def loss_am(batch, pedcc, params=LossParams()):
    cos = cos_logits(batch, pedcc)
    per_sample, _ = _am_terms(cos, batch.labels, params)
    return float(np.mean(per_sample))


def loss_mse(batch, pedcc, params=LossParams()):
    """Summed MSE term; ``euclidean`` is half the squared chord to the centroid."""
    a = _centroids(pedcc)
    xhat, _ = _normalized(batch, a)
    cos = np.clip(xhat @ a.T, -1.0, 1.0)
    value, _ = _mse_terms(cos, batch.labels, params, xhat, a)
    return value


def loss_total_with_grad(batch, pedcc, params=LossParams()):
    """Loss terms, total and the exact gradient w.r.t. the raw features."""
    a = _centroids(pedcc)
    xhat, norms = _normalized(batch, a)
    cos = np.clip(xhat @ a.T, -1.0, 1.0)
    n_samples = cos.shape[0]

    per_sample, d_am = _am_terms(cos, batch.labels, params)
    l_am = float(np.mean(per_sample))
    l_mse, d_mse = _mse_terms(cos, batch.labels, params, xhat, a)

    inv_root = 1.0 / params.root_n
    total = l_am + params.lam * (l_mse + EPS) ** inv_root
    mse_scale = params.lam * inv_root * (l_mse + EPS) ** (inv_root - 1.0)

    d_cos = d_am / n_samples + mse_scale * d_mse
    d_xhat = d_cos @ a
    # through x -> x / |x|: (I - xhat xhat^T) / |x|
    radial = np.sum(d_xhat * xhat, axis=1, keepdims=True)
    grad = (d_xhat - radial * xhat) / norms[:, None]
    return LossReport(l_am, l_mse, float(total), cos, grad)
