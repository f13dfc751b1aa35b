"""Dense linear algebra primitives and random rotations.

Matrices are plain ``float64`` numpy arrays. Point sets are stored one point
per row, so a rotation ``U`` acts on them as ``points @ U.T``.
"""
import numpy as np

from pedcc.errors import DimensionMismatch, InvalidShape, NearSingular, SamplingFailed
from pedcc.kernels import get_backend

#: Recorded in every output so a run is reproducible from (algorithm, seed).
RNG_ALGORITHM = "numpy-PCG64"

PIVOT_TOL = 1e-8
ORTHO_TOL = 1e-10
MAX_RESAMPLES = 8


def make_rng(seed):
    """Seeded generator; ``seed`` must be a non-negative integer below 2**64."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def as_matrix(m, name="matrix"):
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise InvalidShape(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def orthogonality_residual(u):
    """Max-abs entry of ``U^T U - I``."""
    u = np.asarray(u, dtype=np.float64)
    return float(np.max(np.abs(u.T @ u - np.eye(u.shape[1]))))


def gram_schmidt_orthonormalize(m, *, tol=PIVOT_TOL, backend=None):
    """Orthonormalize the columns of a square matrix by modified Gram-Schmidt.

    Each column is deflated against the columns already accepted, then
    normalized. If the result is not orthogonal to ``1e-10`` (possible for
    badly conditioned input) a second pass is run on the output.

    Parameters
    ----------
    m : (d, d) array_like
        Columns must be linearly independent.
    tol : float
        A deflated column whose norm drops below this raises ``NearSingular``.
    backend : str, optional
        Kernel backend name, see :mod:`pedcc.kernels`.

    Returns
    -------
    (d, d) ndarray
        Orthogonal matrix spanning the same column space, column by column.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise InvalidShape(f"expected a square matrix, got {m.shape}")
    kern = get_backend(backend)
    # kernel works on contiguous rows, so orthonormalize the transpose
    rows = np.ascontiguousarray(m.T)
    col, norm = kern.mgs_rows(rows, tol)
    if col >= 0:
        raise NearSingular(col, norm)
    if orthogonality_residual(rows.T) > 0.1 * ORTHO_TOL:
        col, norm = kern.mgs_rows(rows, tol)
        if col >= 0:
            raise NearSingular(col, norm)
    return rows.T.copy()


def sample_rotation(dim, seed, *, backend=None):
    """Random ``dim x dim`` orthogonal matrix, deterministic in ``seed``.

    Draws standard-normal matrices from one seeded stream and
    orthonormalizes them, drawing again on ``NearSingular``.
    """
    if dim < 1:
        raise InvalidShape(f"dim must be >= 1, got {dim}")
    rng = make_rng(seed)
    for _ in range(MAX_RESAMPLES):
        draw = rng.standard_normal((dim, dim))
        try:
            return gram_schmidt_orthonormalize(draw, backend=backend)
        except NearSingular:
            continue
    raise SamplingFailed(
        f"{MAX_RESAMPLES} consecutive near-singular draws for dim={dim}, seed={seed}"
    )


def apply_rotation(u, points):
    """Rotate row-stored ``points`` by ``u``; returns ``points @ u.T``."""
    u = as_matrix(u, "rotation")
    points = as_matrix(points, "points")
    if u.shape[0] != u.shape[1] or u.shape[0] != points.shape[1]:
        raise DimensionMismatch(
            f"rotation {u.shape} cannot act on points with {points.shape[1]} columns"
        )
    return points @ u.T
