"""Backend selection for the hot kernels.

The compiled extension is preferred when it imports; otherwise the numpy
implementation is used. Both expose ``mgs_rows``, ``charge_relax`` and
``charge_energy`` with identical signatures.
"""
from pedcc import _pykernels

try:
    from pedcc import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

DEFAULT_BACKEND = "cython" if _ckernels is not None else "python"

CONVERGED = _pykernels.CONVERGED
BUDGET = _pykernels.BUDGET
DEGENERATE = _pykernels.DEGENERATE


def get_backend(name=None):
    """Return the kernel module for ``name`` (default: best available)."""
    name = DEFAULT_BACKEND if name is None else name
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown or unavailable kernel backend {name!r}; have {sorted(BACKENDS)}"
        ) from None
