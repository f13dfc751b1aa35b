"""Numpy implementations of the hot kernels.

Mirrors ``_ckernels.pyx`` operation for operation; used when the compiled
extension is unavailable and as the reference in the backend benchmark.
"""
import numpy as np

# squared chord length below which two charges count as coincident
COINCIDENT_SQ = 1e-24
# energy rise tolerated as summation round-off before a step is undone
ENERGY_RTOL = 1e-14

CONVERGED = 1
BUDGET = 0
DEGENERATE = 2


def mgs_rows(v, tol):
    """Modified Gram-Schmidt over the rows of ``v``, in place.

    Returns ``(-1, 0.0)`` on success, otherwise the index of the first row
    whose deflated norm fell below ``tol`` together with that norm.
    """
    m = v.shape[0]
    for j in range(m):
        norm = np.sqrt(np.dot(v[j], v[j]))
        if norm < tol:
            return j, float(norm)
        v[j] /= norm
        if j + 1 < m:
            rest = v[j + 1:]
            r = rest @ v[j]
            rest -= np.outer(r, v[j])
    return -1, 0.0


def _pair_weights(a):
    g = a @ a.T
    sq = np.diag(g)
    d2 = sq[:, None] + sq[None, :] - 2.0 * g
    np.fill_diagonal(d2, np.inf)
    return d2


def charge_energy(a):
    d2 = _pair_weights(a)
    iu = np.triu_indices(a.shape[0], 1)
    return float(np.sum(1.0 / np.sqrt(d2[iu])))


def charge_relax(a, v, step, damping, max_iters, stop_displacement, energies=None):
    """Damped repulsion on the unit sphere, updating ``a`` and ``v`` in place.

    A step that raises the total energy is undone and the velocity zeroed
    (momentum restart); a step taken from rest is always kept. ``energies``,
    when given, receives the energy of the accepted state at each iteration.

    Returns ``(iterations, status, last_displacement)``. On DEGENERATE the
    state is left as it was before the offending iteration.
    """
    k = a.shape[0]
    iu = np.triu_indices(k, 1)
    prev = a.copy()
    prev_energy = np.inf
    from_rest = True
    disp = np.inf
    iterations, status = max_iters, BUDGET
    for it in range(max_iters):
        d2 = _pair_weights(a)
        if d2.min() < COINCIDENT_SQ:
            return it, DEGENERATE, disp
        inv = d2 ** -0.5
        energy = np.sum(inv[iu])
        if not from_rest and energy > prev_energy * (1.0 + ENERGY_RTOL):
            a[...] = prev
            v[...] = 0.0
            from_rest = True
            if energies is not None:
                energies[it] = prev_energy
            continue
        if energies is not None:
            energies[it] = energy
        prev[...] = a
        prev_energy = energy
        from_rest = not v.any()
        w = inv * inv * inv
        force = a * w.sum(axis=1)[:, None] - w @ a
        force -= np.sum(force * a, axis=1)[:, None] * a
        v *= damping
        v += step * force
        new = a + v
        new /= np.linalg.norm(new, axis=1)[:, None]
        disp = float(np.sqrt(np.max(np.sum((new - a) ** 2, axis=1))))
        a[...] = new
        if disp < stop_displacement:
            iterations, status = it + 1, CONVERGED
            break
    if not from_rest and charge_energy(a) > prev_energy * (1.0 + ENERGY_RTOL):
        a[...] = prev
        v[...] = 0.0
    return iterations, status, disp
