"""Small-matrix constructions behind the index idempotent.

``P_a`` is the 2x2 idempotent obtained from the higher index formula when both
off-diagonal parts of the normalized operator are the scalar ``a``::

    P_a = [[a^2 (2 - a^2), (2 - a^2)(1 - a^2) a],
           [a (1 - a^2),   (1 - a^2)^2        ]]

The sweep over ``a in [-1, 1]`` gives the norm bound ``beta``, and the
deviation ``||P_a - E11||`` gives the band ``theta`` that the normalizing
function has to reach.  The module also builds the 4x4-block difference
idempotent ``E(p1, p2)`` and the spectral (Riesz) projection of a
quasi-idempotent.
"""
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import kernels
from .errors import ContractError, DimensionError, InfeasibleError, SpectralGapError

E11 = np.array([[1.0, 0.0], [0.0, 0.0]])

IDEMPOTENT_TOL = 1e-10


def _square(m, name="matrix"):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractError(f"{name} has non-finite entries")
    return m


def bott_idempotent(a):
    """The 2x2 idempotent ``P_a``; exact for every real ``a``."""
    a = float(a)
    a2 = a * a
    return np.array([
        [a2 * (2.0 - a2), (2.0 - a2) * (1.0 - a2) * a],
        [a * (1.0 - a2), (1.0 - a2) ** 2],
    ])


def operator_norm(m):
    """Largest singular value.

    2x2 inputs use the closed form
    ``s_max^2 = (|M|_F^2 + sqrt(|M|_F^4 - 4 det(M)^2)) / 2``; larger inputs
    take the square root of the top eigenvalue of ``M^T M``.
    """
    m = _square(m)
    if m.shape == (2, 2):
        return float(kernels._norm2x2_numpy(m[0, 0], m[0, 1], m[1, 0], m[1, 1]))
    gram = m.T @ m
    return float(np.sqrt(max(np.linalg.eigvalsh(gram)[-1], 0.0)))


def idempotency_defect(m):
    m = _square(m)
    return operator_norm(m @ m - m)


@dataclass(frozen=True)
class NormSweepResult:
    argmax_a: float
    beta: float
    grid_step: float


def _grid(lo, hi, step):
    count = int(round((hi - lo) / step))
    return np.linspace(lo, hi, count + 1)


def sup_bott_norm(grid_step=1e-4):
    """sup of ||P_a|| over [-1, 1]: grid scan, then golden-section polish."""
    if not 0.0 < grid_step <= 0.01:
        raise ValueError(f"grid_step must lie in (0, 0.01], got {grid_step}")
    a = _grid(-1.0, 1.0, grid_step)
    norms = kernels.bott_norms(a)
    i = int(np.argmax(norms))
    best_a, best = float(a[i]), float(norms[i])
    if 0 < i < a.size - 1:
        res = optimize.minimize_scalar(
            lambda t: -float(kernels.bott_norms_numpy(np.array([t]))[0]),
            bracket=(a[i - 1], a[i], a[i + 1]),
            method="golden",
            options={"xtol": 1e-12},
        )
        if -1.0 <= res.x <= 1.0 and -res.fun >= best:
            best_a, best = float(res.x), float(-res.fun)
    return NormSweepResult(argmax_a=best_a, beta=best, grid_step=grid_step)


def deviation_threshold(beta):
    """Largest admissible ``||p - e||`` for the quasi-idempotent retraction."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    return 1.0 / (4.0 * (2.0 * beta + 2.0))


def bott_deviation(a):
    """||P_a - E11|| by direct subtraction (vectorized over ``a``)."""
    return kernels.bott_norms(np.atleast_1d(np.asarray(a, dtype=float)), 1.0)


def theta_for_threshold(threshold, grid_step=1e-5):
    """Smallest theta with ||P_a - E11|| <= threshold for all theta <= |a| <= 1.

    Scans ``a`` downward from 1 and refines the first crossing by bisection.
    The deviation is even in ``a`` (conjugation by diag(1, -1)), so only
    ``a >= 0`` is scanned.
    """
    if not threshold > 0.0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    if not 0.0 < grid_step <= 1e-4:
        raise ValueError(f"grid_step must lie in (0, 1e-4], got {grid_step}")
    a = _grid(0.0, 1.0, grid_step)[::-1]
    dev = kernels.bott_norms(a, 1.0)
    bad = np.flatnonzero(dev > threshold)
    if bad.size == 0:
        return 0.0
    j = int(bad[0])
    if j == 0:
        raise InfeasibleError(f"threshold {threshold} is violated already at a = 1")

    def excess(t):
        return float(kernels.bott_norms_numpy(np.array([t]), 1.0)[0]) - threshold

    theta = optimize.bisect(excess, a[j], a[j - 1], xtol=1e-14, maxiter=200)
    if theta >= 1.0:
        raise InfeasibleError(f"no theta < 1 meets threshold {threshold}")
    return float(theta)


def difference_similarity(p2):
    """The invertible ``U`` and its inverse relating E(p1, p2) to diag(p1, 1-p2, 0, 0)."""
    p2 = _square(p2, "p2")
    n = p2.shape[0]
    one, zero = np.eye(n), np.zeros((n, n))
    q2 = one - p2
    u = np.block([
        [p2, zero, q2, zero],
        [q2, zero, zero, p2],
        [zero, zero, p2, q2],
        [zero, one, zero, zero],
    ])
    u_inv = np.block([
        [p2, q2, zero, zero],
        [zero, zero, zero, one],
        [q2, zero, p2, zero],
        [zero, p2, q2, zero],
    ])
    return u, u_inv


def _check_idempotent(p, name):
    scale = max(1.0, operator_norm(p) ** 2)
    defect = idempotency_defect(p)
    if defect > IDEMPOTENT_TOL * scale:
        raise ContractError(f"{name} is not idempotent (||p^2 - p|| = {defect:.3e})")


def difference_idempotent(p1, p2):
    """The 4n x 4n idempotent E(p1, p2) with [p1] - [p2] = [E(p1, p2)] - [E0]."""
    p1 = _square(p1, "p1")
    p2 = _square(p2, "p2")
    if p1.shape != p2.shape:
        raise DimensionError(f"p1 {p1.shape} and p2 {p2.shape} differ in size")
    _check_idempotent(p1, "p1")
    _check_idempotent(p2, "p2")
    n = p1.shape[0]
    one, zero = np.eye(n), np.zeros((n, n))
    diff = p1 - p2
    q2 = one - p2
    return np.block([
        [one + p2 @ diff @ p2, zero, p2 @ p1 @ diff, zero],
        [zero, zero, zero, zero],
        [diff @ p1 @ p2, zero, q2 @ diff @ q2, zero],
        [zero, zero, zero, zero],
    ])


def riesz_idempotent(e, gap_tol=1e-10, cond_max=1e10):
    """Spectral projection of ``e`` onto its eigenvalues with Re > 1/2.

    Requires ``||e^2 - e|| < 1/4`` so that no eigenvalue sits on the line
    Re z = 1/2.  Computed from an eigendecomposition; defective (or nearly
    defective) inputs are rejected.
    """
    e = _square(e, "e")
    defect = idempotency_defect(e)
    if defect >= 0.25:
        raise SpectralGapError(f"||e^2 - e|| = {defect:.4g} >= 1/4")
    vals, vecs = np.linalg.eig(e)
    if np.any(np.abs(vals.real - 0.5) < gap_tol):
        raise SpectralGapError("an eigenvalue lies on the line Re z = 1/2")
    if np.linalg.cond(vecs) > cond_max:
        raise ContractError("e is (numerically) not diagonalizable")
    mask = (vals.real > 0.5).astype(float)
    proj = (vecs * mask) @ np.linalg.inv(vecs)
    return np.ascontiguousarray(proj.real)
