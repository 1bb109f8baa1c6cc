"""Concentration operator on L^2([-1, 1]) and the increasing-chi pipeline.

``T_sigma`` has kernel ``sin(sigma (x + y)) / (pi (x + y))``.  Its norm is the
largest fraction of ``||h||^2`` that a function with Fourier support in
``[-1, 1]`` can put inside ``[-sigma, sigma]``.  Discretized by Gauss-Legendre
Nystrom, symmetrized as ``B = W^1/2 K W^1/2``, and solved by power iteration
from the constant function.
"""
import math
import time
from dataclasses import dataclass

import numpy as np

from . import kernels, matgap
from .errors import DomainError, IterationError
from .report import ConstantReport, universal_constant

DEFAULT_QUAD_ORDER = 200
POWER_TOL = 1e-12
POWER_MAX_ITER = 10_000
# plain steps before switching to the squaring jump
PLAIN_STEPS = 2000
MAX_SQUARINGS = 60
SIGMA_CAP = 64.0


@dataclass(frozen=True)
class QuadratureRule:
    order: int
    nodes: np.ndarray
    weights: np.ndarray


def gauss_legendre(order):
    """Gauss-Legendre rule on [-1, 1].

    Newton iteration on P_n from the Chebyshev-like guesses
    cos(pi (i + 3/4) / (n + 1/2)); weights 2 / ((1 - x^2) P_n'(x)^2).
    """
    if not 1 <= order <= 2000:
        raise ValueError(f"order must lie in [1, 2000], got {order}")
    n = int(order)
    i = np.arange(n)
    x = np.cos(math.pi * (i + 0.75) / (n + 0.5))
    for _ in range(100):
        p0, p1 = np.ones_like(x), x.copy()
        for k in range(1, n):
            p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
        dp = n * (x * p1 - p0) / (x * x - 1.0)
        step = p1 / dp
        x = x - step
        if np.max(np.abs(step)) < 1e-15:
            break
    # one more derivative evaluation at the converged nodes
    p0, p1 = np.ones_like(x), x.copy()
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    x, w = x[::-1], w[::-1]
    # enforce exact mirror symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return QuadratureRule(order=n, nodes=x, weights=w)


@dataclass(frozen=True)
class ConcentrationSpectrum:
    sigma: float
    top_eigenvalue: float
    eigenvector: np.ndarray
    quad_order: int
    iterations: int = 0


def nystrom_matrix(sigma, rule):
    return kernels.nystrom_matrix(rule.nodes, rule.weights, sigma)


def _squaring_jump(mat, start, tol, max_squarings=MAX_SQUARINGS):
    """Jump to the iterate B^(2^j) start by repeated squaring.

    Used when the top two even eigenvalues nearly coincide (large sigma) and
    plain steps crawl.  Returns the iterate and the number of steps skipped.
    """
    power = mat.copy()
    lam_old = None
    for j in range(1, max_squarings + 1):
        power = power @ power
        power /= np.abs(power).max()
        v = power @ start
        v /= np.linalg.norm(v)
        lam = float(v @ mat @ v)
        if lam_old is not None and abs(lam - lam_old) <= tol * max(1.0, abs(lam)):
            return v, 2 ** j
        lam_old = lam
    raise IterationError(f"no convergence after {max_squarings} squarings")


def concentration_norm(sigma, quad_order=DEFAULT_QUAD_ORDER, tol=POWER_TOL,
                       max_iter=POWER_MAX_ITER):
    """||T_sigma|| and its eigenfunction sampled at the quadrature nodes.

    The eigenvector is returned as node values ``phi`` with
    ``sum w_i phi_i^2 = 1`` and positive mean.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if quad_order < 50:
        raise ValueError(f"quad_order must be >= 50, got {quad_order}")
    rule = gauss_legendre(quad_order)
    mat = nystrom_matrix(sigma, rule)
    root_w = np.sqrt(rule.weights)
    lam, vec, iters, ok = kernels.power_iteration(mat, root_w.copy(), tol, min(PLAIN_STEPS, max_iter))
    if not ok:
        start, jumped = _squaring_jump(mat, root_w, tol)
        lam, vec, polish, ok = kernels.power_iteration(mat, start, tol, max_iter)
        iters += jumped + polish
    if not ok:
        raise IterationError(f"power iteration did not converge in {max_iter} steps (sigma={sigma})")
    phi = vec / root_w
    if phi @ rule.weights < 0:
        phi = -phi
    return ConcentrationSpectrum(sigma=float(sigma), top_eigenvalue=float(lam),
                                 eigenvector=phi, quad_order=quad_order, iterations=int(iters))


def solve_sigma_for_norm(theta, quad_order=DEFAULT_QUAD_ORDER, tol=1e-10):
    """sigma with ||T_sigma|| = theta, by bisection.

    ||T_sigma|| increases strictly with sigma.  The bracket starts at
    [0.1, 4]; the upper end doubles (up to 64) until it overshoots theta.
    """
    if not 0.0 < theta < 1.0:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")

    def norm(s):
        return concentration_norm(s, quad_order).top_eigenvalue

    lo, hi = 0.1, 4.0
    while norm(lo) > theta:
        lo *= 0.5
    while norm(hi) < theta:
        hi *= 2.0
        if hi > SIGMA_CAP:
            raise DomainError(f"||T_sigma|| stays below {theta} for sigma <= {SIGMA_CAP}")
    while True:
        mid = 0.5 * (lo + hi)
        val = norm(mid)
        if abs(val - theta) < tol or hi - lo < 4e-16 * hi:
            return mid
        if val < theta:
            lo = mid
        else:
            hi = mid


def slepian_constant(beta_grid_step=1e-4, quad_order=DEFAULT_QUAD_ORDER,
                     theta_grid_step=1e-5, sigma_tol=1e-10):
    """beta -> threshold -> theta -> sigma -> C for increasing normalizing functions."""
    t0 = time.perf_counter()
    sweep = matgap.sup_bott_norm(beta_grid_step)
    threshold = matgap.deviation_threshold(sweep.beta)
    theta = matgap.theta_for_threshold(threshold, theta_grid_step)
    sigma = solve_sigma_for_norm(theta, quad_order, sigma_tol)
    spec = concentration_norm(sigma, quad_order)
    return ConstantReport(
        method="slepian",
        sigma=sigma,
        C=universal_constant(sigma),
        beta=sweep.beta,
        threshold=threshold,
        theta=theta,
        inputs={
            "beta_grid": beta_grid_step,
            "theta_grid": theta_grid_step,
            "quad_order": quad_order,
            "sigma_tol": sigma_tol,
        },
        diagnostics={
            "beta_argmax_a": sweep.argmax_a,
            "norm_at_sigma": spec.top_eigenvalue,
            "power_iterations": spec.iterations,
            "kernel_backend": kernels.BACKEND,
            "seconds": time.perf_counter() - t0,
        },
    )
