"""Hot numeric kernels.

Every kernel exists twice: a loop version compiled with numba ``@njit`` and a
vectorized numpy version.  The public names at the bottom of the module are
bound to one or the other according to :data:`indexconst._accel.USE_NUMBA`;
both variants stay importable (``*_numba`` / ``*_numpy``) so tests and the
benchmark can compare them directly.
"""
import math

import numpy as np

from ._accel import HAVE_NUMBA, USE_NUMBA, njit

HALF_PI = 0.5 * math.pi

# |z| <= SERIES_CUT uses the power series, beyond it the continued fraction.
SERIES_CUT = 4.0
# At |z| = 4 the 18th series term is below 1e-18.
SERIES_TERMS = 18
CF_EPS = 1e-16
CF_MAXIT = 200
_FPMIN = 1e-300


# ---------------------------------------------------------------------------
# sine integral
# ---------------------------------------------------------------------------

def _si_series_numpy(x):
    x2 = x * x
    term = x.copy()
    total = x.copy()
    for k in range(SERIES_TERMS):
        term = term * (-x2 / ((2 * k + 2) * (2 * k + 3)))
        total += term / (2 * k + 3)
    return total


def _si_cfrac_numpy(t):
    # E1(i t) by modified Lentz; Si(t) = pi/2 + Im(e^{-it} * cf)
    b = 1.0 + 1j * t
    c = np.full(t.shape, 1.0 / _FPMIN, dtype=complex)
    d = 1.0 / b
    h = d.copy()
    out = np.empty(t.shape, dtype=complex)
    live = np.arange(t.size)
    for i in range(2, CF_MAXIT):
        a = -float((i - 1) * (i - 1))
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h = h * delta
        done = np.abs(delta.real - 1.0) + np.abs(delta.imag) < CF_EPS
        if done.any():
            # converged entries leave the working set
            out[live[done]] = h[done]
            keep = ~done
            live, b, c, d, h = live[keep], b[keep], c[keep], d[keep], h[keep]
            if live.size == 0:
                break
    out[live] = h
    out = out * (np.cos(t) - 1j * np.sin(t))
    return HALF_PI + out.imag


def si_numpy(z):
    z = np.asarray(z, dtype=float)
    x = np.abs(z)
    out = np.empty_like(x)
    small = x <= SERIES_CUT
    if small.any():
        out[small] = _si_series_numpy(x[small])
    if (~small).any():
        out[~small] = _si_cfrac_numpy(x[~small])
    return np.copysign(out, z)


@njit(cache=True)
def _si_scalar(z):
    x = abs(z)
    if x <= SERIES_CUT:
        x2 = x * x
        term = x
        total = x
        for k in range(SERIES_TERMS):
            term *= -x2 / ((2 * k + 2) * (2 * k + 3))
            total += term / (2 * k + 3)
    else:
        b = complex(1.0, x)
        c = complex(1.0 / _FPMIN, 0.0)
        d = 1.0 / b
        h = d
        for i in range(2, CF_MAXIT):
            a = -float((i - 1) * (i - 1))
            b += 2.0
            d = 1.0 / (a * d + b)
            c = b + a / c
            delta = c * d
            h *= delta
            if abs(delta.real - 1.0) + abs(delta.imag) < CF_EPS:
                break
        h *= complex(math.cos(x), -math.sin(x))
        total = HALF_PI + h.imag
    return total if z >= 0.0 else -total


@njit(cache=True)
def _si_flat(z):
    out = np.empty(z.size)
    for i in range(z.size):
        out[i] = _si_scalar(z[i])
    return out


def si_numba(z):
    z = np.asarray(z, dtype=float)
    return _si_flat(np.ascontiguousarray(z.reshape(-1))).reshape(z.shape)


# ---------------------------------------------------------------------------
# phi_k basis: phi_k(x) = (Si(pi k + 2x) - Si(pi k - 2x)) / pi
# ---------------------------------------------------------------------------

def phi_matrix_numpy(x, n):
    x = np.asarray(x, dtype=float)
    shift = math.pi * np.arange(n + 1, dtype=float)[None, :]
    two_x = 2.0 * x[:, None]
    return (si_numpy(shift + two_x) - si_numpy(shift - two_x)) / math.pi


@njit(cache=True)
def phi_matrix_numba(x, n):
    m = x.size
    out = np.empty((m, n + 1))
    for j in range(m):
        two_x = 2.0 * x[j]
        for k in range(n + 1):
            shift = math.pi * k
            out[j, k] = (_si_scalar(shift + two_x) - _si_scalar(shift - two_x)) / math.pi
    return out


# ---------------------------------------------------------------------------
# Nystrom matrix for sin(sigma (x+y)) / (pi (x+y))
# ---------------------------------------------------------------------------

def nystrom_matrix_numpy(nodes, weights, sigma):
    s = nodes[:, None] + nodes[None, :]
    kern = (sigma / math.pi) * np.sinc(sigma * s / math.pi)
    root_w = np.sqrt(weights)
    mat = root_w[:, None] * kern * root_w[None, :]
    return 0.5 * (mat + mat.T)


@njit(cache=True)
def nystrom_matrix_numba(nodes, weights, sigma):
    n = nodes.size
    root_w = np.sqrt(weights)
    mat = np.empty((n, n))
    for i in range(n):
        for j in range(i + 1):
            s = nodes[i] + nodes[j]
            arg = sigma * s
            if abs(arg) < 1e-8:
                kern = sigma / math.pi * (1.0 - arg * arg / 6.0)
            else:
                kern = math.sin(arg) / (math.pi * s)
            val = root_w[i] * kern * root_w[j]
            mat[i, j] = val
            mat[j, i] = val
    return mat


# ---------------------------------------------------------------------------
# power iteration, Rayleigh-quotient stopping rule
# ---------------------------------------------------------------------------

def power_iteration_numpy(mat, start, tol, max_iter):
    v = start / np.linalg.norm(start)
    lam_old = 0.0
    lam = 0.0
    for it in range(1, max_iter + 1):
        y = mat @ v
        lam = float(v @ y)
        v = y / np.linalg.norm(y)
        if abs(lam - lam_old) <= tol * max(1.0, abs(lam)):
            return lam, v, it, True
        lam_old = lam
    return lam, v, max_iter, False


@njit(cache=True)
def power_iteration_numba(mat, start, tol, max_iter):
    n = start.size
    v = start / np.sqrt(np.sum(start * start))
    y = np.empty(n)
    lam_old = 0.0
    lam = 0.0
    for it in range(1, max_iter + 1):
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc += mat[i, j] * v[j]
            y[i] = acc
        lam = 0.0
        for i in range(n):
            lam += v[i] * y[i]
        ny = np.sqrt(np.sum(y * y))
        v = y / ny
        if abs(lam - lam_old) <= tol * max(1.0, abs(lam)):
            return lam, v, it, True
        lam_old = lam
    return lam, v, max_iter, False


# ---------------------------------------------------------------------------
# 2x2 sweeps over the index idempotent P_a
# ---------------------------------------------------------------------------

def _norm2x2_numpy(m11, m12, m21, m22):
    fro2 = m11 * m11 + m12 * m12 + m21 * m21 + m22 * m22
    det = m11 * m22 - m12 * m21
    disc = np.sqrt(np.maximum(fro2 * fro2 - 4.0 * det * det, 0.0))
    return np.sqrt(0.5 * (fro2 + disc))


def bott_norms_numpy(a, shift11=0.0):
    """||P_a - shift11 * E11|| for every entry of ``a``."""
    a = np.asarray(a, dtype=float)
    a2 = a * a
    m11 = a2 * (2.0 - a2) - shift11
    m12 = (2.0 - a2) * (1.0 - a2) * a
    m21 = a * (1.0 - a2)
    m22 = (1.0 - a2) ** 2
    return _norm2x2_numpy(m11, m12, m21, m22)


@njit(cache=True)
def bott_norms_numba(a, shift11=0.0):
    out = np.empty(a.size)
    for i in range(a.size):
        x = a[i]
        x2 = x * x
        m11 = x2 * (2.0 - x2) - shift11
        m12 = (2.0 - x2) * (1.0 - x2) * x
        m21 = x * (1.0 - x2)
        m22 = (1.0 - x2) * (1.0 - x2)
        fro2 = m11 * m11 + m12 * m12 + m21 * m21 + m22 * m22
        det = m11 * m22 - m12 * m21
        disc = fro2 * fro2 - 4.0 * det * det
        disc = math.sqrt(disc) if disc > 0.0 else 0.0
        out[i] = math.sqrt(0.5 * (fro2 + disc))
    return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def _as_array(x):
    return np.ascontiguousarray(x, dtype=float)


if USE_NUMBA:
    si = si_numba

    def phi_matrix(x, n):
        return phi_matrix_numba(_as_array(x).ravel(), int(n))

    def nystrom_matrix(nodes, weights, sigma):
        return nystrom_matrix_numba(_as_array(nodes), _as_array(weights), float(sigma))

    def power_iteration(mat, start, tol, max_iter):
        return power_iteration_numba(_as_array(mat), _as_array(start), float(tol), int(max_iter))

    def bott_norms(a, shift11=0.0):
        return bott_norms_numba(_as_array(a).ravel(), float(shift11))
else:
    si = si_numpy

    def phi_matrix(x, n):
        return phi_matrix_numpy(np.ravel(x), int(n))

    nystrom_matrix = nystrom_matrix_numpy
    power_iteration = power_iteration_numpy

    def bott_norms(a, shift11=0.0):
        return bott_norms_numpy(np.ravel(a), shift11)


BACKEND = "numba" if USE_NUMBA else "numpy"


def warmup():
    """Trigger JIT compilation so later timings exclude it."""
    if not USE_NUMBA:
        return
    pts = np.array([0.5, 5.0])
    si(pts)
    phi_matrix(pts, 1)
    mat = nystrom_matrix(pts, np.ones(2), 1.0)
    power_iteration(mat, np.ones(2), 1e-12, 10)
    bott_norms(pts)


__all__ = [
    "BACKEND", "HAVE_NUMBA", "USE_NUMBA", "warmup",
    "si", "phi_matrix", "nystrom_matrix", "power_iteration", "bott_norms",
    "si_numpy", "si_numba", "phi_matrix_numpy", "phi_matrix_numba",
    "nystrom_matrix_numpy", "nystrom_matrix_numba",
    "power_iteration_numpy", "power_iteration_numba",
    "bott_norms_numpy", "bott_norms_numba",
]
