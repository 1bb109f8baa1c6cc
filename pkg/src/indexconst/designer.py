"""LP design of band-limited normalizing functions.

Given sigma, look for cosine coefficients a_0..a_n with

* sum a_k = 1                                   (f(0) = 1)
* 1 - eps_lo <= chi_f(x) <= 1 + eps_hi           for sampled x >= sigma
* |chi_f(x)| <= amp_bound                         for sampled 0 < x < sigma
* tail_bound(a, x_max) <= min(eps_lo, eps_hi)     (covers every x > x_max)

and push the smallest such sigma down by bisection.  Oddness of chi_f makes
the x <= -sigma half redundant, so it is not emitted.

Sampling uses one lattice ``sigma + j * grid_step`` so that sigma itself is
always a sample point.  The tail row involves |a_k| and is linearized by
splitting a = a_plus - a_minus with both parts non-negative.

The LP solved is: maximize the smallest band slack t subject to the rows
above; the coefficients are feasible iff the optimum has t >= 0.  It is
solved through its dual, which has only 2n + 4 rows, with
:mod:`indexconst.simplex`; the coefficients are read off as the dual
multipliers.
"""
import dataclasses
import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import simplex
from .errors import ContractError, DomainError
from .report import ConstantReport, universal_constant
from .specfun import CosineProfile, basis_matrix, tail_bound, tail_weights

PAPER_EPS_LO = 0.03022
PAPER_EPS_HI = 0.02928
PAPER_AMP_BOUND = 1.2

CENTERED = "centered"
LITERAL = "literal"

# extra room beyond sigma + pi * n when x_max is raised automatically
X_MAX_PAD = 1.0
PASS_TOL = 1e-7
# upper limit on the band slack variable; keeps the LP bounded
SLACK_CAP = 1.0
# right-hand-side perturbation of the dual; shifts the optimal margin by
# at most about PERTURBATION * sum|z|
PERTURBATION = 1e-8
ROW_TOL = 1e-9

FAMILIES = ("equality", "band_lower", "band_upper", "cap", "tail")


@dataclass(frozen=True)
class DesignParams:
    """Inputs of one design problem.

    ``band="centered"`` reads the band as 1 - eps_lo < chi < 1 + eps_hi.
    ``band="literal"`` takes eps_lo < chi - 1 < eps_hi at face value, which is
    empty for the default values (eps_lo > eps_hi).
    """

    n: int = 5
    eps_lo: float = PAPER_EPS_LO
    eps_hi: float = PAPER_EPS_HI
    amp_bound: float = PAPER_AMP_BOUND
    sigma: Optional[float] = None
    grid_step: float = 0.005
    x_max: float = 60.0
    band: str = CENTERED

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.eps_lo <= 0 or self.eps_hi <= 0:
            raise ValueError("eps_lo and eps_hi must be positive")
        if self.amp_bound < 1.0 + self.eps_hi:
            raise ValueError("amp_bound must be at least 1 + eps_hi")
        if not 0.0 < self.grid_step <= 0.01:
            raise ValueError("grid_step must lie in (0, 0.01]")
        if self.band not in (CENTERED, LITERAL):
            raise ValueError(f"band must be {CENTERED!r} or {LITERAL!r}")
        if self.sigma is not None and self.sigma <= 0:
            raise ValueError("sigma must be positive")

    def with_sigma(self, sigma):
        return dataclasses.replace(self, sigma=float(sigma))

    @property
    def lower(self):
        return 1.0 - self.eps_lo if self.band == CENTERED else 1.0 + self.eps_lo

    @property
    def upper(self):
        return 1.0 + self.eps_hi

    @property
    def tail_allowance(self):
        return min(1.0 - self.lower, self.upper - 1.0)

    def effective_x_max(self, sigma=None):
        """x_max, raised past sigma + pi * n where the tail bound is valid."""
        sigma = self.sigma if sigma is None else sigma
        return max(self.x_max, sigma + math.pi * self.n + X_MAX_PAD)

    def as_dict(self):
        return dataclasses.asdict(self)


def sample_grids(sigma, x_max, step):
    """Band points in [sigma, x_max] and cap points in (0, sigma), one lattice."""
    count = int(math.ceil((x_max - sigma) / step - 1e-9))
    band = sigma + step * np.arange(count + 1)
    band[-1] = min(band[-1], x_max)
    below = int(math.ceil(sigma / step - 1e-9))
    cap = sigma - step * np.arange(below - 1, 0, -1)
    cap = cap[cap > 0]
    return band, cap


@dataclass
class ConstraintSystem:
    """Linear rows over the coefficient vector a (length n + 1).

    ``rows @ a <= rhs``; rows flagged in ``slack`` are band rows that the
    solver tightens by the common margin t.  The tail row bounds
    ``tail_weights @ |a| <= tail_rhs``.
    """

    n: int
    eq_rows: np.ndarray
    eq_rhs: np.ndarray
    rows: np.ndarray
    rhs: np.ndarray
    slack: np.ndarray
    family: np.ndarray
    points: np.ndarray
    tail_weights: Optional[np.ndarray] = None
    tail_rhs: float = 0.0
    sigma: Optional[float] = None
    x_max: Optional[float] = None

    @property
    def row_count(self):
        return len(self.eq_rhs) + len(self.rhs) + (self.tail_weights is not None)

    @classmethod
    def generic(cls, eq_rows, eq_rhs, rows, rhs, slack=None):
        """Plain system without sample points (tests, toy problems)."""
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        eq_rows = np.atleast_2d(np.asarray(eq_rows, dtype=float))
        m = rows.shape[0]
        return cls(
            n=eq_rows.shape[1] - 1,
            eq_rows=eq_rows,
            eq_rhs=np.atleast_1d(np.asarray(eq_rhs, dtype=float)),
            rows=rows,
            rhs=np.atleast_1d(np.asarray(rhs, dtype=float)),
            slack=np.zeros(m, bool) if slack is None else np.asarray(slack, bool),
            family=np.full(m, "generic"),
            points=np.full(m, np.nan),
        )


def build_constraints(params):
    if params.sigma is None:
        raise ValueError("params.sigma must be set")
    sigma = params.sigma
    x_max = params.effective_x_max()
    band_x, cap_x = sample_grids(sigma, x_max, params.grid_step)
    phi_band = basis_matrix(band_x, params.n)
    phi_cap = basis_matrix(cap_x, params.n)
    nb, nc = len(band_x), len(cap_x)
    rows = np.vstack([-phi_band, phi_band, phi_cap, -phi_cap])
    rhs = np.concatenate([
        np.full(nb, -params.lower),
        np.full(nb, params.upper),
        np.full(2 * nc, params.amp_bound),
    ])
    slack = np.concatenate([np.ones(2 * nb, bool), np.zeros(2 * nc, bool)])
    family = np.concatenate([
        np.full(nb, "band_lower"), np.full(nb, "band_upper"),
        np.full(nc, "cap_upper"), np.full(nc, "cap_lower"),
    ])
    points = np.concatenate([band_x, band_x, cap_x, cap_x])
    return ConstraintSystem(
        n=params.n,
        eq_rows=np.ones((1, params.n + 1)),
        eq_rhs=np.ones(1),
        rows=rows,
        rhs=rhs,
        slack=slack,
        family=family,
        points=points,
        tail_weights=tail_weights(params.n, x_max),
        tail_rhs=params.tail_allowance,
        sigma=sigma,
        x_max=x_max,
    )


@dataclass
class LPOutcome:
    feasible: bool
    profile: Optional[CosineProfile]
    margin: Optional[float]
    status: str
    iterations: int
    bland_pivots: int
    seconds: float


def solve_system(system, max_iter=50_000):
    """Maximize the band margin t over the system; see the module docstring."""
    t0 = time.perf_counter()
    N = system.n + 1
    d = 2 * N + 2
    s = system.slack.astype(float)[:, None]
    g = [np.hstack([system.rows, -system.rows, s, -s])]
    h = [system.rhs]
    if system.tail_weights is not None:
        w = system.tail_weights[None, :]
        g.append(np.hstack([w, w, np.zeros((1, 2))]))
        h.append([system.tail_rhs])
    tcap = np.zeros((1, d))
    tcap[0, 2 * N], tcap[0, 2 * N + 1] = 1.0, -1.0
    g.append(tcap)
    h.append([SLACK_CAP])
    g = np.vstack(g)
    h = np.concatenate(h)
    e = np.hstack([system.eq_rows, -system.eq_rows, np.zeros((len(system.eq_rhs), 2))])
    m, k = g.shape[0], e.shape[0]

    # dual: min h.y + b.(mu+ - mu-)  s.t.  G^T y + E^T (mu+ - mu-) - s = c
    A = np.hstack([g.T, e.T, -e.T, -np.eye(d)])
    cost = np.concatenate([h, system.eq_rhs, -system.eq_rhs, np.zeros(d)])
    c = np.zeros(d)
    c[2 * N], c[2 * N + 1] = 1.0, -1.0
    # y_tcap = 1 with all surpluses except the t+ row is a feasible basis
    surplus = m + 2 * k + np.arange(d)
    start = np.concatenate([[m - 1], np.delete(surplus, 2 * N)])

    res = simplex.solve(cost, A, c, basis=start, max_iter=max_iter, perturb=PERTURBATION)
    elapsed = time.perf_counter() - t0
    if res.status == simplex.UNBOUNDED:
        return LPOutcome(False, None, None, "infeasible", res.iterations, res.bland_pivots, elapsed)
    z = res.duals
    a = z[:N] - z[N:2 * N]
    # margin actually achieved by a (>= the t component of z)
    gap = system.rhs - system.rows @ a
    margin = float(gap[system.slack].min()) if system.slack.any() else float(z[2 * N] - z[2 * N + 1])
    hard_ok = bool(np.all(gap[~system.slack] >= -ROW_TOL))
    feasible = margin >= 0.0 and hard_ok
    profile = CosineProfile(tuple(a)) if feasible else None
    return LPOutcome(feasible, profile, margin, "feasible" if feasible else "infeasible",
                     res.iterations, res.bland_pivots, elapsed)


def lp_feasible(system):
    """A coefficient vector satisfying every row of ``system``, or None."""
    return solve_system(system).profile


@dataclass
class DesignResult:
    sigma: float
    profile: CosineProfile
    n: int
    probes: list = field(default_factory=list)
    seconds: float = 0.0
    margin: Optional[float] = None

    def __iter__(self):
        return iter((self.sigma, self.profile))


def minimize_sigma(n, params=None, tol=1e-4, lo=0.5, hi=3.0, spot_checks=2):
    """Smallest feasible sigma in [lo, hi], to within ``tol``, by bisection.

    Feasibility is assumed monotone in sigma.  After bisection a few sigmas
    above the answer are re-probed; if one of them is infeasible the
    assumption failed there and bisection restarts above it.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    t0 = time.perf_counter()
    base = dataclasses.replace(params or DesignParams(), n=n, sigma=None)
    probes = []

    def probe(sigma):
        out = solve_system(build_constraints(base.with_sigma(sigma)))
        probes.append({"sigma": sigma, "feasible": out.feasible, "margin": out.margin,
                       "iterations": out.iterations})
        return out

    top = probe(hi)
    if not top.feasible:
        raise DomainError(f"infeasible at sigma = {hi}; parameters too tight")
    best_sigma, best = hi, top
    bottom = probe(lo)
    if bottom.feasible:
        best_sigma, best = lo, bottom
    else:
        while True:
            left, right = lo, best_sigma
            while right - left >= tol:
                mid = 0.5 * (left + right)
                out = probe(mid)
                if out.feasible:
                    right, best_sigma, best = mid, mid, out
                else:
                    left = mid
            violation = None
            for i in range(1, spot_checks + 1):
                s = best_sigma + (hi - best_sigma) * i / (spot_checks + 1)
                if not probe(s).feasible:
                    violation = s
            if violation is None:
                break
            warnings.warn(f"feasibility not monotone: sigma={violation} infeasible "
                          f"above feasible sigma={best_sigma}; restarting above it")
            lo, best_sigma, best = violation, hi, top
    return DesignResult(sigma=best_sigma, profile=best.profile, n=n, probes=probes,
                        seconds=time.perf_counter() - t0, margin=best.margin)


@dataclass
class VerificationReport:
    worst: dict
    passed: bool
    sigma: float
    x_max: float
    grid_step: float
    argmin: dict = field(default_factory=dict)


def verify_profile(profile, params, refine=10):
    """Re-check a profile on a grid ``refine`` times finer than the design grid.

    Slack is (value - bound) oriented so that negative means violated; the
    profile passes iff every family's worst slack is >= -1e-7.
    """
    if profile.n != params.n:
        raise ContractError(f"profile has n={profile.n}, params have n={params.n}")
    if params.sigma is None:
        raise ValueError("params.sigma must be set")
    sigma = params.sigma
    step = params.grid_step / refine
    x_max = params.effective_x_max()
    band_x, cap_x = sample_grids(sigma, x_max, step)
    a = profile.array
    chi_band = basis_matrix(band_x, profile.n) @ a
    chi_cap = basis_matrix(cap_x, profile.n) @ a if cap_x.size else np.zeros(0)
    total = profile.total
    tb = tail_bound(profile, x_max)
    worst = {
        "equality": -abs(total - 1.0),
        "band_lower": float(np.min(chi_band - params.lower)),
        "band_upper": float(np.min(params.upper - chi_band)),
        "cap": float(np.min(params.amp_bound - np.abs(chi_cap))) if cap_x.size else math.inf,
        "tail": min(total - tb - params.lower, params.upper - total - tb),
    }
    argmin = {
        "band_lower": float(band_x[np.argmin(chi_band)]),
        "band_upper": float(band_x[np.argmax(chi_band)]),
    }
    passed = all(v >= -PASS_TOL for v in worst.values())
    return VerificationReport(worst=worst, passed=passed, sigma=sigma, x_max=x_max,
                              grid_step=step, argmin=argmin)


def design_constant(n, params=None, tol=1e-4):
    """LP pipeline end to end, packaged as a report."""
    base = dataclasses.replace(params or DesignParams(), n=n, sigma=None)
    result = minimize_sigma(n, base, tol=tol)
    check = verify_profile(result.profile, base.with_sigma(result.sigma))
    inputs = base.as_dict()
    inputs.pop("sigma")
    inputs["sigma_tol"] = tol
    return ConstantReport(
        method="lp",
        sigma=result.sigma,
        C=universal_constant(result.sigma),
        profile=result.profile,
        inputs=inputs,
        diagnostics={
            "probes": len(result.probes),
            "lp_iterations": sum(p["iterations"] for p in result.probes),
            "margin_at_sigma": result.margin,
            "x_max_effective": base.effective_x_max(result.sigma),
            "verification": check.worst,
            "verification_passed": check.passed,
            "seconds": result.seconds,
        },
    )


__all__ = [
    "DesignParams", "ConstraintSystem", "LPOutcome", "DesignResult", "VerificationReport",
    "build_constraints", "solve_system", "lp_feasible", "minimize_sigma",
    "verify_profile", "design_constant", "universal_constant", "sample_grids",
]
