"""Covariant point, Julia invariant and the growth bounds that drive the search.

Floating point throughout.  The search region computed from these bounds is
only ever over-estimated: every lower bound on the growth of R(F, z) away from
the covariant point is certified, and the final cosh-radius carries an extra
multiplicative margin.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .forms import BinaryForm, is_stable, substitute

DEFAULT_TOL_Z = 1e-12
SAFETY = 1.001
GRID = 2048


class RootFindingError(ArithmeticError):
    pass


class UnstableFormError(ValueError):
    """The form has a linear factor of multiplicity >= n/2."""


class ConvergenceError(ArithmeticError):
    pass


class RepeatedRootError(ValueError):
    pass


@dataclass(frozen=True)
class UpperHalfPoint:
    t: float
    u: float

    def __post_init__(self):
        if not (self.u > 0 and math.isfinite(self.u) and math.isfinite(self.t)):
            raise ValueError(f"not a point of the upper half-plane: {self.t} + {self.u}j")

    @classmethod
    def from_complex(cls, z: complex) -> UpperHalfPoint:
        return cls(z.real, z.imag)

    def __complex__(self):
        return complex(self.t, self.u)

    def __iter__(self):
        return iter((self.t, self.u))

    def __repr__(self):
        return f"{self.t:.6g} + {self.u:.6g}j"


J = UpperHalfPoint(0.0, 1.0)


@dataclass
class RootData:
    """F = lead * y^n_inf * prod_k (x - r_k y)."""

    lead: complex
    finite: np.ndarray
    n_inf: int

    @property
    def degree(self) -> int:
        return len(self.finite) + self.n_inf


@dataclass
class RootSphereData:
    roots: RootData
    phis: np.ndarray  # shape (n, 3): (Re part, Im part, vertical)


@dataclass
class CovariantResult:
    z: UpperHalfPoint
    theta: float
    residual: float
    iterations: int = 0


@dataclass
class RecenteredForm:
    """A real form F0 in the SL(2,R)-orbit of F with z(F0) = j."""

    coeffs: np.ndarray
    roots: RootData
    phis: np.ndarray
    t0: float
    u0: float
    _profile_cache: dict = field(default_factory=dict, repr=False)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


# -- roots ---------------------------------------------------------------------

def _aberth(c: np.ndarray, max_iter: int = 500) -> np.ndarray:
    m = len(c) - 1
    if m == 1:
        return np.array([-c[1] / c[0]])
    dc = c[:-1] * np.arange(m, 0, -1)
    ratios = np.abs(c[1:] / c[0]) ** (1.0 / np.arange(1, m + 1))
    radius = 2.0 * float(ratios.max())
    if radius == 0.0:
        return np.zeros(m, dtype=complex)
    z = radius * np.exp(1j * (2 * np.pi * np.arange(m) / m + 0.4))
    for _ in range(max_iter):
        p = np.polyval(c, z)
        dp = np.polyval(dc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            s = (1.0 / diff).sum(axis=1) - 1.0
            corr = w / (1.0 - w * s)
        corr = np.where(np.isfinite(corr), corr, 0.0)
        z = z - corr
        if np.all(np.abs(corr) <= 1e-15 * np.maximum(1.0, np.abs(z))):
            break
    else:
        resid = np.abs(np.polyval(c, z)) / np.polyval(np.abs(c), np.abs(z))
        if resid.max() > 1e-6:
            raise RootFindingError("root iteration did not converge")
    # Newton polish, keeping only improving steps
    for _ in range(3):
        p = np.polyval(c, z)
        dp = np.polyval(dc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = z - p / dp
        better = np.isfinite(cand) & (np.abs(np.polyval(c, cand)) < np.abs(p))
        z = np.where(better, cand, z)
    return z


def form_roots(F) -> RootData:
    """Roots of F(x, 1), with y-factors recorded as roots at infinity."""
    c = np.asarray([complex(a) for a in F], dtype=complex)
    n = len(c) - 1
    n_inf = 0
    while c[n_inf] == 0:
        n_inf += 1
    c = c[n_inf:]
    n_zero = 0
    while n_zero < len(c) - 1 and c[len(c) - 1 - n_zero] == 0:
        n_zero += 1
    core = c[: len(c) - n_zero]
    roots = _aberth(core) if len(core) > 1 else np.zeros(0, dtype=complex)
    roots = np.concatenate([roots, np.zeros(n_zero, dtype=complex)])
    assert len(roots) + n_inf == n
    return RootData(lead=c[0], finite=roots, n_inf=n_inf)


def _as_roots(F) -> RootData:
    if isinstance(F, RootData):
        return F
    if isinstance(F, RecenteredForm):
        return F.roots
    return form_roots(F)


# -- R(F, z) -----------------------------------------------------------------

def log_r_value(F, z) -> float:
    rd = _as_roots(F)
    t, u = (z.real, z.imag) if isinstance(z, complex) else tuple(z)
    r = rd.finite
    val = np.sum(np.log(np.abs(r - t) ** 2 + u * u))
    return float(2 * math.log(abs(rd.lead)) + val - rd.degree * math.log(u))


def r_value(F, z) -> float:
    """R(F, t + uj) = prod_k (|alpha_k - beta_k t|^2 + |beta_k|^2 u^2) / u."""
    return math.exp(log_r_value(F, z))


def cosh_dist(z, w) -> float:
    """cosh of the hyperbolic distance between two points of H."""
    t1, u1 = (z.real, z.imag) if isinstance(z, complex) else tuple(z)
    t2, u2 = (w.real, w.imag) if isinstance(w, complex) else tuple(w)
    return 1.0 + ((t1 - t2) ** 2 + (u1 - u2) ** 2) / (2.0 * u1 * u2)


def cosh_dist_j(t: float, u: float) -> float:
    return (t * t + u * u + 1.0) / (2.0 * u)


# -- covariant point ---------------------------------------------------------

def _grad_hess(r: np.ndarray, n: int, t: float, s: float):
    if abs(s) > 300:
        nan = np.full(2, np.nan)
        return math.inf, nan, np.full((2, 2), np.nan)
    u2 = math.exp(2 * s)
    a = r.real - t
    D = a * a + r.imag**2 + u2
    f = float(np.sum(np.log(D)) - n * s)
    gt = float(np.sum(-2 * a / D))
    gs = float(np.sum(2 * u2 / D) - n)
    htt = float(np.sum(2 / D - 4 * a * a / D**2))
    hts = float(np.sum(4 * u2 * a / D**2))
    hss = float(np.sum(4 * u2 / D - 4 * u2 * u2 / D**2))
    return f, np.array([gt, gs]), np.array([[htt, hts], [hts, hss]])


def _residual(g: np.ndarray, s: float) -> float:
    # invariant gradient norm; equals |sum_k phi_k| of the recentered form
    return math.hypot(math.exp(s) * g[0], g[1])


def _z_tolerance() -> float:
    env = os.environ.get("MINRED_TOL_Z")
    return float(env) if env else DEFAULT_TOL_Z


def covariant_point(F, tol: float | None = None, max_iter: int = 200) -> CovariantResult:
    """Minimize R(F, .) over the upper half-plane.

    Newton iteration on (t, log u) with backtracking; gradient steps whenever
    the Newton direction is not a descent direction.
    """
    if tol is None:
        tol = _z_tolerance()
    if isinstance(F, BinaryForm):
        if F.degree < 3:
            raise UnstableFormError("degree below 3")
        if not is_stable(F):
            raise UnstableFormError("form is not stable")
    rd = _as_roots(F)
    n = rd.degree
    r = rd.finite
    if len(r):
        t = float(np.mean(r.real))
        u = float(np.mean(np.abs(r.imag)))
        if not u > 1e-8:
            u = float(np.std(r.real)) or 1.0
    else:
        t, u = 0.0, 1.0
    s = math.log(u)
    f, g, H = _grad_hess(r, n, t, s)
    if not math.isfinite(f):
        t, s = 0.0, 0.0
        f, g, H = _grad_hess(r, n, t, s)
    res = _residual(g, s)
    it = 0
    stalled = 0
    while res > tol and it < max_iter:
        it += 1
        try:
            p = -np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            p = -g
        if not (np.all(np.isfinite(p)) and p @ g < 0):
            p = -g
        # at most hyperbolic length ~2 per step
        big = max(abs(p[0]) * math.exp(-s), abs(p[1]))
        if big > 2.0:
            p = p * (2.0 / big)
        step = 1.0
        accepted = False
        for _ in range(60):
            tn, sn = t + step * p[0], s + step * p[1]
            fn, gn, Hn = _grad_hess(r, n, tn, sn)
            rn = _residual(gn, sn)
            if fn < f - 1e-4 * step * abs(p @ g) or (fn <= f + 1e-13 * abs(f) and rn < res):
                accepted = True
                break
            step *= 0.5
        if not accepted:
            stalled += 1
            if stalled > 3:
                break
            continue
        t, s, f, g, H, res = tn, sn, fn, gn, Hn, rn
    if res > max(tol, 1e-9):
        raise ConvergenceError(f"covariant point did not converge (residual {res:.3g})")
    z = UpperHalfPoint(t, math.exp(s))
    return CovariantResult(z=z, theta=r_value(rd, z), residual=res, iterations=it)


# -- sphere points and recentering ---------------------------------------------

def sphere_points(rd: RootData) -> np.ndarray:
    """Stereographic images phi_k of the roots, as rows (Re, Im, vertical)."""
    a = rd.finite
    m2 = np.abs(a) ** 2
    fin = np.column_stack([2 * a.real / (m2 + 1), 2 * a.imag / (m2 + 1), (m2 - 1) / (m2 + 1)])
    inf = np.tile([0.0, 0.0, 1.0], (rd.n_inf, 1))
    return np.vstack([fin, inf]) if rd.n_inf else fin


def recentered_form(F, z: UpperHalfPoint | None = None) -> RecenteredForm:
    """F0(x, y) = F(u0^(1/2) x + t0 u0^(-1/2) y, u0^(-1/2) y), which has z(F0) = j."""
    if z is None:
        z = covariant_point(F).z
    t0, u0 = z.t, z.u
    rd = _as_roots(F)
    su = math.sqrt(u0)
    coeffs = np.array(substitute([float(c) for c in F], (su, t0 / su), (0.0, 1.0 / su)))
    roots = RootData(
        lead=complex(coeffs[rd.n_inf]) if rd.n_inf < len(coeffs) else rd.lead,
        finite=(rd.finite - t0) / u0,
        n_inf=rd.n_inf,
    )
    return RecenteredForm(coeffs=coeffs, roots=roots, phis=sphere_points(roots), t0=t0, u0=u0)


def unit_direction(z) -> np.ndarray:
    """Unit tangent vector at j pointing towards z, as (horizontal, vertical)."""
    zc = complex(*z) if not isinstance(z, complex) else z
    w = (zc - 1j) / (zc + 1j)
    psi = math.atan2(w.imag, w.real)
    return np.array([-math.sin(psi), math.cos(psi)])


def r_quotient(phis: np.ndarray, z) -> float:
    """R(F0, z) / R(F0, j) from the sphere points of F0.

    With phi the unit tangent at j towards z this is
    prod_k (cosh d - <phi, phi_k> sinh d); the phi_k are the stereographic
    images of the roots, so moving towards a root lowers the product.
    """
    t, u = (z.real, z.imag) if isinstance(z, complex) else tuple(z)
    delta = math.acosh(max(1.0, cosh_dist_j(t, u)))
    if delta == 0.0:
        return 1.0
    d = unit_direction(complex(t, u))
    ip = phis[:, 0] * d[0] + phis[:, 2] * d[1]
    return float(np.prod(math.cosh(delta) - ip * math.sinh(delta)))


# -- epsilon bounds ----------------------------------------------------------

def eta(phis: np.ndarray) -> float:
    g = phis @ phis.T
    n = len(phis)
    iu = np.triu_indices(n, 1)
    ips = np.clip(g[iu], -1.0, 1.0)
    if np.any(ips > 1.0 - 1e-10 * 2):
        raise RepeatedRootError("two sphere points coincide")
    return 1.0 - float(np.sqrt((ips.max() + 1.0) / 2.0))


def eps_fallback(F0: RecenteredForm, cubic_shortcut: bool = True) -> float:
    """Proven lower bound for eps(F0): 1 for cubics, else eta^(n-1)/2."""
    n = len(F0.phis)
    if n == 3 and cubic_shortcut:
        return 1.0
    return eta(F0.phis) ** (n - 1) / 2.0


def _planar(phis: np.ndarray):
    h, v = phis[:, 0], phis[:, 2]
    return np.hypot(h, v), np.arctan2(v, h)


def _interval_lower(lo, hi, rho, ang, ch, sh):
    """Certified lower bound of prod_k (ch + sh rho_k cos(psi - ang_k)) on [lo, hi]."""
    # the cosine is smallest at psi = ang_k + pi when that lies in the interval
    target = ang[None, :] + np.pi
    k = np.ceil((lo[:, None] - target) / (2 * np.pi))
    hit = (target + 2 * np.pi * k) <= hi[:, None]
    cmin = np.minimum(np.cos(lo[:, None] - ang[None, :]), np.cos(hi[:, None] - ang[None, :]))
    cmin = np.where(hit, -1.0, cmin)
    return np.prod(ch + sh * rho[None, :] * cmin, axis=1)


def _point_values(psi, rho, ang, ch, sh):
    return np.prod(ch + sh * rho[None, :] * np.cos(psi[:, None] - ang[None, :]), axis=1)


def eps_profile(F0: RecenteredForm, delta: float, grid: int = GRID, rtol: float = 1e-9) -> float:
    """Certified lower bound for min over dist(z, j) = delta of R(F0, z)/R(F0, j).

    Directions are restricted to the real circle.  The circle is cut into
    `grid` arcs; on each arc every factor is bounded below exactly, and arcs
    whose bound is not within `rtol` of the best sampled value are bisected.
    """
    if delta <= 0.0:
        return 1.0
    key = (delta, grid, rtol)
    cache = F0._profile_cache
    if key in cache:
        return cache[key]
    rho, ang = _planar(F0.phis)
    ch, sh = math.cosh(delta), math.sinh(delta)
    edges = np.linspace(0.0, 2 * np.pi, grid + 1)
    lo, hi = edges[:-1], edges[1:]
    lb = _interval_lower(lo, hi, rho, ang, ch, sh)
    upper = float(_point_values(0.5 * (lo + hi), rho, ang, ch, sh).min())
    settled = []
    for _ in range(60):
        todo = lb < upper * (1.0 - rtol)
        settled.append(lb[~todo])
        if not todo.any():
            break
        lo, hi = lo[todo], hi[todo]
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        lb = _interval_lower(lo, hi, rho, ang, ch, sh)
        upper = min(upper, float(_point_values(0.5 * (lo + hi), rho, ang, ch, sh).min()))
    else:
        settled.append(lb)
    out = float(min(s.min() for s in settled if len(s)))
    cache[key] = out
    return out


def eps_inverse_cosh(F0: RecenteredForm, B: float, xtol: float = 1e-10) -> float:
    """An upper bound c >= cosh(eps_F^{-1}(B)), inflated by the safety factor."""
    if B <= 1.0:
        return SAFETY
    lo, hi = 0.0, 1.0
    while eps_profile(F0, hi) < B:
        lo, hi = hi, 2 * hi
        if hi > 700:
            raise ConvergenceError("growth profile does not reach the target")
    while hi - lo > xtol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if eps_profile(F0, mid) >= B:
            hi = mid
        else:
            lo = mid
    return math.cosh(hi) * SAFETY


def fallback_cosh_bound(value: float, theta: float, n: int, eps: float) -> float:
    """c = 2 (2 ||F|| / (eps theta))^(1/(n-2)) for squarefree forms."""
    return 2.0 * (2.0 * value / (eps * theta)) ** (1.0 / (n - 2))


def eps_optimal_estimate(F0: RecenteredForm, unsafe: bool = False, grid: int = 720) -> float:
    """Grid estimate of inf over (phi, rho) of prod(1 + <phi, phi_k> rho)/(1 - rho^2).

    A grid minimum over-estimates an infimum, so this is not a valid lower
    bound and is refused unless `unsafe` is set.
    """
    if not unsafe:
        raise ValueError("grid-optimized eps is not a certified bound; pass unsafe=True")
    rho_k, ang = _planar(F0.phis)
    psi = np.linspace(0, 2 * np.pi, grid, endpoint=False)
    rhos = np.linspace(0, 0.999, grid // 2)
    cos = rho_k[None, :] * np.cos(psi[:, None] - ang[None, :])
    best = np.inf
    for r in rhos:
        vals = np.prod(1 + cos * r, axis=1) / (1 - r * r)
        best = min(best, float(vals.min()))
    return best
