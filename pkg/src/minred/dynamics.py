"""Endomorphisms of P^1: conjugation, period forms and smallest-height conjugates."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import sympy
from sympy.polys.rings import ring
from sympy.polys.domains import ZZ

from .covariant import covariant_point, eps_inverse_cosh, recentered_form
from .forms import (
    IDENTITY,
    BinaryForm,
    IntegerMatrix2,
    UnimodularMatrix,
    form_div_exact,
    format_form,
    is_stable,
    normalize_coeffs,
    poly_mul,
    resultant,
    substitute,
)
from .reduce import SearchStats, bound_function, to_fundamental_domain, tree_search


class DegenerateModelError(ValueError):
    """The two forms of a model share a factor (zero resultant)."""


class NoStableFormError(ValueError):
    pass


@dataclass(frozen=True)
class EndoModel:
    """The model [F : G] of a degree-d map, F and G integer forms of degree d."""

    F: tuple[int, ...]
    G: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "F", tuple(int(c) for c in self.F))
        object.__setattr__(self, "G", tuple(int(c) for c in self.G))
        if len(self.F) != len(self.G) or len(self.F) < 3:
            raise ValueError("F and G must share a degree d >= 2")
        if self.resultant == 0:
            raise DegenerateModelError("resultant of the model vanishes")

    @property
    def degree(self) -> int:
        return len(self.F) - 1

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.F + self.G

    @property
    def resultant(self) -> int:
        # cached by hand: frozen dataclass
        try:
            return self.__dict__["_res"]
        except KeyError:
            r = resultant(self.F, self.G)
            object.__setattr__(self, "_res", r)
            return r

    def normalized(self) -> EndoModel:
        c = normalize_coeffs(self.coeffs)
        d1 = self.degree + 1
        return EndoModel(c[:d1], c[d1:])

    def __str__(self):
        return f"[{format_form(self.F)} : {format_form(self.G)}]"

    def to_dict(self) -> dict:
        return {"num": [str(c) for c in self.F], "den": [str(c) for c in self.G]}


@dataclass(frozen=True)
class SizeBoundConstants:
    C: int
    k: int
    variant: str
    d: int
    m: int


# -- conjugation and iteration -------------------------------------------------

def conjugate_raw(f: EndoModel, gamma: IntegerMatrix2) -> tuple[list[int], list[int]]:
    """(d F - b G, -c F + a G) evaluated at (a x + b y, c x + d y); no content removed."""
    a, b, c, d = gamma.entries()
    Fs = substitute(f.F, (a, b), (c, d))
    Gs = substitute(f.G, (a, b), (c, d))
    return [d * p - b * q for p, q in zip(Fs, Gs)], [-c * p + a * q for p, q in zip(Fs, Gs)]


def conjugate(f: EndoModel, gamma: IntegerMatrix2) -> EndoModel:
    """The conjugate f^gamma, normalized (content removed, sign fixed)."""
    F, G = conjugate_raw(f, gamma)
    return EndoModel(F, G).normalized()


def compose(P, F, G):
    """P(F, G) for forms given as coefficient lists (any ring)."""
    d = len(P) - 1
    powF = [[1]]
    powG = [[1]]
    for _ in range(d):
        powF.append(poly_mul(powF[-1], F))
        powG.append(poly_mul(powG[-1], G))
    out = [0] * (d * (len(F) - 1) + 1)
    for i, a in enumerate(P):
        term = poly_mul(powF[d - i], powG[i])
        for j, t in enumerate(term):
            out[j] += a * t
    return out


def _iterate_lists(F, G, m):
    Fm, Gm = list(F), list(G)
    for _ in range(m - 1):
        Fm, Gm = compose(F, Fm, Gm), compose(G, Fm, Gm)
    return Fm, Gm


def iterate(f: EndoModel, m: int) -> tuple[list[int], list[int]]:
    """The raw m-th iterate [F_m : G_m] (degree d^m, content kept)."""
    if m < 1:
        raise ValueError("m must be positive")
    return _iterate_lists(f.F, f.G, m)


def _period_lists(F, G, m):
    Fm, Gm = _iterate_lists(F, G, m)
    zero = F[0] * 0
    return [p - q for p, q in zip([zero] + Fm, Gm + [zero])]


def period_form_raw(f: EndoModel, m: int) -> list[int]:
    """Phi_m(f) = y F_m - x G_m without normalization."""
    return _period_lists(f.F, f.G, m)


def period_form(f: EndoModel, m: int) -> BinaryForm:
    return BinaryForm(normalize_coeffs(period_form_raw(f, m)))


def _mobius(n: int) -> int:
    fac = sympy.factorint(n)
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


def _dynatomic_lists(F, G, m):
    num, den = [1], [1]
    for k in sympy.divisors(m):
        mu = _mobius(m // k)
        if mu == 1:
            num = poly_mul(num, _period_lists(F, G, k))
        elif mu == -1:
            den = poly_mul(den, _period_lists(F, G, k))
    return form_div_exact(num, den)


def dynatomic_form_raw(f: EndoModel, m: int) -> list[int]:
    """prod_{k | m} Phi_k(f)^mu(m/k), by exact division."""
    return _dynatomic_lists(f.F, f.G, m)


def dynatomic_form(f: EndoModel, m: int) -> BinaryForm:
    return BinaryForm(normalize_coeffs(dynatomic_form_raw(f, m)))


def model_height(f: EndoModel) -> int:
    return max(abs(c) for c in f.coeffs)


# -- size-bound constants --------------------------------------------------------

_TABLE = {
    (2, 2, "full"): (322, 6),
    (2, 2, "dynatomic"): (43, 4),
    (2, 3, "dynatomic"): (106459, 12),
    (3, 2, "full"): (18044, 8),
    (3, 2, "dynatomic"): (1604, 6),
}


def _cache_path() -> Path:
    root = os.environ.get("MINRED_CACHE_DIR") or Path.home() / ".cache" / "minred"
    return Path(root) / "constants.json"


def generic_constants(d: int, m: int, variant: str, use_cache: bool = True) -> SizeBoundConstants:
    """Constants of the size bound, from Phi (or Phi*) of a model with generic coefficients.

    Exact symbolic expansion; the result is cached on disk.
    """
    key = f"{d},{m},{variant}"
    path = _cache_path()
    cache = {}
    if use_cache and path.exists():
        try:
            cache = json.loads(path.read_text())
        except (OSError, ValueError):
            cache = {}
        if key in cache:
            C, k = cache[key]
            return SizeBoundConstants(C, k, variant, d, m)
    names = ",".join([f"a{i}" for i in range(d + 1)] + [f"b{i}" for i in range(d + 1)])
    R, *gens = ring(names, ZZ)
    F, G = gens[: d + 1], gens[d + 1 :]
    if variant == "full":
        coeffs = _period_lists(F, G, m)
    elif variant == "dynatomic":
        coeffs = _dynatomic_lists(F, G, m)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    # ||Phi|| = s(f) = sum_i P_i^2 is itself a polynomial in the generic
    # coefficients; bounding each of its monomials by H^k gives C = ||s||_1.
    s = sum((P * P for P in coeffs), R.zero)
    degs = {sum(mon) for mon in s.monoms()}
    if len(degs) != 1:
        raise ArithmeticError("size polynomial is not homogeneous")
    C = sum(abs(int(c)) for c in s.coeffs())
    k = degs.pop()
    if use_cache:
        cache[key] = [C, k]
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(cache, indent=1))
        except OSError:
            pass
    return SizeBoundConstants(C, k, variant, d, m)


def constants_for(d: int, m: int, variant: str = "full", generic: bool = False) -> SizeBoundConstants:
    """Constants (C, k) with ||Phi|| <= C H(f)^k."""
    if variant not in ("full", "dynatomic"):
        raise ValueError(f"unknown variant {variant!r}")
    if not generic:
        if m == 1:
            return SizeBoundConstants(4 * d + 2, 2, variant, d, m)
        if (d, m, variant) in _TABLE:
            C, k = _TABLE[(d, m, variant)]
            return SizeBoundConstants(C, k, variant, d, m)
    return generic_constants(d, m, variant)


# -- smallest-height conjugate -------------------------------------------------

PHI_ORDER = [(1, "full"), (2, "dynatomic"), (2, "full"), (3, "dynatomic")]


@dataclass
class PhiChoice:
    m: int
    variant: str
    form: BinaryForm  # raw, content kept: the size bound refers to it
    constants: SizeBoundConstants


def select_phi(f: EndoModel, m: int | None = None, variant: str | None = None) -> PhiChoice:
    order = PHI_ORDER
    if m is not None:
        order = [(mm, v) for mm, v in PHI_ORDER if mm == m and (variant is None or v == variant)]
        if not order:
            order = [(m, variant or "full")]
    for mm, var in order:
        raw = period_form_raw(f, mm) if var == "full" else dynatomic_form_raw(f, mm)
        phi = BinaryForm(raw)
        if phi.degree >= 3 and is_stable(phi):
            return PhiChoice(mm, var, phi, constants_for(f.degree, mm, var))
    raise NoStableFormError("no stable period or dynatomic form with m <= 3")


def _as_model(f) -> EndoModel:
    if isinstance(f, EndoModel):
        return f
    F, G = f
    return EndoModel(F, G)


def reduced_conjugate(f, m: int | None = None, variant: str | None = None,
                      method: str = "profile", record: bool = False):
    """Find gamma in SL(2,Z) minimizing H(f^gamma).

    Returns (gamma, f^gamma, stats); stats.phi records which covariant form
    drove the search.
    """
    f = _as_model(f).normalized()
    choice = select_phi(f, m, variant)
    phi = choice.form
    N = phi.degree
    C, k = choice.constants.C, choice.constants.k
    cov = covariant_point(phi)
    gamma0, zr = to_fundamental_domain(cov.z)
    F0 = recentered_form(phi, cov.z)
    arg = lambda best: 2 ** (N - 1) * C * best**k / cov.theta  # noqa: E731
    bound = bound_function(F0, arg, N, cov.theta, method)

    def evaluate(g):
        total = (gamma0 @ g).canonical_sign()
        h = conjugate(f, total)
        return model_height(h), (h.coeffs, total.entries())

    stats = SearchStats(z=cov.z, z_reduced=zr, theta=cov.theta)
    stats.phi = choice
    seed = (model_height(f), (f.coeffs, IDENTITY.entries()), None)
    (val, key, _), stats = tree_search(zr, evaluate, bound, seed=seed, record=record, stats=stats)
    total = UnimodularMatrix(*key[1])
    return total, conjugate(f, total), stats


def endo_bound(f, best: int | None = None, m: int | None = None, variant: str | None = None) -> float:
    """Initial cosh-radius from the size bound of the chosen covariant form."""
    f = _as_model(f).normalized()
    choice = select_phi(f, m, variant)
    phi = choice.form
    cov = covariant_point(phi)
    best = model_height(f) if best is None else best
    B = 2 ** (phi.degree - 1) * choice.constants.C * best**choice.constants.k / cov.theta
    return eps_inverse_cosh(recentered_form(phi, cov.z), B)


def reduce_fixed_form(f, norm: str = "max", m: int = 1):
    """Reduce the period form alone and transport the matrix to f.

    Finds the smallest representative of Phi_m(f) and returns
    (gamma, f^gamma, stats); cheaper, but not height-optimal for f in general.
    """
    from .reduce import smallest_representative

    f = _as_model(f).normalized()
    phi = BinaryForm(period_form_raw(f, m))
    gamma, _, stats = smallest_representative(phi, norm)
    return gamma, conjugate(f, gamma), stats
