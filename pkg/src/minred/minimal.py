"""Minimal models: p-adic resultant descent and the GL(2,Z)-orbits of minimal models."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import sympy

from .dynamics import EndoModel, conjugate_raw, model_height, reduced_conjugate
from .forms import IDENTITY, IntegerMatrix2

TRIAL_LIMIT = 10**6
MAX_RHO_BITS = 128


class FactorizationError(ArithmeticError):
    pass


@dataclass
class PAdicContext:
    p: int
    f: EndoModel
    vres: int

    def check(self) -> bool:
        return vp(self.f.resultant, self.p) == self.vres and min_valuation(self.f, self.p) == 0


@dataclass
class OrbitSet:
    representatives: list = field(default_factory=list)  # (EndoModel, IntegerMatrix2)

    def __len__(self):
        return len(self.representatives)

    def __iter__(self):
        return iter(self.representatives)


def vp(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def min_valuation(f: EndoModel, p: int) -> int:
    return min(vp(c, p) for c in f.coeffs if c)


def factor_integer(n: int) -> dict[int, int]:
    """Prime factorization: trial division to 10^6, then rho/p-1/ECM on a cofactor of at most 128 bits."""
    n = abs(n)
    if n <= 1:
        return {}
    small = sympy.factorint(n, limit=TRIAL_LIMIT, use_rho=False, use_pm1=False, use_ecm=False)
    out = {}
    for q, e in small.items():
        q = int(q)
        if q < TRIAL_LIMIT**2 or sympy.isprime(q):
            out[q] = out.get(q, 0) + e
            continue
        if q.bit_length() > MAX_RHO_BITS:
            raise FactorizationError(f"cofactor of {q.bit_length()} bits left unfactored")
        for r, k in sympy.factorint(q).items():
            out[int(r)] = out.get(int(r), 0) + k * e
    return dict(sorted(out.items()))


def neighbor_set(p: int) -> list[IntegerMatrix2]:
    """(1 0; 0 p) and (p a; 0 1) for 0 <= a < p: one matrix per neighbouring vertex."""
    return [IntegerMatrix2(1, 0, 0, p)] + [IntegerMatrix2(p, a, 0, 1) for a in range(p)]


def p_normalize(f, p: int) -> tuple[EndoModel, int]:
    """Divide out the largest power of p common to all coefficients."""
    if not isinstance(f, EndoModel):
        f = EndoModel(*f)
    e1 = min_valuation(f, p)
    if e1 == 0:
        return f, 0
    q = p**e1
    return EndoModel([c // q for c in f.F], [c // q for c in f.G]), e1


def _step(f: EndoModel, gamma: IntegerMatrix2, p: int) -> tuple[EndoModel, int]:
    g, _ = p_normalize(conjugate_raw(f, gamma), p)
    return g, vp(g.resultant, p)


def _backtracks(prev: IntegerMatrix2 | None, gamma: IntegerMatrix2, p: int) -> bool:
    """True when prev . gamma lies in p GL(2,Z_p), i.e. gamma undoes prev."""
    if prev is None:
        return False
    return all(e % p == 0 for e in (prev @ gamma).entries())


def _certified_minimal(v: int, d: int) -> bool:
    # edge increments are multiples of d (d even) or 2d (d odd)
    return v < (d if d % 2 == 0 else 2 * d)


def p_minimal_model(f, p: int, trace: list | None = None):
    """Walk downhill in v_p(Res) through neighbouring vertices.

    Returns (f', gamma0) with f' = f^gamma0 normalized at p.  If `trace` is a
    list, it receives (gamma, v_before, v_after, accepted) for every
    direction examined.
    """
    f, _ = p_normalize(f, p)
    d = f.degree
    v = vp(f.resultant, p)
    gamma0 = IDENTITY
    prev = None
    while not _certified_minimal(v, d):
        for gamma in neighbor_set(p):
            if _backtracks(prev, gamma, p):
                continue
            g, vg = _step(f, gamma, p)
            if trace is not None:
                trace.append((gamma, v, vg, vg < v))
            if vg < v:
                f, v, gamma0, prev = g, vg, gamma0 @ gamma, gamma
                break
        else:
            break
    return f, gamma0


def _equal_directions(f: EndoModel, v: int, p: int, prev):
    out = []
    for gamma in neighbor_set(p):
        if _backtracks(prev, gamma, p):
            continue
        g, vg = _step(f, gamma, p)
        if vg == v:
            out.append((gamma, g))
    return out


def all_p_orbits(f, p: int) -> OrbitSet:
    """One representative per GL(2,Z_p)-orbit of p-minimal models.

    The minimizing vertices form a path; walk it in both directions from the
    first minimum found.
    """
    f0, gamma0 = p_minimal_model(f, p)
    v = vp(f0.resultant, p)
    reps = [(f0, gamma0)]
    first = _equal_directions(f0, v, p, None)
    if len(first) > 2:
        raise AssertionError(f"{len(first)} equal-valuation directions at the first minimum")
    for gamma, g in first:
        cur, acc, prev = g, gamma0 @ gamma, gamma
        while True:
            reps.append((cur, acc))
            nxt = _equal_directions(cur, v, p, prev)
            if not nxt:
                break
            if len(nxt) > 1:
                raise AssertionError("minimal vertices do not form a path")
            (gamma2, g2), = nxt
            cur, acc, prev = g2, acc @ gamma2, gamma2
    return OrbitSet(reps)


def _global_normalize(f: EndoModel) -> EndoModel:
    return f.normalized()


def minimal_model(f) -> tuple[EndoModel, IntegerMatrix2]:
    """A single globally minimal model f^gamma and its gamma, one prime at a time."""
    if not isinstance(f, EndoModel):
        f = EndoModel(*f)
    f = f.normalized()
    Gamma = IDENTITY
    for p in factor_integer(f.resultant):
        f, gamma = p_minimal_model(f, p)
        Gamma = Gamma @ gamma
    return _global_normalize(f), Gamma


def all_minimal_orbits(f) -> OrbitSet:
    """Representatives of every GL(2,Z)-orbit of minimal models, prime by prime."""
    if not isinstance(f, EndoModel):
        f = EndoModel(*f)
    f = f.normalized()
    acc = [(f, IDENTITY)]
    for p in factor_integer(f.resultant):
        nxt = []
        for g, Gamma in acc:
            for h, gamma in all_p_orbits(g, p):
                nxt.append((h, Gamma @ gamma))
        acc = nxt
    return OrbitSet([(_global_normalize(g), G) for g, G in acc])


@dataclass
class ReducedModelReport:
    orbits: list  # dicts, one per GL(2,Z)-orbit
    best_index: int


def reduced_model(f, threads: int = 1, m: int | None = None):
    """A minimal model of smallest height in the conjugacy class of f.

    Returns (f*, gamma*, report) with f* = f^gamma* up to scaling.
    """
    orbits = all_minimal_orbits(f)

    def work(item):
        g, Gamma = item
        gamma, h, stats = reduced_conjugate(g, m)
        return g, Gamma, gamma, h, stats

    items = list(orbits)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(work, items))
    else:
        results = [work(it) for it in items]
    rows = []
    for g, Gamma, gamma, h, stats in results:
        rows.append({
            "representative": g,
            "matrix": Gamma,
            "abs_resultant": abs(g.resultant),
            "reduced": h,
            "gamma": gamma,
            "total": Gamma @ gamma,
            "height": model_height(h),
            "nodes_expanded": stats.nodes_expanded,
        })
    best = min(range(len(rows)), key=lambda i: (rows[i]["height"], rows[i]["reduced"].coeffs))
    return rows[best]["reduced"], rows[best]["total"], ReducedModelReport(rows, best)


def descent_step_exists(f, p: int, max_e2: int = 3) -> bool:
    """Whether some gamma of determinant p^e2 gives coefficient valuation e1 with 2 e1 > (d+1) e2.

    Up to GL(2,Z) on the right and scaling, gamma is (p^e2 b; 0 1) with
    0 <= b < p^e2, or (1 0; 0 p^e2).
    """
    if not isinstance(f, EndoModel):
        f = EndoModel(*f)
    f, _ = p_normalize(f, p)
    d = f.degree
    for e2 in range(1, max_e2 + 1):
        q = p**e2
        cands = [IntegerMatrix2(q, b, 0, 1) for b in range(q)] + [IntegerMatrix2(1, 0, 0, q)]
        for gamma in cands:
            F, G = conjugate_raw(f, gamma)
            e1 = min(vp(c, p) for c in F + G if c)
            if 2 * e1 > (d + 1) * e2:
                return True
    return False


__all__ = [
    "FactorizationError", "OrbitSet", "PAdicContext", "ReducedModelReport",
    "all_minimal_orbits", "all_p_orbits", "descent_step_exists", "factor_integer",
    "minimal_model", "neighbor_set", "p_minimal_model", "p_normalize", "reduced_model", "vp",
]
