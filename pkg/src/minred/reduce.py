"""Bounded best-first search over the SL(2,Z)-orbit of the covariant point."""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

from .covariant import (
    UnstableFormError,
    UpperHalfPoint,
    cosh_dist_j,
    covariant_point,
    eps_fallback,
    eps_inverse_cosh,
    fallback_cosh_bound,
    recentered_form,
)
from .forms import (
    IDENTITY,
    BinaryForm,
    UnimodularMatrix,
    act,
    height_inf,
    is_squarefree,
    is_stable,
    normalize,
    size,
)

SLACK = 1e-9

# gamma' = gamma . M moves the node point z to M^{-1} z
_STEP = {
    "S": UnimodularMatrix(0, 1, -1, 0),  # z -> -1/z
    "T": UnimodularMatrix(1, -1, 0, 1),  # z -> z + 1
    "Tinv": UnimodularMatrix(1, 1, 0, 1),  # z -> z - 1
}


def _move(label: str, z: complex) -> complex:
    if label == "S":
        return -1 / z
    return z + 1 if label == "T" else z - 1


@dataclass
class SearchNode:
    point: UpperHalfPoint
    gamma: UnimodularMatrix
    edge: str
    anchor: complex
    parent: SearchNode | None = field(default=None, repr=False)

    @property
    def cosh(self) -> float:
        return cosh_dist_j(self.point.t, self.point.u)


@dataclass(frozen=True)
class Objective:
    """What is minimized, and how a current best value turns into eps_F's argument."""

    name: str
    value: Callable[[BinaryForm], int]
    bound_arg: Callable[[int, float, int], float]


EUCLIDEAN = Objective("euclidean", size, lambda best, theta, n: 2 ** (n - 1) * best / theta)
MAX_NORM = Objective(
    "max", height_inf, lambda best, theta, n: 2 ** (n - 1) * (n + 1) * best**2 / theta
)
OBJECTIVES = {"euclidean": EUCLIDEAN, "max": MAX_NORM}


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    initial_bound: float = math.nan
    final_bound: float = math.nan
    bound_history: list = field(default_factory=list)
    expanded: list = field(default_factory=list)
    pruned: list = field(default_factory=list)
    z: UpperHalfPoint | None = None
    z_reduced: UpperHalfPoint | None = None
    theta: float = math.nan
    best_node: SearchNode | None = None


def to_fundamental_domain(z) -> tuple[UnimodularMatrix, UpperHalfPoint]:
    """Shift-and-invert: returns gamma0 with gamma0^{-1} z in the standard domain."""
    w = complex(*z) if not isinstance(z, complex) else z
    g = IDENTITY
    for _ in range(10_000):
        if abs(w.real) > 0.5 + SLACK:
            m = math.floor(w.real + 0.5)
            w -= m
            g = g @ UnimodularMatrix(1, m, 0, 1)
        if abs(w) ** 2 < 1.0 - SLACK:
            w = -1 / w
            g = g @ _STEP["S"]
        elif abs(w.real) <= 0.5 + SLACK:
            break
    return g, UpperHalfPoint.from_complex(w)


def _children(node: SearchNode) -> list[SearchNode]:
    if node.edge == "root":
        labels = ["S", "T", "Tinv"]
    else:
        r = node.anchor
        labels = []
        if node.edge != "S" and (abs(r.real) - 1) ** 2 + r.imag**2 >= 1 - SLACK:
            labels.append("S")
        if node.edge != "T":
            labels.append("Tinv")
        if node.edge != "Tinv":
            labels.append("T")
    z = complex(node.point)
    return [
        SearchNode(
            point=UpperHalfPoint.from_complex(_move(lab, z)),
            gamma=node.gamma @ _STEP[lab],
            edge=lab,
            anchor=_move(lab, node.anchor),
            parent=node,
        )
        for lab in labels
    ]


def expand_node(node: SearchNode, c: float) -> list[SearchNode]:
    """Children of `node` that lie inside the cosh-radius c."""
    return [ch for ch in _children(node) if ch.cosh <= c * (1 + SLACK)]


def root_node(z: UpperHalfPoint) -> SearchNode:
    return SearchNode(point=z, gamma=IDENTITY, edge="root", anchor=2j)


def tree_search(
    z_reduced: UpperHalfPoint,
    evaluate: Callable[[UnimodularMatrix], tuple],
    bound: Callable[[object], float],
    seed: tuple | None = None,
    record: bool = False,
    stats: SearchStats | None = None,
):
    """Best-first enumeration of gamma with cosh dist(gamma^{-1} z, j) <= c.

    `evaluate(gamma)` returns (value, tiebreak_key); `bound(value)` returns the
    cosh-radius certified for that value.  `seed` is an already known
    (value, key, gamma) that may tighten the initial bound.
    Returns ((value, key, gamma), stats).
    """
    stats = stats or SearchStats()
    root = root_node(z_reduced)
    v, k = evaluate(root.gamma)
    best = (v, k, root.gamma)
    stats.best_node = root
    if seed is not None and seed[:2] < best[:2]:
        best = seed
    c = bound(best[0])
    stats.initial_bound = c
    stats.bound_history.append((best[0], c))
    counter = itertools.count()
    heap = [(root.cosh, next(counter), root, (v, k))]
    while heap:
        ch, _, node, known = heapq.heappop(heap)
        if ch > c * (1 + SLACK):
            if record:
                stats.pruned.append(node)
                stats.pruned.extend(item[2] for item in heap)
            break
        stats.nodes_expanded += 1
        if record:
            stats.expanded.append(node)
        v, k = known if known is not None else evaluate(node.gamma)
        if (v, k) < best[:2]:
            if v < best[0]:
                c = min(c, bound(v))
                stats.bound_history.append((v, c))
            best = (v, k, node.gamma)
            stats.best_node = node
        for child in _children(node):
            if child.cosh <= c * (1 + SLACK):
                heapq.heappush(heap, (child.cosh, next(counter), child, None))
            elif record:
                stats.pruned.append(child)
    stats.final_bound = c
    return best, stats


def _check_form(F: BinaryForm):
    if F.degree < 3:
        raise UnstableFormError("degree below 3")
    if not is_stable(F):
        raise UnstableFormError("form is not stable")


def bound_function(F0, objective_arg: Callable[[object], float], n: int, theta: float,
                   method: str = "profile") -> Callable[[object], float]:
    """Map a best value to the certified cosh-radius."""
    if method == "profile":
        return lambda best: eps_inverse_cosh(F0, objective_arg(best))
    if method == "fallback":
        eps = eps_fallback(F0)
        # eps (cosh d)^(n-2) <= eps_F(d), so B/eps inverts the weaker bound
        return lambda best: max(1.0, (objective_arg(best) / eps) ** (1.0 / (n - 2)))
    raise ValueError(f"unknown bound method {method!r}")


def bound_for(objective: Objective, F: BinaryForm, best, theta: float, F0=None,
              method: str = "profile") -> float:
    """Certified cosh-radius outside of which every gamma has value > best."""
    n = F.degree
    if F0 is None:
        F0 = recentered_form(F)
    arg = lambda b: objective.bound_arg(b, theta, n)  # noqa: E731
    return bound_function(F0, arg, n, theta, method)(best)


def smallest_representative(F: BinaryForm, objective: Objective | str = EUCLIDEAN,
                            method: str = "profile", record: bool = False):
    """Find gamma in SL(2,Z) minimizing objective(F . gamma).

    Returns (gamma, F . gamma, stats).  Among equal values the representative
    with the lexicographically smallest normalized coefficient tuple wins,
    then the smallest matrix.
    """
    if isinstance(objective, str):
        objective = OBJECTIVES[objective]
    _check_form(F)
    if method == "fallback" and not is_squarefree(F):
        raise UnstableFormError("the fallback bound needs a squarefree form")
    n = F.degree
    cov = covariant_point(F)
    gamma0, zr = to_fundamental_domain(cov.z)
    F0 = recentered_form(F, cov.z)
    arg = lambda b: objective.bound_arg(b, cov.theta, n)  # noqa: E731
    bound = bound_function(F0, arg, n, cov.theta, method)

    def evaluate(g):
        total = (gamma0 @ g).canonical_sign()
        G = act(F, total)
        return objective.value(G), (normalize(G).coeffs, total.entries())

    seed_val, seed_key = objective.value(F), (normalize(F).coeffs, IDENTITY.entries())
    stats = SearchStats(z=cov.z, z_reduced=zr, theta=cov.theta)
    (val, key, g), stats = tree_search(zr, evaluate, bound, seed=(seed_val, seed_key, None),
                                       record=record, stats=stats)
    total = UnimodularMatrix(*key[1])
    return total, act(F, total), stats


def fallback_bound(F: BinaryForm, value, theta: float) -> float:
    """Squarefree-only bound 2 (2 value / (eps theta))^(1/(n-2))."""
    F0 = recentered_form(F)
    return fallback_cosh_bound(value, theta, F.degree, eps_fallback(F0))
