"""Exact arithmetic on integral binary forms.

A form of degree n is stored as its coefficient tuple (a_0, ..., a_n), meaning
a_0 x^n + a_1 x^(n-1) y + ... + a_n y^n.  Everything here is exact integer
arithmetic; floating point lives in :mod:`minred.covariant`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

import sympy


class InexactDivisionError(ArithmeticError):
    """Raised when a form division that should be exact leaves a remainder."""


@dataclass(frozen=True, eq=False)
class IntegerMatrix2:
    """The 2x2 integer matrix (a b; c d) with nonzero determinant."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.det == 0:
            raise ValueError("matrix must have nonzero determinant")

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: IntegerMatrix2) -> IntegerMatrix2:
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        cls = UnimodularMatrix if abs(self.det * other.det) == 1 else IntegerMatrix2
        return cls(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def adjugate(self) -> IntegerMatrix2:
        return type(self)(self.d, -self.b, -self.c, self.a)

    def __neg__(self):
        return type(self)(-self.a, -self.b, -self.c, -self.d)

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    # equal entries mean equal matrices, whichever subclass carries them
    def __eq__(self, other):
        if not isinstance(other, IntegerMatrix2):
            return NotImplemented
        return self.entries() == other.entries()

    def __hash__(self):
        return hash(self.entries())

    def rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    def apply(self, z: complex) -> complex:
        """Moebius action on a point of the upper half-plane."""
        return (self.a * z + self.b) / (self.c * z + self.d)

    def canonical_sign(self):
        """Return +-self with first nonzero entry positive."""
        for e in self.entries():
            if e:
                return self if e > 0 else -self
        return self  # pragma: no cover

    def __repr__(self):
        return f"({self.a} {self.b}; {self.c} {self.d})"


class UnimodularMatrix(IntegerMatrix2):
    """An element of GL(2,Z), i.e. determinant +1 or -1."""

    def __post_init__(self):
        if self.det not in (1, -1):
            raise ValueError(f"determinant {self.det} is not +-1")

    def inverse(self) -> UnimodularMatrix:
        adj = self.adjugate()
        return adj if self.det == 1 else -adj


IDENTITY = UnimodularMatrix(1, 0, 0, 1)


@dataclass(frozen=True)
class BinaryForm:
    """Integral binary form a_0 x^n + ... + a_n y^n."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int]):
        cs = tuple(int(c) for c in coeffs)
        if len(cs) < 2:
            raise ValueError("a binary form needs degree >= 1")
        if not any(cs):
            raise ValueError("the zero form is not allowed")
        object.__setattr__(self, "coeffs", cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __neg__(self):
        return BinaryForm(-c for c in self.coeffs)

    def __call__(self, x, y):
        n = self.degree
        return sum(c * x ** (n - i) * y**i for i, c in enumerate(self.coeffs))

    def __str__(self):
        return format_form(self.coeffs)

    def to_json(self) -> str:
        return json.dumps([str(c) for c in self.coeffs])

    @classmethod
    def from_json(cls, text: str) -> BinaryForm:
        return cls(int(c) for c in json.loads(text))


def format_form(coeffs: Sequence[int], x="x", y="y") -> str:
    n = len(coeffs) - 1
    terms = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        mono = "".join(
            v if e == 1 else f"{v}^{e}" for v, e in ((x, n - i), (y, i)) if e
        )
        mag = abs(c)
        body = mono if (mag == 1 and mono) else f"{mag}{mono}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


# -- polynomial helpers on coefficient lists (descending in x) -----------------

def poly_mul(p: Sequence[int], q: Sequence[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def poly_add(p: Sequence[int], q: Sequence[int]) -> list[int]:
    if len(p) != len(q):
        raise ValueError("forms of different degree")
    return [a + b for a, b in zip(p, q)]


def poly_scale(p: Sequence[int], k: int) -> list[int]:
    return [k * a for a in p]


def poly_pow(p: Sequence[int], e: int) -> list[int]:
    out = [1]
    for _ in range(e):
        out = poly_mul(out, p)
    return out


def form_div_exact(num: Sequence[int], den: Sequence[int]) -> list[int]:
    """Exact quotient of two binary forms; raises InexactDivisionError otherwise."""
    num, den = list(num), list(den)
    s = 0
    while den[s] == 0:
        s += 1
    # y^s divides den, so it must divide num: the top s coefficients vanish.
    if any(num[:s]):
        raise InexactDivisionError("leading factor y does not divide")
    num, den = num[s:], den[s:]
    qlen = len(num) - len(den) + 1
    if qlen < 1:
        raise InexactDivisionError("divisor degree exceeds dividend degree")
    rem = num[:]
    quo = []
    lead = den[0]
    for i in range(qlen):
        q, r = divmod(rem[i], lead)
        if r:
            raise InexactDivisionError("non-integral quotient coefficient")
        quo.append(q)
        if q:
            for j, b in enumerate(den):
                rem[i + j] -= q * b
    if any(rem[qlen:]):
        raise InexactDivisionError("nonzero remainder")
    return quo


def substitute(coeffs: Sequence[int], l1: Sequence[int], l2: Sequence[int]) -> list[int]:
    """Coefficients of F(L1, L2) for linear forms L1 = l1[0] x + l1[1] y, L2 likewise."""
    n = len(coeffs) - 1
    pows1 = [[1]]
    pows2 = [[1]]
    for _ in range(n):
        pows1.append(poly_mul(pows1[-1], l1))
        pows2.append(poly_mul(pows2[-1], l2))
    out = [0] * (n + 1)
    for i, a in enumerate(coeffs):
        if a:
            term = poly_mul(pows1[n - i], pows2[i])
            for k, t in enumerate(term):
                out[k] += a * t
    return out


# -- public operations --------------------------------------------------------

def act(F: BinaryForm, gamma: IntegerMatrix2) -> BinaryForm:
    """F . gamma = F(a x + b y, c x + d y)."""
    return BinaryForm(substitute(F.coeffs, (gamma.a, gamma.b), (gamma.c, gamma.d)))


def size(F) -> int:
    return sum(c * c for c in F)


def height_inf(F) -> int:
    return max(abs(c) for c in F)


def content(coeffs: Iterable[int]) -> int:
    return reduce(gcd, coeffs, 0)


def content_height(F) -> Fraction:
    """H_0 of the coefficient vector.

    For integer coefficients, prod_p max_i |a_i|_p = 1/gcd.  Rational
    coefficients are handled by clearing denominators first.
    """
    fr = [Fraction(c) for c in F]
    if not any(fr):
        raise ValueError("zero form")
    den = reduce(lambda a, b: a * b // gcd(a, b), (f.denominator for f in fr), 1)
    ints = [int(f * den) for f in fr]
    return Fraction(den, content(ints))


def normalize(F: BinaryForm) -> BinaryForm:
    return BinaryForm(normalize_coeffs(F.coeffs))


def normalize_coeffs(coeffs: Sequence[int]) -> list[int]:
    g = content(coeffs)
    if g == 0:
        raise ValueError("zero form")
    first = next(c for c in coeffs if c)
    if first < 0:
        g = -g
    return [c // g for c in coeffs]


def _bareiss_det(M: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination."""
    M = [row[:] for row in M]
    n = len(M)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for r in range(k + 1, n):
                if M[r][k]:
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def sylvester_matrix(F: Sequence[int], G: Sequence[int]) -> list[list[int]]:
    f, g = list(F), list(G)
    m, n = len(f) - 1, len(g) - 1
    size_ = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + f + [0] * (size_ - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + g + [0] * (size_ - n - 1 - i))
    return rows


def resultant(F, G) -> int:
    """Resultant of two forms, both regarded as having their full formal degree.

    Sylvester convention with the rows of F first.
    """
    return _bareiss_det(sylvester_matrix(list(F), list(G)))


def _multiplicities(F: BinaryForm) -> list[int]:
    """Multiplicities of the distinct linear factors of F over Q-bar."""
    cs = list(F.coeffs)
    m_y = 0
    while cs[m_y] == 0:
        m_y += 1
    rest = cs[m_y:]
    mults = [m_y] if m_y else []
    if len(rest) > 1:
        X = sympy.Symbol("X")
        _, factors = sympy.Poly(rest, X, domain="ZZ").sqf_list()
        for fac, mult in factors:
            mults.extend([mult] * fac.degree())
    return mults


def is_squarefree(F: BinaryForm) -> bool:
    return all(m == 1 for m in _multiplicities(F))


def is_stable(F: BinaryForm) -> bool:
    """No linear factor of multiplicity >= n/2."""
    return all(2 * m < F.degree for m in _multiplicities(F))


def parse_coeffs(text: str) -> list[int]:
    """Parse '-2, 2,3 ,127' into integers."""
    parts = [p.strip() for p in text.replace(" ", "").split(",")]
    if not parts or any(p == "" for p in parts):
        raise ValueError(f"bad coefficient list: {text!r}")
    return [int(p) for p in parts]
