from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CUBIC
from minred.dynamics import conjugate_raw
from minred.forms import (
    IDENTITY,
    BinaryForm,
    InexactDivisionError,
    IntegerMatrix2,
    UnimodularMatrix,
    act,
    content_height,
    form_div_exact,
    height_inf,
    is_squarefree,
    is_stable,
    normalize,
    parse_coeffs,
    resultant,
    size,
)

coef = st.integers(-50, 50)
forms = st.integers(3, 6).flatmap(lambda n: st.lists(coef, min_size=n + 1, max_size=n + 1)).filter(any)


@st.composite
def unimodular(draw, bound=6):
    a, b, c = draw(st.integers(-bound, bound)), draw(st.integers(-bound, bound)), draw(st.integers(-bound, bound))
    if a == 0:
        # (0 b; c d) with bc = -1
        s = draw(st.sampled_from([1, -1]))
        return UnimodularMatrix(0, s, -s, draw(st.integers(-bound, bound)))
    if (1 + b * c) % a:
        return UnimodularMatrix(1, b, 0, 1)
    return UnimodularMatrix(a, b, c, (1 + b * c) // a)


int_matrix = st.tuples(*[st.integers(-4, 4)] * 4).filter(
    lambda m: 0 < abs(m[0] * m[3] - m[1] * m[2]) <= 6).map(lambda m: IntegerMatrix2(*m))


# -- examples -------------------------------------------------------------------

def test_act_examples():
    assert act(CUBIC, UnimodularMatrix(1, 4, 0, 1)).coeffs == (-2, -22, -77, 43)
    assert act(CUBIC, IDENTITY) == CUBIC
    assert act(CUBIC, UnimodularMatrix(4, -5, 1, -1)).coeffs == (43, -52, -47, 58)


def test_norms():
    assert size(CUBIC) == 16146
    assert size(BinaryForm([1, 0, 0, -1])) == 2
    assert size(BinaryForm([-2, -22, -77, 43])) == 8266
    assert height_inf(CUBIC) == 127
    assert height_inf(BinaryForm([43, -52, -47, 58])) == 58
    assert height_inf(BinaryForm([1, 0, 0, -1])) == 1


def test_content_height():
    assert content_height([2, 4, 6]) == Fraction(1, 2)
    assert content_height(CUBIC) == 1
    assert content_height([6, 0, 0, -10]) == Fraction(1, 2)
    assert content_height([Fraction(1, 2), 1]) == 2


@pytest.mark.parametrize("p", [2, 3, 5, 7, 101])
def test_resultant_min_res_example(p):
    assert resultant([1, 0, -p], [0, 1, 0]) == -p


def test_resultant_symbolic_p():
    # the same Sylvester determinant with p left as a symbol
    p = sympy.Symbol("p")
    M = sympy.Matrix([[1, 0, -p, 0], [0, 1, 0, -p], [0, 1, 0, 0], [0, 0, 1, 0]])
    assert sympy.expand(M.det()) == -p


def test_resultant_trivial():
    assert resultant([1, 0, 0], [0, 0, 1]) == 1


@settings(max_examples=60)
@given(st.lists(st.integers(-9, 9).filter(bool), min_size=1, max_size=1),
       st.lists(st.integers(-9, 9), min_size=3, max_size=5),
       st.lists(st.integers(-9, 9).filter(bool), min_size=1, max_size=1),
       st.lists(st.integers(-9, 9), min_size=3, max_size=5))
def test_resultant_matches_sympy(fa, fr, ga, gr):
    # with nonzero leading coefficients the affine resultant is the form resultant
    F, G = fa + fr, ga + gr[: len(fr)]
    G = G + [0] * (len(F) - len(G))
    x = sympy.Symbol("x")
    ref = sympy.resultant(sympy.Poly(F, x), sympy.Poly(G, x))
    assert resultant(F, G) == ref


def test_stability_examples():
    x2y = BinaryForm([0, 1, 0, 0])
    assert not is_squarefree(x2y) and not is_stable(x2y)
    f = BinaryForm([1, 0, 0, -1])
    assert is_squarefree(f) and is_stable(f)
    x, y = sympy.symbols("x y")
    p = sympy.Poly(sympy.expand((x - y) ** 2 * (x + y) * (x - 2 * y)), x, y)
    g = BinaryForm([p.coeff_monomial(x ** (4 - i) * y**i) for i in range(5)])
    assert not is_squarefree(g) and not is_stable(g)


def test_stable_counts_y_factors():
    # x y^3 - y^4 = y^3 (x - y): multiplicity 3 >= 2 at infinity
    assert not is_stable(BinaryForm([0, 0, 0, 1, -1]))
    assert is_stable(BinaryForm([0, 1, 0, 0, -1]))


def test_normalize_examples():
    assert normalize(BinaryForm([-265, 50, 689, 2120])).coeffs == (265, -50, -689, -2120)
    assert normalize(BinaryForm([2, 0, 0, -2])).coeffs == (1, 0, 0, -1)
    F = BinaryForm([265, -50, -689, -2120])
    assert normalize(F) == F


def test_json_round_trip():
    assert CUBIC.to_json() == '["-2", "2", "3", "127"]'
    assert BinaryForm.from_json(CUBIC.to_json()) == CUBIC


def test_form_div_exact():
    assert form_div_exact([0, 1, 0, 0, -1, 0], [0, 1, -1, 0]) == [1, 1, 1]
    with pytest.raises(InexactDivisionError):
        form_div_exact([1, 0, 1], [1, 1])


def test_constructor_errors():
    with pytest.raises(ValueError):
        BinaryForm([0, 0, 0])
    with pytest.raises(ValueError):
        BinaryForm([5])
    with pytest.raises(ValueError):
        UnimodularMatrix(2, 0, 0, 1)
    with pytest.raises(ValueError):
        IntegerMatrix2(1, 2, 2, 4)


def test_parse_coeffs():
    assert parse_coeffs("-2, 2,3 ,127") == [-2, 2, 3, 127]
    with pytest.raises(ValueError):
        parse_coeffs("1,,2")


# -- properties -------------------------------------------------------------------

@settings(max_examples=100)
@given(forms, unimodular(), unimodular())
def test_action_group_law(cs, g, h):
    F = BinaryForm(cs)
    assert act(act(F, g), h) == act(F, g @ h)


@settings(max_examples=100)
@given(forms)
def test_size_under_sign_changes(cs):
    F = BinaryForm(cs)
    assert size(act(F, -IDENTITY)) == size(F)
    flip = act(F, UnimodularMatrix(-1, 0, 0, 1))
    assert size(flip) == size(F) and height_inf(flip) == height_inf(F)


@settings(max_examples=50)
@given(st.integers(2, 3).flatmap(
    lambda d: st.tuples(st.lists(coef, min_size=d + 1, max_size=d + 1),
                        st.lists(coef, min_size=d + 1, max_size=d + 1))),
       int_matrix, st.integers(1, 3))
def test_change_of_resultant(pair, gamma, lam):
    F, G = pair
    d = len(F) - 1
    r = resultant(F, G)
    Fg, Gg = _conj(F, G, gamma)
    lhs = resultant([lam * c for c in Fg], [lam * c for c in Gg])
    assert lhs == lam ** (2 * d) * gamma.det ** (d * d + d) * r


def _conj(F, G, gamma):
    # conjugate_raw without the nonzero-resultant check on the model
    class _M:
        pass
    m = _M()
    m.F, m.G = tuple(F), tuple(G)
    return conjugate_raw(m, gamma)


@settings(max_examples=100)
@given(forms)
def test_squarefree_implies_stable(cs):
    F = BinaryForm(cs)
    if is_squarefree(F):
        assert is_stable(F)
