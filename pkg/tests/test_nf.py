from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from diophok.catalogue import field_entries, get_field
from diophok.errors import BasisError, FieldMismatchError, ReduciblePolynomialError
from diophok.nf import NumberField, nf_new, trivial_extension
from diophok.roots import embeddings, roots_in_field

NAMES = [e["name"] for e in field_entries()]
small = st.integers(-9, 9)


def elem(F, coords):
    return F.from_basis(coords)


def coords_for(d):
    return st.lists(small, min_size=d, max_size=d)


@pytest.mark.parametrize("name", NAMES)
def test_catalogue_discriminant_matches_sympy(name):
    F = get_field(name)
    if F.degree == 1:
        assert F.discriminant == 1
        return
    x = sympy.Symbol("x")
    # field discriminant = poly discriminant / index^2
    pdisc = sympy.discriminant(sympy.Poly(list(reversed(F.poly)), x))
    assert pdisc == F.discriminant * F.index ** 2


def test_bad_bases_rejected():
    with pytest.raises(ReduciblePolynomialError):
        NumberField([-1, 0, 1], [[1, 0], [0, 1]])
    with pytest.raises(BasisError):
        # (1 + sqrt 2)/2 is not integral
        NumberField([-2, 0, 1], [[1, 0], [Fraction(1, 2), Fraction(1, 2)]])


def test_nf_new_quadratic_basis():
    F = nf_new([-5, 0, 1])
    assert F.discriminant == 5
    G = nf_new([3, 0, 1])
    assert G.discriminant == -3


@given(coords_for(3), coords_for(3), coords_for(3))
def test_ring_axioms_cubic(a, b, c):
    F = get_field("cbrt2")
    x, y, z = elem(F, a), elem(F, b), elem(F, c)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x


@given(coords_for(4))
def test_inverse_and_norm_multiplicative(a):
    F = get_field("zeta5")
    x = elem(F, a)
    if x.is_zero():
        return
    assert x * x.inverse() == F.one()
    y = x + 3
    assert (x * y).norm() == x.norm() * y.norm()


@given(coords_for(2))
def test_norm_against_resultant(a):
    F = get_field("qsqrt5")
    x = elem(F, a)
    t = sympy.Symbol("t")
    f = sympy.Poly(list(reversed(F.poly)), t)
    g = sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in x.coords])), t)
    assert x.norm() == Fraction(str(sympy.resultant(f, g)))


def test_minpoly_and_field_mismatch(gauss, Q):
    i = gauss.gen
    assert i.minpoly() == [1, 0, 1]
    assert (i + 1).minpoly() == [2, -2, 1]
    with pytest.raises(FieldMismatchError):
        _ = i + get_field("qsqrt2").gen


@pytest.mark.parametrize("name,sig", [("Q", (1, 0)), ("gauss", (0, 1)), ("cbrt2", (1, 1)),
                                      ("cyclic7", (3, 0)), ("zeta8", (0, 2))])
def test_signatures(name, sig):
    assert embeddings(get_field(name)).signature == sig


@pytest.mark.parametrize("name,galois", [("gauss", True), ("cbrt2", False), ("cyclic7", True),
                                         ("zeta5", True), ("qsqrt2sqrt3", True)])
def test_galois_by_automorphism_count(name, galois):
    F = get_field(name)
    assert F.is_galois() == galois
    for s in F.automorphisms():
        # automorphisms respect multiplication on a sample
        a, b = F.gen + 1, F.gen * F.gen - 2
        assert s(a * b) == s(a) * s(b)


def test_roots_in_field_exact():
    F = get_field("zeta8")
    roots = roots_in_field([F(2), F(0), F(1)], F)     # x^2 + 2
    assert len(roots) == 2
    for r in roots:
        assert r * r == F(-2)
    assert roots_in_field([F(-3), F(0), F(1)], F) == []


def test_extension_embed_preimage():
    from diophok.catalogue import get_extension
    ext = get_extension("qsqrt2", "zeta8")
    s2 = ext.embed(ext.base.gen)
    assert s2 * s2 == ext.top(2)
    assert ext.preimage(s2) == ext.base.gen
    assert ext.preimage(ext.top.gen) is None
    t = trivial_extension(ext.top)
    assert t.preimage(ext.top.gen) == ext.top.gen
