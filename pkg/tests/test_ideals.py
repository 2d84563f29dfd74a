import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from diophok.catalogue import get_field
from diophok.errors import NotCoprimeError, ZeroIdealError
from diophok.ideals import (
    colon,
    crt,
    decompose_one,
    exact_divide,
    factor,
    ideal_from_gens,
    nonzero_witness,
    num_den,
    primary_part,
    primes_above,
    principal,
    random_ideal,
    solve_vanishing_product,
    two_element_rep,
    unit_ideal,
    valuation,
)

FIELDS = ["Q", "gauss", "qsqrt5", "qsqrtm5", "cbrt2", "cyclic7", "zeta8", "zeta12"]


def brute_members(I, box=6):
    """Points of the coordinate box lying in I, by exhaustive lattice membership."""
    d = I.field.degree
    return {v for v in itertools.product(range(-box, box + 1), repeat=d) if I.contains(list(v))}


def brute_product_members(I, J, box=6):
    """Points of the box in the Z-span of all products of Z-bases (no HNF of the product)."""
    F = I.field
    import sympy
    rows = [F.mul_int(a, b) for a in I.hnf for b in J.hnf]
    M = sympy.Matrix(rows)
    # Z-span membership: solve with sympy's own HNF of the spanning set
    from sympy.matrices.normalforms import hermite_normal_form
    H = hermite_normal_form(M.T)
    H = H[:, H.cols - F.degree:] if H.cols > F.degree else H
    out = set()
    for v in itertools.product(range(-box, box + 1), repeat=F.degree):
        sol = H.LUsolve(sympy.Matrix(v))
        if all(c.is_integer for c in sol):
            out.add(v)
    return out


def test_gaussian_hnf_small_cases(gauss):
    I = principal(gauss.from_basis([1, 1]))
    assert I.norm() == 2
    assert I.hnf == ((2, 0), (1, 1)) or I.hnf == ((1, 1), (0, 2))
    assert principal(gauss(5)).norm() == 25
    with pytest.raises(ZeroIdealError):
        principal(gauss(0))


@pytest.mark.parametrize("name", ["gauss", "qsqrtm5"])
def test_product_matches_brute_force_span(name):
    F = get_field(name)
    rng = random.Random(5)
    for _ in range(5):
        I, _ = random_ideal(F, rng, box=4)
        J, _ = random_ideal(F, rng, box=4)
        assert brute_members(I * J) == brute_product_members(I, J)


@pytest.mark.parametrize("name", FIELDS)
def test_sum_intersect_dedekind_identities(name):
    F = get_field(name)
    rng = random.Random(11)
    for _ in range(15):
        I, _ = random_ideal(F, rng, box=6)
        J, _ = random_ideal(F, rng, box=6)
        S, T = I + J, I.intersect(J)
        assert S * T == I * J
        assert S.divides(I) and S.divides(J)
        assert I.divides(T) and J.divides(T)
        assert I.divides(I * J)
        assert colon(I * J, J) == I


def test_intersection_brute_force(gauss):
    rng = random.Random(3)
    for _ in range(5):
        I, _ = random_ideal(gauss, rng, box=3)
        J, _ = random_ideal(gauss, rng, box=3)
        assert brute_members(I.intersect(J), 5) == brute_members(I, 5) & brute_members(J, 5)


@pytest.mark.parametrize("name", FIELDS)
def test_factorization_reconstructs(name):
    F = get_field(name)
    rng = random.Random(17)
    for _ in range(6):
        I, _ = random_ideal(F, rng, box=7)
        fac = factor(I)
        assert fac.reconstruct(F) == I
        for P, e in fac:
            assert valuation(I, P) == e


@pytest.mark.parametrize("name,p,shape", [
    ("gauss", 2, [(1, 2)]), ("gauss", 5, [(1, 1), (1, 1)]), ("gauss", 3, [(2, 1)]),
    ("qsqrtm5", 2, [(1, 2)]), ("qsqrtm5", 3, [(1, 1), (1, 1)]),
    ("cbrt2", 3, [(1, 3)]), ("cbrt2", 5, [(1, 1), (2, 1)]),
    ("zeta5", 5, [(1, 4)]), ("zeta5", 11, [(1, 1)] * 4),
])
def test_prime_splitting(name, p, shape):
    """Residue degrees and ramification indices (f, e) of primes above p."""
    F = get_field(name)
    fac = factor(principal(F(p)))
    got = sorted((P.residue_degree, e) for P, e in fac)
    assert got == sorted(shape)
    assert sum(f * e for f, e in got) == F.degree


def test_primes_above_have_prime_power_norm():
    F = get_field("cyclic7")
    for P in primes_above(F, 7) + primes_above(F, 13):
        assert P.norm() in (7, 13, 13 ** 3)


def test_two_element_rep_regenerates():
    rng = random.Random(8)
    for name in ("gauss", "qsqrtm5", "cbrt2", "zeta8"):
        F = get_field(name)
        for _ in range(8):
            I, _ = random_ideal(F, rng, box=8)
            a, b = two_element_rep(I)
            assert ideal_from_gens([a, b]) == I
            assert two_element_rep(I) == (a, b)


@given(st.lists(st.integers(-9, 9), min_size=2, max_size=2),
       st.lists(st.integers(1, 7), min_size=2, max_size=2))
def test_num_den_properties(nums, dens):
    F = get_field("qsqrtm5")
    a = F.from_basis([Fraction(n, d) for n, d in zip(nums, dens)])
    if a.is_zero():
        return
    n, d = num_den(a)
    assert n.coprime(d)
    assert n * principal(F(a.denominator())) == d * principal(a * a.denominator())
    assert num_den(1 / a) == (d, n)


def test_crt_and_decompose_one(gauss):
    I, J = principal(gauss.from_basis([2, 1])), principal(gauss(3))
    a, b = decompose_one(I, J)
    assert a + b == gauss.one() and I.contains(a) and J.contains(b)
    x = crt([(gauss(1), I), (gauss.from_basis([0, 1]), J)])
    assert I.contains(x - 1) and J.contains(x - gauss.from_basis([0, 1]))
    with pytest.raises(NotCoprimeError):
        crt([(gauss(1), principal(gauss(2))), (gauss(0), principal(gauss.from_basis([1, 1])))])


def test_primary_part_and_exact_divide():
    F = get_field("qsqrtm5")
    I = principal(F(12))
    I2 = primary_part(I, 2)
    assert I2.norm() == 16
    rest = exact_divide(I, I2)
    assert rest.norm() == 9 and I2 * rest == I


@pytest.mark.parametrize("name", FIELDS)
def test_vanishing_product_including_char_2_and_3(name):
    F = get_field(name)
    for m in (1, 2, 3, 6, 12, 72, 35):
        I = principal(F(m))
        x = solve_vanishing_product(I)
        assert I.contains((2 * x - 1) * (3 * x - 1))
    rng = random.Random(2)
    for _ in range(5):
        a = F.from_basis([rng.randint(-30, 30) for _ in range(F.degree)])
        if a.is_zero():
            continue
        x, y = nonzero_witness(a)
        assert (2 * x - 1) * (3 * x - 1) == y * a


def test_unit_ideal_behaviour(gauss):
    U = unit_ideal(gauss)
    assert U.is_unit() and U.divides(principal(gauss(7)))
    assert factor(U).reconstruct(gauss) == U
