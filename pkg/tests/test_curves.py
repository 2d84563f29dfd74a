from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from diophok.catalogue import get_curve, get_extension
from diophok.curves import (
    ApproximationTarget,
    EllipticCurveData,
    approximate,
    check_good_reduction,
    coset_sets,
    division_points,
    kernel_point,
    numerator_witness,
    reduction_order,
    residue_point_count,
    scalar_mul,
    t_valuation,
    uniformizer,
)
from diophok.errors import BadReductionError, DomainError, ResourceBudgetExceeded
from diophok.ideals import factor, num, principal


@pytest.fixture(scope="module")
def E():
    return get_curve("x3m2")


@pytest.fixture(scope="module")
def E17():
    return get_curve("x3p17")


def prime(K, p):
    return factor(principal(K(p))).factors[0][0]


def brute_count(A, B, p):
    """#E(F_p) by enumerating all affine pairs."""
    return 1 + sum(1 for x in range(p) for y in range(p) if (y * y - x ** 3 - A * x - B) % p == 0)


def test_doubling_and_uniformizer(E):
    P = E.generator
    P2 = P + P
    assert (P2.x.coords[0], P2.y.coords[0]) == (Fraction(129, 100), Fraction(-383, 1000))
    assert uniformizer(P).coords[0] == Fraction(-3, 5)
    assert uniformizer(P2).coords[0] == Fraction(1290, 383)
    assert t_valuation(P2, prime(E.field, 5)) == 1
    assert (P2 - P) == P and (P - P).is_zero()


def test_rejects_bad_input():
    K = get_curve("x3m2").field
    with pytest.raises(DomainError):
        EllipticCurveData(K, 0, 0)
    with pytest.raises(DomainError):
        EllipticCurveData(K, 0, -2, (K(1), K(1)))
    with pytest.raises(DomainError):
        # (2, 3) has order 3 on y^2 = x^3 + 1
        EllipticCurveData(K, 0, 1, (K(2), K(3)))


CURVE17_POINTS = [(-2, 3), (-1, 4), (2, 5), (4, 9), (8, 23), (43, 282), (52, 375)]


@given(st.sampled_from(CURVE17_POINTS), st.sampled_from(CURVE17_POINTS), st.sampled_from(CURVE17_POINTS))
def test_associativity(a, b, c):
    E17 = get_curve("x3p17")
    P, Q, R = (E17.point(*map(E17.field, t)) for t in (a, b, c))
    assert (P + Q) + R == P + (Q + R)
    assert P + Q == Q + P
    S = P + Q
    assert E17.contains(S.x, S.y) if not S.is_zero() else True


@given(st.integers(1, 12), st.integers(1, 12))
def test_scalar_mul_is_additive(a, b):
    P = get_curve("x3m2").generator
    assert scalar_mul(a, P) + scalar_mul(b, P) == scalar_mul(a + b, P)


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 19])
def test_point_counts_brute_force(E, p):
    assert residue_point_count(E, prime(E.field, p)) == brute_count(0, -2, p)


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_reduction_order_by_denominators(E, p):
    """Least m with p dividing the denominator of x(mP), computed over Q."""
    P = E.generator
    m, Q = 1, P
    while Q.x.coords[0].denominator % p:
        m += 1
        Q = Q + P
    assert reduction_order(P, prime(E.field, p)) == m


def test_good_reduction_checks(E):
    P = E.generator
    K = E.field
    for p in (2, 3):
        with pytest.raises(BadReductionError):
            check_good_reduction(E, prime(K, p))
    check_good_reduction(E, prime(K, 5))
    with pytest.raises(BadReductionError):
        kernel_point(P, principal(K(6)))


def test_kernel_point_depths(E):
    K = E.field
    kp = kernel_point(E.generator, principal(K(25 * 7)))
    assert t_valuation(kp.point, prime(K, 5)) >= 2
    assert t_valuation(kp.point, prime(K, 7)) >= 1


@pytest.mark.parametrize("m", [5, 7, 25, 35])
@pytest.mark.parametrize("k", [1, 2, 3, -4])
def test_approximation_certificates(E, m, k):
    I = principal(E.field(m))
    ap = approximate(ApproximationTarget(k, I), E)
    assert ap.certificate()
    assert (ap.s - k).is_zero() or (ap.s - k).coords[0].numerator % m == 0
    assert ap.to_json()["certificate"]["verified"]


def test_approximation_budget(E):
    with pytest.raises(ResourceBudgetExceeded):
        approximate(ApproximationTarget(2, principal(E.field(5 ** 4 * 7 * 11 * 13))), E, max_digits=30)


@pytest.mark.parametrize("beta", [1, 5, 25, 35, 245])
def test_numerator_witness(E, beta):
    s, R, Q = numerator_witness(E.field(beta), E)
    assert principal(E.field(beta)).divides(num(s))
    assert s.coords[0].numerator % beta == 0
    assert s == uniformizer(Q) / uniformizer(R)


def test_over_gaussian_field(E):
    ext = get_extension("Q", "gauss")
    L = ext.top
    EL = E.base_change(ext)
    P = EL.point(ext.embed(E.generator.x), ext.embed(E.generator.y))
    EL = EllipticCurveData(L, EL.A, EL.B, (P.x, P.y))
    I = principal(L.from_basis([2, 1]))
    assert approximate(ApproximationTarget(2, I), EL).certificate()
    s, _, _ = numerator_witness(L.from_basis([2, 1]) * 7, EL)
    assert principal(L.from_basis([2, 1]) * 7).divides(num(s))


def test_division_points_and_cosets(E):
    P = E.generator
    assert division_points(4 * P, 2) == [2 * P]
    assert division_points(P, 2) == []
    assert 3 * division_points(6 * P, 3)[0] == 6 * P
    C = coset_sets(E, [E.zero()], 2)
    assert C.membership(4 * P).verdict == "accepted"
    assert C.membership(3 * P).verdict == "rejected"
    C2 = coset_sets(E, [E.zero(), P], 2)
    res = C2.membership(3 * P)
    assert res.verdict == "accepted" and res.rep_index == 1
    assert 2 * res.division_witness == 3 * P - P
