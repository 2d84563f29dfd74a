import pytest

from diophok.catalogue import get_field
from diophok.errors import DomainError, NotGaloisError
from diophok.shlapentokh import (
    L0_RADICANDS,
    Subfield,
    complex_conjugations,
    contains_sqrt,
    fixed_field,
    intersect_subfields,
    is_totally_real,
    plan,
    plan_L0_variant,
)

GALOIS = ["Q", "gauss", "qsqrt2", "qsqrt5", "qsqrtm5", "cyclic7", "zeta8", "zeta5", "zeta12", "qsqrt2sqrt3"]
TOTALLY_REAL = ["Q", "qsqrt2", "qsqrt3", "qsqrt5", "cyclic7", "qsqrt2sqrt3"]


def test_totally_real_has_no_conjugations():
    for name in TOTALLY_REAL:
        assert complex_conjugations(get_field(name)) == []


def test_gauss_conjugation():
    F = get_field("gauss")
    (sigma,) = complex_conjugations(F)
    i = F.gen
    assert sigma(i) == -i
    E = fixed_field(sigma)
    assert E.degree == 1 and E.minpoly == [-1, 1]


def test_zeta8_single_conjugation():
    # Q(zeta8) = Q(i, sqrt 2): every nonreal embedding induces the same map
    F = get_field("zeta8")
    (sigma,) = complex_conjugations(F)
    z = F.gen
    i, sqrt2 = z ** 2, z + z ** 7
    assert sqrt2 * sqrt2 == F(2)
    assert sigma(i) == -i
    assert sigma(sqrt2) == sqrt2
    E = fixed_field(sigma)
    assert E.degree == 2 and E.contains(sqrt2) and not E.contains(i)
    assert E.catalogue_name() == "qsqrt2"


def test_conjugations_are_exact_involutions():
    for name in GALOIS:
        F = get_field(name)
        for sigma in complex_conjugations(F):
            assert sigma.order() == 2 and not sigma.is_identity()
            assert fixed_field(sigma).index == 2


def test_identity_rejected():
    F = get_field("gauss")
    ident = next(s for s in F.automorphisms() if s.is_identity())
    with pytest.raises(DomainError):
        fixed_field(ident)


def test_order_four_rejected():
    F = get_field("zeta5")
    four = next(s for s in F.automorphisms() if s.order() == 4)
    with pytest.raises(DomainError):
        fixed_field(four)


def test_non_galois_rejected():
    F = get_field("cbrt2")
    with pytest.raises(NotGaloisError, match="Galois closure"):
        complex_conjugations(F)
    with pytest.raises(NotGaloisError):
        plan(F)


def test_intersection_of_quadratic_subfields():
    F = get_field("qsqrt2sqrt3")
    t = F.gen
    # t = sqrt2 + sqrt3, so t^2 = 5 + 2 sqrt6 and t^3 = 11 sqrt2 + 9 sqrt3
    sqrt2 = (t ** 3 - 9 * t) * F("1/2")
    sqrt3 = (11 * t - t ** 3) * F("1/2")
    assert sqrt2 * sqrt2 == F(2) and sqrt3 * sqrt3 == F(3)
    A = Subfield(F, [F.one().coords, sqrt2.coords])
    B = Subfield(F, [F.one().coords, sqrt3.coords])
    E = intersect_subfields(F, [A, B])
    assert E.degree == 1
    assert intersect_subfields(F, [A]) == A
    assert intersect_subfields(F, [A, A]) == A


def test_empty_intersection_is_whole_field():
    for name in ("qsqrt2", "cyclic7", "gauss"):
        F = get_field(name)
        E = intersect_subfields(F, [])
        assert E.degree == F.degree
    assert is_totally_real(intersect_subfields(get_field("cyclic7"), []))
    assert not is_totally_real(intersect_subfields(get_field("gauss"), []))


def test_subspace_must_be_field():
    F = get_field("zeta8")
    z = F.gen
    with pytest.raises(DomainError):
        Subfield(F, [z.coords])  # misses 1
    with pytest.raises(DomainError):
        Subfield(F, [F.one().coords, z.coords])  # not closed under multiplication


def test_plan_gauss():
    p = plan(get_field("gauss"))
    assert p.intersection.degree == 1
    assert [s["kind"] for s in p.steps] == ["base", "intersection", "degree_2"]
    assert p.steps[0]["status"] == "ASSUMED"
    assert len(p.degree2_steps) == 1


def test_plan_zeta8():
    p = plan(get_field("zeta8"))
    E = p.intersection
    assert E.degree == 2 and E.catalogue_name() == "qsqrt2"
    assert is_totally_real(E)
    assert len(p.degree2_steps) == 1
    assert p.degree2_steps[0]["inputs"] == {"rank_stability": "ASSUMED", "elliptic_curve_choice": "ASSUMED"}


@pytest.mark.parametrize("name", TOTALLY_REAL)
def test_plan_totally_real(name):
    F = get_field(name)
    p = plan(F)
    assert p.degree2_steps == []
    assert p.intersection.degree == F.degree
    assert [s["kind"] for s in p.steps] == ["base"]


@pytest.mark.parametrize("name", GALOIS)
def test_plan_invariants(name):
    F = get_field(name)
    p = plan(F)
    assert p.verify()
    assert all(p.checks.values())
    E = p.intersection
    assert is_totally_real(E)
    # a CM or totally real field: the base has index at most 2
    assert E.index in (1, 2)
    for sub in p.fixed_fields:
        assert E.is_subfield_of(sub)


def test_plan_deterministic():
    a = plan(get_field("zeta12")).to_json()
    b = plan(get_field("zeta12")).to_json()
    assert a == b


def test_l0_variant_flags():
    F = get_field("zeta8")
    p = plan_L0_variant(F)
    (step,) = p.degree2_steps
    assert step["flagged"]
    assert not step["constraints"]["L_contains_L0"]
    # zeta8 contains i but none of the odd square roots
    assert step["missing_square_roots"] == [a for a in L0_RADICANDS if a != -1]
    assert step["constraints"]["K_real"]


def test_l0_variant_without_steps():
    p = plan_L0_variant(get_field("qsqrt5"))
    assert p.l0_variant and p.degree2_steps == []


def test_contains_sqrt():
    assert contains_sqrt(get_field("gauss"), -1)
    assert contains_sqrt(get_field("qsqrt5"), 5)
    assert not contains_sqrt(get_field("qsqrt5"), 7)
    assert contains_sqrt(get_field("zeta12"), -3)
