import pytest

from diophok.catalogue import get_curve, get_extension
from diophok.construction import (
    coset_data,
    emit_coset_membership,
    emit_OK,
    emit_U,
    jacobian,
)
from diophok.dioph import scalarize, verify_witness
from diophok.errors import DomainError
from diophok.forcing import ForcingParams, compute_n
from diophok.nf import trivial_extension


@pytest.fixture(scope="module")
def toy_U():
    # n = 1 fails the forcing inequalities; it only exercises the pipeline
    E = get_curve("x3p17")
    return emit_U(trivial_extension(E.field), ForcingParams(1, 1), E, toy=True)


def test_emit_U_requires_valid_bound():
    E = get_curve("x3m2")
    ext = trivial_extension(E.field)
    with pytest.raises(DomainError):
        emit_U(ext, ForcingParams(1, 5), E)
    U = emit_U(ext, compute_n(1), E)
    assert U.system.parameters[0] == "alpha"


def test_U_small_values_accepted():
    E = get_curve("x3m2")
    ext = get_extension("Q", "gauss")
    U = emit_U(ext, compute_n(2), E)
    for a in (1, 2, 47):
        v = U.membership(ext.top(a))
        assert v.verdict == "accepted" and verify_witness(U.system, v.witness)


def test_U_outside_K_rejected():
    E = get_curve("x3m2")
    ext = get_extension("Q", "gauss")
    U = emit_U(ext, compute_n(2), E)
    assert U.membership(ext.top.gen).verdict == "rejected"


def test_U_large_values_inconclusive_at_real_bound():
    E = get_curve("x3m2")
    ext = get_extension("Q", "gauss")
    U = emit_U(ext, compute_n(2), E)
    v = U.membership(ext.top(50))
    assert v.verdict == "inconclusive" and "2" in v.reason


def test_toy_U_oracle_branch(toy_U):
    L = toy_U.ext.top
    for a in (96, -94):
        v = toy_U.membership(L(a))
        assert v.verdict == "accepted", v.reason
        assert verify_witness(toy_U.system, v.witness)
        assert "s" in v.oracle and "k" in v.oracle
    assert toy_U.membership(L(1)).verdict == "accepted"


def test_OK_definition():
    ext = get_extension("qsqrt2", "zeta8")
    base = trivial_extension(ext.base)
    # curve over the base field K = Q(sqrt 2)
    from diophok.curves import EllipticCurveData
    K = ext.base
    EK = EllipticCurveData(K, K(0), K(-2), (K(3), K(5)))
    # toy bound: the sum structure is independent of n, and n = 93 makes a very large system
    U = emit_U(ext, ForcingParams(4, 3), EK, toy=True)
    OK = emit_OK(ext, U)
    L = ext.top
    s2 = ext.embed(K.gen)
    assert OK.membership(1 + s2).verdict == "accepted"
    assert OK.membership(L.from_basis([0, 0, 1, 0])).verdict == "rejected"
    assert OK.membership(L(5)).verdict == "inconclusive"
    assert base.base == K


@pytest.mark.parametrize("top, r, multiples", [
    ("Q", 1, (2, 3, 4)), ("gauss", 1, (2, 3, 4)),
    ("Q", 2, (3, 4, 7)), ("gauss", 2, (3, 4, 7)),
    ("Q", 3, (4,)),  # r = 3 witnesses cost ~10 s each
])
def test_coset_witnesses(top, r, multiples):
    E = get_curve("x3m2")
    ext = trivial_extension(E.field) if top == "Q" else get_extension("Q", top)
    EL = E.base_change(ext)
    lift = lambda p: EL.zero() if p.is_zero() else EL.point(ext.embed(p.x), ext.embed(p.y))  # noqa: E731
    P = E.generator
    reps = [lift(E.zero())] + [lift(m * P) for m in range(1, r)]
    cd = emit_coset_membership(coset_data(E, ext, reps, r), ext)
    for m in multiples:
        v = cd.witness(lift(m * P))
        assert v.verdict == "accepted", v.reason
        assert verify_witness(cd.system, v.witness)


def test_coset_rejection_over_Q():
    E = get_curve("x3m2")
    ext = trivial_extension(E.field)
    cd = emit_coset_membership(coset_data(E, ext, [E.zero()], 2), ext)
    assert cd.witness(3 * E.generator).verdict == "rejected"


def test_coset_scalarized_witness():
    E = get_curve("x3m2")
    ext = trivial_extension(E.field)
    cd = emit_coset_membership(coset_data(E, ext, [E.zero()], 2), ext)
    v = cd.witness(4 * E.generator)
    ss = scalarize(cd.system)
    ints = ss.map_witness(v.witness)
    assert ss.verify(ints)


def test_jacobian_coordinates():
    E = get_curve("x3m2")
    P2 = 2 * E.generator
    X, Y, Z = jacobian(P2)
    assert X / Z ** 2 == P2.x and Y / Z ** 3 == P2.y
    assert X.is_integral() and Y.is_integral()
    with pytest.raises(DomainError):
        jacobian(E.zero())
