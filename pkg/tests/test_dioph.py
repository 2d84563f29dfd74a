import random

import pytest

from diophok.acceptance import golden_systems, random_instance, read_golden
from diophok.catalogue import get_extension, get_field
from diophok.dioph import (
    PREDICATE_KINDS,
    Poly,
    PolySystem,
    Witness,
    box_search,
    build_witness,
    canonical_json,
    combine,
    emit_nonzero,
    emit_predicate,
    native_predicate,
    nonzero_system_witness,
    scalar_box_search,
    scalarize,
    verify_witness,
)
from diophok.errors import DomainError
from diophok.nf import trivial_extension


@pytest.fixture(scope="module")
def G():
    return trivial_extension(get_field("gauss"))


def test_poly_arithmetic_and_evaluation(G):
    K = G.base
    x, y = Poly.var(K, "x"), Poly.var(K, "y")
    p = (x + y) ** 2 - x * x - 2 * x * y - y * y
    assert p.is_zero()
    q = x * y + 3
    vals = {"x": K.gen, "y": K.from_basis([2, 1])}
    assert q.evaluate(vals) == K.gen * K.from_basis([2, 1]) + 3
    assert q.degree() == 2 and q.variables() == {"x", "y"}


def test_system_declarations(G):
    K = G.base
    x = Poly.var(K, "x")
    with pytest.raises(DomainError):
        PolySystem(G, ["a"], [], [x])
    with pytest.raises(DomainError):
        PolySystem(G, ["x"], ["x"], [x])
    with pytest.raises(DomainError):
        PolySystem(G, ["x"], [], [x * K.from_basis(["1/2", 0])])


def test_json_round_trip_and_canonical_order(G):
    sys = emit_predicate("is_num", G)
    again = PolySystem.from_json(sys.to_json())
    assert again.dumps() == sys.dumps()
    assert sys.dumps().endswith("\n") and "\n" not in sys.dumps()[:-1]
    # graded lex: the first monomial of each equation has maximal degree
    for eq in sys.to_json()["equations"]:
        degs = [sum(v) for v, _ in eq]
        assert degs == sorted(degs, reverse=True)


@pytest.mark.parametrize("name", ["predicate_" + k for k in PREDICATE_KINDS] + ["nonzero", "coset_r2", "U_n24"])
def test_golden_files_bit_exact(name):
    assert golden_systems()[name].dumps() == read_golden(name)


def test_nonzero_system(G):
    sys = emit_nonzero(G)
    a = G.top.from_basis([0, 5])
    w = nonzero_system_witness(a)
    assert verify_witness(sys, w)
    bad = Witness(dict(w.assignment, y=w["y"] + 1))
    assert not verify_witness(sys, bad)
    with pytest.raises(DomainError):
        verify_witness(sys, Witness({"a": a}))


@pytest.mark.parametrize("kind", PREDICATE_KINDS)
def test_predicates_agree_with_native(G, kind):
    rng = random.Random(PREDICATE_KINDS.index(kind))
    sys = emit_predicate(kind, G)
    seen = set()
    for _ in range(30):
        v = random_instance(kind, G.top, rng)
        native = native_predicate(kind, v)
        w = build_witness(kind, v)
        assert (w is not None and verify_witness(sys, w)) == native
        seen.add(native)
    assert seen == {True, False} or kind == "coprime"


def test_predicates_over_a_relative_extension():
    ext = get_extension("qsqrt2", "zeta8")
    sys = emit_predicate("congruence", ext)
    L = ext.top
    v = {"a": L.gen * 3, "b": L.gen, "i1": L(2), "i2": L.zero()}
    w = build_witness("congruence", v)
    assert verify_witness(sys, w)


def test_combine_union_and_sum(G):
    K = G.base
    a = Poly.var(K, "a")
    one = PolySystem(G, ["a"], [], [a - 1])
    two = PolySystem(G, ["a"], [], [a - 2])
    u = combine([one, two], "union")
    L = G.top
    assert verify_witness(u, {"a": L(1)}) and verify_witness(u, {"a": L(2)})
    assert not verify_witness(u, {"a": L(3)})
    both = combine([one, two], "conjunction")
    assert not any(verify_witness(both, {"a": L(c)}) for c in range(4))
    s = combine([one, two], "sum", weights=[K.one(), K.gen])
    assert verify_witness(s, {"a": 1 + 2 * L.gen, "s0": L(1), "s1": L(2)})


def test_scalarization_round_trip(G):
    sys = emit_predicate("principal_ratio", G)
    ss = scalarize(sys)
    rng = random.Random(4)
    for _ in range(10):
        v = random_instance("principal_ratio", G.top, rng)
        w = build_witness("principal_ratio", v)
        if w is None:
            continue
        ints = ss.map_witness(w)
        assert ss.verify(ints)
        assert all(ss.unmap_witness(ints)[k] == w[k] for k in sys.variables)


def test_box_searches_agree(G):
    sys = emit_nonzero(G)
    L = G.top
    w = box_search(sys, {"a": L(5)}, 2)
    assert w is not None and verify_witness(sys, w)
    assert box_search(sys, {"a": L(0)}, 2) is None
    ss = scalarize(sys)
    hit = scalar_box_search(ss, {"a#0": 5, "a#1": 0}, 3)
    assert hit is not None and ss.verify(hit)
    assert scalar_box_search(ss, {"a#0": 0, "a#1": 0}, 20) is None
    # sharding does not change the answer
    assert scalar_box_search(ss, {"a#0": 0, "a#1": 0}, 20, chunk=50) is None
    assert scalar_box_search(ss, {"a#0": 5, "a#1": 0}, 3, chunk=10) == hit


def test_canonical_json_is_sorted():
    assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}\n'
