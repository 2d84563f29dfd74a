import pytest

from diophok.catalogue import get_extension, get_field
from diophok.errors import DomainError, NotGaloisError
from diophok.forcing import (
    ForcingInstance,
    ForcingParams,
    Verdict,
    compute_n,
    congruence_solutions,
    contracted_divisor_moduli,
    forcing_conclusion,
    fuzz,
    inequalities_hold,
    positive_instance,
    product_element,
)
from diophok.ideals import principal


def digits_scan(ell):
    """Least n > 23*ell with both power inequalities, via decimal lengths.

    10^m > X for X >= 1 exactly when X has at most m digits.
    """
    n = 1
    while True:
        x = len(str((4 * n) ** ell))
        if n > 23 * ell and x <= n - 2 * ell and x <= n - 20 * ell:
            return n
        n += 1


@pytest.mark.parametrize("ell,n", [(1, 24), (2, 47), (3, 70), (4, 93)])
def test_compute_n_table(ell, n):
    assert compute_n(ell).n == n == digits_scan(ell)
    assert not inequalities_hold(ell, n - 1)


@pytest.mark.parametrize("ell", range(1, 13))
def test_compute_n_matches_scan(ell):
    assert compute_n(ell).n == digits_scan(ell)


def test_params_validation():
    with pytest.raises(ValueError):
        ForcingParams(0, 5)
    assert not ForcingParams(2, 30).is_valid()
    with pytest.raises(ValueError):
        compute_n(0)


def test_positive_instances():
    ext = get_extension("Q", "gauss")
    p = compute_n(2)
    for m in (p.n + 1, p.n + 5, 3 * p.n):
        assert forcing_conclusion(positive_instance(ext, m, p)) is Verdict.ALPHA_IN_BASE


def test_small_alpha_in_range_product_vanishes():
    ext = get_extension("Q", "gauss")
    L = ext.top
    assert product_element(L(3), 5).is_zero()
    p = compute_n(2)
    inst = ForcingInstance(ext, L(3), principal(ext.base(7)), ext.base(3), p)
    # the product is zero, so it divides nothing
    assert forcing_conclusion(inst) is Verdict.HYPOTHESES_FAIL


def test_instance_validation():
    ext = get_extension("Q", "gauss")
    L = ext.top
    p = compute_n(2)
    with pytest.raises(DomainError):
        ForcingInstance(ext, L.from_basis(["1/2", 0]), principal(ext.base(5)), ext.base(1), p)
    with pytest.raises(DomainError):
        ForcingInstance(ext, L.gen, principal(ext.base(5)), ext.base(1), compute_n(1))
    cub = get_extension("Q", "cbrt2")
    with pytest.raises(NotGaloisError):
        ForcingInstance(cub, cub.top.gen, principal(cub.base(5)), cub.base(1), compute_n(3))


def test_congruence_solutions_brute_force():
    L = get_field("gauss")
    alpha = L.from_basis([7, 6])
    for d in (1, 2, 3, 4, 6, 12):
        sol = congruence_solutions(alpha, d)
        brute = [k for k in range(d) if all((c - k * e) % d == 0
                                            for c, e in zip(alpha.int_coords(), L.one().int_coords()))]
        if sol is None:
            assert brute == []
        else:
            r, m = sol
            assert brute == [k for k in range(d) if (k - r) % m == 0]


def test_contracted_divisors_end_with_full_contraction():
    ext = get_extension("Q", "gauss")
    alpha = ext.top.from_basis([3, 2])
    n = 6
    ds = contracted_divisor_moduli(alpha, n, ext, 10 ** 4)
    c = principal(product_element(alpha, n)).min_integer()
    assert ds[-1] == c and all(c % d == 0 for d in ds)


@pytest.mark.parametrize("top", ["gauss", "qsqrt2"])
def test_fuzz_no_counterexamples_and_deterministic(top):
    r1 = fuzz(top, trials=4, seed=7).to_json()
    r2 = fuzz(top, trials=4, seed=7).to_json()
    assert r1 == r2
    assert r1["instances"] > 100 and r1["counterexamples"] == []


def test_fuzz_parallel_matches_serial():
    assert fuzz("gauss", trials=4, seed=3, jobs=2).to_json() == fuzz("gauss", trials=4, seed=3).to_json()


def test_fuzz_other_galois_fields():
    rep = fuzz("zeta5", trials=2, seed=1).to_json()
    assert rep["counterexamples"] == []
    with pytest.raises(NotGaloisError):
        fuzz("cbrt2", trials=1)
