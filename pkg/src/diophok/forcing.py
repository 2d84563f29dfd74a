"""Forcing an element of O_L down into O_K by a divisibility plus a congruence.

If (alpha-1)...(alpha-n) divides I*O_L and alpha = k (mod I) for a nonzero
ideal I of O_K and k in K, then alpha lies in O_K, provided n is large
relative to l = [L:Q] (L Galois). This module computes such an n, checks
the hypotheses on concrete instances, and runs a seeded falsification
harness.
"""

import enum
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import sympy
from sympy.ntheory.modular import solve_congruence

from .errors import DomainError, NotGaloisError
from .ideals import (
    Ideal,
    congruent_mod,
    extend_ideal,
    principal,
)
from .nf import FieldExtension, NFElement


@dataclass(frozen=True)
class ForcingParams:
    ell: int
    n: int

    def __post_init__(self):
        if self.ell < 1 or self.n < 1:
            raise ValueError("ell and n must be positive")

    def is_valid(self):
        return inequalities_hold(self.ell, self.n)


def inequalities_hold(ell, n):
    """All three inequalities, in exact integer arithmetic."""
    if n <= 23 * ell:
        return False
    bound = (4 * n) ** ell
    return 10 ** (n - 2 * ell) > bound and 10 ** (n - 20 * ell) > bound


def compute_n(ell):
    """Least n with n > 23*ell, 10^(n-2*ell) > (4n)^ell and 10^(n-20*ell) > (4n)^ell."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    n = 23 * ell + 1
    while not inequalities_hold(ell, n):
        n += 1
    return ForcingParams(ell, n)


class Verdict(str, enum.Enum):
    HYPOTHESES_FAIL = "hypotheses_fail"
    ALPHA_IN_BASE = "alpha_in_base"
    COUNTEREXAMPLE = "COUNTEREXAMPLE"


@dataclass(frozen=True)
class ForcingInstance:
    ext: FieldExtension
    alpha: NFElement
    modulus: Ideal
    k: NFElement
    params: ForcingParams

    def __post_init__(self):
        if self.alpha.field != self.ext.top:
            raise DomainError("alpha must lie in L")
        if not self.alpha.is_integral():
            raise DomainError("alpha must lie in O_L")
        if self.modulus.field != self.ext.base:
            raise DomainError("modulus must be an ideal of O_K")
        if self.k.field != self.ext.base:
            raise DomainError("k must lie in K")
        if self.params.ell != self.ext.top.degree:
            raise DomainError("params.ell must equal [L:Q]")
        if not self.ext.top.is_galois():
            raise NotGaloisError("L must be Galois over Q (enlarge L to its Galois closure first)")


def product_element(alpha, n):
    prod = alpha.field.one()
    for j in range(1, n + 1):
        prod = prod * (alpha - j)
    return prod


@lru_cache(maxsize=256)
def _product_ideal(alpha, n):
    prod = product_element(alpha, n)
    if prod.is_zero():
        return None
    return principal(prod)


def product_divides(alpha, n, IL):
    """(prod_{j<=n} (alpha - j)) divides the O_L-ideal IL; false if the product is 0."""
    P = _product_ideal(alpha, n)
    if P is None:
        return False
    return P.divides(IL)


def check_hypotheses(inst):
    IL = extend_ideal(inst.modulus, inst.ext)
    if not product_divides(inst.alpha, inst.params.n, IL):
        return False
    return congruent_mod(inst.alpha, inst.k, inst.modulus, inst.ext)


def forcing_conclusion(inst):
    if not check_hypotheses(inst):
        return Verdict.HYPOTHESES_FAIL
    if inst.ext.preimage(inst.alpha) is not None:
        return Verdict.ALPHA_IN_BASE
    return Verdict.COUNTEREXAMPLE


# -- falsification harness ----------------------------------------------------


@dataclass
class FuzzReport:
    instances: int = 0
    hypotheses_fail: int = 0
    alpha_in_base: int = 0
    residue_classes: int = 0
    counterexamples: list = None

    def __post_init__(self):
        if self.counterexamples is None:
            self.counterexamples = []

    def merge(self, other):
        self.instances += other.instances
        self.hypotheses_fail += other.hypotheses_fail
        self.alpha_in_base += other.alpha_in_base
        self.residue_classes += other.residue_classes
        self.counterexamples.extend(other.counterexamples)
        return self

    def to_json(self):
        return {
            "instances": self.instances,
            "hypotheses_fail": self.hypotheses_fail,
            "alpha_in_base": self.alpha_in_base,
            "residue_classes_covered": self.residue_classes,
            "counterexamples": self.counterexamples,
        }


def _record(report, verdict, inst):
    report.instances += 1
    if verdict is Verdict.HYPOTHESES_FAIL:
        report.hypotheses_fail += 1
    elif verdict is Verdict.ALPHA_IN_BASE:
        report.alpha_in_base += 1
    else:
        report.counterexamples.append({
            "alpha": inst.alpha.to_json(),
            "modulus": inst.modulus.to_json(),
            "k": inst.k.to_json(),
        })


def contracted_divisor_moduli(alpha, n, ext, norm_bound):
    """Integers d generating the moduli examined for one alpha (K = Q).

    These are the divisors d <= ``norm_bound`` of the generator c of the
    contraction (prod (alpha-j)) n Z, followed by c itself, which is the
    only kind of modulus for which the divisibility hypothesis can hold.
    """
    if ext.base.degree != 1:
        raise DomainError("the fuzz harness enumerates moduli over K = Q")
    P = _product_ideal(alpha, n)
    if P is None:
        return []
    c = P.min_integer()
    # primes of c divide N(P), the product of the small norms N(alpha - j)
    primes = set()
    for j in range(1, n + 1):
        primes.update(int(p) for p in sympy.factorint(abs(int((alpha - j).norm()))))
    divs = [1]
    for p in sorted(primes):
        e, rest = 0, c
        while rest % p == 0:
            rest //= p
            e += 1
        divs = [d * p ** i for d in divs for i in range(e + 1) if d * p ** i <= norm_bound]
    out = sorted(set(divs))
    if out[-1] != c:
        out.append(c)
    return out


def congruence_solutions(alpha, d):
    """All k in Z/d with alpha = k mod d*O_L, as (r, m) meaning k = r mod m, or None.

    Each integral-basis coordinate gives one linear congruence in k.
    """
    a = alpha.int_coords()
    e = alpha.field.one().int_coords()
    eqs = []
    for ai, ei in zip(a, e):
        g = gcd(ei, d)
        if ai % g:
            return None
        m = d // g
        if m > 1:
            eqs.append(((ai // g) * pow(ei // g, -1, m) % m, m))
    if not eqs:
        return 0, 1
    return solve_congruence(*eqs)


def _fuzz_trial(args):
    top_name, base_name, catalogue, seed, height, norm_bound, residue_cap, moduli_cap, n = args
    from .catalogue import get_extension
    ext = get_extension(base_name, top_name, catalogue)
    K, L = ext.base, ext.top
    rng = random.Random(seed)
    params = ForcingParams(L.degree, n)
    report = FuzzReport()
    while True:
        alpha = L.from_basis([rng.randint(-height, height) for _ in range(L.degree)])
        if ext.preimage(alpha) is None:
            break
    divisors = contracted_divisor_moduli(alpha, n, ext, norm_bound)
    if not divisors:
        return report
    chosen = divisors[:-1]
    if len(chosen) > moduli_cap:
        chosen = sorted(rng.sample(chosen, moduli_cap))
    chosen.append(divisors[-1])
    for d in chosen:
        I = principal(K(d))
        # every residue class of k: the divisibility test does not involve k,
        # and the k passing the congruence form one solvable linear family
        report.residue_classes += d
        ks = [K(k) for k in range(min(d, residue_cap))]
        ks.append(K(alpha.coords[0]))
        sol = congruence_solutions(alpha, d)
        if sol is not None:
            r, m = sol
            ks.extend(K(r + t * m) for t in range(min(d // m, residue_cap)))
        for k in ks:
            inst = ForcingInstance(ext, alpha, I, k, params)
            _record(report, forcing_conclusion(inst), inst)
    return report


def fuzz(top, base="Q", trials=1000, height=20, norm_bound=10 ** 6, seed=0,
         residue_cap=8, moduli_cap=16, jobs=1, catalogue=None, n=None):
    """Search random alpha in O_L \\ O_K for a violation of the forcing lemma.

    Per alpha, up to ``moduli_cap`` contracted divisors (plus the full
    contraction) are tested; for each, k runs over the first residues,
    the rational part of alpha and every solution class of the congruence.
    Deterministic given ``seed`` regardless of ``jobs``: trial i uses a
    seed derived from (seed, i) and results are merged in trial order.
    """
    from .catalogue import get_extension
    ext = get_extension(base, top, catalogue)
    if not ext.top.is_galois():
        raise NotGaloisError("L must be Galois")
    if n is None:
        n = compute_n(ext.top.degree).n
    tasks = [(ext.top.name, ext.base.name, catalogue, hash_seed(seed, i), height, norm_bound,
              residue_cap, moduli_cap, n)
             for i in range(trials)]
    report = FuzzReport()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for r in pool.map(_fuzz_trial, tasks, chunksize=4):
                report.merge(r)
    else:
        for t in tasks:
            report.merge(_fuzz_trial(t))
    return report


def hash_seed(seed, i):
    return (int(seed) * 1_000_003 + i) & 0xFFFFFFFF


def positive_instance(ext, alpha_int, params):
    """The instance alpha = m in Z, I = (prod (m-j)), k = m, which must give alpha_in_base."""
    K = ext.base
    prod = 1
    for j in range(1, params.n + 1):
        prod *= alpha_int - j
    I = principal(K(prod))
    return ForcingInstance(ext, ext.top(alpha_int), I, K(alpha_int), params)


__all__ = [
    "ForcingParams", "ForcingInstance", "Verdict", "FuzzReport", "compute_n",
    "inequalities_hold", "check_hypotheses", "forcing_conclusion", "fuzz",
    "positive_instance", "product_divides", "product_element",
]
