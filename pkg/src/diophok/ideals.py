"""Ideals of rings of integers as Hermite-normal-form lattices.

An ``Ideal`` is a nonzero integral ideal of O_K stored as the HNF of a
Z-basis, written in integral-basis coordinates. Equality of ideals is
equality of HNF matrices. The zero ideal is not representable.
"""

import itertools
import threading
from fractions import Fraction
from functools import reduce
from math import gcd

import sympy

from . import linalg
from .errors import (
    FieldMismatchError,
    NotCoprimeError,
    ResourceBudgetExceeded,
    UnsupportedPrimeError,
    ZeroIdealError,
)
from .nf import NFElement, frac_str


class Ideal:
    __slots__ = ("field", "hnf")

    def __init__(self, field, rows, normalized=False):
        rows = [list(map(int, r)) for r in rows if any(r)]
        if not rows:
            raise ZeroIdealError("the zero ideal is not representable")
        try:
            h = rows if normalized else linalg.hnf(rows)
        except ValueError:
            raise ZeroIdealError("generators do not span a full-rank lattice") from None
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "hnf", tuple(tuple(r) for r in h))

    def __setattr__(self, key, value):
        raise AttributeError("Ideal is immutable")

    # -- basic data ---------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Ideal) and self.field == other.field and self.hnf == other.hnf

    def __hash__(self):
        return hash(self.hnf)

    def __repr__(self):
        return f"Ideal({self.field.name}, {[list(r) for r in self.hnf]})"

    def norm(self):
        n = 1
        for i, row in enumerate(self.hnf):
            n *= row[i]
        return n

    def is_unit(self):
        return self.norm() == 1

    def min_integer(self):
        """Smallest positive rational integer in the ideal."""
        return linalg.exponent(self.hnf)

    def elements(self):
        """The HNF rows as field elements (a Z-basis of the ideal)."""
        return [self.field.from_basis(r) for r in self.hnf]

    def contains(self, a):
        if isinstance(a, NFElement):
            if a.field != self.field:
                raise FieldMismatchError("element and ideal live in different fields")
            c = a.basis_coords()
            if any(x.denominator != 1 for x in c):
                return False
            return linalg.lattice_contains(self.hnf, [int(x) for x in c])
        return linalg.lattice_contains(self.hnf, a)

    __contains__ = contains

    def _check(self, other):
        if not isinstance(other, Ideal):
            raise TypeError("expected an Ideal")
        if other.field != self.field:
            raise FieldMismatchError("ideals of different fields")

    # -- operations ---------------------------------------------------------

    def __mul__(self, other):
        self._check(other)
        mul = self.field.mul_int
        rows = [mul(a, b) for a in self.hnf for b in other.hnf]
        return Ideal(self.field, rows)

    def __add__(self, other):
        self._check(other)
        return Ideal(self.field, list(self.hnf) + list(other.hnf))

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative ideal powers are fractional")
        result = unit_ideal(self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def intersect(self, other):
        self._check(other)
        return Ideal(self.field, linalg.intersect(self.hnf, other.hnf), normalized=True)

    def divides(self, other):
        """self | other, i.e. other is contained in self."""
        self._check(other)
        return all(linalg.lattice_contains(self.hnf, row) for row in other.hnf)

    def coprime(self, other):
        return (self + other).is_unit()

    def reduce(self, a):
        """Canonical representative of an integral element modulo the ideal."""
        return self.field.from_basis(linalg.reduce_mod_lattice(self.hnf, a.int_coords()))

    def to_json(self):
        return {"field": self.field.name, "hnf_rows": [[str(x) for x in r] for r in self.hnf]}


class PrimeIdeal(Ideal):
    """A prime ideal produced by Kummer-Dedekind, with residue data."""

    __slots__ = ("p", "residue_degree", "ramification", "kd_generator")

    def __init__(self, field, rows, p, residue_degree, ramification, kd_generator):
        super().__init__(field, rows)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "residue_degree", residue_degree)
        object.__setattr__(self, "ramification", ramification)
        object.__setattr__(self, "kd_generator", kd_generator)

    def __repr__(self):
        return f"PrimeIdeal({self.field.name}, p={self.p}, f={self.residue_degree}, {[list(r) for r in self.hnf]})"

    def to_json(self):
        out = super().to_json()
        out.update({"p": str(self.p), "residue_degree": self.residue_degree})
        return out


def unit_ideal(field):
    d = field.degree
    return Ideal(field, linalg.identity(d), normalized=True)


def ideal_from_gens(gens):
    """HNF of the O_K-module generated by integral elements."""
    gens = list(gens)
    if not gens:
        raise ZeroIdealError("no generators")
    field = gens[0].field
    d = field.degree
    rows = []
    for g in gens:
        if g.field != field:
            raise FieldMismatchError("generators from different fields")
        if g.is_zero():
            continue
        c = g.int_coords()
        for j in range(d):
            e = [0] * d
            e[j] = 1
            rows.append(field.mul_int(c, e))
    if not rows:
        raise ZeroIdealError("all generators are zero")
    return Ideal(field, rows)


def principal(a):
    return ideal_from_gens([a])


def ideal_ops(I, J, op):
    if op == "mul":
        return I * J
    if op == "sum":
        return I + J
    if op == "intersect":
        return I.intersect(J)
    raise ValueError(f"unknown ideal operation {op!r}")


def ideal_divides(J, I):
    return J.divides(I)


def coprime(I, J):
    return I.coprime(J)


# -- colon ideals, num/den ----------------------------------------------------


def colon(I, J):
    """(I : J) = {x in O_K : xJ contained in I}."""
    I._check(J)
    field = I.field
    d = field.degree
    lattices = [linalg.identity(d)]
    I_elems = I.elements()
    for g in J.elements():
        ginv = g.inverse()
        lattices.append([(b * ginv).basis_coords() for b in I_elems])
    rows = linalg.intersect_rational(lattices)
    return Ideal(field, [[int(x) for x in r] for r in rows])


def exact_divide(I, J):
    """I * J^-1 for J dividing I."""
    if not J.divides(I):
        raise ValueError("divisor does not divide the ideal")
    return colon(I, J)


class FractionalIdeal:
    """numerator_lattice / denominator with a minimal positive integer denominator."""

    def __init__(self, numerator, denominator=1):
        if denominator <= 0:
            raise ValueError("denominator must be positive")
        content = reduce(gcd, (x for r in numerator.hnf for x in r), 0)
        g = gcd(content, denominator)
        if g > 1:
            numerator = Ideal(numerator.field, [[x // g for x in r] for r in numerator.hnf], normalized=True)
            denominator //= g
        self.numerator_lattice = numerator
        self.denominator = denominator

    @classmethod
    def from_element(cls, a):
        if a.is_zero():
            raise ZeroIdealError("zero element")
        m = a.denominator()
        return cls(principal(a * m), m)

    def __mul__(self, other):
        return FractionalIdeal(self.numerator_lattice * other.numerator_lattice,
                               self.denominator * other.denominator)

    def __eq__(self, other):
        return (isinstance(other, FractionalIdeal) and self.numerator_lattice == other.numerator_lattice
                and self.denominator == other.denominator)

    def __hash__(self):
        return hash((self.numerator_lattice, self.denominator))

    def __repr__(self):
        return f"FractionalIdeal({self.numerator_lattice!r} / {self.denominator})"

    def to_json(self):
        out = self.numerator_lattice.to_json()
        out["denominator"] = str(self.denominator)
        return out


def num_den(a):
    """The unique coprime integral ideals (num, den) with (a) = num/den."""
    if a.is_zero():
        raise ZeroIdealError("num/den of zero is undefined")
    m = a.denominator()
    A = principal(a * m)
    if m == 1:
        return A, unit_ideal(a.field)
    B = principal(a.field(m))
    G = A + B
    num, den = colon(A, G), colon(B, G)
    assert num.coprime(den) and num * B == den * A
    return num, den


def num(a):
    return num_den(a)[0]


# -- prime factorization --------------------------------------------------------


def order_index(alpha):
    """[O_K : Z[alpha]] (0 if alpha does not generate the field)."""
    field = alpha.field
    rows = []
    p = field.one()
    for _ in range(field.degree):
        rows.append(p.basis_coords())
        p = p * alpha
    return abs(int(linalg.det(rows)))


def _kd_candidates(field):
    yield field.gen
    basis = field.integral_basis()
    yield from basis
    for r in range(1, 4):
        for coeffs in itertools.product(range(-r, r + 1), repeat=field.degree):
            if max(map(abs, coeffs)) == r:
                yield field.from_basis(coeffs)


_primes_lock = threading.Lock()
_primes_cache = {}


def primes_above(field, p):
    """Prime ideals above the rational prime p via Kummer-Dedekind.

    Uses the first integral primitive element whose order has index
    prime to p; raises ``UnsupportedPrimeError`` if none is found among
    small candidates.
    """
    key = (field.poly, field.basis, p)
    with _primes_lock:
        hit = _primes_cache.get(key)
    if hit is not None:
        return list(hit)
    x = sympy.Symbol("x")
    for k, alpha in enumerate(_kd_candidates(field)):
        if k > 400:
            break
        idx = order_index(alpha)
        if idx == 0 or idx % p == 0:
            continue
        cp = alpha.charpoly()
        poly = sympy.Poly([int(c) for c in reversed(cp)], x, modulus=p)
        _, factors = poly.factor_list()
        result = []
        for g, e in factors:
            gcoeffs = [int(c) for c in reversed(g.all_coeffs())]
            g_alpha = field.zero()
            for c in reversed(gcoeffs):
                g_alpha = g_alpha * alpha + c
            P = ideal_from_gens([field(p), g_alpha])
            result.append(PrimeIdeal(field, P.hnf, p, g.degree(), e, alpha))
        result.sort(key=lambda P: (P.residue_degree, P.hnf))
        with _primes_lock:
            _primes_cache[key] = tuple(result)
        return result
    raise UnsupportedPrimeError(p)


class PrimeFactorization:
    def __init__(self, factors):
        self.factors = list(factors)

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)

    def reconstruct(self, field):
        result = unit_ideal(field)
        for P, e in self.factors:
            result = result * P ** e
        return result

    def to_json(self):
        return [{"prime": P.to_json(), "exponent": e} for P, e in self.factors]


def valuation(I, P):
    """Exponent of the prime P in the ideal I."""
    k = 0
    power = P
    n = I.norm()
    q = P.norm()
    while n % q == 0 and power.divides(I):
        k += 1
        n //= q
        power = power * P
    return k


def element_valuation(a, P):
    """v_P(a) for a nonzero field element."""
    if a.is_zero():
        raise ZeroIdealError("valuation of zero")
    m = a.denominator()
    return _int_elem_valuation(a * m, P) - _int_elem_valuation(a.field(m), P)


def _int_elem_valuation(b, P):
    coords = b.int_coords()
    k = 0
    power = P
    while linalg.lattice_contains(power.hnf, coords):
        k += 1
        power = power * P
    return k


def factor(I, max_prime_digits=60):
    """Prime factorization of a nonzero ideal (Kummer-Dedekind)."""
    n = I.norm()
    if n == 1:
        return PrimeFactorization([])
    ps = _factor_norm(n, max_prime_digits)
    factors = []
    for p in sorted(ps):
        for P in primes_above(I.field, p):
            v = valuation(I, P)
            if v:
                factors.append((P, v))
    result = PrimeFactorization(factors)
    assert result.reconstruct(I.field) == I
    return result


def _factor_norm(n, max_prime_digits):
    if len(str(n)) <= max_prime_digits:
        return {int(p): int(e) for p, e in sympy.factorint(n).items()}
    # large norms: trial division plus Pollard rho only; a composite cofactor is fatal
    found = sympy.factorint(n, limit=10 ** 6, use_ecm=False)
    for p in found:
        if not sympy.isprime(p):
            raise ResourceBudgetExceeded(f"norm with {len(str(n))} digits could not be factored within budget")
    return {int(p): int(e) for p, e in found.items()}


# -- residue rings, quotient linear algebra ---------------------------------------


class ResidueRing:
    """O_K / I with canonical HNF representatives."""

    def __init__(self, I):
        self.ideal = I
        self.field = I.field
        self.size = I.norm()

    def reduce(self, coords):
        return tuple(linalg.reduce_mod_lattice(self.ideal.hnf, coords))

    def mul(self, u, v):
        return self.reduce(self.field.mul_int(u, v))

    def add(self, u, v):
        return self.reduce([a + b for a, b in zip(u, v)])

    def sub(self, u, v):
        return self.reduce([a - b for a, b in zip(u, v)])

    def neg(self, u):
        return self.reduce([-a for a in u])

    def pow(self, u, e):
        result = self.reduce(self.field.one_coords)
        while e:
            if e & 1:
                result = self.mul(result, u)
            u = self.mul(u, u)
            e >>= 1
        return result

    def is_zero(self, u):
        return not any(self.reduce(u))

    def elements(self):
        ranges = [range(self.ideal.hnf[i][i]) for i in range(self.field.degree)]
        for v in itertools.product(*ranges):
            yield self.reduce(v)

    def from_element(self, a):
        """Reduce an element of K that is integral at every prime dividing the modulus."""
        if a.is_integral():
            return self.reduce(a.int_coords())
        _, den = num_den(a)
        if not den.coprime(self.ideal):
            raise ValueError("element is not integral at the modulus")
        # delta in den with delta = 1 mod I: then delta*a is integral and = a mod I
        delta, _ = decompose_one(den, self.ideal)
        return self.reduce((a * delta).int_coords())


def is_maximal(P, cap=20000):
    """Exact check that O_K/P is a field (desk scale); None above ``cap``."""
    q = P.norm()
    f = sympy.factorint(q)
    if len(f) != 1:
        return False
    if q > cap:
        return None
    R = ResidueRing(P)
    one = R.reduce(P.field.one_coords)
    for u in R.elements():
        if any(u) and R.pow(u, q - 1) != one:
            return False
    return True


def decompose_one(I, J):
    """Elements a in I, b in J with a + b = 1 (I, J coprime)."""
    I._check(J)
    field = I.field
    d = field.degree
    stack = [list(r) for r in I.hnf] + [list(r) for r in J.hnf]
    h, u = linalg.hnf(stack, with_transform=True)
    c = linalg.lattice_coefficients(h, field.one_coords)
    if c is None or h != linalg.identity(d):
        raise NotCoprimeError("ideals are not coprime")
    w = linalg.vecmat(c, u)
    a = linalg.vecmat(w[:d], [list(r) for r in I.hnf])
    b = linalg.vecmat(w[d:], [list(r) for r in J.hnf])
    return field.from_basis(a), field.from_basis(b)


def express_in_generators(a, gens):
    """O_K coefficients x_i with a = sum x_i g_i, or None if a is not in the ideal."""
    field = a.field
    d = field.degree
    gens = list(gens)
    rows, owners = [], []
    for gi, g in enumerate(gens):
        if g.is_zero():
            continue
        c = g.int_coords()
        for j in range(d):
            e = [0] * d
            e[j] = 1
            rows.append(field.mul_int(c, e))
            owners.append((gi, j))
    if not rows:
        return [field.zero() for _ in gens] if a.is_zero() else None
    if not a.is_integral():
        return None
    h, u = linalg.hnf(rows, with_transform=True)
    c = linalg.lattice_coefficients(h, a.int_coords())
    if c is None:
        return None
    w = linalg.vecmat(c, u)
    coeffs = [[0] * d for _ in gens]
    for wk, (gi, j) in zip(w, owners):
        coeffs[gi][j] += wk
    return [field.from_basis(cf) for cf in coeffs]


def inverse_mod(c, I):
    """y in O_K with c*y = 1 mod I, for c coprime to I."""
    u, _ = decompose_one(principal(c), I)
    return I.reduce(u / c)


# -- two-element representation ---------------------------------------------------


def two_element_rep(I, max_radius=6):
    """Generators (i1, i2) of I with i1 the least positive integer in I.

    The second generator is the smallest (max-coordinate, then
    lexicographic) element of a growing coefficient box over the HNF
    rows, reduced modulo i1, that regenerates I. Deterministic.
    """
    field = I.field
    n = I.min_integer()
    i1 = field(n)
    if principal(i1) == I:
        return i1, field.zero()
    rows = [list(r) for r in I.hnf]
    d = field.degree
    for r in range(1, max_radius + 1):
        best = None
        for coeffs in itertools.product(range(-r, r + 1), repeat=d):
            v = linalg.vecmat(coeffs, rows)
            # symmetric reduction modulo n
            v = [((x + n // 2) % n) - n // 2 for x in v]
            if not any(v):
                continue
            if next(x for x in v if x) < 0:
                v = [-x for x in v]
            key = (max(map(abs, v)), v)
            if best is not None and key >= best[0]:
                continue
            cand = field.from_basis(v)
            if ideal_from_gens([i1, cand]) == I:
                best = (key, cand)
        if best is not None:
            return i1, best[1]
    raise ResourceBudgetExceeded("second generator search exhausted")


# -- Chinese remainder theorem and the vanishing product ---------------------------


def crt(pairs):
    """x integral with x = r_i mod I_i for pairwise coprime I_i, reduced mod prod I_i."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty CRT system")
    field = pairs[0][1].field
    mods = [I for _, I in pairs]
    for i, j in itertools.combinations(range(len(mods)), 2):
        if not mods[i].coprime(mods[j]):
            raise NotCoprimeError(f"moduli {i} and {j} are not coprime")
    total = reduce(lambda a, b: a * b, mods)
    x = field.zero()
    for i, (r, I) in enumerate(pairs):
        if not r.is_integral():
            raise ValueError("CRT residues must be integral")
        rest = reduce(lambda a, b: a * b, (m for k, m in enumerate(mods) if k != i), unit_ideal(field))
        if rest.is_unit():
            e = field.one()
        else:
            _, e = decompose_one(I, rest)
        x = x + r * e
    return total.reduce(x)


def primary_part(I, p):
    """The p-primary part of I, i.e. the product of its prime powers above p."""
    k = 0
    n = I.norm()
    while n % p == 0:
        n //= p
        k += 1
    return I + principal(I.field(p ** k))


def solve_vanishing_product(I):
    """x in O_K with (2x-1)(3x-1) in I.

    On the 2-primary part 3x = 1 is solvable, on the rest 2x = 1; no
    factorization of I is needed.
    """
    field = I.field
    if I.is_unit():
        return field.zero()
    I2 = primary_part(I, 2)
    rest = exact_divide(I, I2)
    pairs = []
    if not I2.is_unit():
        pairs.append((inverse_mod(field(3), I2), I2))
    if not rest.is_unit():
        pairs.append((inverse_mod(field(2), rest), rest))
    x = crt(pairs)
    if not I.contains((2 * x - 1) * (3 * x - 1)):
        raise AssertionError("vanishing-product solution failed verification")
    return x


def nonzero_witness(a):
    """(x, y) in O_K^2 with (2x-1)(3x-1) = y*a, certifying a != 0."""
    if a.is_zero():
        raise ZeroIdealError("zero has no nonzero witness")
    if not a.is_integral():
        raise ValueError("element must be integral")
    x = solve_vanishing_product(principal(a))
    y = (2 * x - 1) * (3 * x - 1) / a
    if not y.is_integral() or (2 * x - 1) * (3 * x - 1) != y * a:
        raise AssertionError("nonzero witness failed verification")
    return x, y


# -- extension of ideals and cross-field congruence ---------------------------------


def extend_ideal(I, ext):
    if I.field != ext.base:
        raise FieldMismatchError("ideal is not over the base field")
    return ideal_from_gens([ext.embed(g) for g in I.elements()])


def congruent_mod(alpha, beta, I, ext=None):
    """alpha = beta (mod I), meaning I*O_L divides num(alpha - beta).

    ``beta`` may live in the base field when an extension is supplied.
    """
    if ext is None:
        from .nf import trivial_extension
        ext = trivial_extension(I.field)
    if beta.field != ext.top:
        if beta.field != ext.base:
            raise FieldMismatchError("beta is neither in K nor in L")
        beta = ext.embed(beta)
    if alpha.field != ext.top:
        raise FieldMismatchError("alpha must lie in the top field")
    diff = alpha - beta
    if diff.is_zero():
        return True
    IL = extend_ideal(I, ext) if ext.base != ext.top else I
    return IL.divides(num(diff))


def random_ideal(field, rng, ngens=2, box=9):
    """Ideal generated by random integral elements with coordinates in [-box, box]."""
    while True:
        gens = [field.from_basis([rng.randint(-box, box) for _ in range(field.degree)])
                for _ in range(ngens)]
        if any(not g.is_zero() for g in gens):
            return ideal_from_gens(gens), gens


def parse_hnf_rows(field, text):
    """'a,b;c,d' integral-coordinate rows, taken as O_K-module generators."""
    gens = []
    for part in text.split(";"):
        coords = [Fraction(x) for x in part.split(",")]
        gens.append(field.from_basis(coords))
    return ideal_from_gens(gens)


def ideal_summary(I):
    return {"hnf_rows": [[str(x) for x in r] for r in I.hnf], "norm": str(I.norm())}


__all__ = [
    "Ideal", "PrimeIdeal", "FractionalIdeal", "PrimeFactorization", "ResidueRing",
    "unit_ideal", "ideal_from_gens", "principal", "ideal_ops", "ideal_divides", "coprime",
    "colon", "exact_divide", "num_den", "num", "primes_above", "factor", "valuation",
    "element_valuation", "is_maximal", "decompose_one", "express_in_generators",
    "inverse_mod", "two_element_rep", "crt", "solve_vanishing_product", "nonzero_witness",
    "extend_ideal", "congruent_mod", "random_ideal", "frac_str",
]
