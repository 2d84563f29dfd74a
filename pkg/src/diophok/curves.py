"""Elliptic curves in short Weierstrass form over number fields.

Exact group law, reduction modulo good primes, kernel-of-reduction points,
and certified approximations s = t(kR)/t(R) = k (mod I) where t = -x/y is
the uniformizer at the identity.
"""

import math
from fractions import Fraction
from dataclasses import dataclass, field as dc_field

import sympy

from .errors import BadReductionError, DomainError, ResourceBudgetExceeded
from .ideals import (
    Ideal,
    ResidueRing,
    element_valuation,
    factor,
    num,
    principal,
)
from .linalg import lcm

DEFAULT_MAX_DIGITS = 10 ** 5
MAX_RESIDUE_FIELD = 10 ** 4


class EllipticCurveData:
    """y^2 = x^3 + A x + B over a number field, with a point of infinite order."""

    def __init__(self, field, A, B, generator=None, rank_note=None, name=None):
        self.field = field
        self.A = field(A) if not hasattr(A, "field") else A
        self.B = field(B) if not hasattr(B, "field") else B
        self.name = name
        self.rank_note = rank_note
        if self.discriminant_factor().is_zero():
            raise DomainError("singular curve: 4A^3 + 27B^2 = 0")
        self.generator = None
        if generator is not None:
            g = self.point(*generator)
            for m in range(1, 13):
                if (m * g).is_zero():
                    raise DomainError(f"generator is torsion of order {m}")
            self.generator = g

    @classmethod
    def from_json(cls, entry, catalogue=None):
        from .catalogue import get_field
        K = get_field(entry["field"], catalogue)
        A = K.from_basis(entry["A"])
        B = K.from_basis(entry["B"])
        gen = None
        if entry.get("generator"):
            gx, gy = entry["generator"]
            gen = (K.from_basis(gx), K.from_basis(gy))
        return cls(K, A, B, gen, entry.get("rank_note"), entry.get("name"))

    def __eq__(self, other):
        return (isinstance(other, EllipticCurveData) and self.field == other.field
                and self.A == other.A and self.B == other.B)

    def __hash__(self):
        return hash((self.field, self.A, self.B))

    def __repr__(self):
        return f"EllipticCurve(y^2 = x^3 + ({self.A})x + ({self.B}))"

    def discriminant_factor(self):
        return 4 * self.A ** 3 + 27 * self.B ** 2

    def rhs(self, x):
        return x ** 3 + self.A * x + self.B

    def contains(self, x, y):
        return y * y == self.rhs(x)

    def point(self, x, y):
        x, y = self.field(x) if not hasattr(x, "field") else x, self.field(y) if not hasattr(y, "field") else y
        if not self.contains(x, y):
            raise DomainError(f"({x}, {y}) is not on {self}")
        return Point(self, x, y)

    def zero(self):
        return Point(self, None, None)

    def base_change(self, ext):
        """The same curve over the top field of an extension."""
        return EllipticCurveData(ext.top, ext.embed(self.A), ext.embed(self.B), name=self.name)

    def to_json(self):
        out = {"field": self.field.name, "A": self.A.to_json(), "B": self.B.to_json()}
        if self.generator is not None:
            out["generator"] = self.generator.to_json()
        if self.name:
            out["name"] = self.name
        return out


class Point:
    __slots__ = ("curve", "x", "y")

    def __init__(self, curve, x, y):
        self.curve = curve
        self.x = x
        self.y = y

    def is_zero(self):
        return self.x is None

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return self.curve == other.curve and self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __repr__(self):
        if self.is_zero():
            return "O"
        return f"({self.x}, {self.y})"

    def __neg__(self):
        if self.is_zero():
            return self
        return Point(self.curve, self.x, -self.y)

    def __add__(self, other):
        return point_add(self, other)

    def __sub__(self, other):
        return point_add(self, -other)

    def __rmul__(self, m):
        return scalar_mul(m, self)

    def digits(self):
        """Largest decimal length among numerators and denominators of the coordinates."""
        if self.is_zero():
            return 1
        best = 1
        for c in self.x.coords + self.y.coords:
            best = max(best, _digits(c.numerator), _digits(c.denominator))
        return best

    def to_json(self):
        if self.is_zero():
            return None
        return [self.x.to_json(), self.y.to_json()]


def _digits(n):
    n = abs(n)
    if n < 10:
        return 1
    # bit length gives the decimal length to within one, cheaply
    return int(n.bit_length() * 0.30103) + 1


def point_add(P, Q):
    if P.curve != Q.curve:
        raise DomainError("points on different curves")
    if P.is_zero():
        return Q
    if Q.is_zero():
        return P
    E = P.curve
    if P.x == Q.x:
        if P.y == -Q.y:
            return E.zero()
        lam = (3 * P.x * P.x + E.A) / (2 * P.y)
    else:
        lam = (Q.y - P.y) / (Q.x - P.x)
    x3 = lam * lam - P.x - Q.x
    y3 = lam * (P.x - x3) - P.y
    return Point(E, x3, y3)


def point_arith(P, Q=None, op="add"):
    if op == "add":
        return point_add(P, Q)
    if op == "neg":
        return -P
    raise ValueError(f"unknown op {op!r}")


def scalar_mul(m, P, max_digits=None):
    if m < 0:
        return scalar_mul(-m, -P, max_digits)
    acc = P.curve.zero()
    base = P
    while m:
        if m & 1:
            acc = acc + base
        m >>= 1
        if m:
            base = base + base
            if max_digits is not None and base.digits() > max_digits:
                raise ResourceBudgetExceeded(
                    f"point coordinates exceed {max_digits} digits")
    if max_digits is not None and acc.digits() > max_digits:
        raise ResourceBudgetExceeded(f"point coordinates exceed {max_digits} digits")
    return acc


def uniformizer(P):
    """t(P) = -x/y, the uniformizer at the identity evaluated at P."""
    if P.is_zero():
        raise DomainError("t is undefined at the identity (it vanishes there)")
    if P.y.is_zero():
        raise DomainError("t is undefined at a 2-torsion point")
    return -P.x / P.y


# -- reduction -------------------------------------------------------------------


def check_good_reduction(curve, P):
    """Raise unless the short model has good reduction at the prime P (char >= 5)."""
    if P.p in (2, 3):
        raise BadReductionError(f"residue characteristic {P.p} is excluded for short Weierstrass models")
    for c in (curve.A, curve.B):
        if not c.is_zero() and element_valuation(c, P) < 0:
            raise BadReductionError(f"coefficient not integral at {P}")
    if element_valuation(curve.discriminant_factor(), P) != 0:
        raise BadReductionError(f"discriminant vanishes at {P}")


class ReducedCurve:
    """The reduction of a curve modulo a good prime, over the residue field."""

    def __init__(self, curve, P):
        check_good_reduction(curve, P)
        self.curve = curve
        self.prime = P
        self.q = P.norm()
        if self.q > MAX_RESIDUE_FIELD:
            raise ResourceBudgetExceeded(f"residue field of size {self.q} exceeds {MAX_RESIDUE_FIELD}")
        self.R = ResidueRing(P)
        self.A = self.R.from_element(curve.A)
        self.B = self.R.from_element(curve.B)
        self.zero_v = self.R.reduce([0] * curve.field.degree)

    def inv(self, u):
        return self.R.pow(u, self.q - 2)

    def reduce_point(self, pt):
        """Reduction of a K-point; None stands for the identity."""
        if pt.is_zero():
            return None
        if not pt.x.is_zero() and element_valuation(pt.x, self.prime) < 0:
            return None
        return (self.R.from_element(pt.x), self.R.from_element(pt.y))

    def add(self, a, b):
        R = self.R
        if a is None:
            return b
        if b is None:
            return a
        if a[0] == b[0]:
            if R.is_zero(R.add(a[1], b[1])):
                return None
            three = R.reduce([3] + [0] * (len(a[0]) - 1))
            two = R.reduce([2] + [0] * (len(a[0]) - 1))
            num_ = R.add(R.mul(three, R.mul(a[0], a[0])), self.A)
            lam = R.mul(num_, self.inv(R.mul(two, a[1])))
        else:
            lam = R.mul(R.sub(b[1], a[1]), self.inv(R.sub(b[0], a[0])))
        x3 = R.sub(R.sub(R.mul(lam, lam), a[0]), b[0])
        y3 = R.sub(R.mul(lam, R.sub(a[0], x3)), a[1])
        return (x3, y3)

    def point_count(self):
        """|E(F_q)| by exhaustive count."""
        R = self.R
        squares = {}
        elems = list(R.elements())
        for u in elems:
            s = tuple(R.mul(u, u))
            squares[s] = squares.get(s, 0) + 1
        count = 1
        for x in elems:
            rhs = R.add(R.add(R.mul(R.mul(x, x), x), R.mul(self.A, x)), self.B)
            count += squares.get(tuple(rhs), 0)
        return count

    def order(self, a):
        bound = self.q + 1 + 2 * math.isqrt(self.q) + 2
        acc = a
        m = 1
        while acc is not None:
            acc = self.add(acc, a)
            m += 1
            if m > bound:
                raise AssertionError("order exceeds the Hasse bound")
        return m


def reduction_order(pt, P):
    """Smallest m >= 1 with m*pt in the kernel of reduction at the good prime P."""
    red = ReducedCurve(pt.curve, P)
    a = red.reduce_point(pt)
    return 1 if a is None else red.order(a)


def residue_point_count(curve, P):
    return ReducedCurve(curve, P).point_count()


def t_valuation(pt, P):
    """v_P(t(pt)); +infinity at the identity."""
    if pt.is_zero():
        return math.inf
    return element_valuation(uniformizer(pt), P)


@dataclass
class KernelPoint:
    point: Point
    multiplier: int
    valuations: dict = dc_field(default_factory=dict)   # prime -> v(t(R))

    def to_json(self):
        return {
            "multiplier": str(self.multiplier),
            "valuations": [{"prime": P.to_json(), "v": v} for P, v in self.valuations.items()],
        }


def _support(modulus):
    return [(P, e) for P, e in factor(modulus)]


def kernel_point(pt, modulus, depth=None, max_digits=DEFAULT_MAX_DIGITS):
    """R = m*pt with v_P(t(R)) >= depth[P] (default: the exponent of P in modulus).

    m starts as the lcm of reduction orders and is multiplied by residue
    characteristics until every valuation target is met.
    """
    support = _support(modulus)
    if not support:
        return KernelPoint(pt, 1, {})
    if depth is None:
        depth = {P: e for P, e in support}
    m = 1
    for P, _ in support:
        m = lcm(m, reduction_order(pt, P))
    R = scalar_mul(m, pt, max_digits)
    while True:
        vals = {P: t_valuation(R, P) for P, _ in support}
        short = [P for P, _ in support if vals[P] < depth.get(P, 1)]
        if not short:
            return KernelPoint(R, m, vals)
        p = short[0].p
        m *= p
        R = scalar_mul(p, R, max_digits)


@dataclass(frozen=True)
class ApproximationTarget:
    k: int
    modulus: Ideal

    def __post_init__(self):
        if self.modulus.norm() == 0:
            raise DomainError("modulus must be nonzero")


@dataclass
class Approximation:
    s: object
    k: int
    modulus: Ideal
    kernel: KernelPoint
    rounds: int

    def certificate(self):
        return divides_numerator(self.modulus, self.s - self.k)

    def to_json(self):
        return {
            "s": self.s.to_json(),
            "k": self.k,
            "modulus": self.modulus.to_json(),
            "kernel_point": self.kernel.to_json(),
            "deepening_rounds": self.rounds,
            "certificate": {
                "statement": "modulus divides num(s - k)",
                "verified": self.certificate(),
            },
        }


def divides_numerator(I, a):
    """I | num(a), reading num(0) as the zero ideal (divisible by everything)."""
    if a.is_zero():
        return True
    return I.divides(num(a))


def _check_moduli(curve, modulus):
    for P, _ in _support(modulus):
        check_good_reduction(curve, P)


def approximate(target, curve, max_digits=DEFAULT_MAX_DIGITS, max_rounds=8):
    """s in S with s = k (mod modulus), certified by modulus | num(s - k)."""
    k = target.k
    if k == 0:
        raise DomainError("k = 0 is handled by numerator_witness")
    if curve.generator is None:
        raise DomainError("curve has no generator")
    I = target.modulus
    _check_moduli(curve, I)
    support = _support(I)
    depth = {P: 1 for P, _ in support}
    for rounds in range(max_rounds + 1):
        kp = kernel_point(curve.generator, I, depth, max_digits)
        R = kp.point
        s = uniformizer(scalar_mul(k, R, max_digits)) / uniformizer(R)
        # one order of agreement is guaranteed once R is in the kernel of reduction
        for P, _ in support:
            assert element_valuation(s - k, P) >= 1 if s != k else True
        if divides_numerator(I, s - k):
            return Approximation(s, k, I, kp, rounds)
        for P in depth:
            depth[P] += 1
    raise ResourceBudgetExceeded(f"no certified approximation within {max_rounds} deepening rounds")


def numerator_witness(beta, curve, max_digits=DEFAULT_MAX_DIGITS):
    """s = t(Q)/t(R) in S with (beta) | num(s); returns (s, R, Q).

    R is the generator and Q a multiple of it with
    v_P(t(Q)) >= v_P(t(R)) + v_P(beta) at every prime of (beta). Taking R
    outside the kernel of reduction keeps Q small: only the valuation gap
    matters.
    """
    if beta.is_zero():
        raise DomainError("beta must be nonzero")
    if curve.generator is None:
        raise DomainError("curve has no generator")
    B = principal(beta)
    _check_moduli(curve, B)
    R = curve.generator
    support = _support(B)
    if not support:
        Q = 2 * R
    else:
        depth = {P: max(1, t_valuation(R, P) + e) for P, e in support}
        Q = kernel_point(R, B, depth, max_digits).point
    s = uniformizer(Q) / uniformizer(R)
    if not B.divides(num(s)):
        raise AssertionError("numerator witness failed its exact check")
    return s, R, Q


# -- cosets of r*E(L) and division points --------------------------------------------


def _pmul(a, b, zero):
    if not a or not b:
        return []
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _padd(a, b, zero):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else zero) + (b[i] if i < len(b) else zero) for i in range(n)]


def _pscale(a, c):
    return [x * c for x in a]


def _ptrim(a):
    a = list(a)
    while a and a[-1].is_zero():
        a.pop()
    return a


class _YPoly:
    """c(x) * y^e with e in {0, 1}, where y^2 is replaced by x^3 + A x + B."""

    def __init__(self, c, e, curve):
        self.c, self.e, self.curve = _ptrim(c), e, curve

    def __mul__(self, other):
        K = self.curve.field
        c = _pmul(self.c, other.c, K.zero())
        e = self.e + other.e
        if e == 2:
            c = _pmul(c, [self.curve.B, self.curve.A, K.zero(), K.one()], K.zero())
            e = 0
        return _YPoly(c, e, self.curve)

    def __sub__(self, other):
        if self.e != other.e and self.c and other.c:
            raise AssertionError("parity mismatch in division polynomial recursion")
        e = self.e if self.c else other.e
        return _YPoly(_padd(self.c, _pscale(other.c, -1), self.curve.field.zero()), e, self.curve)

    def scale(self, c):
        return _YPoly(_pscale(self.c, c), self.e, self.curve)


def division_polynomials(curve, n):
    """psi_0 .. psi_n as _YPoly objects."""
    K = curve.field
    A, B = curve.A, curve.B
    z = K.zero()
    psi = [
        _YPoly([], 0, curve),
        _YPoly([K.one()], 0, curve),
        _YPoly([K(2)], 1, curve),
        _YPoly([-(A * A), 12 * B, 6 * A, z, K(3)], 0, curve),
        _YPoly([4 * (-8 * B * B - A ** 3), 4 * (-4 * A * B), 4 * (-5 * A * A),
                4 * (20 * B), 4 * (5 * A), z, K(4)], 1, curve),
    ]
    for m in range(len(psi), n + 1):
        h = m // 2
        if m % 2:
            # psi_{2h+1} = psi_{h+2} psi_h^3 - psi_{h-1} psi_{h+1}^3
            t1 = psi[h + 2] * psi[h] * psi[h] * psi[h]
            t2 = psi[h - 1] * psi[h + 1] * psi[h + 1] * psi[h + 1]
            psi.append(t1 - t2)
        else:
            # psi_{2h} = psi_h (psi_{h+2} psi_{h-1}^2 - psi_{h-2} psi_{h+1}^2) / (2y)
            inner = psi[h + 2] * psi[h - 1] * psi[h - 1] - psi[h - 2] * psi[h + 1] * psi[h + 1]
            full = psi[h] * inner
            # full has even y-parity (= c(x) y^2 after reduction); dividing by 2y
            # leaves c(x)/2 * y
            rhs = [curve.B, curve.A, z, K.one()]
            quo = _pdivexact(full.c, rhs)
            psi.append(_YPoly(_pscale(quo, K(1) / 2), 1, curve))
    return psi[: n + 1]


def _pdivexact(a, b):
    a = _ptrim(a)
    b = _ptrim(b)
    if not a:
        return []
    out = [b[0].field.zero()] * (len(a) - len(b) + 1)
    a = list(a)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        q = a[i + len(b) - 1] / lead
        out[i] = q
        for j, y in enumerate(b):
            a[i + j] = a[i + j] - q * y
    if any(not x.is_zero() for x in a[: len(b) - 1]):
        raise AssertionError("inexact polynomial division")
    return out


def multiplication_x_numerator(curve, r):
    """Polynomials (phi_r, psi_r^2) in x with x(rS) = phi_r(x)/psi_r(x)^2."""
    psi = division_polynomials(curve, r + 1)
    sq = psi[r] * psi[r]
    x = _YPoly([curve.field.zero(), curve.field.one()], 0, curve)
    phi = x * sq - psi[r + 1] * psi[r - 1]
    return phi.c, sq.c


def _field_roots(coeffs, K):
    """Roots in K of a polynomial over K: exact over Q, numeric-then-exact otherwise."""
    from .roots import roots_in_field
    if K.degree > 1:
        return roots_in_field(coeffs, K)
    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.coords[0].numerator, c.coords[0].denominator)
                       for c in reversed(coeffs)], x, domain=sympy.QQ)
    out = []
    for f, _ in poly.factor_list()[1]:
        if f.degree() == 1:
            a, b = f.all_coeffs()
            r = -b / a
            out.append(K(Fraction(int(r.p), int(r.q))))
    return sorted(out, key=lambda e: e.coords)


def division_points(Q, r):
    """Points S over Q's field with r*S = Q, each verified exactly.

    Over Q the search is complete; over larger fields candidates come from
    numerical root location and may be missed (the caller then reports
    inconclusive)."""
    E = Q.curve
    K = E.field
    if r == 1:
        return [Q]
    if Q.is_zero():
        xs_poly = _ptrim(division_polynomials(E, r)[r].c)
        cands = []
        for xr in _field_roots(xs_poly, K) if len(xs_poly) > 1 else []:
            cands.extend(_lift_x(E, xr))
        out = [E.zero()] + [S for S in cands if (r * S).is_zero()]
        return sorted(set(out), key=_point_key)
    phi, sq = multiplication_x_numerator(E, r)
    poly = _ptrim(_padd(phi, _pscale(sq, -Q.x), K.zero()))
    out = []
    for xr in _field_roots(poly, K):
        for S in _lift_x(E, xr):
            if r * S == Q:
                out.append(S)
    return sorted(set(out), key=_point_key)


def _point_key(P):
    if P.is_zero():
        return ((), ())
    return (P.x.coords, P.y.coords)


def _lift_x(E, x):
    rhs = E.rhs(x)
    if rhs.is_zero():
        return [Point(E, x, E.field.zero())]
    return [Point(E, x, y) for y in _field_roots([-rhs, E.field.zero(), E.field.one()], E.field)]


@dataclass
class CosetMembership:
    verdict: str                   # accepted | rejected | inconclusive
    rep_index: int = None
    division_witness: Point = None

    def to_json(self):
        out = {"verdict": self.verdict}
        if self.verdict == "accepted":
            out["rep_index"] = self.rep_index
            out["division_witness"] = self.division_witness.to_json()
        return out


class CosetSets:
    """E(K) described as the union of rep + r*E(L) over the supplied representatives."""

    def __init__(self, curve_L, coset_reps, r):
        if r < 1:
            raise DomainError("r must be positive")
        for rep in coset_reps:
            if rep.curve != curve_L:
                raise DomainError("coset representatives must lie on the curve over L")
        self.curve = curve_L
        self.reps = list(coset_reps)
        self.r = r

    def membership(self, Q):
        """Decide Q in the union by searching division points of Q - rep.

        Accepted only with an exact witness S (r*S = Q - rep). Rejection is
        reported when L = Q, where rational roots are found exactly;
        otherwise an empty search is inconclusive.
        """
        for i, rep in enumerate(self.reps):
            found = division_points(Q - rep, self.r)
            if found:
                return CosetMembership("accepted", i, found[0])
        if self.curve.field.degree == 1:
            return CosetMembership("rejected")
        return CosetMembership("inconclusive")

    def to_json(self):
        return {
            "curve": self.curve.to_json(),
            "r": self.r,
            "reps": [rep.to_json() for rep in self.reps],
        }


def coset_sets(curve_L, coset_reps, r):
    return CosetSets(curve_L, coset_reps, r)


__all__ = [
    "EllipticCurveData", "Point", "ApproximationTarget", "Approximation", "KernelPoint",
    "CosetSets", "CosetMembership", "point_add", "point_arith", "scalar_mul", "uniformizer",
    "reduction_order", "residue_point_count", "kernel_point", "approximate",
    "numerator_witness", "division_points", "division_polynomials", "coset_sets",
    "t_valuation", "divides_numerator", "check_good_reduction",
]
