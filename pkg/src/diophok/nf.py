"""Number fields, exact elements, and automorphisms.

A field is presented by a monic irreducible integer polynomial f and a
verified integral basis. Elements are stored in the power basis
1, t, ..., t^(d-1) with exact rational coordinates.
"""

from fractions import Fraction
from functools import cached_property

import sympy

from . import linalg
from .errors import (
    BasisError,
    FieldMismatchError,
    ReduciblePolynomialError,
    UnknownFieldError,
)


def frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def frac_str(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def poly_discriminant(coeffs):
    x = sympy.Symbol("x")
    return int(sympy.discriminant(sympy.Poly(list(reversed(coeffs)), x)))


def _squarefree_part(n):
    """Write n = f^2 * s with s squarefree; return (f, s)."""
    sign = -1 if n < 0 else 1
    f, s = 1, 1
    for p, e in sympy.factorint(abs(n)).items():
        f *= p ** (e // 2)
        if e % 2:
            s *= p
    return f, sign * s


def quadratic_basis(coeffs):
    """Integral basis of the quadratic field defined by t^2 + b t + c."""
    c, b, _ = coeffs
    f, d0 = _squarefree_part(b * b - 4 * c)
    # sqrt(d0) = (b + 2t) / f
    if d0 % 4 == 1:
        omega = [Fraction(f + b, 2 * f), Fraction(1, f)]
    else:
        omega = [Fraction(b, f), Fraction(2, f)]
    return [[Fraction(1), Fraction(0)], omega]


class NumberField:
    """A number field with a verified integral basis.

    Construction fails with a ``DomainError`` subclass rather than
    producing an unverified basis.
    """

    def __init__(self, poly, basis, name=None):
        poly = tuple(int(c) for c in poly)
        if len(poly) < 2 or poly[-1] != 1:
            raise ReduciblePolynomialError(f"defining polynomial must be monic of degree >= 1: {poly}")
        x = sympy.Symbol("x")
        if len(poly) > 2 and not sympy.Poly(list(reversed(poly)), x).is_irreducible:
            raise ReduciblePolynomialError(f"polynomial {list(poly)} is reducible over Q")
        self.poly = poly
        self.degree = d = len(poly) - 1
        self.name = name or "field[" + ",".join(map(str, poly)) + "]"
        self.basis = tuple(tuple(frac(v) for v in row) for row in basis)
        if len(self.basis) != d or any(len(r) != d for r in self.basis):
            raise BasisError(f"{self.name}: basis must be {d}x{d}")
        if linalg.det(self.basis) == 0:
            raise BasisError(f"{self.name}: basis is singular")
        self._basis_inv = linalg.inverse(self.basis)
        # x^k reduced mod f, for k < 2d - 1
        red = []
        for k in range(2 * d - 1):
            if k < d:
                v = [0] * d
                v[k] = 1
            else:
                prev = red[-1]
                top = prev[-1]
                v = [0] + prev[:-1]
                for i in range(d):
                    v[i] -= top * poly[i]
            red.append(v)
        self._xpow = red
        self._verify_basis()
        self.index = int(1 / abs(linalg.det(self.basis)))
        self.discriminant = int(linalg.det(
            [[self.trace_coords(self._power_mul(bi, bj)) for bj in self.basis] for bi in self.basis]))

    def __repr__(self):
        return f"NumberField({self.name}, {list(self.poly)})"

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.poly == other.poly and self.basis == other.basis

    def __hash__(self):
        return hash((self.poly, self.basis))

    # -- raw power-basis helpers -------------------------------------------

    def _power_mul(self, a, b):
        d = self.degree
        prod = poly_mul(a, b)
        out = [Fraction(0)] * d
        for k, c in enumerate(prod):
            if c:
                for i, r in enumerate(self._xpow[k]):
                    if r:
                        out[i] += c * r
        return out

    def to_basis_coords(self, power):
        return [sum(p * row[j] for p, row in zip(power, self._basis_inv)) for j in range(self.degree)]

    def from_basis_coords(self, coords):
        return [sum(frac(c) * row[j] for c, row in zip(coords, self.basis)) for j in range(self.degree)]

    def mult_matrix(self, power):
        """Matrix of multiplication by the element, acting on power-basis row vectors."""
        rows = []
        for k in range(self.degree):
            e = [0] * self.degree
            e[k] = 1
            rows.append(self._power_mul(power, e))
        return rows

    def trace_coords(self, power):
        m = self.mult_matrix(power)
        return sum(m[i][i] for i in range(self.degree))

    def _verify_basis(self):
        one = [1] + [0] * (self.degree - 1)
        if not all(c.denominator == 1 for c in self.to_basis_coords(one)):
            raise BasisError(f"{self.name}: basis lattice does not contain 1")
        if self.degree > 1:
            gen = [0, 1] + [0] * (self.degree - 2)
            if not all(c.denominator == 1 for c in self.to_basis_coords(gen)):
                raise BasisError(f"{self.name}: basis lattice does not contain the generator")
        consts = []
        for bi in self.basis:
            row = []
            for bj in self.basis:
                c = self.to_basis_coords(self._power_mul(bi, bj))
                if any(x.denominator != 1 for x in c):
                    raise BasisError(f"{self.name}: basis not closed under multiplication")
                row.append(tuple(int(x) for x in c))
            consts.append(tuple(row))
        self.structure = tuple(consts)

    # -- integral-coordinate arithmetic ------------------------------------

    def mul_int(self, u, v):
        """Product of two integral-basis coordinate vectors (integers)."""
        d = self.degree
        out = [0] * d
        st = self.structure
        for i, a in enumerate(u):
            if a:
                sti = st[i]
                for j, b in enumerate(v):
                    if b:
                        ab = a * b
                        for k, c in enumerate(sti[j]):
                            if c:
                                out[k] += ab * c
        return out

    @cached_property
    def one_coords(self):
        return tuple(int(c) for c in self.to_basis_coords([1] + [0] * (self.degree - 1)))

    # -- element constructors ----------------------------------------------

    def __call__(self, value):
        if isinstance(value, NFElement):
            if value.field != self:
                raise FieldMismatchError("element belongs to another field")
            return value
        if isinstance(value, (int, Fraction, str)):
            return NFElement(self, [frac(value)] + [0] * (self.degree - 1))
        return NFElement(self, value)

    def from_basis(self, coords):
        return NFElement(self, self.from_basis_coords(coords))

    @property
    def gen(self):
        if self.degree == 1:
            return self(-self.poly[0])
        return NFElement(self, [0, 1] + [0] * (self.degree - 2))

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def integral_basis(self):
        return [NFElement(self, row) for row in self.basis]

    # -- misc --------------------------------------------------------------

    def embeddings(self, precision=64):
        from .roots import embeddings
        return embeddings(self, precision)

    def automorphisms(self):
        return automorphisms(self)

    def is_galois(self):
        return len(self.automorphisms()) == self.degree

    def to_json(self):
        return {
            "name": self.name,
            "defining_poly": [str(c) for c in self.poly],
            "integral_basis": [[frac_str(x) for x in row] for row in self.basis],
            "discriminant": str(self.discriminant),
        }


class NFElement:
    """Immutable exact element of a number field (power-basis coordinates)."""

    __slots__ = ("field", "coords", "_hash")

    def __init__(self, field, coords):
        coords = tuple(frac(c) for c in coords)
        if len(coords) != field.degree:
            raise ValueError(f"expected {field.degree} coordinates, got {len(coords)}")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, key, value):
        raise AttributeError("NFElement is immutable")

    def _coerce(self, other):
        if isinstance(other, NFElement):
            if other.field != self.field:
                raise FieldMismatchError("arithmetic between different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return NFElement(self.field, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return NFElement(self.field, [-a for a in self.coords])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return NFElement(self.field, [a - b for a, b in zip(self.coords, other.coords)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NFElement(self.field, [a * other for a in self.coords])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return NFElement(self.field, self.field._power_mul(self.coords, other.coords))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("division by zero in number field")
        d = self.field.degree
        one = [1] + [0] * (d - 1)
        x = linalg.solve_rational(self.field.mult_matrix(self.coords), one)
        return NFElement(self.field, x)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in number field")
            return NFElement(self.field, [a / other for a in self.coords])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.coords[0] == other and not any(self.coords[1:])
        return isinstance(other, NFElement) and self.field == other.field and self.coords == other.coords

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.field.poly, self.coords))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coords):
            if c == 0:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            cs = frac_str(c)
            if mono:
                terms.append(mono if c == 1 else (f"-{mono}" if c == -1 else f"({cs})*{mono}"))
            else:
                terms.append(cs)
        return " + ".join(terms) if terms else "0"

    # -- predicates and invariants ------------------------------------------

    def is_zero(self):
        return not any(self.coords)

    def is_rational(self):
        return not any(self.coords[1:])

    def basis_coords(self):
        return self.field.to_basis_coords(self.coords)

    def int_coords(self):
        """Integral-basis coordinates as ints; raises if not integral."""
        c = self.basis_coords()
        if any(x.denominator != 1 for x in c):
            raise ValueError(f"{self!r} is not integral")
        return [int(x) for x in c]

    def is_integral(self):
        return all(x.denominator == 1 for x in self.basis_coords())

    def denominator(self):
        """Smallest positive integer m with m * self integral."""
        m = 1
        for x in self.basis_coords():
            m = linalg.lcm(m, x.denominator)
        return m

    def norm(self):
        return linalg.det(self.field.mult_matrix(self.coords))

    def trace(self):
        return self.field.trace_coords(self.coords)

    def norm_trace(self):
        return self.norm(), self.trace()

    def charpoly(self):
        """Characteristic polynomial (ascending rational coefficients)."""
        m = sympy.Matrix(self.field.mult_matrix(self.coords))
        x = sympy.Symbol("x")
        p = m.charpoly(x).all_coeffs()
        return [Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in reversed(p)]

    def minpoly(self):
        """Minimal polynomial over Q (ascending rational coefficients, monic)."""
        d = self.field.degree
        powers = [self.field.one().coords]
        cur = self.field.one()
        for k in range(1, d + 1):
            cur = cur * self
            sol = linalg.solve_rational(powers, cur.coords)
            if sol is not None:
                return [-c for c in sol] + [Fraction(1)]
            powers.append(cur.coords)
        raise AssertionError("unreachable: degree bound exceeded")

    def to_json(self):
        return [frac_str(c) for c in self.basis_coords()]


def elem_arith(a, b, op):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def norm_trace(a):
    return a.norm_trace()


def nf_new(poly, basis=None, name=None):
    """Build a number field, looking up or deriving the integral basis if omitted.

    Known bases: degree 1, quadratic fields (closed formula), polynomials
    with squarefree discriminant (power basis is maximal), and the field
    catalogue.
    """
    poly = [int(c) for c in poly]
    if basis is not None:
        return NumberField(poly, basis, name)
    d = len(poly) - 1
    if d == 1:
        return NumberField(poly, [[1]], name)
    if d == 2 and poly[-1] == 1:
        return NumberField(poly, quadratic_basis(poly), name)
    if d >= 2 and poly[-1] == 1:
        disc = poly_discriminant(poly)
        if disc and _squarefree_part(disc)[0] == 1:
            return NumberField(poly, linalg.identity(d), name)
    from .catalogue import find_field_by_poly
    entry = find_field_by_poly(poly)
    if entry is None:
        raise UnknownFieldError(
            f"no integral basis known for {poly}; supply one explicitly")
    return NumberField(poly, entry["integral_basis"], name or entry["name"])


class Automorphism:
    """Field automorphism determined by the image of the generator."""

    def __init__(self, field, image):
        image = field(image)
        self.field = field
        self.image = image
        if not evaluate_poly(field.poly, image).is_zero():
            raise ValueError("image of the generator is not a root of the defining polynomial")

    def __call__(self, a):
        # a = sum c_i t^i  ->  sum c_i image^i
        result = self.field.zero()
        p = self.field.one()
        for c in a.coords:
            if c:
                result = result + p * c
            p = p * self.image
        return result

    def compose(self, other):
        """self o other."""
        return Automorphism(self.field, self(other.image))

    def is_identity(self):
        return self.image == self.field.gen

    def order(self):
        k = 1
        cur = self
        while not cur.is_identity():
            cur = self.compose(cur)
            k += 1
            if k > self.field.degree:
                raise AssertionError("automorphism order exceeds field degree")
        return k

    def matrix(self):
        """Action on power-basis row vectors."""
        rows = []
        for k in range(self.field.degree):
            e = [0] * self.field.degree
            e[k] = 1
            rows.append(list(self(NFElement(self.field, e)).coords))
        return rows

    def __eq__(self, other):
        return isinstance(other, Automorphism) and self.field == other.field and self.image == other.image

    def __hash__(self):
        return hash(self.image)

    def __repr__(self):
        return f"Automorphism(t -> {self.image!r})"

    def to_json(self):
        return {"image_of_generator": [frac_str(c) for c in self.image.coords]}


def evaluate_poly(coeffs, x):
    """Horner evaluation of an ascending coefficient list at a field element."""
    acc = x.field.zero()
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


_AUT_CACHE = {}


def automorphisms(field):
    """All automorphisms of the field, identity first.

    The field is Galois over Q iff the list has ``degree`` entries.
    """
    key = (field.poly, field.basis)
    hit = _AUT_CACHE.get(key)
    if hit is not None:
        return list(hit)
    from .roots import roots_in_field
    roots = roots_in_field([field(c) for c in field.poly], field, permutation=True)
    auts = [Automorphism(field, r) for r in roots]
    auts.sort(key=lambda s: (not s.is_identity(), s.image.coords))
    _AUT_CACHE[key] = tuple(auts)
    return auts


class FieldExtension:
    """An embedding K -> L given by the image of K's generator in L."""

    def __init__(self, base, top, embedding=None):
        self.base = base
        self.top = top
        if embedding is None:
            if base.degree != 1:
                raise ValueError("an embedding element is required unless the base is Q")
            embedding = top(-base.poly[0])
        self.embedding = top(embedding)
        if not evaluate_poly(base.poly, self.embedding).is_zero():
            raise ValueError("embedding image is not a root of the base defining polynomial")
        if top.degree % base.degree:
            raise ValueError("base degree does not divide top degree")
        self.relative_degree = top.degree // base.degree
        pw = [top.one()]
        for _ in range(1, base.degree):
            pw.append(pw[-1] * self.embedding)
        self._images = pw

    def __repr__(self):
        return f"FieldExtension({self.base.name} -> {self.top.name})"

    def __eq__(self, other):
        return (isinstance(other, FieldExtension) and self.base == other.base
                and self.top == other.top and self.embedding == other.embedding)

    def __hash__(self):
        return hash((self.base, self.top, self.embedding))

    def embed(self, a):
        if isinstance(a, (int, Fraction)):
            return self.top(a)
        if a.field == self.top and self.base != self.top:
            raise FieldMismatchError("element already lies in the top field")
        if a.field != self.base:
            raise FieldMismatchError("element is not in the base field")
        out = self.top.zero()
        for c, img in zip(a.coords, self._images):
            if c:
                out = out + img * c
        return out

    def preimage(self, alpha):
        """The base-field element mapping to alpha, or None if alpha is not in K."""
        sol = linalg.solve_rational([img.coords for img in self._images], alpha.coords)
        if sol is None:
            return None
        return NFElement(self.base, sol)

    def to_json(self):
        return {"base": self.base.name, "top": self.top.name,
                "embedding": [frac_str(c) for c in self.embedding.coords],
                "relative_degree": self.relative_degree}


def trivial_extension(field):
    return FieldExtension(field, field, field.gen)
