"""Reduction of "Z is diophantine in O_F" to degree-2 steps over a totally real base.

For a Galois field F, each complex conjugation sigma (coming from a
nonreal embedding) has a fixed field of index 2. The intersection E of
these fixed fields is totally real, and O_E is the intersection of the
O_{F^sigma}. The planner computes all of this exactly and records the
resulting proof skeleton.
"""

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import lcm

import mpmath

from . import linalg
from .catalogue import find_field_by_poly
from .errors import DomainError, NotGaloisError
from .nf import NFElement, frac_str
from .roots import embed, embeddings, embeddings_of_poly, roots_in_field

L0_RADICANDS = (-1, 5, 7, 11, 13, 17, 19)


def _rref(rows):
    """Reduced row echelon form (nonzero rows only) over Q; a canonical subspace basis."""
    a = [[Fraction(x) for x in r] for r in rows]
    if not a:
        return []
    ncols = len(a[0])
    r = 0
    for c in range(ncols):
        piv = next((k for k in range(r, len(a)) if a[k][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for k in range(len(a)):
            if k != r and a[k][c] != 0:
                f = a[k][c]
                a[k] = [x - f * y for x, y in zip(a[k], a[r])]
        r += 1
        if r == len(a):
            break
    return [tuple(row) for row in a[:r]]


def _in_span(basis, v):
    if not basis:
        return all(x == 0 for x in v)
    return linalg.rank(list(basis) + [list(v)]) == len(basis)


def _integral_minpoly(elem):
    """Scale elem so that its minimal polynomial has integer coefficients."""
    mp = elem.minpoly()
    c = 1
    for a in mp:
        c = lcm(c, Fraction(a).denominator)
    if c != 1:
        elem = elem * c
        mp = elem.minpoly()
    return elem, [int(a) for a in mp]


def _primitive_element(F, basis):
    """A primitive element of the subfield spanned by ``basis`` (power coordinates).

    Tries small integer combinations of the basis, widening the coefficient
    box until the minimal polynomial has full degree.
    """
    dim = len(basis)
    if dim == 1:
        return _integral_minpoly(F.one())
    vecs = [NFElement(F, list(b)) for b in basis]
    bound = 1
    seen = set()
    while True:
        combos = sorted(itertools.product(range(-bound, bound + 1), repeat=dim),
                        key=lambda c: (sum(map(abs, c)), [-x for x in c]))
        for c in combos:
            if c in seen:
                continue
            seen.add(c)
            elem = F.zero()
            for ci, v in zip(c, vecs):
                if ci:
                    elem = elem + v * ci
            if len(elem.minpoly()) - 1 == dim:
                return _integral_minpoly(elem)
        bound += 1


class Subfield:
    """A subfield of F: a Q-subspace basis, a primitive element and its minimal polynomial."""

    def __init__(self, F, basis):
        self.F = F
        self.basis = tuple(_rref(basis))
        if not self.basis or not _in_span(self.basis, F.one().coords):
            raise DomainError("subspace does not contain 1")
        self.degree = len(self.basis)
        if F.degree % self.degree:
            raise DomainError("subspace dimension does not divide [F:Q]")
        # closure under multiplication first: the primitive element search
        # only terminates on an actual subfield
        for u, v in itertools.combinations_with_replacement(self.basis, 2):
            if not self.contains(NFElement(F, list(u)) * NFElement(F, list(v))):
                raise DomainError("subspace is not closed under multiplication")
        self.primitive, self.minpoly = _primitive_element(F, self.basis)

    @property
    def index(self):
        return self.F.degree // self.degree

    def contains(self, elem):
        return _in_span(self.basis, elem.coords)

    def is_subfield_of(self, other):
        return all(_in_span(other.basis, b) for b in self.basis)

    def embeddings(self):
        return embeddings_of_poly(self.minpoly)

    def catalogue_name(self):
        entry = find_field_by_poly(self.minpoly)
        return entry["name"] if entry else None

    def __eq__(self, other):
        return isinstance(other, Subfield) and self.F == other.F and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def __repr__(self):
        return f"Subfield(degree={self.degree}, minpoly={self.minpoly})"

    def to_json(self):
        return {
            "degree": self.degree,
            "minimal_polynomial": [str(c) for c in self.minpoly],
            "primitive_element": [frac_str(c) for c in self.primitive.coords],
            "catalogue_name": self.catalogue_name(),
            "basis": [[frac_str(c) for c in row] for row in self.basis],
        }


def _require_galois(F):
    if not F.is_galois():
        raise NotGaloisError(
            f"{F.name} is not Galois over Q; enlarge F to its Galois closure first "
            "(closure computation is out of scope)")


def complex_conjugations(F):
    """Automorphisms induced by complex conjugation at each nonreal embedding, deduplicated.

    For a nonreal embedding rho the automorphism rho^-1 o conj o rho is
    picked numerically (the image of the generator must land on the
    conjugate root) and then admitted only if it has exact order 2.
    """
    _require_galois(F)
    auts = F.automorphisms()
    emb = embeddings(F)
    roots = emb.roots
    out = []
    with mpmath.workprec(emb.precision + 32):
        sep = min((abs(a - b) for a, b in itertools.combinations(roots, 2)), default=mpmath.inf)
        for j, z in enumerate(roots):
            if z.imag == 0:
                continue
            target = mpmath.conj(z)
            dist = [(abs(embed(s.image, emb, j) - target), k) for k, s in enumerate(auts)]
            dist.sort()
            d0, k0 = dist[0]
            if not d0 < sep / 4 or (len(dist) > 1 and not dist[1][0] > sep / 4):
                raise AssertionError("could not separate automorphism images numerically")
            sigma = auts[k0]
            if sigma.is_identity() or sigma.order() != 2:
                raise AssertionError("numerically identified conjugation failed the exact order-2 check")
            if sigma not in out:
                out.append(sigma)
    return out


def fixed_field(sigma):
    """Fixed field of an order-2 automorphism: the kernel of sigma - id, re-presented."""
    F = sigma.field
    if sigma.is_identity() or sigma.order() != 2:
        raise DomainError("fixed_field expects an automorphism of order 2")
    m = sigma.matrix()
    diff = [[m[i][j] - (1 if i == j else 0) for j in range(F.degree)] for i in range(F.degree)]
    basis = linalg.kernel(diff)
    sub = Subfield(F, basis)
    if sub.index != 2:
        raise AssertionError("fixed field of an order-2 automorphism must have index 2")
    return sub


def _intersect_two(U, V):
    # a.U + b.V = 0  <=>  a.U = -b.V lies in both
    d = len(U[0])
    stacked = [list(u) for u in U] + [list(v) for v in V]
    rel = linalg.kernel(stacked) if stacked else []
    out = []
    for vec in rel:
        a = vec[:len(U)]
        out.append([sum(ai * u[c] for ai, u in zip(a, U)) for c in range(d)])
    return _rref(out)


def intersect_subfields(F, subfields):
    """Intersection of subfields of F; the empty intersection is F itself."""
    if not subfields:
        return Subfield(F, linalg.identity(F.degree))
    for s in subfields:
        if s.F != F:
            raise DomainError("subfields must all lie in the same field")
    basis = list(subfields[0].basis)
    for s in subfields[1:]:
        basis = _intersect_two(basis, s.basis)
    return Subfield(F, basis)


def is_totally_real(sub):
    return sub.embeddings().signature[1] == 0


def _common_fixed_dimension(F, sigmas):
    """dim of the common fixed space from the rank of the stacked (sigma - id) maps."""
    if not sigmas:
        return F.degree
    cols = []
    for s in sigmas:
        m = s.matrix()
        cols.append([[m[i][j] - (1 if i == j else 0) for j in range(F.degree)] for i in range(F.degree)])
    wide = [sum((c[i] for c in cols), []) for i in range(F.degree)]
    return F.degree - linalg.rank(wide)


def contains_sqrt(F, a):
    return bool(roots_in_field([F(-a), F(0), F(1)], F))


@dataclass
class ReductionPlan:
    field: object
    conjugations: list
    fixed_fields: list
    intersection: Subfield
    steps: list
    l0_variant: bool = False
    checks: dict = dc_field(default_factory=dict)

    @property
    def degree2_steps(self):
        return [s for s in self.steps if s["kind"] == "degree_2"]

    def verify(self):
        """Re-check every invariant exactly; raise AssertionError on failure."""
        F, E = self.field, self.intersection
        checks = {}
        checks["conjugations_order_2"] = all(
            not s.is_identity() and s.order() == 2 for s in self.conjugations)
        checks["fixed_fields_index_2"] = all(sub.index == 2 for sub in self.fixed_fields)
        checks["fixed_fields_pointwise_fixed"] = all(
            sigma(NFElement(F, list(b))) == NFElement(F, list(b))
            for sigma, sub in zip(self.conjugations, self.fixed_fields) for b in sub.basis)
        checks["intersection_contained"] = all(E.is_subfield_of(sub) for sub in self.fixed_fields)
        checks["intersection_dimension"] = E.degree == _common_fixed_dimension(F, self.conjugations)
        checks["index_consistent"] = E.degree * E.index == F.degree
        checks["base_totally_real"] = is_totally_real(E)
        checks["step_degrees"] = all(s["degree"] == 2 for s in self.degree2_steps)
        self.checks = checks
        bad = [k for k, ok in checks.items() if not ok]
        if bad:
            raise AssertionError(f"plan invariants failed: {bad}")
        return True

    def to_json(self):
        return {
            "field": self.field.name,
            "defining_poly": [str(c) for c in self.field.poly],
            "degree": self.field.degree,
            "conjugations": [s.to_json() for s in self.conjugations],
            "fixed_fields": [f.to_json() for f in self.fixed_fields],
            "intersection": self.intersection.to_json(),
            "steps": self.steps,
            "l0_variant": self.l0_variant,
            "checks": dict(sorted(self.checks.items())),
        }


def _build(F, l0):
    sigmas = complex_conjugations(F)
    fixed = [fixed_field(s) for s in sigmas]
    E = intersect_subfields(F, fixed)
    steps = [{
        "kind": "base",
        "statement": "Z is diophantine in O_E (E totally real)",
        "field": E.to_json(),
        "status": "ASSUMED",
    }]
    if sigmas:
        steps.append({
            "kind": "intersection",
            "statement": "O_E is the intersection of the O_{F^sigma}, hence diophantine in O_F",
            "count": len(fixed),
            "status": "VERIFIED",
        })
    sqrt_present = {a: contains_sqrt(F, a) for a in L0_RADICANDS} if l0 else None
    for i, (sigma, sub) in enumerate(zip(sigmas, fixed)):
        step = {
            "kind": "degree_2",
            "index": i,
            "statement": "O_{F^sigma} is diophantine in O_F",
            "sub": sub.to_json(),
            "degree": F.degree // sub.degree,
            "conjugation": sigma.to_json(),
            "inputs": {"rank_stability": "ASSUMED", "elliptic_curve_choice": "ASSUMED"},
        }
        if l0:
            missing = [a for a in L0_RADICANDS if not sqrt_present[a]]
            constraints = {
                "K_real": sub.embeddings().signature[0] > 0,
                "L_galois": True,
                "L_contains_L0": not missing,
            }
            step["constraints"] = constraints
            step["missing_square_roots"] = missing
            step["flagged"] = not all(constraints.values())
        steps.append(step)
    p = ReductionPlan(F, sigmas, fixed, E, steps, l0_variant=l0)
    p.verify()
    return p


def plan(F):
    return _build(F, False)


def plan_L0_variant(F):
    """Plan annotated with the side conditions K real, L Galois and L containing
    Q(sqrt -1, sqrt 5, ..., sqrt 19); steps violating them are flagged.
    The compositum itself is never constructed."""
    return _build(F, True)


__all__ = [
    "Subfield", "ReductionPlan", "complex_conjugations", "fixed_field",
    "intersect_subfields", "is_totally_real", "plan", "plan_L0_variant",
]
