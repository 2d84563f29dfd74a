"""Existential polynomial systems over rings of integers.

A PolySystem lives over an extension K inside L: variables take values in
O_L, coefficients come from O_K. A tuple of parameter values belongs to the
defined set when some assignment of the existential variables makes every
equation vanish. This module emits systems for the basic ideal predicates,
combines them, verifies witnesses exactly and expands systems into integer
coordinates.
"""

import itertools
import json
from dataclasses import dataclass, field as dc_field

from .errors import DomainError, FieldMismatchError, ResourceBudgetExceeded
from .ideals import (
    colon,
    decompose_one,
    express_in_generators,
    ideal_from_gens,
    nonzero_witness,
    num,
    principal,
    two_element_rep,
)
from .nf import NFElement


# -- polynomials ----------------------------------------------------------------


def _mono_mul(m1, m2):
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _monomial_value(m, values, cache):
    """Value of a sorted monomial, memoising every prefix."""
    if not m:
        return 1
    hit = cache.get(m)
    if hit is None:
        v, e = m[-1]
        p = cache.get((v, e, None))
        if p is None:
            p = values[v] ** e
            cache[(v, e, None)] = p
        hit = p if len(m) == 1 else _monomial_value(m[:-1], values, cache) * p
        cache[m] = hit
    return hit


class Poly:
    """Sparse multivariate polynomial with coefficients in a number field.

    A monomial is a sorted tuple of (variable, exponent) pairs.
    """

    __slots__ = ("field", "terms")

    def __init__(self, field, terms=None):
        self.field = field
        clean = {}
        for m, c in (terms or {}).items():
            if not c.is_zero():
                clean[m] = c
        self.terms = clean

    @classmethod
    def var(cls, field, name):
        return cls(field, {((name, 1),): field.one()})

    @classmethod
    def const(cls, field, c):
        c = field(c) if not isinstance(c, NFElement) else c
        return cls(field, {(): c})

    def _lift(self, other):
        if isinstance(other, Poly):
            if other.field != self.field:
                raise FieldMismatchError("polynomials over different fields")
            return other
        return Poly.const(self.field, other)

    def __add__(self, other):
        other = self._lift(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t[m] + c if m in t else c
        return Poly(self.field, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.field, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        t = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                c = c1 * c2
                t[m] = t[m] + c if m in t else c
        return Poly(self.field, t)

    __rmul__ = __mul__

    def __pow__(self, e):
        out = Poly.const(self.field, 1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, Poly) and self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def variables(self):
        return {v for m in self.terms for v, _ in m}

    def degree(self):
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def rename(self, mapping):
        t = {}
        for m, c in self.terms.items():
            nm = tuple(sorted((mapping.get(v, v), e) for v, e in m))
            t[nm] = t[nm] + c if nm in t else c
        return Poly(self.field, t)

    def substitute(self, values):
        """Replace some variables by constants of the coefficient field."""
        out = Poly(self.field)
        for m, c in self.terms.items():
            coeff = c
            rest = []
            for v, e in m:
                if v in values:
                    coeff = coeff * values[v] ** e
                else:
                    rest.append((v, e))
            out = out + Poly(self.field, {tuple(rest): coeff})
        return out

    def evaluate(self, values, embed=None, cache=None):
        """Exact value at an assignment (values may live in a larger field via ``embed``).

        ``cache`` maps monomials to their values and may be shared between
        polynomials evaluated at the same assignment.
        """
        if cache is None:
            cache = {}
        acc = None
        for m, c in self.terms.items():
            term = (embed(c) if embed else c) * _monomial_value(m, values, cache)
            acc = term if acc is None else acc + term
        if acc is None:
            sample = next(iter(values.values()), None)
            return sample.field.zero() if sample is not None else self.field.zero()
        return acc

    def sorted_terms(self, order):
        """Terms as (exponent vector, coefficient), graded lexicographic, largest first."""
        pos = {v: i for i, v in enumerate(order)}
        rows = []
        for m, c in self.terms.items():
            vec = [0] * len(order)
            for v, e in m:
                vec[pos[v]] = e
            rows.append((vec, c))
        rows.sort(key=lambda r: (sum(r[0]), r[0]), reverse=True)
        return rows

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda kv: (-sum(e for _, e in kv[0]), kv[0])):
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def polys(field, *names):
    return [Poly.var(field, n) for n in names]


# -- systems --------------------------------------------------------------------


class PolySystem:
    """Parameters, existential variables and equations, all O_L-valued."""

    def __init__(self, ext, parameters, existentials, equations, name=None):
        self.ext = ext
        self.parameters = tuple(parameters)
        self.existentials = tuple(existentials)
        self.equations = tuple(equations)
        self.name = name
        names = self.parameters + self.existentials
        if len(set(names)) != len(names):
            raise DomainError("variable declared twice")
        declared = set(names)
        for eq in self.equations:
            if eq.field != ext.base:
                raise FieldMismatchError("equation coefficients must lie in the base field")
            undeclared = eq.variables() - declared
            if undeclared:
                raise DomainError(f"undeclared variables {sorted(undeclared)}")
            for c in eq.terms.values():
                if not c.is_integral():
                    raise DomainError("coefficients must be integral")

    @property
    def variables(self):
        return self.parameters + self.existentials

    def __repr__(self):
        return (f"PolySystem({self.name or ''} params={list(self.parameters)} "
                f"exists={list(self.existentials)} eqs={len(self.equations)})")

    def rename(self, mapping, name=None):
        return PolySystem(
            self.ext,
            [mapping.get(v, v) for v in self.parameters],
            [mapping.get(v, v) for v in self.existentials],
            [e.rename(mapping) for e in self.equations],
            name or self.name,
        )

    def prefixed(self, prefix):
        """Rename existentials apart with ``prefix``."""
        return self.rename({v: prefix + v for v in self.existentials})

    def residuals(self, assignment):
        embed = None if self.ext.base == self.ext.top else self.ext.embed
        cache = {}
        return [eq.evaluate(assignment, embed, cache) for eq in self.equations]

    def to_json(self):
        order = list(self.variables)
        eqs = []
        for eq in self.equations:
            eqs.append([[vec, c.to_json()] for vec, c in eq.sorted_terms(order)])
        out = {
            "ring": self.ext.to_json(),
            "parameters": list(self.parameters),
            "existentials": list(self.existentials),
            "equations": eqs,
        }
        if self.name:
            out["name"] = self.name
        return out

    def dumps(self):
        return canonical_json(self.to_json())

    @classmethod
    def from_json(cls, data, catalogue=None):
        from .catalogue import get_extension
        ring = data["ring"]
        ext = get_extension(ring["base"], ring["top"], catalogue)
        K = ext.base
        order = list(data["parameters"]) + list(data["existentials"])
        eqs = []
        for rows in data["equations"]:
            t = {}
            for vec, coords in rows:
                m = tuple(sorted((order[i], e) for i, e in enumerate(vec) if e))
                t[m] = K.from_basis(coords)
            eqs.append(Poly(K, t))
        return cls(ext, data["parameters"], data["existentials"], eqs, data.get("name"))


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True) + "\n"


@dataclass
class Witness:
    assignment: dict = dc_field(default_factory=dict)

    def __getitem__(self, k):
        return self.assignment[k]

    def to_json(self):
        return {v: a.to_json() for v, a in sorted(self.assignment.items())}

    @classmethod
    def from_json(cls, data, field):
        return cls({v: field.from_basis(c) for v, c in data.items()})


def verify_witness(sys, w):
    """Exact check that the assignment makes every equation vanish."""
    a = w.assignment if isinstance(w, Witness) else w
    missing = [v for v in sys.variables if v not in a]
    if missing:
        raise DomainError(f"witness misses {missing}")
    L = sys.ext.top
    for v in sys.variables:
        x = a[v]
        if x.field != L:
            raise FieldMismatchError(f"value of {v} is not in the ring's field")
        if not x.is_integral():
            raise DomainError(f"value of {v} is not integral")
    return all(r.is_zero() for r in sys.residuals(a))


# -- nonzero witnesses and the basic predicates ---------------------------------------------


def emit_nonzero(ext, a="a", x="x", y="y"):
    """a != 0  <=>  (2x-1)(3x-1) = y a has a solution."""
    K = ext.base
    A, X, Y = polys(K, a, x, y)
    eq = (2 * X - 1) * (3 * X - 1) - Y * A
    return PolySystem(ext, [a], [x, y], [eq], "nonzero")


def _member(K, target, x, y, i1, i2):
    """target - x*i1 - y*i2 (target in the ideal (i1, i2))."""
    return target - Poly.var(K, x) * i1 - Poly.var(K, y) * i2


PREDICATE_PARAMS = {
    "ideal_membership": ("a", "i1", "i2"),
    "ideal_divides": ("i1", "i2", "j1", "j2"),
    "ideal_equal": ("i1", "i2", "j1", "j2"),
    "coprime": ("i1", "i2", "j1", "j2"),
    "principal_ratio": ("a", "b", "i1", "i2", "j1", "j2"),
    "is_num": ("a", "b", "i1", "i2"),
    "congruence": ("a", "b", "i1", "i2"),
}
PREDICATE_KINDS = tuple(PREDICATE_PARAMS)


def emit_predicate(kind, ext):
    """The system for one predicate kind; ideals enter as generator pairs."""
    if kind not in PREDICATE_PARAMS:
        raise DomainError(f"unknown predicate kind {kind!r}")
    K = ext.base
    params = PREDICATE_PARAMS[kind]
    V = {p: Poly.var(K, p) for p in params}
    if kind == "ideal_membership":
        eqs = [_member(K, V["a"], "x", "y", V["i1"], V["i2"])]
        return PolySystem(ext, params, ["x", "y"], eqs, kind)
    if kind == "ideal_divides":
        # (i1, i2) | (j1, j2)  <=>  j1, j2 in (i1, i2)
        eqs = [_member(K, V["j1"], "x1", "y1", V["i1"], V["i2"]),
               _member(K, V["j2"], "x2", "y2", V["i1"], V["i2"])]
        return PolySystem(ext, params, ["x1", "y1", "x2", "y2"], eqs, kind)
    if kind == "ideal_equal":
        fwd = emit_predicate("ideal_divides", ext)
        back = fwd.rename({"i1": "j1", "i2": "j2", "j1": "i1", "j2": "i2"})
        out = combine([fwd, back], "conjunction")
        return PolySystem(ext, params, out.existentials, out.equations, kind)
    if kind == "coprime":
        eq = (Poly.var(K, "x1") * V["i1"] + Poly.var(K, "y1") * V["i2"]
              + Poly.var(K, "x2") * V["j1"] + Poly.var(K, "y2") * V["j2"] - 1)
        return PolySystem(ext, params, ["x1", "y1", "x2", "y2"], [eq], kind)
    if kind == "principal_ratio":
        # (a/b) = I/J  <=>  aJ = bI, with b != 0
        a, b = V["a"], V["b"]
        eqs = [
            _member(K, a * V["j1"], "x1", "y1", b * V["i1"], b * V["i2"]),
            _member(K, a * V["j2"], "x2", "y2", b * V["i1"], b * V["i2"]),
            _member(K, b * V["i1"], "x3", "y3", a * V["j1"], a * V["j2"]),
            _member(K, b * V["i2"], "x4", "y4", a * V["j1"], a * V["j2"]),
        ]
        ex = ["x1", "y1", "x2", "y2", "x3", "y3", "x4", "y4"]
        guard = emit_nonzero(ext, "b", "u", "v")
        eqs += list(guard.equations)
        return PolySystem(ext, params, ex + ["u", "v"], eqs, kind)
    if kind == "is_num":
        # I = num(a/b)  <=>  exists J: (a/b) = I/J, I + J = (1); a != 0
        ratio = emit_predicate("principal_ratio", ext).prefixed("r_")
        cop = emit_predicate("coprime", ext).prefixed("c_")
        guard = emit_nonzero(ext, "a", "ua", "va")
        out = combine([ratio, cop, guard], "conjunction", prefixes=("", "", ""))
        ex = ["j1", "j2"] + [v for v in out.existentials if v not in ("j1", "j2")]
        eqs = list(out.equations)
        return PolySystem(ext, params, ex, eqs, kind)
    if kind == "congruence":
        eqs = [_member(K, V["a"] - V["b"], "x", "y", V["i1"], V["i2"])]
        return PolySystem(ext, params, ["x", "y"], eqs, kind)
    raise AssertionError(kind)


# -- native predicates and witness construction ------------------------------------------------


def _ideal(g1, g2):
    if g1.is_zero() and g2.is_zero():
        return None
    return ideal_from_gens([g1, g2])


def native_predicate(kind, values):
    """The predicate computed directly with ideal arithmetic."""
    v = values
    if kind == "ideal_membership":
        I = _ideal(v["i1"], v["i2"])
        return v["a"].is_zero() if I is None else I.contains(v["a"])
    I = _ideal(v["i1"], v["i2"]) if "i1" in v else None
    J = _ideal(v["j1"], v["j2"]) if "j1" in v else None
    if kind == "ideal_divides":
        if I is None:
            return J is None
        return J is None or I.divides(J)
    if kind == "ideal_equal":
        return I == J
    if kind == "coprime":
        if I is None or J is None:
            return (I or J) is not None and (I or J).is_unit()
        return I.coprime(J)
    if kind == "principal_ratio":
        if v["b"].is_zero():
            return False
        aJ = None if (J is None or v["a"].is_zero()) else principal(v["a"]) * J
        bI = None if I is None else principal(v["b"]) * I
        return aJ == bI
    if kind == "is_num":
        if v["a"].is_zero() or v["b"].is_zero() or I is None:
            return False
        return num(v["a"] / v["b"]) == I
    if kind == "congruence":
        d = v["a"] - v["b"]
        return d.is_zero() if I is None else I.contains(d)
    raise DomainError(f"unknown predicate kind {kind!r}")


def _express(target, gens, names):
    """Assignment of ``names`` expressing target in terms of gens over O_L, or None."""
    if all(g.is_zero() for g in gens):
        if not target.is_zero():
            return None
        return {n: target.field.zero() for n in names}
    coeffs = express_in_generators(target, gens)
    if coeffs is None:
        return None
    return dict(zip(names, coeffs))


def build_witness(kind, values):
    """Construct existential values by exact lattice solving, or None.

    This does not consult native_predicate: membership questions are
    settled by solving for the coefficients directly.
    """
    v = values
    L = next(iter(v.values())).field
    z = L.zero()
    if kind == "ideal_membership":
        w = _express(v["a"], [v["i1"], v["i2"]], ["x", "y"])
    elif kind == "ideal_divides":
        w1 = _express(v["j1"], [v["i1"], v["i2"]], ["x1", "y1"])
        w2 = _express(v["j2"], [v["i1"], v["i2"]], ["x2", "y2"])
        w = None if w1 is None or w2 is None else {**w1, **w2}
    elif kind == "ideal_equal":
        fw = build_witness("ideal_divides", v)
        bw = build_witness("ideal_divides", {"i1": v["j1"], "i2": v["j2"], "j1": v["i1"], "j2": v["i2"]})
        if fw is None or bw is None:
            return None
        w = {"c0_" + k: x for k, x in fw.assignment.items() if k not in PREDICATE_PARAMS[kind]}
        w.update({"c1_" + k: x for k, x in bw.assignment.items() if k not in PREDICATE_PARAMS[kind]})
    elif kind == "coprime":
        I, J = _ideal(v["i1"], v["i2"]), _ideal(v["j1"], v["j2"])
        if I is None or J is None:
            return None
        try:
            i, j = decompose_one(I, J)
        except DomainError:
            return None
        wi = _express(i, [v["i1"], v["i2"]], ["x1", "y1"])
        wj = _express(j, [v["j1"], v["j2"]], ["x2", "y2"])
        w = {**wi, **wj}
    elif kind == "principal_ratio":
        a, b = v["a"], v["b"]
        if b.is_zero():
            return None
        bI = [b * v["i1"], b * v["i2"]]
        aJ = [a * v["j1"], a * v["j2"]]
        parts = [
            _express(aJ[0], bI, ["x1", "y1"]),
            _express(aJ[1], bI, ["x2", "y2"]),
            _express(bI[0], aJ, ["x3", "y3"]),
            _express(bI[1], aJ, ["x4", "y4"]),
        ]
        if any(p is None for p in parts):
            return None
        w = {}
        for p in parts:
            w.update(p)
        u, vv = nonzero_witness(b)
        w.update({"u": u, "v": vv})
    elif kind == "is_num":
        a, b = v["a"], v["b"]
        I = _ideal(v["i1"], v["i2"])
        if a.is_zero() or b.is_zero() or I is None:
            return None
        # J is forced by aJ = bI: J = bI : (a), which must reproduce bI exactly
        bI = principal(b) * I
        J = colon(bI, principal(a))
        if principal(a) * J != bI:
            return None
        j1, j2 = two_element_rep(J)
        full = dict(v, j1=j1, j2=j2)
        ratio = build_witness("principal_ratio", {k: full[k] for k in PREDICATE_PARAMS["principal_ratio"]})
        cop = build_witness("coprime", {k: full[k] for k in PREDICATE_PARAMS["coprime"]})
        if ratio is None or cop is None:
            return None
        ua, va = nonzero_witness(a)
        w = {"j1": j1, "j2": j2, "ua": ua, "va": va}
        w.update({"r_" + k: x for k, x in ratio.assignment.items() if k not in PREDICATE_PARAMS["principal_ratio"]})
        w.update({"c_" + k: x for k, x in cop.assignment.items() if k not in PREDICATE_PARAMS["coprime"]})
    elif kind == "congruence":
        w = _express(v["a"] - v["b"], [v["i1"], v["i2"]], ["x", "y"])
    else:
        raise DomainError(f"unknown predicate kind {kind!r}")
    if w is None:
        return None
    out = dict(v)
    out.update({k: (x if x is not None else z) for k, x in w.items()})
    return Witness(out)


def nonzero_system_witness(a, names=("a", "x", "y")):
    x, y = nonzero_witness(a)
    return Witness(dict(zip(names, (a, x, y))))


# -- combinators ----------------------------------------------------------------------------


def combine(systems, mode, weights=None, prefixes=None, result="a"):
    """Conjunction, union or (weighted) sum of systems over one ring.

    Existentials of system i are renamed apart with prefix ``c{i}_`` (or
    ``prefixes[i]``). Parameters with equal names are shared.
    union: equation lists are multiplied pairwise, which in a domain
    vanishes exactly when one whole list vanishes.
    sum: the result parameter equals the weighted sum of each system's
    first parameter; those become existentials ``s{i}``.
    """
    if not systems:
        raise DomainError("nothing to combine")
    ext = systems[0].ext
    if any(s.ext != ext for s in systems):
        raise FieldMismatchError("systems over different rings")
    if prefixes is None:
        prefixes = [f"c{i}_" for i in range(len(systems))]
    renamed = [s.prefixed(p) for s, p in zip(systems, prefixes)]
    params, exists = [], []
    for s in renamed:
        params += [p for p in s.parameters if p not in params]
        exists += list(s.existentials)
    if mode == "conjunction":
        eqs = [e for s in renamed for e in s.equations]
        return PolySystem(ext, params, exists, eqs, "conjunction")
    if mode == "union":
        lists = [list(s.equations) for s in renamed]
        eqs = []
        for combo in itertools.product(*lists):
            prod = combo[0]
            for e in combo[1:]:
                prod = prod * e
            eqs.append(prod)
        return PolySystem(ext, params, exists, eqs, "union")
    if mode == "sum":
        # the first parameter of each system is summed; others stay parameters
        K = ext.base
        if weights is None:
            weights = [K.one()] * len(renamed)
        parts = []
        total = Poly.var(K, result)
        for i, s in enumerate(renamed):
            if not s.parameters:
                raise DomainError("sum needs a parameter in every system")
            comp = f"s{i}"
            parts.append(s.rename({s.parameters[0]: comp}))
            total = total - Poly.var(K, comp) * weights[i]
        params, exists = [result], []
        for i, s in enumerate(parts):
            params += [p for p in s.parameters[1:] if p not in params]
            exists += [f"s{i}"] + list(s.existentials)
        eqs = [total] + [e for s in parts for e in s.equations]
        return PolySystem(ext, params, exists, eqs, "sum")
    raise DomainError(f"unknown combination mode {mode!r}")


def box_values(field, radius):
    """Integral elements with integral-basis coordinates in [-radius, radius]."""
    rng = range(-radius, radius + 1)
    for c in itertools.product(rng, repeat=field.degree):
        yield field.from_basis(c)


def box_search(sys, fixed, radius, limit=10 ** 6):
    """First witness extending ``fixed`` with free variables in a coordinate box.

    Variables that no longer occur after substitution are set to 0. Fails
    with ResourceBudgetExceeded past ``limit`` candidate assignments.
    """
    L = sys.ext.top
    embed = None if sys.ext.base == sys.ext.top else sys.ext.embed
    free = [v for v in sys.variables if v not in fixed]
    live = [v for v in free if any(v in e.variables() for e in sys.equations)]
    size = (2 * radius + 1) ** (L.degree * len(live))
    if size > limit:
        raise ResourceBudgetExceeded(f"box of {size} assignments exceeds {limit}")
    pool = list(box_values(L, radius))
    base = dict(fixed)
    base.update({v: L.zero() for v in free if v not in live})
    for choice in itertools.product(pool, repeat=len(live)):
        a = dict(base)
        a.update(zip(live, choice))
        if all(eq.evaluate(a, embed).is_zero() for eq in sys.equations):
            return Witness(a)
    return None


# -- scalarization ------------------------------------------------------------------------------


_BITS = 16
_MASK = (1 << _BITS) - 1


def _unpack(mono, n):
    """Exponent vector of a monomial packed _BITS bits per variable."""
    out = [0] * n
    i = 0
    while mono:
        out[i] = mono & _MASK
        mono >>= _BITS
        i += 1
    return out


def _sparse(mono):
    out = []
    i = 0
    while mono:
        e = mono & _MASK
        if e:
            out.append((i, e))
        mono >>= _BITS
        i += 1
    return out


class ScalarizedSystem:
    """A system with Z-valued variables: O_L variable v becomes v#0, ..., v#(d-1).

    Each equation is a dict from packed monomials (one exponent per
    _BITS-bit field, in variable order) to integer coefficients.
    """

    def __init__(self, source, variables, equations):
        self.source = source
        self.variables = tuple(variables)
        self.equations = equations

    @property
    def degree(self):
        return self.source.ext.top.degree

    def map_witness(self, w):
        a = w.assignment if isinstance(w, Witness) else w
        out = {}
        for v in self.source.variables:
            for i, c in enumerate(a[v].int_coords()):
                out[f"{v}#{i}"] = c
        return out

    def unmap_witness(self, ints):
        L = self.source.ext.top
        return Witness({v: L.from_basis([ints[f"{v}#{i}"] for i in range(L.degree)])
                        for v in self.source.variables})

    def occurring(self):
        seen = set()
        for eq in self.equations:
            for mono in eq:
                seen.update(i for i, _ in _sparse(mono))
        return [self.variables[i] for i in sorted(seen)]

    def evaluate(self, ints):
        vals = [ints[v] for v in self.variables]
        powers = {}
        out = []
        for eq in self.equations:
            acc = 0
            for mono, c in eq.items():
                t = c
                for i, e in _sparse(mono):
                    if (i, e) not in powers:
                        powers[i, e] = vals[i] ** e
                    t *= powers[i, e]
                    if not t:
                        break
                acc += t
            out.append(acc)
        return out

    def verify(self, ints):
        return all(r == 0 for r in self.evaluate(ints))

    def to_json(self):
        n = len(self.variables)
        eqs = []
        for eq in self.equations:
            rows = [(_unpack(m, n), c) for m, c in eq.items()]
            rows.sort(key=lambda r: (sum(r[0]), r[0]), reverse=True)
            eqs.append([[m, str(c)] for m, c in rows])
        return {"variables": list(self.variables), "equations": eqs,
                "source_ring": self.source.ext.to_json()}


def scalarize(sys, max_terms=2 * 10 ** 6):
    """Expand through the integral basis of O_L and its structure constants."""
    L = sys.ext.top
    d = L.degree
    embed = sys.ext.embed if sys.ext.base != sys.ext.top else (lambda c: c)
    names = [f"{v}#{i}" for v in sys.variables for i in range(d)]
    pos = {n: k for k, n in enumerate(names)}
    struct = [[[(k, c) for k, c in enumerate(L.structure[i][j]) if c] for j in range(d)] for i in range(d)]
    budget = [0]

    def vmul(p, q):
        # p, q: lists (length d) of {packed mono: int}
        out = [dict() for _ in range(d)]
        for i in range(d):
            if not p[i]:
                continue
            for j in range(d):
                if not q[j] or not struct[i][j]:
                    continue
                prod = {}
                for m1, c1 in p[i].items():
                    for m2, c2 in q[j].items():
                        m = m1 + m2
                        prod[m] = prod.get(m, 0) + c1 * c2
                for k, sc in struct[i][j]:
                    o = out[k]
                    for m, c in prod.items():
                        o[m] = o.get(m, 0) + c * sc
        for k in range(d):
            out[k] = {m: c for m, c in out[k].items() if c}
        budget[0] += sum(len(o) for o in out)
        if budget[0] > 50 * max_terms:
            raise ResourceBudgetExceeded("scalarized expansion exceeds the term budget")
        return out

    var_vec = {}
    for v in sys.variables:
        var_vec[v] = [{1 << (_BITS * pos[f"{v}#{i}"]): 1} for i in range(d)]

    power_cache = {}

    def vpow(v, e):
        key = (v, e)
        if key not in power_cache:
            if e >= 1 << _BITS:
                raise ResourceBudgetExceeded("exponent too large to pack")
            power_cache[key] = var_vec[v] if e == 1 else vmul(vpow(v, e - 1), var_vec[v])
        return power_cache[key]

    equations = []
    for eq in sys.equations:
        acc = [dict() for _ in range(d)]
        for m, c in eq.terms.items():
            coords = embed(c).int_coords()
            term = [({0: x} if x else {}) for x in coords]
            for v, e in m:
                term = vmul(term, vpow(v, e))
            for k in range(d):
                for mono, x in term[k].items():
                    acc[k][mono] = acc[k].get(mono, 0) + x
        for k in range(d):
            equations.append({m: c for m, c in acc[k].items() if c})
        if sum(len(e) for e in equations) > max_terms:
            raise ResourceBudgetExceeded(f"scalarized system exceeds {max_terms} terms")
    return ScalarizedSystem(sys, names, equations)


def scalar_box_search(ss, fixed, radius, chunk=2 * 10 ** 6):
    """Exhaustive search of the free integer coordinates in [-radius, radius].

    Fixed values are substituted first; coordinates that then occur in no
    equation are set to 0 (every value of theirs behaves the same). The
    rest is searched with numpy, sharded over the leading coordinates so
    that each block has at most ``chunk`` points. Returns the first
    solution as a dict or None.
    """
    import numpy as np

    vals = dict(fixed)
    index = {n: i for i, n in enumerate(ss.variables)}
    eqs = _specialize(ss, {index[n]: v for n, v in vals.items()})
    if any(not eq for eq in eqs):
        eqs = [eq for eq in eqs if eq]
    if any(list(eq) == [()] for eq in eqs):
        return None         # a nonzero constant equation
    occurring = sorted({i for eq in eqs for mono in eq for i, _ in mono})
    live = [ss.variables[i] for i in occurring]
    for n in ss.variables:
        if n not in vals and n not in live:
            vals[n] = 0
    if not live:
        return dict(vals)
    side = 2 * radius + 1
    split = 0
    while side ** (len(live) - split) > chunk and split < len(live) - 1:
        split += 1
    outer, inner = occurring[:split], occurring[split:]
    for head in itertools.product(range(-radius, radius + 1), repeat=split):
        sub_eqs = _specialize_eqs(eqs, dict(zip(outer, head)))
        if any(list(eq) == [()] for eq in sub_eqs if eq):
            continue
        hit = _block_search([eq for eq in sub_eqs if eq], inner, radius, np)
        if hit is not None:
            out = dict(vals)
            out.update({ss.variables[i]: v for i, v in zip(outer, head)})
            out.update({ss.variables[i]: v for i, v in hit.items()})
            return out
    return None


def _specialize_eqs(eqs, known):
    out = []
    for eq in eqs:
        acc = {}
        for mono, c in eq.items():
            rest = []
            for i, e in mono:
                if i in known:
                    c *= known[i] ** e
                    if not c:
                        break
                else:
                    rest.append((i, e))
            if c:
                key = tuple(rest)
                acc[key] = acc.get(key, 0) + c
        out.append({m: c for m, c in acc.items() if c})
    return out


def _specialize(ss, known):
    """Equations as {((var index, exponent), ...): coeff} with ``known`` substituted."""
    return _specialize_eqs([{tuple(_sparse(m)): c for m, c in eq.items()} for eq in ss.equations], known)


def _block_search(eqs, live, radius, np):
    """Vectorised search of one block; ``live`` are variable indices."""
    if not live:
        return {}
    side = np.arange(-radius, radius + 1, dtype=np.int64)
    grids = np.meshgrid(*([side] * len(live)), indexing="ij")
    flat = {i: g.ravel() for i, g in zip(live, grids)}
    ok = np.ones(flat[live[0]].shape, dtype=bool)
    for eq in eqs:
        dtype = object if _may_overflow(eq, radius) else np.int64
        acc = np.zeros(ok.shape, dtype=dtype)
        for mono, c in eq.items():
            t = c
            for i, e in mono:
                x = flat[i] if dtype is not object else flat[i].astype(object)
                t = t * (x ** e)
            acc = acc + t
        ok &= (acc == 0)
        if not ok.any():
            return None
    idx = int(np.argmax(ok))
    return {i: int(flat[i][idx]) for i in live}


def _may_overflow(eq, radius):
    bound = 0
    for mono, c in eq.items():
        bound += abs(c) * (radius + 1) ** sum(e for _, e in mono)
    return bound >= 2 ** 62


__all__ = [
    "Poly", "PolySystem", "Witness", "ScalarizedSystem", "PREDICATE_KINDS", "PREDICATE_PARAMS",
    "emit_nonzero", "emit_predicate", "native_predicate", "build_witness", "combine",
    "verify_witness", "scalarize", "box_search", "scalar_box_search", "canonical_json",
    "nonzero_system_witness",
]
