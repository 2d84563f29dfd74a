"""The sets U and O_K = sum U b_i as checkable definitions, and coset membership.

U is the union of {1, ..., n} with U', the alpha in O_L for which some
s, k in S satisfy: I = num(s), (alpha-1)...(alpha-n) divides I, and
alpha = k (mod I). Membership in S is certified by the curve oracle
(explicit points); everything else is a polynomial system checked exactly.
"""

from dataclasses import dataclass, field as dc_field
from math import lcm

from .curves import (
    ApproximationTarget,
    approximate,
    check_good_reduction,
    coset_sets as _coset_sets,
    numerator_witness,
    uniformizer,
)
from .dioph import (
    Poly,
    PolySystem,
    Witness,
    build_witness,
    combine,
    emit_nonzero,
    emit_predicate,
    verify_witness,
)
from .errors import DiophokError, DomainError, ResourceBudgetExceeded
from .ideals import (
    decompose_one,
    express_in_generators,
    factor,
    nonzero_witness,
    num,
    principal,
    two_element_rep,
)

ORACLE_PARAMS = ("sa", "sb", "ka", "kb")


@dataclass
class Verdict:
    verdict: str                  # accepted | rejected | inconclusive
    reason: str = ""
    witness: Witness = None
    oracle: dict = dc_field(default_factory=dict)

    def to_json(self):
        out = {"verdict": self.verdict, "reason": self.reason}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.oracle:
            out["oracle"] = self.oracle
        return out


def _product(alpha_poly_or_elem, n):
    prod = None
    for j in range(1, n + 1):
        f = alpha_poly_or_elem - j
        prod = f if prod is None else prod * f
    return prod


def _u_branch_system(ext, n):
    K = ext.base
    V = {v: Poly.var(K, v) for v in ("alpha", "i1", "i2", "z1", "z2", "x", "y", "u", "v", "w", "kb", "ka")}
    big = _product(V["alpha"], n)
    isnum = emit_predicate("is_num", ext).rename({"a": "sa", "b": "sb"}).prefixed("n_")
    guard = emit_nonzero(ext, "kb", "g", "h")
    eqs = [
        V["i1"] - V["z1"] * big,
        V["i2"] - V["z2"] * big,
        # k = ka/kb with kb a unit at I: alpha = k (mod I) iff kb*alpha - ka in I
        V["kb"] * V["alpha"] - V["ka"] - V["x"] * V["i1"] - V["y"] * V["i2"],
        V["u"] * V["kb"] + V["v"] * V["i1"] + V["w"] * V["i2"] - 1,
    ]
    eqs += list(isnum.equations) + list(guard.equations)
    ex = ["i1", "i2", "z1", "z2", "x", "y", "u", "v", "w", "g", "h"]
    ex += [e for e in isnum.existentials if e not in ("i1", "i2")]
    return PolySystem(ext, ("alpha",) + ORACLE_PARAMS, ex, eqs, "U'")


def emit_U(ext, params, curve, toy=False):
    """The definition of U over O_L for forcing bound ``params.n``.

    ``toy`` admits bounds that fail the forcing inequalities (for
    exercising the pipeline at sizes where the oracle can finish).
    """
    if params.ell != ext.top.degree:
        raise DomainError("params.ell must be [L:Q]")
    if not toy and not params.is_valid():
        raise DomainError(f"n = {params.n} does not satisfy the forcing inequalities")
    if curve.field != ext.base:
        raise DomainError("the curve must be defined over K")
    return UDefinition(ext, params, curve, toy)


class UDefinition:
    def __init__(self, ext, params, curve, toy=False):
        self.ext = ext
        self.params = params
        self.curve = curve
        self.toy = toy
        K = ext.base
        branch = _u_branch_system(ext, params.n)
        finite = PolySystem(ext, ["alpha"], [], [_product(Poly.var(K, "alpha"), params.n)], "1..n")
        sys = combine([branch, finite], "union", prefixes=("", ""))
        name = "U" if not toy else f"U (toy n = {params.n}, not a forcing bound)"
        self.system = PolySystem(ext, sys.parameters, sys.existentials, sys.equations, name)

    def _blank(self):
        z = self.ext.top.zero()
        return {v: z for v in self.system.variables}

    def membership(self, alpha, max_digits=10 ** 5, pair_bound=8):
        L = self.ext.top
        if alpha.field != L or not alpha.is_integral():
            raise DomainError("alpha must lie in O_L")
        n = self.params.n
        w = self._blank()
        w["alpha"] = alpha
        if _product(alpha, n).is_zero():
            w = Witness(w)
            assert verify_witness(self.system, w)
            return Verdict("accepted", f"alpha in {{1..{n}}}", w)
        a = self.ext.preimage(alpha)
        if a is None:
            return Verdict("rejected", "alpha is not in K; the forcing lemma keeps it out of U'")
        try:
            return self._oracle_branch(alpha, a, w, max_digits, pair_bound)
        except (ResourceBudgetExceeded, DomainError) as exc:
            return Verdict("inconclusive", f"oracle could not certify: {exc}")

    def _oracle_branch(self, alpha, a, w, max_digits, pair_bound):
        ext, E, n = self.ext, self.curve, self.params.n
        beta = _product(a, n)
        bad = [P for P, _ in factor(principal(beta))]
        for P in bad:
            check_good_reduction(E, P)
        s, Q, R = _find_s(E, beta, pair_bound, max_digits)
        I = num(s)
        oracle = {"s": {"value": s.to_json(), "Q": Q.to_json(), "R": R.to_json()}}
        k, kcert = _find_k(E, a, I, max_digits)
        oracle["k"] = kcert
        emb = ext.embed
        sb = s.denominator()
        kb = k.denominator()
        i1, i2 = two_element_rep(I)
        vals = {
            "sa": emb(s * sb), "sb": emb(s.field(sb)),
            "ka": emb(k * kb), "kb": emb(k.field(kb)),
            "i1": emb(i1), "i2": emb(i2),
        }
        big = _product(alpha, n)
        vals["z1"], vals["z2"] = vals["i1"] / big, vals["i2"] / big
        xy = express_in_generators(vals["kb"] * alpha - vals["ka"], [vals["i1"], vals["i2"]])
        IL = principal(vals["i1"]) + principal(vals["i2"]) if not vals["i2"].is_zero() else principal(vals["i1"])
        if xy is None:
            raise DomainError("congruence alpha = k (mod I) failed")
        vals["x"], vals["y"] = xy
        c_kb, c_i = decompose_one(principal(vals["kb"]), IL)
        vals["u"] = c_kb / vals["kb"]
        vals["v"], vals["w"] = express_in_generators(c_i, [vals["i1"], vals["i2"]])
        vals["g"], vals["h"] = nonzero_witness(vals["kb"])
        nw = build_witness("is_num", {"a": vals["sa"], "b": vals["sb"], "i1": vals["i1"], "i2": vals["i2"]})
        if nw is None:
            raise DomainError("is_num witness construction failed")
        for key, val in nw.assignment.items():
            if key not in ("a", "b", "i1", "i2"):
                vals["n_" + key] = val
        w.update(vals)
        w = Witness(w)
        if not verify_witness(self.system, w):
            raise AssertionError("constructed U' witness does not verify")
        return Verdict("accepted", "U' branch: oracle values in S with an exact witness", w, oracle)


def _support_ok(E, I):
    try:
        for P, _ in factor(I):
            check_good_reduction(E, P)
            if P.norm() > 10 ** 4:
                return False
    except (DiophokError, AssertionError):
        return False
    return True


def _find_s(E, beta, pair_bound, max_digits):
    """s = t(aP)/t(bP) with (beta) | num(s) and num(s) on small good primes."""
    P = E.generator
    B = principal(beta)
    pts = {1: P}
    for m in range(2, pair_bound + 1):
        pts[m] = pts[m - 1] + P
    for total in range(3, 2 * pair_bound + 1):
        for qa in range(1, total):
            ra = total - qa
            if qa > pair_bound or ra > pair_bound or qa == ra:
                continue
            s = uniformizer(pts[qa]) / uniformizer(pts[ra])
            I = num(s)
            if B.divides(I) and _support_ok(E, I):
                return s, pts[qa], pts[ra]
    s, R, Q = numerator_witness(beta, E, max_digits)
    if not _support_ok(E, num(s)):
        raise DomainError("num(s) has primes of bad reduction or oversized residue fields")
    return s, Q, R


def _find_k(E, a, I, max_digits):
    """k in S with a = k (mod I), for a congruent to a rational integer mod I."""
    K = a.field
    m = I.min_integer()
    k0 = None
    for cand in range(m):
        if I.contains(a - cand):
            k0 = cand
            break
        if cand > 10 ** 5:
            break
    if k0 is None:
        raise DomainError("alpha is not congruent to a rational integer modulo I")
    if k0 == 1:
        return K.one(), {"k0": 1, "construction": "t(R)/t(R)"}
    if k0 == 0:
        s, R, Q = numerator_witness(K(m), E, max_digits)
        return s, {"k0": 0, "construction": "numerator witness", "Q": Q.to_json(), "R": R.to_json()}
    approx = approximate(ApproximationTarget(k0, I), E, max_digits)
    return approx.s, {"k0": k0, "construction": "t(kR)/t(R)", "approximation": approx.to_json()}


# -- O_K as a sum -------------------------------------------------------------------------------


def emit_OK(ext, U_def):
    return OKDefinition(ext, U_def)


class OKDefinition:
    """alpha = sum_i u_i b_i with u_i in U, b_i the integral basis of O_K."""

    def __init__(self, ext, U_def):
        self.ext = ext
        self.U = U_def
        K = ext.base
        basis = K.integral_basis()
        comps = []
        for i, b in enumerate(basis):
            comps.append(U_def.system.rename({p: f"u{i}_{p}" for p in ORACLE_PARAMS}))
        sysm = combine(comps, "sum", weights=basis, result="alpha")
        self.basis = basis
        self.system = PolySystem(ext, sysm.parameters, sysm.existentials, sysm.equations, "O_K")

    def membership(self, alpha, **kw):
        L = self.ext.top
        a = self.ext.preimage(alpha)
        if a is None:
            return Verdict("rejected", "alpha is not in K")
        if not a.is_integral():
            return Verdict("rejected", "alpha is not integral")
        coords = a.int_coords()
        w = {v: L.zero() for v in self.system.variables}
        w["alpha"] = alpha
        reasons = []
        for i, c in enumerate(coords):
            sub = self.U.membership(L(c), **kw)
            reasons.append(f"u{i} = {c}: {sub.verdict}")
            if sub.verdict != "accepted":
                return Verdict("inconclusive" if sub.verdict == "inconclusive" else "rejected",
                               "; ".join(reasons) + f" ({sub.reason})")
            for v, val in sub.witness.assignment.items():
                if v == "alpha":
                    w[f"s{i}"] = val
                elif v in ORACLE_PARAMS:
                    w[f"u{i}_{v}"] = val
                else:
                    w[f"c{i}_{v}"] = val
        w = Witness(w)
        if not verify_witness(self.system, w):
            raise AssertionError("constructed O_K witness does not verify")
        return Verdict("accepted", "; ".join(reasons), w)


# -- coset membership ----------------------------------------------------------------------------


def _jac_add(P1, P2):
    """Chord addition in Jacobian coordinates (valid when x1 != x2); also returns H."""
    X1, Y1, Z1 = P1
    X2, Y2, Z2 = P2
    Z1s, Z2s = Z1 * Z1, Z2 * Z2
    U1, U2 = X1 * Z2s, X2 * Z1s
    S1, S2 = Y1 * Z2s * Z2, Y2 * Z1s * Z1
    H, R = U2 - U1, S2 - S1
    H2 = H * H
    H3 = H2 * H
    X3 = R * R - H3 - 2 * U1 * H2
    Y3 = R * (U1 * H2 - X3) - S1 * H3
    Z3 = H * Z1 * Z2
    return (X3, Y3, Z3), H


def _jac_double(P, A):
    """Tangent doubling in Jacobian coordinates (valid when y != 0); also returns Y."""
    X, Y, Z = P
    YY = Y * Y
    S = 4 * X * YY
    Z2 = Z * Z
    M = 3 * X * X + A * Z2 * Z2
    X3 = M * M - 2 * S
    Y3 = M * (S - X3) - 8 * YY * YY
    return (X3, Y3, 2 * Y * Z), Y


def _pt_vars(K, prefix):
    return tuple(Poly.var(K, prefix + c) for c in ("X", "Y", "Z"))


def _jac_equal(P, Q):
    X1, Y1, Z1 = P
    X2, Y2, Z2 = Q
    Z1s, Z2s = Z1 * Z1, Z2 * Z2
    return [X1 * Z2s - X2 * Z1s, Y1 * Z2s * Z2 - Y2 * Z1s * Z1]


def _guard(ext, var_poly, tag):
    """Equation and existentials certifying var_poly != 0 via the nonzero lemma."""
    K = ext.base
    x, y = Poly.var(K, f"{tag}x"), Poly.var(K, f"{tag}y")
    return (2 * x - 1) * (3 * x - 1) - y * var_poly, [f"{tag}x", f"{tag}y"]


def _branch(ext, curve_L, r, rep_index, rep_is_zero):
    """Q = rep + r*Z in one affine chart."""
    K = ext.base
    A, B = _base_coeffs(ext, curve_L)
    Q = _pt_vars(K, "Q")
    Zp = _pt_vars(K, "Z")
    eqs, ex = [], ["ZX", "ZY", "ZZ"]
    X, Y, Zc = Zp
    Z2 = Zc * Zc
    eqs.append(Y * Y - X * X * X - A * X * Z2 * Z2 - B * Z2 * Z2 * Z2)
    g, gx = _guard(ext, Zc, "gZ")
    eqs.append(g)
    ex += gx
    cur = Zp
    for j in range(2, r + 1):
        if j == 2:
            formula, cond = _jac_double(cur, A)
        else:
            formula, cond = _jac_add(cur, Zp)
        T = _pt_vars(K, f"T{j}")
        eqs += [t - f for t, f in zip(T, formula)]
        ex += [f"T{j}X", f"T{j}Y", f"T{j}Z"]
        g, gx = _guard(ext, cond, f"gT{j}")
        eqs.append(g)
        ex += gx
        cur = T
    params = ["QX", "QY", "QZ"]
    if rep_is_zero:
        eqs += _jac_equal(Q, cur)
    else:
        Rp = _pt_vars(K, f"R{rep_index}")
        params += [f"R{rep_index}X", f"R{rep_index}Y", f"R{rep_index}Z"]
        formula, cond = _jac_add(Rp, cur)
        g, gx = _guard(ext, cond, "gF")
        eqs.append(g)
        ex += gx
        eqs += _jac_equal(Q, formula)
    return PolySystem(ext, params, ex, eqs, f"coset {rep_index}")


def _base_coeffs(ext, curve_L):
    a = ext.preimage(curve_L.A)
    b = ext.preimage(curve_L.B)
    if a is None or b is None or not a.is_integral() or not b.is_integral():
        raise DomainError("curve coefficients must lie in O_K")
    return a, b


def jacobian(P):
    """Integral (X, Y, Z) with x = X/Z^2, y = Y/Z^3 and Z a positive integer."""
    if P.is_zero():
        raise DomainError("the identity has no affine Jacobian chart here")
    d = lcm(P.x.denominator(), P.y.denominator())
    return P.x * d * d, P.y * d ** 3, P.x.field(d)


class CosetDefinition:
    def __init__(self, ext, cosets):
        self.ext = ext
        self.cosets = cosets
        branches = [_branch(ext, cosets.curve, cosets.r, i, rep.is_zero())
                    for i, rep in enumerate(cosets.reps)]
        sysm = combine(branches, "union")
        self.system = PolySystem(ext, sysm.parameters, sysm.existentials, sysm.equations,
                                 f"Q in union of rep + {cosets.r} E(L)")

    def parameter_values(self, Q):
        vals = dict(zip(("QX", "QY", "QZ"), jacobian(Q)))
        for i, rep in enumerate(self.cosets.reps):
            if not rep.is_zero():
                vals.update(zip((f"R{i}X", f"R{i}Y", f"R{i}Z"), jacobian(rep)))
        return vals

    def witness(self, Q):
        """Witness for Q from an exact division point, or a Verdict explaining why not."""
        res = self.cosets.membership(Q)
        if res.verdict != "accepted":
            return Verdict(res.verdict, "no division point found" if res.verdict != "rejected"
                           else "Q - rep is not in r E(L) for any rep")
        i, S = res.rep_index, res.division_witness
        L = self.ext.top
        w = {v: L.zero() for v in self.system.variables}
        w.update(self.parameter_values(Q))
        pre = f"c{i}_"
        try:
            vals = _chart_values(self.cosets, i, S)
        except DomainError as exc:
            return Verdict("inconclusive", f"chart degeneracy: {exc}")
        for k, v in vals.items():
            w[pre + k] = v
        w = Witness(w)
        if not verify_witness(self.system, w):
            raise AssertionError("coset witness does not verify")
        return Verdict("accepted", f"rep {i}", w, {"division_point": S.to_json()})


def _nz(v, tag):
    if v.is_zero():
        raise DomainError(f"{tag} vanishes")
    x, y = nonzero_witness(v)
    return {f"{tag}x": x, f"{tag}y": y}


def _chart_values(cosets, i, S):
    A = cosets.curve.A
    rep = cosets.reps[i]
    if S.is_zero():
        raise DomainError("division point is the identity")
    Zp = jacobian(S)
    out = dict(zip(("ZX", "ZY", "ZZ"), Zp))
    out.update(_nz(Zp[2], "gZ"))
    cur = Zp
    for j in range(2, cosets.r + 1):
        if j == 2:
            T, cond = _jac_double(cur, A)
        else:
            T, cond = _jac_add(cur, Zp)
        out.update(_nz(cond, f"gT{j}"))
        out.update(zip((f"T{j}X", f"T{j}Y", f"T{j}Z"), T))
        cur = T
    if not rep.is_zero():
        _, cond = _jac_add(jacobian(rep), cur)
        out.update(_nz(cond, "gF"))
    return out


def emit_coset_membership(cosets, ext):
    return CosetDefinition(ext, cosets)


def coset_data(curve_K, ext, reps, r):
    return _coset_sets(curve_K.base_change(ext), reps, r)


__all__ = [
    "Verdict", "UDefinition", "OKDefinition", "CosetDefinition", "emit_U", "emit_OK",
    "emit_coset_membership", "coset_data", "jacobian", "ORACLE_PARAMS",
]
