"""Certified complex root isolation and numeric-then-exact root finding.

Root enclosures use the classical bound: every polynomial of degree n has
a root within n*|f(z)/f'(z)| of any point z. Disjoint enclosures, one per
root, therefore each contain exactly one root.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import ResourceBudgetExceeded

MAX_PRECISION = 8192


@dataclass(frozen=True)
class EmbeddingSet:
    poly: tuple
    roots: tuple          # mpmath.mpc centres
    radii: tuple          # certified enclosure radii
    precision: int        # bits
    signature: tuple      # (r1, r2)

    @property
    def real_roots(self):
        return [z for z in self.roots if z.imag == 0]

    def error_bound(self):
        return max(self.radii) if self.radii else mpmath.mpf(0)

    def to_json(self):
        return {
            "precision_bits": self.precision,
            "signature": list(self.signature),
            "roots": [[mpmath.nstr(z.real, 20), mpmath.nstr(z.imag, 20)] for z in self.roots],
            "error_bound": mpmath.nstr(self.error_bound(), 5),
        }


def _horner(coeffs, z):
    acc = mpmath.mpc(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _attempt(coeffs, bits):
    n = len(coeffs) - 1
    with mpmath.workprec(bits + 32):
        desc = [mpmath.mpf(c) if not isinstance(c, mpmath.mpc) else c for c in reversed(coeffs)]
        try:
            raw = mpmath.polyroots(desc, maxsteps=200, extraprec=bits)
        except mpmath.libmp.NoConvergence:
            return None
        deriv = [k * c for k, c in enumerate(coeffs)][1:]
        centres, radii = [], []
        for z in raw:
            z = mpmath.mpc(z)
            fz = abs(_horner(coeffs, z))
            dz = abs(_horner(deriv, z))
            if dz == 0:
                return None
            centres.append(z)
            # inflate for rounding in the evaluation itself
            radii.append(n * fz / dz * 2 + mpmath.mpf(2) ** (-bits))
        for i, j in itertools.combinations(range(n), 2):
            if abs(centres[i] - centres[j]) <= 2 * (radii[i] + radii[j]):
                return None
        return centres, radii


def isolate_roots(coeffs, precision=64):
    """Certified enclosures for all complex roots of a squarefree polynomial.

    ``coeffs`` are ascending rational (or integer) coefficients. Returns
    (centres, radii, bits). Precision doubles until the enclosures
    separate, failing past ``MAX_PRECISION`` bits.
    """
    if precision < 32:
        raise ValueError("precision must be at least 32 bits")
    bits = precision
    coeffs = [Fraction(c) for c in coeffs]
    while bits <= MAX_PRECISION:
        with mpmath.workprec(bits + 32):
            num = [mpmath.mpf(c.numerator) / c.denominator for c in coeffs]
        res = _attempt(num, bits)
        if res is not None:
            centres, radii = res
            if all(r < mpmath.mpf(2) ** (-precision) for r in radii):
                return centres, radii, bits
        bits *= 2
    raise ResourceBudgetExceeded("root isolation did not converge below the precision cap")


def _classify(coeffs, centres, radii, bits):
    """Snap certified-real roots onto the real axis and order canonically."""
    real, cplx = [], []
    n = len(centres)
    for i, (z, r) in enumerate(zip(centres, radii)):
        if abs(z.imag) > r:
            cplx.append((z, r))
            continue
        # the conjugate enclosure meets no other enclosure => the root is real
        zc = mpmath.conj(z)
        if all(abs(zc - centres[j]) > r + radii[j] for j in range(n) if j != i):
            real.append((mpmath.mpc(z.real, 0), r))
        else:
            return None
    real.sort(key=lambda p: p[0].real)
    upper = sorted((p for p in cplx if p[0].imag > 0), key=lambda p: (p[0].real, p[0].imag))
    lower = {i: p for i, p in enumerate(cplx) if p[0].imag < 0}
    ordered = list(real)
    for z, r in upper:
        ordered.append((z, r))
        # matching conjugate
        j = min(lower, key=lambda k: abs(lower[k][0] - mpmath.conj(z)))
        ordered.append(lower.pop(j))
    if lower:
        return None
    return ordered


def embeddings_of_poly(coeffs, precision=64):
    bits = precision
    while True:
        centres, radii, used = isolate_roots(coeffs, bits)
        with mpmath.workprec(used + 32):
            ordered = _classify(coeffs, centres, radii, used)
        if ordered is not None:
            r1 = sum(1 for z, _ in ordered if z.imag == 0)
            r2 = (len(ordered) - r1) // 2
            return EmbeddingSet(
                poly=tuple(Fraction(c) for c in coeffs),
                roots=tuple(z for z, _ in ordered),
                radii=tuple(r for _, r in ordered),
                precision=max(precision, used),
                signature=(r1, r2),
            )
        bits *= 2
        if bits > MAX_PRECISION:
            raise ResourceBudgetExceeded("could not certify real/complex classification")


def embeddings(field, precision=64):
    """Complex embeddings of a number field: real roots first (ascending),
    then conjugate pairs with the upper half-plane root first."""
    return embeddings_of_poly(field.poly, precision)


def embed(element, emb, j):
    """Image of an element under the j-th embedding (mpmath complex)."""
    z = emb.roots[j]
    acc = mpmath.mpc(0)
    for c in reversed(element.coords):
        acc = acc * z + mpmath.mpf(c.numerator) / c.denominator
    return acc


def is_totally_real(coeffs):
    return embeddings_of_poly(coeffs).signature[1] == 0


def roots_in_field(coeffs, field, permutation=False, precision=256, max_denominator=None):
    """Roots lying in ``field`` of a polynomial with coefficients in ``field``.

    Candidates are built from one choice of complex root per embedding
    (conjugate embeddings are tied together), interpolated back to
    power-basis coordinates, rationalized, and admitted only after exact
    verification. With ``permutation`` the choices must be distinct roots
    (appropriate when the polynomial is the field's own defining
    polynomial).
    """
    from .nf import NFElement

    coeffs = [field(c) for c in coeffs]
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    deg = len(coeffs) - 1
    if deg < 1:
        return []
    d = field.degree
    emb = embeddings(field, precision)
    with mpmath.workprec(emb.precision + 64):
        # roots of each conjugate polynomial
        per_emb = []
        for j in range(d):
            cj = [embed(c, emb, j) for c in coeffs]
            lead = cj[-1]
            monic = [c / lead for c in cj]
            try:
                rs = mpmath.polyroots(list(reversed(monic)), maxsteps=400, extraprec=emb.precision)
            except mpmath.libmp.NoConvergence:
                rs = mpmath.polyroots(list(reversed(monic)), maxsteps=2000, extraprec=4 * emb.precision)
            per_emb.append([mpmath.mpc(r) for r in rs])
        vand = mpmath.matrix([[emb.roots[j] ** k for k in range(d)] for j in range(d)])
        vinv = mpmath.inverse(vand)
        r1, r2 = emb.signature
        free = list(range(r1)) + [r1 + 2 * i for i in range(r2)]
        tol = mpmath.mpf(2) ** (-(emb.precision // 2))
        if max_denominator is None:
            max_denominator = 10 ** max(6, emb.precision // 10)
        found = []
        seen = set()
        for choice in itertools.product(*[range(len(per_emb[j])) for j in free]):
            vals = [None] * d
            for j, c in zip(free, choice):
                vals[j] = per_emb[j][c]
                if j >= r1:
                    vals[j + 1] = mpmath.conj(per_emb[j][c])
            if permutation:
                # values at distinct embeddings must be distinct roots
                if any(abs(vals[a] - vals[b]) < tol for a, b in itertools.combinations(range(d), 2)):
                    continue
            cvec = vinv * mpmath.matrix(vals)
            if any(abs(cvec[k].imag) > tol * (1 + abs(cvec[k].real)) for k in range(d)):
                continue
            rat = []
            for k in range(d):
                x = cvec[k].real
                approx = Fraction(mpmath.nstr(x, emb.precision // 3 + 10, strip_zeros=False)) \
                    if abs(x) < mpmath.mpf(10) ** 30 else None
                if approx is None:
                    break
                rat.append(approx.limit_denominator(max_denominator))
            if len(rat) != d:
                continue
            key = tuple(rat)
            if key in seen:
                continue
            cand = NFElement(field, rat)
            acc = field.zero()
            for c in reversed(coeffs):
                acc = acc * cand + c
            if acc.is_zero():
                seen.add(key)
                found.append(cand)
    found.sort(key=lambda e: e.coords)
    return found
