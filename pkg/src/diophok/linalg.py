"""Exact integer and rational linear algebra on small dense matrices.

Matrices are lists of rows. Lattices are always spanned by rows.
"""

from fractions import Fraction
from math import gcd


def xgcd(a, b):
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def lcm(a, b):
    return a // gcd(a, b) * b if a and b else 0


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(m):
    return [list(r) for r in zip(*m)]


def matmul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def vecmat(v, m):
    n = len(m[0])
    out = [0] * n
    for vi, row in zip(v, m):
        if vi:
            for j in range(n):
                out[j] += vi * row[j]
    return out


def inverse(m):
    """Inverse of a square rational matrix (Gauss-Jordan over Fractions)."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def det(m):
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    d = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        d *= a[c][c]
        for r in range(c + 1, n):
            if a[r][c] != 0:
                f = a[r][c] / a[c][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return d


def solve_rational(rows, target):
    """Find rational x with x . rows = target, or None if inconsistent.

    ``rows`` may be rank deficient; any solution is returned.
    """
    m = len(rows)
    n = len(target)
    # columns of the augmented system: unknown x_i multiplies rows[i]
    a = [[Fraction(rows[i][j]) for i in range(m)] + [Fraction(target[j])] for j in range(n)]
    pivots = []
    r = 0
    for c in range(m):
        piv = next((k for k in range(r, n) if a[k][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for k in range(n):
            if k != r and a[k][c] != 0:
                f = a[k][c]
                a[k] = [x - f * y for x, y in zip(a[k], a[r])]
        pivots.append(c)
        r += 1
    if any(a[k][m] != 0 for k in range(r, n)):
        return None
    x = [Fraction(0)] * m
    for k, c in enumerate(pivots):
        x[c] = a[k][m]
    return x


def kernel(m):
    """Basis of the rational left kernel {v : v . m = 0}."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    # left kernel of m = right kernel of m^T
    a = [[Fraction(m[i][j]) for i in range(rows)] for j in range(cols)]
    pivots = []
    r = 0
    for c in range(rows):
        piv = next((k for k in range(r, cols) if a[k][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for k in range(cols):
            if k != r and a[k][c] != 0:
                f = a[k][c]
                a[k] = [x - f * y for x, y in zip(a[k], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(rows) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * rows
        v[fc] = Fraction(1)
        for k, pc in enumerate(pivots):
            v[pc] = -a[k][fc]
        basis.append(v)
    return basis


def rank(m):
    if not m:
        return 0
    return len(m) - len(kernel(m))


def hnf(rows, with_transform=False):
    """Row Hermite normal form of an integer matrix of full column rank.

    Returns the square upper-triangular matrix ``h`` with positive diagonal
    and 0 <= h[i][j] < h[j][j] above the diagonal. With ``with_transform``
    also returns ``u`` (one row per output row) such that u . rows = h.
    """
    m = len(rows)
    n = len(rows[0])
    a = [list(map(int, r)) for r in rows]
    u = identity(m) if with_transform else None
    r = 0
    for c in range(n):
        # bring gcd of column c (rows r..) into row r
        for k in range(r + 1, m):
            if a[k][c] == 0:
                continue
            if a[r][c] == 0:
                a[r], a[k] = a[k], a[r]
                if u is not None:
                    u[r], u[k] = u[k], u[r]
                continue
            g, s, t = xgcd(a[r][c], a[k][c])
            p, q = a[r][c] // g, a[k][c] // g
            ar, ak = a[r], a[k]
            a[r] = [s * x + t * y for x, y in zip(ar, ak)]
            a[k] = [p * y - q * x for x, y in zip(ar, ak)]
            if u is not None:
                ur, uk = u[r], u[k]
                u[r] = [s * x + t * y for x, y in zip(ur, uk)]
                u[k] = [p * y - q * x for x, y in zip(ur, uk)]
        if a[r][c] == 0:
            raise ValueError("lattice is not of full rank")
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
            if u is not None:
                u[r] = [-x for x in u[r]]
        r += 1
    for c in range(n):
        d = a[c][c]
        for i in range(c):
            q = a[i][c] // d
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[c])]
                if u is not None:
                    u[i] = [x - q * y for x, y in zip(u[i], u[c])]
    h = a[:n]
    if with_transform:
        return h, u[:n]
    return h


def lattice_contains(h, v):
    """Membership of integer vector v in the lattice with HNF basis h."""
    v = list(v)
    for i, row in enumerate(h):
        if v[i] % row[i]:
            return False
        q = v[i] // row[i]
        if q:
            v = [x - q * y for x, y in zip(v, row)]
    return True


def lattice_coefficients(h, v):
    """Integer coefficients c with c . h = v, or None."""
    v = list(v)
    out = []
    for i, row in enumerate(h):
        if v[i] % row[i]:
            return None
        q = v[i] // row[i]
        out.append(q)
        if q:
            v = [x - q * y for x, y in zip(v, row)]
    return out


def reduce_mod_lattice(h, v):
    """Canonical representative of v modulo the HNF lattice h."""
    v = list(v)
    for i, row in enumerate(h):
        q = v[i] // row[i]
        if q:
            v = [x - q * y for x, y in zip(v, row)]
    return v


def exponent(h):
    """Smallest positive integer e with e * Z^n contained in the lattice."""
    e = 1
    for row in inverse(h):
        for x in row:
            e = lcm(e, x.denominator)
    return e


def intersect(h1, h2):
    """Intersection of two full-rank integer lattices, as HNF.

    Uses (L1 n L2)* = L1* + L2* with the dual scaled by a common exponent.
    """
    m = lcm(exponent(h1), exponent(h2))
    duals = []
    for h in (h1, h2):
        for row in transpose(inverse(h)):
            duals.append([int(m * x) for x in row])
    s = hnf(duals)
    back = transpose(inverse(s))
    out = []
    for row in back:
        scaled = [m * x for x in row]
        assert all(x.denominator == 1 for x in scaled)
        out.append([int(x) for x in scaled])
    return hnf(out)


def denominator_of(rows):
    d = 1
    for row in rows:
        for x in row:
            d = lcm(d, Fraction(x).denominator)
    return d


def intersect_rational(lattices):
    """Intersection of full-rank rational lattices given by row bases."""
    d = 1
    for rows in lattices:
        d = lcm(d, denominator_of(rows))
    hs = [hnf([[int(x * d) for x in row] for row in rows]) for rows in lattices]
    acc = hs[0]
    for h in hs[1:]:
        acc = intersect(acc, h)
    return [[Fraction(x, d) for x in row] for row in acc]
