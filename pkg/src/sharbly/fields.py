"""Coefficient fields (Q and F_p, p odd) and exact sparse field linear algebra."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import PreconditionError


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class Rationals:
    """The field Q; elements are Fractions."""

    name = "Q"
    char = 0

    def __call__(self, x) -> Fraction:
        return Fraction(x)

    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError
        return 1 / Fraction(a)

    def div(self, a, b):
        return Fraction(a) / b

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"


class PrimeField:
    """F_p for an odd prime p; elements are ints in [0, p)."""

    def __init__(self, p: int):
        if not _is_prime(p):
            raise PreconditionError(f"modulus {p} is not prime")
        if p == 2:
            raise PreconditionError(
                "F_2 coefficients are rejected: 2 must be invertible"
            )
        self.p = p
        self.name = f"F{p}"
        self.char = p
        self.zero = 0
        self.one = 1

    def __call__(self, x) -> int:
        if isinstance(x, Fraction):
            return self(x.numerator) * pow(x.denominator % self.p, -1, self.p) % self.p
        return int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError
        return pow(a, -1, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return self.name


QQ = Rationals()

Field = Rationals | PrimeField


def parse_field(spec: str) -> Field:
    """Parse 'Q' or 'Fp:<p>' (also accepts 'F<p>')."""
    s = spec.strip()
    if s == "Q":
        return QQ
    if s.startswith("Fp:"):
        return PrimeField(int(s[3:]))
    if s.startswith("F") and s[1:].isdigit():
        return PrimeField(int(s[1:]))
    raise ValueError(f"unrecognized field spec {spec!r}; use 'Q' or 'Fp:<p>'")


@dataclass(frozen=True)
class SparseFieldMatrix:
    """Triplet-style sparse matrix over Q or F_p; no stored zeros."""

    field: Field
    nrows: int
    ncols: int
    entries: dict = dc_field(default_factory=dict)  # (row, col) -> nonzero coeff

    @classmethod
    def from_triplets(cls, field, nrows, ncols, triplets):
        entries = {}
        for r, c, v in triplets:
            v = field(v)
            if (r, c) in entries:
                raise ValueError(f"duplicate entry at ({r}, {c})")
            if v != field.zero:
                entries[r, c] = v
        return cls(field, nrows, ncols, entries)

    @classmethod
    def from_dense(cls, field, rows):
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        entries = {}
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                v = field(v)
                if v != field.zero:
                    entries[i, j] = v
        return cls(field, nrows, ncols, entries)

    def to_dense(self):
        out = [[self.field.zero] * self.ncols for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def matvec(self, v):
        f = self.field
        out = [f.zero] * self.nrows
        for (i, j), a in self.entries.items():
            out[i] = f.add(out[i], f.mul(a, v[j]))
        return out

    def compose(self, other: "SparseFieldMatrix") -> "SparseFieldMatrix":
        """self * other."""
        assert self.ncols == other.nrows and self.field == other.field
        f = self.field
        acc: dict = {}
        cols_of = {}
        for (i, j), a in other.entries.items():
            cols_of.setdefault(i, []).append((j, a))
        for (i, k), a in self.entries.items():
            for j, b in cols_of.get(k, []):
                key = (i, j)
                acc[key] = f.add(acc.get(key, f.zero), f.mul(a, b))
        entries = {k: v for k, v in acc.items() if v != f.zero}
        return SparseFieldMatrix(f, self.nrows, other.ncols, entries)

    def is_zero(self) -> bool:
        return not self.entries


def _echelonize(field, rows):
    """In-place reduced row echelon over `field`; returns pivot column list."""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, nrows):
            if rows[i][c] != field.zero:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = field.inv(rows[r][c])
        rows[r] = [field.mul(inv, x) for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != field.zero:
                f = rows[i][c]
                rows[i] = [
                    field.sub(x, field.mul(f, y)) for x, y in zip(rows[i], rows[r])
                ]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def rank_kernel(m: SparseFieldMatrix):
    """(rank, kernel basis) of a sparse field matrix; kernel vectors exact."""
    f = m.field
    rows = m.to_dense()
    pivots = _echelonize(f, rows)
    rank = len(pivots)
    free = [c for c in range(m.ncols) if c not in pivots]
    kernel = []
    for c in free:
        v = [f.zero] * m.ncols
        v[c] = f.one
        for r, pc in enumerate(pivots):
            v[pc] = f.neg(rows[r][c])
        kernel.append(tuple(v))
    return rank, kernel


def rank(m: SparseFieldMatrix) -> int:
    return rank_kernel(m)[0]


def solve(m: SparseFieldMatrix, rhs):
    """One solution x of m*x = rhs, or None if inconsistent."""
    f = m.field
    rows = m.to_dense()
    for i, b in enumerate(rhs):
        rows[i].append(f(b))
    pivots = _echelonize(f, rows)
    if m.ncols in pivots:
        return None
    x = [f.zero] * m.ncols
    for r, c in enumerate(pivots):
        x[c] = rows[r][m.ncols]
    return tuple(x)


class LinearSpan:
    """Incremental row space over a field, for membership and completion."""

    def __init__(self, field, dim: int):
        self.field = field
        self.dim = dim
        self.rows: list = []
        self.pivots: list[int] = []

    def reduce(self, vec):
        f = self.field
        v = [f(x) for x in vec]
        for row, p in zip(self.rows, self.pivots):
            if v[p] != f.zero:
                c = v[p]
                v = [f.sub(x, f.mul(c, y)) for x, y in zip(v, row)]
        return v

    def contains(self, vec) -> bool:
        return all(x == self.field.zero for x in self.reduce(vec))

    def add(self, vec) -> bool:
        """Add vec to the span; True if the dimension grew."""
        f = self.field
        v = self.reduce(vec)
        for p in range(self.dim):
            if v[p] != f.zero:
                inv = f.inv(v[p])
                v = [f.mul(inv, x) for x in v]
                self.rows.append(v)
                self.pivots.append(p)
                return True
        return False

    @property
    def rank(self) -> int:
        return len(self.rows)


# ---------------------------------------------------------------------------
# Characteristic polynomials and eigenvalues
# ---------------------------------------------------------------------------

def charpoly(field, dense_rows):
    """Monic characteristic polynomial det(xI - A), low degree first.

    Samuelson-Berkowitz recursion over trailing principal submatrices;
    division-free, so valid over F_p for any p.
    """
    n = len(dense_rows)
    f = field
    a = [[f(x) for x in row] for row in dense_rows]
    if n == 0:
        return (f.one,)
    p = [f.one, f.neg(a[n - 1][n - 1])]  # leading coefficient first
    for i in range(n - 2, -1, -1):
        m = n - i
        top = a[i][i]
        row_r = a[i][i + 1:]
        col_c = [a[j][i] for j in range(i + 1, n)]
        block = [a[j][i + 1:] for j in range(i + 1, n)]
        # Toeplitz column: 1, -top, -R*C, -R*M*C, ..., -R*M^(m-2)*C
        t = [f.one, f.neg(top)]
        vec = col_c
        for _ in range(m - 1):
            t.append(f.neg(_dot(f, row_r, vec)))
            vec = [_dot(f, brow, vec) for brow in block]
        new = [f.zero] * (m + 1)
        for r in range(m + 1):
            acc = f.zero
            for c in range(max(0, r - m), min(r, m - 1) + 1):
                acc = f.add(acc, f.mul(t[r - c], p[c]))
            new[r] = acc
        p = new
    return tuple(reversed(p))


def _dot(f, u, v):
    acc = f.zero
    for x, y in zip(u, v):
        acc = f.add(acc, f.mul(x, y))
    return acc


def poly_eval(field, poly, x):
    acc = field.zero
    for c in reversed(poly):
        acc = field.add(field.mul(acc, x), c)
    return acc


def poly_divide_root(field, poly, root):
    """poly / (x - root), assuming root is a root."""
    f = field
    n = len(poly) - 1
    out = [f.zero] * n
    carry = poly[n]
    for i in range(n - 1, -1, -1):
        out[i] = carry
        carry = f.add(poly[i], f.mul(root, carry))
    assert carry == f.zero
    return tuple(out)


def eigenvalues(field, poly):
    """Roots in the field with multiplicities, plus the unfactored remainder.

    Returns (sorted [(root, multiplicity)], remainder_poly or None).
    """
    f = field
    roots: dict = {}
    cur = tuple(poly)
    if isinstance(f, PrimeField):
        candidates = list(range(f.p))
    else:
        candidates = _rational_root_candidates(cur)
    progress = True
    while progress and len(cur) > 1:
        progress = False
        for cand in candidates:
            x = f(cand)
            while len(cur) > 1 and poly_eval(f, cur, x) == f.zero:
                roots[x] = roots.get(x, 0) + 1
                cur = poly_divide_root(f, cur, x)
                progress = True
    remainder = cur if len(cur) > 1 else None
    ordered = sorted(roots.items(), key=lambda r: r[0])
    return ordered, remainder


def _rational_root_candidates(poly):
    """Possible rational roots of a rational polynomial (root theorem)."""
    from math import gcd

    lcm = 1
    for c in poly:
        lcm = lcm * c.denominator // gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in poly]
    while ints and ints[0] == 0:
        ints = ints[1:]
    if not ints:
        return [Fraction(0)]
    a0, an = abs(ints[0]), abs(ints[-1])

    def divisors(m):
        out = []
        d = 1
        while d * d <= m:
            if m % d == 0:
                out.extend([d, m // d])
            d += 1
        return sorted(set(out))

    cands = {Fraction(0)}
    for p in divisors(a0):
        for q in divisors(an):
            cands.add(Fraction(p, q))
            cands.add(Fraction(-p, q))
    return sorted(cands)
