"""Exact rational linear algebra.

Everything here works over :class:`fractions.Fraction`.  Canonical forms
(RREF, pivot-first solutions, free-variable kernel bases) are deterministic,
so downstream reports are bit-stable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction
Vector = tuple  # tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


class NotSubspaceError(ValueError):
    """A purported subspace is not contained in the ambient span.

    In a cohomology computation this means the differential does not square
    to zero, i.e. the input structures are invalid.
    """


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return parse_rational(x)
    return Fraction(x)


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``; raises ``ValueError`` on garbage or q = 0."""
    s = text.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        n, d = int(num), int(den)
        if d == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(n, d)
    return Fraction(int(s))


def format_rational(q: Fraction) -> str:
    return str(q)


def vec(values: Iterable) -> Vector:
    return tuple(as_rational(v) for v in values)


def zeros(n: int) -> Vector:
    return (ZERO,) * n


def unit_vector(n: int, i: int) -> Vector:
    return tuple(ONE if j == i else ZERO for j in range(n))


def vadd(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, u: Sequence[Fraction]) -> Vector:
    return tuple(c * a for a in u)


def is_zero(u: Sequence[Fraction]) -> bool:
    return not any(u)


class Matrix:
    """Dense immutable rational matrix stored row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Sequence):
        if len(entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
        self.rows = rows
        self.cols = cols
        self.entries = tuple(as_rational(x) for x in entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> Matrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, [x for r in rows for x in r])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> Matrix:
        cols = len(columns)
        entries = [ZERO] * (rows * cols)
        for j, c in enumerate(columns):
            if len(c) != rows:
                raise ValueError("column length mismatch")
            for i, x in enumerate(c):
                entries[i * cols + j] = x
        return cls(rows, cols, entries)

    @classmethod
    def zero(cls, rows: int, cols: int) -> Matrix:
        return cls(rows, cols, [ZERO] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls(n, n, [ONE if i == j else ZERO for i in range(n) for j in range(n)])

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> Matrix:
        return Matrix(self.cols, self.rows,
                      [self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)])

    def apply(self, v: Sequence[Fraction]) -> Vector:
        if len(v) != self.cols:
            raise ValueError(f"vector length {len(v)} != {self.cols}")
        c = self.cols
        e = self.entries
        out = []
        for i in range(self.rows):
            s = ZERO
            base = i * c
            for j, x in enumerate(v):
                if x:
                    a = e[base + j]
                    if a:
                        s += a * x
            out.append(s)
        return tuple(out)

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        n, m, p = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        out = [ZERO] * (n * p)
        for i in range(n):
            for k in range(m):
                x = a[i * m + k]
                if not x:
                    continue
                for j in range(p):
                    y = b[k * p + j]
                    if y:
                        out[i * p + j] += x * y
        return Matrix(n, p, out)

    def _check_same(self, other: Matrix) -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def __add__(self, other: Matrix) -> Matrix:
        self._check_same(other)
        return Matrix(self.rows, self.cols, [x + y for x, y in zip(self.entries, other.entries)])

    def __sub__(self, other: Matrix) -> Matrix:
        self._check_same(other)
        return Matrix(self.rows, self.cols, [x - y for x, y in zip(self.entries, other.entries)])

    def __neg__(self) -> Matrix:
        return Matrix(self.rows, self.cols, [-x for x in self.entries])

    def scale(self, c) -> Matrix:
        c = as_rational(c)
        return Matrix(self.rows, self.cols, [c * x for x in self.entries])

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in self.row(i)) for i in range(self.rows))
        return f"Matrix({self.rows}x{self.cols}: [{body}])"


def hstack(blocks: Sequence[Matrix]) -> Matrix:
    rows = blocks[0].rows
    out = []
    for i in range(rows):
        r = []
        for b in blocks:
            if b.rows != rows:
                raise ValueError("row count mismatch")
            r.extend(b.row(i))
        out.append(r)
    return Matrix.from_rows(out, sum(b.cols for b in blocks))


def vstack(blocks: Sequence[Matrix]) -> Matrix:
    cols = blocks[0].cols
    rows = []
    for b in blocks:
        if b.cols != cols:
            raise ValueError("column count mismatch")
        rows.extend(b.to_rows())
    return Matrix.from_rows(rows, cols)


def _rref_rows(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """In-place Gauss-Jordan; returns (rows, pivots)."""
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        pr = next((i for i in range(r, nrows) if rows[i][c]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r][c]
        if piv != 1:
            inv = 1 / piv
            rows[r] = [x * inv for x in rows[r]]
        prow = rows[r]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f:
                    rows[i] = [x - f * y for x, y in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    rows, pivots = _rref_rows(m.to_rows(), m.cols)
    return Matrix.from_rows(rows, m.cols) if m.rows else Matrix.zero(0, m.cols), pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: Matrix) -> list[Vector]:
    """Null space basis: one vector per free column, free coordinate 1."""
    r, pivots = rref(m)
    pivset = set(pivots)
    basis = []
    for f in range(m.cols):
        if f in pivset:
            continue
        v = [ZERO] * m.cols
        v[f] = ONE
        for row, pc in enumerate(pivots):
            v[pc] = -r[row, f]
        basis.append(tuple(v))
    return basis


def solve(m: Matrix, b: Sequence) -> Vector | None:
    """Particular solution of ``m x = b`` with non-pivot coordinates zero, or None."""
    if len(b) != m.rows:
        raise ValueError(f"rhs length {len(b)} != {m.rows}")
    aug = [list(m.row(i)) + [as_rational(b[i])] for i in range(m.rows)]
    rows, pivots = _rref_rows(aug, m.cols + 1)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [ZERO] * m.cols
    for row, pc in enumerate(pivots):
        x[pc] = rows[row][m.cols]
    return tuple(x)


def row_space_basis(vectors: Sequence[Sequence], dim: int) -> list[Vector]:
    """Nonzero rows of the RREF of the stacked vectors."""
    if not vectors:
        return []
    rows, pivots = _rref_rows([list(vec(v)) for v in vectors], dim)
    return [tuple(rows[i]) for i in range(len(pivots))]


class Echelon:
    """Incrementally grown echelon basis of a subspace of Q^dim."""

    def __init__(self, dim: int):
        self.dim = dim
        self._rows: list[list[Fraction]] = []
        self._pivots: list[int] = []

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, v: Sequence[Fraction]) -> list[Fraction]:
        w = list(v)
        for row, pc in zip(self._rows, self._pivots):
            f = w[pc]
            if f:
                w = [x - f * y for x, y in zip(w, row)]
        return w

    def contains(self, v: Sequence[Fraction]) -> bool:
        return not any(self.reduce(v))

    def add(self, v: Sequence[Fraction]) -> bool:
        """Add v to the span; False if it was already there."""
        w = self.reduce(v)
        pc = next((i for i, x in enumerate(w) if x), None)
        if pc is None:
            return False
        inv = 1 / w[pc]
        w = [x * inv for x in w]
        # keep earlier rows reduced at the new pivot
        for k, row in enumerate(self._rows):
            f = row[pc]
            if f:
                self._rows[k] = [x - f * y for x, y in zip(row, w)]
        self._rows.append(w)
        self._pivots.append(pc)
        return True


def span_contains(basis: Sequence[Sequence], v: Sequence, dim: int) -> bool:
    e = Echelon(dim)
    for b in basis:
        e.add(b)
    return e.contains(v)


def quotient_basis(ambient_dim: int, subspace: Sequence[Sequence], total_space: Sequence[Sequence]) -> list[Vector]:
    """Representatives of a basis of span(total_space) / span(subspace).

    The RREF basis of the subspace is extended greedily by the RREF basis of
    the total space; the added vectors are returned.
    """
    tot = Echelon(ambient_dim)
    for v in total_space:
        tot.add(v)
    sub_rows = row_space_basis(subspace, ambient_dim)
    for v in sub_rows:
        if not tot.contains(v):
            raise NotSubspaceError("subspace is not contained in the total space (d∘d ≠ 0 upstream?)")
    ech = Echelon(ambient_dim)
    for v in sub_rows:
        ech.add(v)
    reps = []
    for v in row_space_basis(total_space, ambient_dim):
        if ech.add(v):
            reps.append(tuple(v))
    return reps


def coordinates(basis: Sequence[Sequence], v: Sequence, dim: int) -> Vector | None:
    """Coefficients of v in an independent list of vectors, or None if v is outside the span."""
    m = Matrix.from_columns([vec(b) for b in basis], dim)
    return solve(m, vec(v))
