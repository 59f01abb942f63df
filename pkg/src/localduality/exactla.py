"""Exact sparse linear algebra over prime fields and the rationals.

Every degreewise computation in the package bottoms out here.  Matrices are
stored sparsely (dict keyed by (row, col)); elimination runs on a dense
numpy array mod p, or on Fractions for characteristic 0.  No floating point
anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class ContractViolation(ValueError):
    """Raised when an operation's precondition is violated."""


@dataclass(frozen=True)
class FieldScalar:
    """Canonical scalar: residue in [0, p) for prime p, exact fraction for p = 0."""

    characteristic: int
    value: object

    def __post_init__(self):
        p = self.characteristic
        if p == 0:
            if not isinstance(self.value, (int, Fraction)):
                raise ContractViolation("characteristic-0 scalar must be int or Fraction")
        else:
            if not _is_prime(p):
                raise ContractViolation(f"characteristic {p} is not prime")
            if not isinstance(self.value, int) or not 0 <= self.value < p:
                raise ContractViolation("residue not reduced to [0, p)")


class Field:
    """Arithmetic context: GF(p) for prime p, or the rationals for p = 0.

    Raw scalars are ints (reduced residues) resp. Fractions; FieldScalar is
    the validated boundary type.
    """

    def __init__(self, characteristic: int):
        if characteristic != 0 and not _is_prime(characteristic):
            raise ContractViolation(f"characteristic {characteristic} is not prime")
        self.characteristic = characteristic

    def __repr__(self):
        return f"GF({self.characteristic})" if self.characteristic else "QQ"

    def __eq__(self, other):
        return isinstance(other, Field) and other.characteristic == self.characteristic

    def __hash__(self):
        return hash(("Field", self.characteristic))

    # raw-scalar arithmetic -------------------------------------------------

    def normalize(self, x):
        if isinstance(x, FieldScalar):
            if x.characteristic != self.characteristic:
                raise ContractViolation("scalar from wrong field")
            x = x.value
        if self.characteristic:
            return int(x) % self.characteristic
        return Fraction(x)

    def zero(self):
        return 0 if self.characteristic else Fraction(0)

    def one(self):
        return 1 if self.characteristic else Fraction(1)

    def add(self, a, b):
        return (a + b) % self.characteristic if self.characteristic else a + b

    def sub(self, a, b):
        return (a - b) % self.characteristic if self.characteristic else a - b

    def mul(self, a, b):
        return (a * b) % self.characteristic if self.characteristic else a * b

    def neg(self, a):
        return (-a) % self.characteristic if self.characteristic else -a

    def inv(self, a):
        if self.characteristic:
            if a % self.characteristic == 0:
                raise ZeroDivisionError
            return pow(a, self.characteristic - 2, self.characteristic)
        if a == 0:
            raise ZeroDivisionError
        return Fraction(1) / a

    def scalar(self, x) -> FieldScalar:
        return FieldScalar(self.characteristic, self.normalize(x))


@lru_cache(maxsize=None)
def GF(p: int) -> Field:
    return Field(p)


QQ = GF(0)


class SparseMatrix:
    """Immutable sparse matrix over a Field.  Zero entries are never stored."""

    __slots__ = ("field", "rows", "cols", "entries")

    def __init__(self, field: Field, rows: int, cols: int,
                 entries: Optional[Dict[Tuple[int, int], object]] = None):
        if rows < 0 or cols < 0:
            raise ContractViolation("negative dimensions")
        self.field = field
        self.rows = rows
        self.cols = cols
        clean: Dict[Tuple[int, int], object] = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise ContractViolation(f"index {(i, j)} out of range")
            v = field.normalize(v)
            if v != 0:
                clean[(i, j)] = v
        self.entries = clean

    # construction helpers --------------------------------------------------

    @staticmethod
    def identity(field: Field, n: int) -> "SparseMatrix":
        return SparseMatrix(field, n, n, {(i, i): field.one() for i in range(n)})

    @staticmethod
    def zero(field: Field, rows: int, cols: int) -> "SparseMatrix":
        return SparseMatrix(field, rows, cols)

    @staticmethod
    def from_rows(field: Field, row_list: Iterable[Iterable[object]],
                  cols: Optional[int] = None) -> "SparseMatrix":
        rows_ = [list(r) for r in row_list]
        n = len(rows_)
        m = cols if cols is not None else (len(rows_[0]) if rows_ else 0)
        ent = {}
        for i, r in enumerate(rows_):
            for j, v in enumerate(r):
                ent[(i, j)] = v
        return SparseMatrix(field, n, m, ent)

    def to_dense(self) -> List[List[object]]:
        d = [[self.field.zero()] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            d[i][j] = v
        return d

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix) and other.field == self.field
                and other.rows == self.rows and other.cols == self.cols
                and other.entries == self.entries)

    def __repr__(self):
        return f"SparseMatrix({self.field}, {self.rows}x{self.cols}, nnz={len(self.entries)})"

    # arithmetic ------------------------------------------------------------

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.field, self.cols, self.rows,
                            {(j, i): v for (i, j), v in self.entries.items()})

    def scale(self, c) -> "SparseMatrix":
        c = self.field.normalize(c)
        return SparseMatrix(self.field, self.rows, self.cols,
                            {k: self.field.mul(v, c) for k, v in self.entries.items()})

    def add(self, other: "SparseMatrix") -> "SparseMatrix":
        if (other.rows, other.cols) != (self.rows, self.cols):
            raise ContractViolation("dimension mismatch in add")
        ent = dict(self.entries)
        f = self.field
        for k, v in other.entries.items():
            ent[k] = f.add(ent.get(k, f.zero()), v)
        return SparseMatrix(f, self.rows, self.cols, ent)

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ContractViolation("dimension mismatch in matmul")
        f = self.field
        by_row: Dict[int, Dict[int, object]] = {}
        for (i, k), v in other.entries.items():
            by_row.setdefault(i, {})[k] = v
        ent: Dict[Tuple[int, int], object] = {}
        for (i, j), a in self.entries.items():
            row = by_row.get(j)
            if not row:
                continue
            for k, b in row.items():
                key = (i, k)
                ent[key] = f.add(ent.get(key, f.zero()), f.mul(a, b))
        return SparseMatrix(f, self.rows, other.cols, ent)

    __matmul__ = matmul

    def apply(self, vec: List[object]) -> List[object]:
        if len(vec) != self.cols:
            raise ContractViolation("dimension mismatch in apply")
        f = self.field
        vec = [f.normalize(x) for x in vec]
        out = [f.zero()] * self.rows
        for (i, j), v in self.entries.items():
            out[i] = f.add(out[i], f.mul(v, vec[j]))
        return out

    def hstack(self, other: "SparseMatrix") -> "SparseMatrix":
        if other.rows != self.rows:
            raise ContractViolation("dimension mismatch in hstack")
        ent = dict(self.entries)
        for (i, j), v in other.entries.items():
            ent[(i, j + self.cols)] = v
        return SparseMatrix(self.field, self.rows, self.cols + other.cols, ent)

    def submatrix(self, row_idx: List[int], col_idx: List[int]) -> "SparseMatrix":
        rmap = {r: i for i, r in enumerate(row_idx)}
        cmap = {c: j for j, c in enumerate(col_idx)}
        ent = {}
        for (i, j), v in self.entries.items():
            if i in rmap and j in cmap:
                ent[(rmap[i], cmap[j])] = v
        return SparseMatrix(self.field, len(row_idx), len(col_idx), ent)


# elimination backends ------------------------------------------------------


def _to_numpy(m: SparseMatrix) -> np.ndarray:
    a = np.zeros((m.rows, m.cols), dtype=np.int64)
    for (i, j), v in m.entries.items():
        a[i, j] = v
    return a


def _rref_modp(a: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form mod p; returns (matrix, pivot column list)."""
    a = a % p
    nrows, ncols = a.shape
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        col_all = a[:, c].copy()
        col_all[r] = 0
        mask = np.nonzero(col_all)[0]
        if mask.size:
            a[mask] = (a[mask] - np.outer(col_all[mask], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def _rref_exact(rows: List[List[Fraction]], ncols: int) -> Tuple[List[List[Fraction]], List[int]]:
    rows = [list(r) for r in rows]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r >= len(rows):
            break
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = Fraction(1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(m: SparseMatrix) -> Tuple[SparseMatrix, List[int]]:
    """Reduced row echelon form and pivot columns (deterministic)."""
    f = m.field
    if f.characteristic:
        a, pivots = _rref_modp(_to_numpy(m), f.characteristic)
        ent = {(i, j): int(a[i, j]) for i in range(m.rows) for j in np.nonzero(a[i])[0]}
        return SparseMatrix(f, m.rows, m.cols, ent), pivots
    dense = [[Fraction(x) for x in row] for row in m.to_dense()]
    a, pivots = _rref_exact(dense, m.cols)
    ent = {}
    for i, row in enumerate(a):
        for j, v in enumerate(row):
            if v != 0:
                ent[(i, j)] = v
    return SparseMatrix(f, m.rows, m.cols, ent), pivots


def rank(m: SparseMatrix) -> int:
    """Exact rank over the field."""
    if not m.entries:
        return 0
    f = m.field
    if f.characteristic:
        return len(_rref_modp(_to_numpy(m), f.characteristic)[1])
    dense = [[Fraction(x) for x in row] for row in m.to_dense()]
    return len(_rref_exact(dense, m.cols)[1])


def kernel_basis(m: SparseMatrix) -> List[List[object]]:
    """Basis of the right kernel, one vector per non-pivot column.

    Vectors are returned in increasing free-column order; always
    len == cols - rank(m).
    """
    f = m.field
    red, pivots = rref(m)
    pivot_set = set(pivots)
    free = [c for c in range(m.cols) if c not in pivot_set]
    # row index of each pivot column
    prow = {c: i for i, c in enumerate(pivots)}
    dense = red.to_dense()
    basis = []
    for c in free:
        v = [f.zero()] * m.cols
        v[c] = f.one()
        for pc in pivots:
            coeff = dense[prow[pc]][c]
            if coeff != 0:
                v[pc] = f.neg(coeff)
        basis.append(v)
    return basis


def solve(m: SparseMatrix, b: List[object]) -> Optional[List[object]]:
    """Some x with m @ x = b, or None when the system is inconsistent."""
    f = m.field
    if len(b) != m.rows:
        raise ContractViolation("dimension mismatch in solve")
    b = [f.normalize(x) for x in b]
    aug = m.hstack(SparseMatrix(f, m.rows, 1, {(i, 0): v for i, v in enumerate(b)}))
    red, pivots = rref(aug)
    if m.cols in pivots:
        return None
    dense = red.to_dense()
    x = [f.zero()] * m.cols
    for i, c in enumerate(pivots):
        x[c] = dense[i][m.cols]
    return x


def solve_matrix(m: SparseMatrix, b: SparseMatrix) -> Optional[SparseMatrix]:
    """Some X with m @ X = b, or None.  Solves all columns in one elimination."""
    f = m.field
    if b.rows != m.rows:
        raise ContractViolation("dimension mismatch in solve_matrix")
    aug = m.hstack(b)
    red, pivots = rref(aug)
    if any(c >= m.cols for c in pivots):
        return None
    prow = {c: i for i, c in enumerate(pivots)}
    ent = {}
    for (i, j), v in red.entries.items():
        if j >= m.cols:
            # row i corresponds to pivot column pivots[i]
            ent[(pivots[i], j - m.cols)] = v
    return SparseMatrix(f, m.cols, b.cols, ent)


def image_pivot_columns(m: SparseMatrix) -> List[int]:
    """Deterministic choice of columns spanning the image."""
    return rref(m)[1]


def row_space_matrix(m: SparseMatrix) -> SparseMatrix:
    """Nonzero rows of the rref: canonical basis of the row space."""
    red, pivots = rref(m)
    keep = list(range(len(pivots)))
    return red.submatrix(keep, list(range(m.cols)))


def quotient_projection(span: SparseMatrix) -> Tuple[SparseMatrix, List[int]]:
    """Projection data for V / rowspace(span), V = field^cols.

    Returns (P, free_cols): free_cols index the chosen complement basis
    (non-pivot coordinates) and P maps V coordinates to quotient coordinates,
    i.e. P has shape (len(free_cols), cols) and P restricted to the
    complement basis is the identity.
    """
    f = span.field
    red, pivots = rref(span)
    pivot_set = set(pivots)
    free = [c for c in range(span.cols) if c not in pivot_set]
    fpos = {c: i for i, c in enumerate(free)}
    ent = {(fpos[c], c): f.one() for c in free}
    dense = red.to_dense()
    for i, pc in enumerate(pivots):
        for c in free:
            v = dense[i][c]
            if v != 0:
                # e_pc = -sum v * e_c in the quotient
                ent[(fpos[c], pc)] = f.neg(v)
    return SparseMatrix(f, len(free), span.cols, ent), free
