"""Dense exact linear algebra over the fields in :mod:`rslminors.fields`.

``FieldMatrix`` is a small row-major dense matrix whose entries are element
tokens of an attached field.  The generic routines (reduced row echelon form
with transform, determinant, maximal minors) are pure Python and work for any
field object.  ``rank``, ``kernel`` and ``solve`` dispatch to vectorized numpy
elimination when the field allows it: arithmetic mod p for prime fields, and
Zech-logarithm arithmetic for extension fields with tabulated logarithms.
Matrices are immutable by convention; all operations return fresh objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .fields import ExtensionField, PrimeField


class FieldMatrix:
    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field, rows: Sequence[Sequence[int]], validate: bool = True):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        if validate:
            for r in rows:
                for x in r:
                    field.validate(x)
        self.field = field
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols

    @classmethod
    def zeros(cls, field, nrows: int, ncols: int) -> "FieldMatrix":
        return cls(field, [[0] * ncols for _ in range(nrows)], validate=False)

    @classmethod
    def identity(cls, field, n: int) -> "FieldMatrix":
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = 1
        return cls(field, rows, validate=False)

    @classmethod
    def random(cls, field, nrows: int, ncols: int, rng) -> "FieldMatrix":
        return cls(
            field,
            [[field.random_element(rng) for _ in range(ncols)] for _ in range(nrows)],
            validate=False,
        )

    def __getitem__(self, key) -> int:
        i, j = key
        return self.rows[i][j]

    def row(self, i: int) -> list[int]:
        return list(self.rows[i])

    def col(self, j: int) -> list[int]:
        return [r[j] for r in self.rows]

    def submatrix(self, row_idx: Iterable[int], col_idx: Iterable[int]) -> "FieldMatrix":
        col_idx = list(col_idx)
        return FieldMatrix(
            self.field,
            [[self.rows[i][j] for j in col_idx] for i in row_idx],
            validate=False,
        )

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix(
            self.field,
            [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
            validate=False,
        )

    def hstack(self, other: "FieldMatrix") -> "FieldMatrix":
        if other.nrows != self.nrows or other.field != self.field:
            raise ValueError("shape or field mismatch")
        return FieldMatrix(
            self.field,
            [self.rows[i] + other.rows[i] for i in range(self.nrows)],
            validate=False,
        )

    def mul(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.ncols != other.nrows or other.field != self.field:
            raise ValueError("shape or field mismatch")
        f = self.field
        out = [[0] * other.ncols for _ in range(self.nrows)]
        for i in range(self.nrows):
            row = self.rows[i]
            acc = out[i]
            for t in range(self.ncols):
                a = row[t]
                if a == 0:
                    continue
                orow = other.rows[t]
                for j in range(other.ncols):
                    b = orow[j]
                    if b:
                        acc[j] = f.add(acc[j], f.mul(a, b))
        return FieldMatrix(f, out, validate=False)

    def matvec(self, v: Sequence[int]) -> list[int]:
        if len(v) != self.ncols:
            raise ValueError("length mismatch")
        f = self.field
        out = []
        for row in self.rows:
            acc = 0
            for a, b in zip(row, v):
                if a and b:
                    acc = f.add(acc, f.mul(a, b))
            out.append(acc)
        return out

    def scale(self, c: int) -> "FieldMatrix":
        f = self.field
        return FieldMatrix(
            f, [[f.mul(c, x) for x in row] for row in self.rows], validate=False
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldMatrix)
            and other.field == self.field
            and other.rows == self.rows
        )

    def __repr__(self) -> str:
        return f"FieldMatrix({self.nrows}x{self.ncols} over {self.field!r})"

    # -- exact elimination ---------------------------------------------------

    def rref(self, with_transform: bool = True) -> "RrefResult":
        return rref_rows(self.rows, self.field, with_transform)

    def rank(self) -> int:
        return rank_rows(self.rows, self.field)

    def kernel(self) -> list[list[int]]:
        return kernel_rows(self.rows, self.field)

    def det(self) -> int:
        return det_rows(self.rows, self.field)

    def maximal_minors(self) -> dict[tuple[int, ...], int]:
        """All maximal minors, keyed by the sorted column subset.

        Requires nrows <= ncols; the minor at subset T is the determinant of
        the columns T taken in increasing order.
        """
        if self.nrows > self.ncols:
            raise ValueError("maximal minors need nrows <= ncols")
        out = {}
        for T in combinations(range(self.ncols), self.nrows):
            out[T] = det_rows([[r[j] for j in T] for r in self.rows], self.field)
        return out


@dataclass
class RrefResult:
    matrix: "FieldMatrix"
    rank: int
    pivots: list[int]
    transform: "FieldMatrix | None"


def rref_rows(rows: Sequence[Sequence[int]], field, with_transform: bool = True) -> RrefResult:
    """Reduced row echelon form by Gauss-Jordan elimination over any field.

    When ``with_transform`` is set, also returns an invertible matrix E with
    E * M equal to the echelon form.
    """
    f = field
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    t = [[1 if i == j else 0 for j in range(nrows)] for i in range(nrows)] if with_transform else None
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        if t is not None:
            t[r], t[p] = t[p], t[r]
        inv = f.inv(m[r][c])
        if inv != 1:
            m[r] = [f.mul(inv, x) for x in m[r]]
            if t is not None:
                t[r] = [f.mul(inv, x) for x in t[r]]
        for i in range(nrows):
            if i == r or m[i][c] == 0:
                continue
            fac = m[i][c]
            m[i] = [f.sub(x, f.mul(fac, y)) for x, y in zip(m[i], m[r])]
            if t is not None:
                t[i] = [f.sub(x, f.mul(fac, y)) for x, y in zip(t[i], t[r])]
        pivots.append(c)
        r += 1
    return RrefResult(
        FieldMatrix(f, m, validate=False),
        r,
        pivots,
        FieldMatrix(f, t, validate=False) if t is not None else None,
    )


# -- determinants ------------------------------------------------------------


def _det_cofactor(rows, field) -> int:
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    f = field
    if n == 2:
        return f.sub(f.mul(rows[0][0], rows[1][1]), f.mul(rows[0][1], rows[1][0]))
    acc = 0
    for j in range(n):
        a = rows[0][j]
        if a == 0:
            continue
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = f.mul(a, _det_cofactor(minor, f))
        acc = f.add(acc, term if j % 2 == 0 else f.neg(term))
    return acc


def _det_bareiss(rows, field) -> int:
    # fraction-free elimination; every division is exact in a field anyway
    f = field
    m = [list(r) for r in rows]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            p = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if p is None:
                return 0
            m[k], m[p] = m[p], m[k]
            sign = -sign
        inv_prev = f.inv(prev)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = f.sub(f.mul(m[i][j], m[k][k]), f.mul(m[i][k], m[k][j]))
                m[i][j] = f.mul(num, inv_prev)
            m[i][k] = 0
        prev = m[k][k]
    d = m[n - 1][n - 1]
    return d if sign == 1 else f.neg(d)


def det_rows(rows: Sequence[Sequence[int]], field) -> int:
    n = len(rows)
    if n and len(rows[0]) != n:
        raise ValueError("determinant of a non-square matrix")
    if n <= 4:
        return _det_cofactor([list(r) for r in rows], field)
    return _det_bareiss(rows, field)


# -- vectorized elimination kernels ------------------------------------------


def _prime_echelon(arr: np.ndarray, p: int, reduced: bool) -> tuple[np.ndarray, list[int]]:
    a = np.array(arr, dtype=np.int64) % p
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        if inv != 1:
            a[r] = (a[r] * inv) % p
        if reduced:
            targets = np.nonzero(a[:, c])[0]
            targets = targets[targets != r]
        else:
            targets = r + 1 + np.nonzero(a[r + 1 :, c])[0]
        if targets.size:
            a[targets] = (a[targets] - np.outer(a[targets, c], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def _zech_add(a: np.ndarray, b: np.ndarray, qm1: int, zech: np.ndarray) -> np.ndarray:
    # operands are logarithm codes with -1 standing for zero
    out = np.where(a == -1, b, a)
    both = (a != -1) & (b != -1)
    if np.any(both):
        av = a[both]
        bv = b[both]
        d = (bv - av) % qm1
        z = zech[d]
        res = np.where(z == -1, -1, (av + z) % qm1)
        out[both] = res
    return out


def _zech_echelon(codes: np.ndarray, field: ExtensionField, reduced: bool) -> tuple[np.ndarray, list[int]]:
    t = field.np_tables()
    assert t is not None
    qm1 = field.order - 1
    zech = t.zech
    log_m1 = int(t.log[field.neg(1)])
    a = codes.copy()
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c] != -1)[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        piv = int(a[r, c])
        if piv != 0:
            row_nz = a[r] != -1
            a[r, row_nz] = (a[r, row_nz] - piv) % qm1
        if reduced:
            targets = np.nonzero(a[:, c] != -1)[0]
            targets = targets[targets != r]
        else:
            targets = r + 1 + np.nonzero(a[r + 1 :, c] != -1)[0]
        if targets.size:
            fac = a[targets, c]
            prow = a[r]
            prod = np.where(
                prow[None, :] == -1,
                -1,
                (prow[None, :] + fac[:, None] + log_m1) % qm1,
            )
            a[targets] = _zech_add(a[targets], prod, qm1, zech)
        pivots.append(c)
        r += 1
    return a, pivots


def _to_codes(rows, field: ExtensionField) -> np.ndarray:
    t = field.np_tables()
    arr = np.asarray(rows, dtype=np.int64)
    return t.log[arr]


def _from_codes(codes: np.ndarray, field: ExtensionField) -> np.ndarray:
    t = field.np_tables()
    out = np.where(codes == -1, 0, t.exp[np.where(codes == -1, 0, codes)])
    return out


def rank_rows(rows, field) -> int:
    """Rank over the given field; vectorized when the field permits."""
    n = len(rows)
    if n == 0 or len(rows[0]) == 0:
        return 0
    if isinstance(field, PrimeField):
        _, pivots = _prime_echelon(np.asarray(rows, dtype=np.int64), field.q, reduced=False)
        return len(pivots)
    if isinstance(field, ExtensionField) and field.np_tables() is not None:
        _, pivots = _zech_echelon(_to_codes(rows, field), field, reduced=False)
        return len(pivots)
    return rref_rows(rows, field, with_transform=False).rank


def kernel_rows(rows, field) -> list[list[int]]:
    """Basis of the right kernel {v : M v = 0}, as token vectors."""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    if ncols == 0:
        return []
    if nrows == 0:
        return [
            [1 if j == i else 0 for j in range(ncols)] for i in range(ncols)
        ]
    if isinstance(field, PrimeField):
        a, pivots = _prime_echelon(np.asarray(rows, dtype=np.int64), field.q, reduced=True)
        rr = [[int(x) for x in a[i]] for i in range(len(pivots))]
    elif isinstance(field, ExtensionField) and field.np_tables() is not None:
        codes, pivots = _zech_echelon(_to_codes(rows, field), field, reduced=True)
        dense = _from_codes(codes, field)
        rr = [[int(x) for x in dense[i]] for i in range(len(pivots))]
    else:
        res = rref_rows(rows, field, with_transform=False)
        pivots = res.pivots
        rr = res.matrix.rows[: res.rank]
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = field.neg(rr[i][fc])
        basis.append(v)
    return basis


def solve_rows(rows, rhs: Sequence[int], field) -> list[int] | None:
    """One solution of M x = rhs, or None when the system is inconsistent."""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    if isinstance(field, PrimeField):
        a, pivots = _prime_echelon(np.asarray(aug, dtype=np.int64), field.q, reduced=True)
        rr = [[int(x) for x in a[i]] for i in range(len(pivots))]
    else:
        res = rref_rows(aug, field, with_transform=False)
        pivots = res.pivots
        rr = res.matrix.rows[: res.rank]
    if ncols in pivots:
        return None
    x = [0] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = rr[i][ncols]
    return x


def column_space_basis(mat: FieldMatrix) -> FieldMatrix:
    """Canonical basis of the column space: reduced echelon rows of the
    transpose, transposed back, so equal spaces compare equal."""
    res = rref_rows(mat.transpose().rows, mat.field, with_transform=False)
    rows = res.matrix.rows[: res.rank]
    return FieldMatrix(mat.field, rows, validate=False).transpose()
