"""Exact linear algebra: determinants against a permutation-sum oracle,
echelon form invariants, kernel and solve round trips."""

import random
from itertools import permutations

import pytest

from rslminors.fields import extension_field, prime_field
from rslminors.matrix import (
    FieldMatrix,
    column_space_basis,
    det_rows,
    kernel_rows,
    rank_rows,
    rref_rows,
    solve_rows,
)


def det_leibniz(rows, field):
    """Signed permutation sum, the textbook determinant definition."""
    n = len(rows)
    acc = field.zero
    for perm in permutations(range(n)):
        inv = sum(
            1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j]
        )
        v = field.one
        for i in range(n):
            v = field.mul(v, rows[i][perm[i]])
            if v == 0:
                break
        if v == 0:
            continue
        acc = field.add(acc, field.neg(v) if inv % 2 else v)
    return acc


FIELDS = [prime_field(2), prime_field(5), extension_field(2, 4), extension_field(3, 2)]


@pytest.mark.parametrize("field", FIELDS, ids=["gf2", "gf5", "gf16", "gf9"])
def test_det_matches_leibniz(field):
    rng = random.Random(11)
    for n in range(1, 5):
        for _ in range(15):
            m = FieldMatrix.random(field, n, n, rng)
            assert det_rows(m.rows, field) == det_leibniz(m.rows, field)


def test_det_multiplicative():
    rng = random.Random(5)
    for field in (prime_field(7), extension_field(2, 4)):
        for _ in range(20):
            a = FieldMatrix.random(field, 3, 3, rng)
            b = FieldMatrix.random(field, 3, 3, rng)
            assert a.mul(b).det() == field.mul(a.det(), b.det())


def test_det_zero_on_repeated_row():
    rng = random.Random(3)
    field = extension_field(3, 2)
    for _ in range(10):
        m = FieldMatrix.random(field, 3, 3, rng)
        m.rows[2] = list(m.rows[0])
        assert m.det() == 0
        assert m.rank() < 3


@pytest.mark.parametrize("field", FIELDS, ids=["gf2", "gf5", "gf16", "gf9"])
def test_rref_invariants(field):
    rng = random.Random(17)
    for nr, nc in ((3, 5), (5, 3), (4, 4), (1, 6)):
        for _ in range(10):
            m = FieldMatrix.random(field, nr, nc, rng)
            res = rref_rows(m.rows, field, with_transform=True)
            r = res.rank
            assert r == len(res.pivots)
            assert res.pivots == sorted(res.pivots)
            for i, pc in enumerate(res.pivots):
                assert res.matrix[i, pc] == 1
                for i2 in range(res.matrix.nrows):
                    if i2 != i:
                        assert res.matrix[i2, pc] == 0
                # nothing to the left of a pivot in its own row
                assert all(res.matrix[i, j] == 0 for j in range(pc))
            for i in range(r, nr):
                assert all(x == 0 for x in res.matrix.row(i))
            assert res.transform.mul(m).rows == res.matrix.rows
            assert rank_rows(m.rows, field) == r


@pytest.mark.parametrize("field", FIELDS, ids=["gf2", "gf5", "gf16", "gf9"])
def test_kernel_basis(field):
    rng = random.Random(23)
    for nr, nc in ((3, 6), (4, 4), (6, 3)):
        for _ in range(8):
            m = FieldMatrix.random(field, nr, nc, rng)
            basis = kernel_rows(m.rows, field)
            assert len(basis) == nc - rank_rows(m.rows, field)
            for v in basis:
                assert all(x == 0 for x in m.matvec(v))
            if basis:
                assert rank_rows(basis, field) == len(basis)


@pytest.mark.parametrize("field", FIELDS, ids=["gf2", "gf5", "gf16", "gf9"])
def test_solve_rows(field):
    rng = random.Random(31)
    for _ in range(10):
        m = FieldMatrix.random(field, 4, 3, rng)
        x0 = [field.random_element(rng) for _ in range(3)]
        rhs = m.matvec(x0)
        x = solve_rows(m.rows, rhs, field)
        assert x is not None
        assert m.matvec(x) == rhs
    # an inconsistent system: 0 x = 1
    assert solve_rows([[0, 0]], [1], field) is None


def test_maximal_minors_match_oracle():
    rng = random.Random(41)
    field = prime_field(3)
    m = FieldMatrix.random(field, 2, 4, rng)
    minors = m.maximal_minors()
    assert sorted(minors) == [(i, j) for i in range(4) for j in range(i + 1, 4)]
    for (i, j), v in minors.items():
        sub = [[row[i], row[j]] for row in m.rows]
        assert v == det_leibniz(sub, field)
    tall = FieldMatrix.random(field, 3, 2, rng)
    with pytest.raises(ValueError):
        tall.maximal_minors()


def test_column_space_basis_canonical():
    rng = random.Random(47)
    field = prime_field(5)
    for _ in range(10):
        m = FieldMatrix.random(field, 4, 3, rng)
        # column operations preserve the span: scale and swap columns
        shuffled = FieldMatrix(
            field, [[field.mul(2, row[2]), row[0], row[1]] for row in m.rows]
        )
        b1 = column_space_basis(m)
        b2 = column_space_basis(shuffled)
        assert b1.rows == b2.rows
        assert b1.ncols == rank_rows(m.transpose().rows, field)


def test_matmul_identity_and_associativity():
    rng = random.Random(53)
    field = extension_field(2, 4)
    a = FieldMatrix.random(field, 2, 3, rng)
    b = FieldMatrix.random(field, 3, 4, rng)
    c = FieldMatrix.random(field, 4, 2, rng)
    assert a.mul(FieldMatrix.identity(field, 3)).rows == a.rows
    assert a.mul(b).mul(c).rows == a.mul(b.mul(c)).rows


def test_stack_slice_transpose_roundtrip():
    rng = random.Random(59)
    field = prime_field(3)
    a = FieldMatrix.random(field, 3, 2, rng)
    b = FieldMatrix.random(field, 3, 4, rng)
    h = a.hstack(b)
    assert h.ncols == 6
    assert h.submatrix(range(3), range(2)).rows == a.rows
    assert h.submatrix(range(3), range(2, 6)).rows == b.rows
    assert a.transpose().transpose().rows == a.rows
