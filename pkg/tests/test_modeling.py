"""Bilinear system construction checked against direct determinant
evaluation, the monomial order, Macaulay shapes and ranks, and the
structural relations."""

import io
import random
import re
from itertools import combinations
from math import comb

import pytest

from rslminors.estimator import count_Mb, count_Nb
from rslminors.fields import prime_field
from rslminors.instance import RslInstance, RslParams, check_assumption1, gen_instance
from rslminors.matrix import FieldMatrix, det_rows, rank_rows
from rslminors.modeling import (
    RankAssumptionError,
    build_QJ,
    build_macaulay,
    build_syzygies,
    build_system,
    apply_syzygy,
    dump_system,
    echelonize_tildeQ,
    grevlex_subkey,
    lambda_monomials,
    monomial_key,
    monomial_vector,
    syzygy_stack_rows,
    unfold_system,
)


def minor_direct(inst, J, w, lam_values, R):
    """Oracle: stack the combined word over R, multiply by H^T, take the
    determinant of the rows J directly."""
    p = inst.params
    ext = inst.field
    word = [ext.zero] * p.n
    for i in range(p.N):
        y = inst.y_vector(i)
        for t in range(p.n):
            if lam_values[i] and y[t]:
                word[t] = ext.add(word[t], ext.mul(lam_values[i], y[t]))
    stacked = [word] + [list(row) for row in R.rows]
    prod = []
    for row in stacked:
        out_row = []
        for u in range(p.n - p.k):
            acc = ext.zero
            for t in range(p.n):
                if row[t] and inst.H[u, t]:
                    acc = ext.add(acc, ext.mul(row[t], inst.H[u, t]))
            out_row.append(acc)
        prod.append(out_row)
    return det_rows([[prod[v][j - 1] for j in J] for v in range(w + 1)], ext)


def random_point(p, w, rng):
    fq = prime_field(p.q)
    lam = [rng.randrange(p.q) for _ in range(p.N)]
    R = FieldMatrix.random(fq, w, p.n, rng)
    rT = {
        tuple(t + 1 for t in T): det_rows([[row[t] for t in T] for row in R.rows], fq)
        for T in combinations(range(p.n), w)
    }
    return lam, R, rT


@pytest.mark.parametrize("q", [2, 3])
def test_minor_equations_match_direct_determinants(q):
    rng = random.Random(q)
    p = RslParams(q=q, m=5, n=8, k=4, r=3, N=4)
    for trial in range(12):
        inst, _ = gen_instance(p, 400 + trial)
        w = rng.choice([1, 2])
        nk = p.n - p.k
        J = tuple(sorted(rng.sample(range(1, nk + 1), w + 1)))
        eq = build_QJ(inst, J, w)
        for _ in range(3):
            lam, R, rT = random_point(p, w, rng)
            assert eq.evaluate(lam, rT) == minor_direct(inst, J, w, lam, R)


def test_build_qj_validation():
    inst, _ = gen_instance(RslParams(q=2, m=6, n=8, k=4, r=2, N=3), 0)
    with pytest.raises(ValueError):
        build_QJ(inst, (1, 2), 2)  # J too small for w+1
    with pytest.raises(ValueError):
        build_QJ(inst, (1, 2, 9), 2)  # row index out of range
    with pytest.raises(ValueError):
        build_QJ(inst, (1, 2, 3), 3)  # w beyond r
    with pytest.raises(ValueError):
        build_system(inst, 4)  # w must stay below n-k


def test_monomial_order_frozen():
    # ascending within one minor: grevlex on the lambda part, lambda_1 largest
    T = (7, 9)
    monos = [
        ((3, 3), T), ((2, 3), T), ((1, 3), T), ((2, 2), T), ((1, 2), T), ((1, 1), T)
    ]
    keys = [monomial_key(mn, 3) for mn in monos]
    assert keys == sorted(keys)
    # the minor index dominates the equal-degree comparison
    lo = monomial_key(((1, 1), (1, 2)), 3)
    hi = monomial_key(((3, 3), (1, 3)), 3)
    assert lo < hi
    # total lambda-degree dominates everything
    assert monomial_key(((3,), (8, 9)), 3) < monomial_key(((3, 3), (1, 2)), 3)
    assert grevlex_subkey((1, 3), 3) == (-1, 0, -1)


def test_lambda_monomials():
    assert lambda_monomials(3, 2, squarefree=False) == [
        (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)
    ]
    assert lambda_monomials(3, 2, squarefree=True) == [(1, 2), (1, 3), (2, 3)]
    assert lambda_monomials(4, 0, squarefree=True) == [()]


FROZEN = RslParams(q=2, m=6, n=10, k=6, r=2, N=5)


def frozen_instance():
    inst, wit = gen_instance(FROZEN, 0)
    assert check_assumption1(inst, 2)
    return inst, wit


def test_macaulay_exact_shapes_and_ranks():
    inst, _ = frozen_instance()
    system = build_system(inst, 2)
    assert len(system.equations) == comb(4, 3)
    expected_rank = {1: 4, 2: 19, 3: 55}
    for b in (1, 2, 3):
        mac = build_macaulay(system, b, "exact")
        n_rows = comb(4, 3) * comb(5 + b - 2, b - 1)
        assert mac.shape == (n_rows, count_Mb(10, 2, 5, b, "general"))
        assert mac.rank() == expected_rank[b] == count_Nb(10, 6, 2, 5, b)


def test_macaulay_cumulative_unfolded_ranks():
    inst, _ = frozen_instance()
    unfolded = unfold_system(build_system(inst, 2))
    assert len(unfolded.equations) == comb(4, 3) * 6
    expected = {1: 24, 2: 138}
    for b in (1, 2):
        mac = build_macaulay(unfolded, b, "cumulative")
        assert mac.shape[1] == count_Mb(10, 2, 5, b, "cumulative_f2")
        n_leq = sum(count_Nb(10, 6, 2, 5, j, f2=True) for j in range(1, b + 1))
        m_leq = count_Mb(10, 2, 5, b, "cumulative_f2")
        assert mac.rank() == expected[b] == min(6 * n_leq, m_leq - 1)


def test_macaulay_apply_matches_equation_evaluation():
    rng = random.Random(61)
    for q in (2, 3):
        p = RslParams(q=q, m=5, n=8, k=4, r=2, N=3)
        inst, _ = gen_instance(p, 21)
        system = build_system(inst, 2)
        for mode, b in (("exact", 2), ("cumulative", 1)):
            if mode == "cumulative" and q == 2:
                sys_b = unfold_system(system)
            elif mode == "cumulative":
                continue  # q=3 cumulative covered below with b < q
            else:
                sys_b = system
            mac = build_macaulay(sys_b, b, mode)
            for _ in range(5):
                lam, _, rT = random_point(p, 2, rng)
                vec = monomial_vector(mac.col_labels, lam, rT, mac.field)
                got = mac.apply(vec)
                f = mac.field
                for out, (mu, J), eq in zip(
                    got,
                    mac.row_labels,
                    (e for e in sys_b.equations for _ in range(len(mac.rows) // len(sys_b.equations))),
                ):
                    mult = f.one
                    for i in mu:
                        mult = f.mul(mult, lam[i - 1])
                    assert out == f.mul(mult, eq.evaluate(lam, rT))


def test_macaulay_cumulative_q3_degree_bound():
    p = RslParams(q=3, m=5, n=8, k=4, r=2, N=3)
    inst, _ = gen_instance(p, 2)
    system = unfold_system(build_system(inst, 2))
    mac = build_macaulay(system, 2, "cumulative")
    assert mac.shape[0] == len(system.equations) * (1 + 3)
    with pytest.raises(ValueError):
        build_macaulay(system, 3, "cumulative")
    with pytest.raises(ValueError):
        build_macaulay(system, 0, "exact")
    with pytest.raises(ValueError):
        build_macaulay(system, 1, "sparse")


def test_echelonized_leads_distinct_and_recorded():
    inst, _ = frozen_instance()
    system = build_system(inst, 2)
    transformed, leads = echelonize_tildeQ(system, inst, 2)
    actual = [eq.leading_monomial(system.n_lambda) for eq in transformed.equations]
    assert actual == leads
    assert len(set(leads)) == len(leads) == comb(4, 3)
    # every lead is a single lambda times the minor named by J minus its head
    for eq, ((mu, T)) in zip(transformed.equations, leads):
        assert len(mu) == 1
        assert T == tuple(t + FROZEN.k for t in eq.J[1:])


def test_echelonization_needs_full_rank_pivot_block():
    inst, _ = frozen_instance()
    bad_S = FieldMatrix(inst.field, [inst.S.row(0)] * inst.S.nrows)
    bad = RslInstance(params=inst.params, field=inst.field, H=inst.H, S=bad_S)
    system = build_system(bad, 2)
    with pytest.raises(RankAssumptionError):
        echelonize_tildeQ(system, bad, 2)


def test_unfold_system_preserves_zero_sets():
    rng = random.Random(71)
    p = RslParams(q=3, m=4, n=8, k=4, r=2, N=3)
    inst, _ = gen_instance(p, 31)
    system = build_system(inst, 2)
    unfolded = unfold_system(system)
    assert len(unfolded.equations) == len(system.equations) * p.m
    ext = inst.field
    for _ in range(10):
        lam, _, rT = random_point(p, 2, rng)
        for idx, eq in enumerate(system.equations):
            value = eq.evaluate(lam, rT)
            digits = ext.unfold(value)
            for jd in range(p.m):
                sub = unfolded.equations[idx * p.m + jd]
                assert sub.evaluate(lam, rT) == digits[jd]


def test_syzygies_annihilate_and_are_independent():
    # w=1 leaves several relations: one per (w+2)-subset of the rows
    inst, _ = frozen_instance()
    for w, expect in ((1, comb(4, 3)), (2, comb(4, 4))):
        system = build_system(inst, w)
        syzygies = build_syzygies(inst, w)
        assert len(syzygies) == expect
        for syz in syzygies:
            assert apply_syzygy(syz, system) == {}
        stack = syzygy_stack_rows(syzygies, system)
        assert rank_rows(stack, inst.field) == expect
    with pytest.raises(ValueError):
        build_syzygies(inst, 3)  # w + 2 exceeds n - k


def test_dump_system_format():
    inst, _ = frozen_instance()
    system = build_system(inst, 2)
    buf = io.StringIO()
    dump_system(system, buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == len(system.equations)
    term = r"\d+(\*l\d+(\^\d+)?)*\*r\{\d+(,\d+)*\}"
    pattern = re.compile(rf"^J=\d+(,\d+)* : ({term}( \+ {term})*|0)$")
    for line in lines:
        assert pattern.match(line), line
