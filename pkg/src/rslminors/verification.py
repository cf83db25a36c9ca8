"""Experimental confirmation drivers for the rank laws and statistics.

Each suite generates fresh instances from a fixed-seed family, runs the
corresponding modeling or counting check, and returns a report dict.  Rank
law suites (thm1, thm2, lemma3) demand 100% agreement and serialize any
offending instance to a quarantine file so the failure can be replayed.
"""

from __future__ import annotations

import math
import os
import random
import time
from typing import Optional

from .estimator import codeword_stats, count_Mb, count_Nb
from .fields import prime_field
from .instance import (
    RslInstance,
    RslParams,
    SecretWitness,
    check_assumption1,
    gen_instance,
)
from .instance_io import save_instance
from .matrix import kernel_rows, rank_rows
from .modeling import (
    apply_syzygy,
    build_macaulay,
    build_syzygies,
    build_system,
    echelonize_tildeQ,
    syzygy_stack_rows,
    unfold_system,
)

SUITES = ("assumption1", "thm1", "thm2", "lemma3", "assumption2", "prop1")


def sample_family(rng: random.Random, q: int) -> tuple[RslParams, int]:
    """Small random instance shape: 6 <= m <= 12, 8 <= n <= 14 (<= 11 when
    w = 3 to bound Macaulay width at b = 3), w + 2 <= n - k <= w + 3,
    N in {n-k-w, n-k-w+1}."""
    w = rng.choice([1, 2, 3])
    nk = w + rng.choice([2, 3])
    n_hi = 11 if w == 3 else 14
    n = rng.randrange(max(8, nk + 2), n_hi + 1)
    k = n - nk
    m = rng.randrange(6, 13)
    r = w + rng.choice([0, 1, 2])
    N = nk - w + rng.choice([0, 1])
    return RslParams(q=q, m=m, n=n, k=k, r=r, N=N), w


def _gen_passing(
    params: RslParams, w: int, seed: int, max_regen: int = 25
) -> tuple[RslInstance, SecretWitness, int, int]:
    """Generate an instance satisfying the full-rank syndrome assumption,
    bumping the seed on failure.  Returns (inst, witness, seed_used, retries)."""
    s = seed
    for retry in range(max_regen + 1):
        inst, wit = gen_instance(params, s)
        if check_assumption1(inst, w):
            return inst, wit, s, retry
        s += 1
    raise RuntimeError(
        f"no instance satisfying the rank assumption after {max_regen} retries "
        f"(params {params})"
    )


def _quarantine(
    inst: RslInstance,
    witness: Optional[SecretWitness],
    suite: str,
    trial: int,
    quarantine_dir: Optional[str],
) -> Optional[str]:
    if quarantine_dir is None:
        return None
    os.makedirs(quarantine_dir, exist_ok=True)
    path = os.path.join(quarantine_dir, f"quarantine_{suite}_{trial}.rsl")
    save_instance(path, inst, witness)
    return path


def run_assumption1(trials: int = 50, qs=(2, 3), seed: int = 0) -> dict:
    """Fraction of fresh instances whose top n-k-w syndrome rows have full
    rank.  Failures are expected to be rare (probability about q^-m per
    missing dimension); the suite passes at a 90% rate."""
    started = time.monotonic()
    rng = random.Random(seed)
    passes = 0
    total = 0
    failures = []
    for q in qs:
        for t in range(trials):
            params, w = sample_family(rng, q)
            inst, _ = gen_instance(params, seed=rng.randrange(2**30))
            total += 1
            if check_assumption1(inst, w):
                passes += 1
            else:
                failures.append({"trial": t, "q": q, "params": vars(params) | {"w": w}})
    rate = passes / total if total else 0.0
    return {
        "suite": "assumption1",
        "trials": total,
        "passes": passes,
        "rate": rate,
        "ok": rate >= 0.9,
        "failures": failures,
        "config": {"trials": trials, "qs": list(qs), "seed": seed},
        "elapsed_s": round(time.monotonic() - started, 3),
    }


def run_thm1(
    trials: int = 20,
    qs=(2, 3),
    seed: int = 0,
    quarantine_dir: Optional[str] = None,
) -> dict:
    """Rank of the minor system over F_{q^m} must equal C(n-k, w+1), and the
    echelonized system must have pairwise-distinct leading monomials."""
    started = time.monotonic()
    rng = random.Random(seed)
    passes = 0
    total = 0
    failures = []
    for q in qs:
        for t in range(trials):
            params, w = sample_family(rng, q)
            inst, wit, used_seed, _ = _gen_passing(params, w, rng.randrange(2**30))
            system = build_system(inst, w)
            mac = build_macaulay(system, 1, "exact")
            got = mac.rank()
            want = math.comb(params.n - params.k, w + 1)
            ech, leads = echelonize_tildeQ(system, inst, w)
            actual_leads = [
                eq.leading_monomial(params.N) for eq in ech.equations if eq.terms
            ]
            leads_ok = (
                len(actual_leads) == want
                and len(set(actual_leads)) == want
                and actual_leads == leads
            )
            total += 1
            if got == want and leads_ok:
                passes += 1
            else:
                failures.append(
                    {
                        "trial": t,
                        "q": q,
                        "params": vars(params) | {"w": w, "seed": used_seed},
                        "rank": got,
                        "expected": want,
                        "leads_distinct": leads_ok,
                        "quarantine": _quarantine(inst, wit, "thm1", total, quarantine_dir),
                    }
                )
    return {
        "suite": "thm1",
        "trials": total,
        "passes": passes,
        "ok": passes == total,
        "failures": failures,
        "config": {"trials": trials, "qs": list(qs), "seed": seed},
        "elapsed_s": round(time.monotonic() - started, 3),
    }


def run_thm2(
    trials: int = 20,
    qs=(2, 3),
    bs=(2, 3),
    seed: int = 0,
    quarantine_dir: Optional[str] = None,
) -> dict:
    """Rank of the degree-(b,1) Macaulay matrix over F_{q^m} must equal the
    closed-form count of independent equations, for every requested b."""
    started = time.monotonic()
    rng = random.Random(seed)
    passes = 0
    total = 0
    failures = []
    for q in qs:
        for t in range(trials):
            params, w = sample_family(rng, q)
            inst, wit, used_seed, _ = _gen_passing(params, w, rng.randrange(2**30))
            system = build_system(inst, w)
            for b in bs:
                mac = build_macaulay(system, b, "exact")
                got = mac.rank()
                want = count_Nb(params.n, params.k, w, params.N, b)
                total += 1
                if got == want:
                    passes += 1
                else:
                    failures.append(
                        {
                            "trial": t,
                            "q": q,
                            "b": b,
                            "params": vars(params) | {"w": w, "seed": used_seed},
                            "rank": got,
                            "expected": want,
                            "quarantine": _quarantine(
                                inst, wit, "thm2", total, quarantine_dir
                            ),
                        }
                    )
    return {
        "suite": "thm2",
        "trials": total,
        "passes": passes,
        "ok": passes == total,
        "failures": failures,
        "config": {"trials": trials, "qs": list(qs), "bs": list(bs), "seed": seed},
        "elapsed_s": round(time.monotonic() - started, 3),
    }


def run_lemma3(
    trials: int = 20,
    qs=(2, 3),
    seed: int = 0,
    quarantine_dir: Optional[str] = None,
) -> dict:
    """Every constructed relation must annihilate the minor system
    symbolically, and the stacked relation coefficients must have rank
    C(n-k, w+2) when the syndrome rows are generic."""
    started = time.monotonic()
    rng = random.Random(seed)
    passes = 0
    total = 0
    failures = []
    for q in qs:
        for t in range(trials):
            params, w = sample_family(rng, q)
            nk = params.n - params.k
            inst, wit, used_seed, _ = _gen_passing(params, w, rng.randrange(2**30))
            system = build_system(inst, w)
            syzygies = build_syzygies(inst, w)
            residues = [len(apply_syzygy(s, system)) for s in syzygies]
            stack = syzygy_stack_rows(syzygies, system)
            rank = rank_rows(stack, inst.field)
            want = math.comb(nk, w + 2)
            total += 1
            if all(rv == 0 for rv in residues) and rank == want:
                passes += 1
            else:
                failures.append(
                    {
                        "trial": t,
                        "q": q,
                        "params": vars(params) | {"w": w, "seed": used_seed},
                        "nonzero_residues": sum(1 for rv in residues if rv),
                        "stack_rank": rank,
                        "expected_rank": want,
                        "quarantine": _quarantine(
                            inst, wit, "lemma3", total, quarantine_dir
                        ),
                    }
                )
    return {
        "suite": "lemma3",
        "trials": total,
        "passes": passes,
        "ok": passes == total,
        "failures": failures,
        "config": {"trials": trials, "qs": list(qs), "seed": seed},
        "elapsed_s": round(time.monotonic() - started, 3),
    }


def _sample_rank_brackets(rng: random.Random, bs) -> tuple[RslParams, int]:
    """Draw a q=2 shape inside the validity domain of the cumulative rank
    formula: w = r >= 2, N at least n - k - w + 1 so the degree sum
    saturates, and every tested degree sitting below the solving threshold
    by a 2^N margin so the planted solution space never caps the rank."""
    while True:
        w = rng.choice([2, 3])
        nk = w + rng.choice([2, 3])
        N = nk - w + 1 + rng.randrange(3)
        k = rng.randrange(4, 9)
        n = nk + k
        m = rng.randrange(6, 13)
        ok = True
        for b in bs:
            n_leq = sum(
                count_Nb(n, k, w, N, j, f2=True) for j in range(1, b + 1)
            )
            m_leq = count_Mb(n, w, N, b, variant="cumulative_f2")
            if m * n_leq > m_leq - 2**N:
                ok = False
                break
        if ok:
            return RslParams(q=2, m=m, n=n, k=k, r=w, N=N), w


def run_assumption2(
    trials: int = 50, bs=(1, 2), seed: int = 0, threshold: float = 0.95
) -> dict:
    """Over F_2, the unfolded cumulative Macaulay rank should equal
    min(m * N_leq_b, M_leq_b - 1) for most random instances drawn from
    the formula's validity domain."""
    started = time.monotonic()
    rng = random.Random(seed)
    passes = 0
    total = 0
    failures = []
    for t in range(trials):
        params, w = _sample_rank_brackets(rng, bs)
        inst, _ = gen_instance(params, seed=rng.randrange(2**30))
        system = build_system(inst, w)
        unfolded = unfold_system(system)
        for b in bs:
            mac = build_macaulay(unfolded, b, "cumulative")
            got = mac.rank()
            n_leq = sum(
                count_Nb(params.n, params.k, w, params.N, j, f2=True)
                for j in range(1, b + 1)
            )
            m_leq = count_Mb(params.n, w, params.N, b, variant="cumulative_f2")
            want = min(params.m * n_leq, m_leq - 1)
            total += 1
            if got == want:
                passes += 1
            else:
                failures.append(
                    {
                        "trial": t,
                        "b": b,
                        "params": vars(params) | {"w": w},
                        "rank": got,
                        "expected": want,
                    }
                )
    rate = passes / total if total else 0.0
    return {
        "suite": "assumption2",
        "trials": total,
        "passes": passes,
        "rate": rate,
        "ok": rate >= threshold,
        "failures": failures,
        "config": {"trials": trials, "bs": list(bs), "seed": seed, "threshold": threshold},
        "elapsed_s": round(time.monotonic() - started, 3),
    }


def _tiny_rank(rows: list[list[int]], q: int) -> int:
    """Row rank over F_q by plain elimination; meant for very small matrices."""
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    rank = 0
    col = 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] % q), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], q - 2, q) if q > 2 else 1
        for i in range(len(rows)):
            if i != rank and rows[i][col] % q:
                f = (rows[i][col] * inv) % q
                rows[i] = [(a - f * bv) % q for a, bv in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def monte_carlo_codewords(
    q: int, r: int, n: int, N: int, w: int, trials: int, seed: int = 0
) -> dict:
    """Empirical mean of the number of rank-w words in a random code of
    dimension >= N, drawn as the kernel of a uniform (rn - N) x rn parity
    check, compared against the predicted mean and standard error."""
    rng = random.Random(seed)
    fq = prime_field(q)
    rn = r * n
    n_parity = rn - N
    count_total = 0
    for _ in range(trials):
        parity = [[rng.randrange(q) for _ in range(rn)] for _ in range(n_parity)]
        basis = kernel_rows(parity, fq)
        d = len(basis)
        count = 0
        # enumerate all nonzero combinations of the kernel basis
        for idx in range(1, q**d):
            coeffs = []
            x = idx
            for _ in range(d):
                coeffs.append(x % q)
                x //= q
            word = [0] * rn
            for c, vec in zip(coeffs, basis):
                if c:
                    for j, vj in enumerate(vec):
                        if vj:
                            word[j] = fq.add(word[j], fq.mul(c, vj))
            mat = [word[i * n : (i + 1) * n] for i in range(r)]
            if _tiny_rank(mat, q) == w:
                count += 1
        count_total += count
    stats = codeword_stats(q, r, n, N, w)
    mean = count_total / trials
    expected = float(stats.expectation)
    se = math.sqrt(float(stats.variance) / trials)
    z = abs(mean - expected) / se if se > 0 else 0.0
    return {
        "q": q,
        "r": r,
        "n": n,
        "N": N,
        "w": w,
        "trials": trials,
        "mean": mean,
        "expected": expected,
        "variance": float(stats.variance),
        "stderr": se,
        "z": z,
        "ok": z <= 3.0,
    }


def run_prop1(trials: int = 2000, seed: int = 0) -> dict:
    """Monte Carlo check of the codeword count statistics on the fixed grid
    q=2, r=2, n=4, N in {2,3}, w in {1,2}."""
    started = time.monotonic()
    cells = []
    ok = True
    for i, (N, w) in enumerate([(2, 1), (2, 2), (3, 1), (3, 2)]):
        cell = monte_carlo_codewords(2, 2, 4, N, w, trials, seed=seed + i)
        cells.append(cell)
        ok = ok and cell["ok"]
    return {
        "suite": "prop1",
        "trials": trials,
        "cells": cells,
        "ok": ok,
        "failures": [c for c in cells if not c["ok"]],
        "config": {"trials": trials, "seed": seed},
        "elapsed_s": round(time.monotonic() - started, 3),
    }


def run_suite(name: str, **kwargs) -> dict:
    if name == "assumption1":
        return run_assumption1(**kwargs)
    if name == "thm1":
        return run_thm1(**kwargs)
    if name == "thm2":
        return run_thm2(**kwargs)
    if name == "lemma3":
        return run_lemma3(**kwargs)
    if name == "assumption2":
        return run_assumption2(**kwargs)
    if name == "prop1":
        return run_prop1(**kwargs)
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
