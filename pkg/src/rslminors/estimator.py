"""Closed-form counting, solvability and bit-cost estimation.

Everything here is exact big-integer combinatorics until the final log2.  The
counts mirror the structure of the equation system: N_b is the number of
independent rows of the Macaulay matrix at bi-degree (b,1), M_b the number of
its columns, with _f2 variants for squarefree lambda-monomials over F_2 and
cumulative variants summing degrees 1..b.  Linearization is feasible once the
independent rows reach the column count minus one (the solution is projective).

Cost calibration: Strassen-style elimination is charged (M_leq_b)^omega with
omega = 2.807 after discarding surplus rows, and Wiedemann is charged
3 * row_weight * M_leq_b^2 with row_weight = N' * C(k-a+1+w, w); the reported
cost is the cheaper of the two.  The hybrid knobs (alpha_C columns of R,
alpha_lambda lambda-variables fixed by exhaustive search) multiply the cost by
q^(w*alpha_C + alpha_lambda) and shrink the corresponding parameter; this is
one possible reading of the hybrid approach (interpretation A) and is off by
default.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, asdict
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .counting import sphere_size
from .instance import RslParams, StrategyParams, strategy_params

OMEGA = 2.807


def _comb(n: int, k: int) -> int:
    if n < 0 or k < 0:
        return 0
    return math.comb(n, k)


@lru_cache(maxsize=None)
def count_Nb(n: int, k: int, w: int, N: int, b: int, f2: bool = False) -> int:
    """Independent equations at exact bi-degree (b,1).

    Double sum over the echelon shape: for each distance d from the top of the
    minor index range, C(n-k-d, w-1) index sets contribute, each with one
    multiplier monomial pool per previously used equation.  The inner sum over
    j collapses by the hockey-stick identity; f2 restricts multipliers to
    squarefree monomials.
    """
    if b < 1 or w < 1 or n - k <= w:
        raise ValueError(f"need b >= 1, w >= 1, n-k > w, got n-k={n - k}, w={w}, b={b}")
    nk = n - k
    total = 0
    for d in range(2, nk - w + 2):
        outer = _comb(nk - d, w - 1)
        if outer == 0:
            continue
        if b == 1:
            inner = min(d - 1, N if not f2 else N + 1)
        elif f2:
            inner = _comb(N + 1, b) - _comb(N - d + 2, b)
        else:
            inner = _comb(N + b - 1, b) - _comb(N - d + b, b)
        total += outer * inner
    return total


@lru_cache(maxsize=None)
def count_Mb(n_eff: int, w: int, N_eff: int, b: int, variant: str = "general") -> int:
    """Macaulay column count; parameters already strategy-adjusted."""
    base = _comb(n_eff, w)
    if variant == "general":
        return base * _comb(N_eff + b - 1, b)
    if variant == "f2":
        return base * _comb(N_eff, b)
    if variant == "cumulative_f2":
        return base * sum(_comb(N_eff, j) for j in range(1, b + 1))
    raise ValueError(f"unknown variant {variant!r}")


@dataclass(frozen=True)
class CountSet:
    """All row/column counts for one strategy-adjusted parameter point."""

    n_eff: int
    k_eff: int
    w: int
    N_eff: int
    a: int
    b: int
    N_b: int
    M_b: int
    N_b_f2: int
    M_b_f2: int
    N_leq_b_f2: int
    M_leq_b_f2: int


def make_counts(n_eff: int, k_eff: int, w: int, N_eff: int, a: int, b: int) -> CountSet:
    return CountSet(
        n_eff=n_eff,
        k_eff=k_eff,
        w=w,
        N_eff=N_eff,
        a=a,
        b=b,
        N_b=count_Nb(n_eff, k_eff, w, N_eff, b),
        M_b=count_Mb(n_eff, w, N_eff, b, "general"),
        N_b_f2=count_Nb(n_eff, k_eff, w, N_eff, b, f2=True),
        M_b_f2=count_Mb(n_eff, w, N_eff, b, "f2"),
        N_leq_b_f2=sum(count_Nb(n_eff, k_eff, w, N_eff, j, f2=True) for j in range(1, b + 1)),
        M_leq_b_f2=count_Mb(n_eff, w, N_eff, b, "cumulative_f2"),
    )


def _counts_for(params: RslParams, strategy: StrategyParams, b: int,
                alpha_C: int = 0, alpha_lambda: int = 0) -> CountSet:
    n_eff = params.n - strategy.a - alpha_C
    k_eff = params.k - strategy.a - alpha_C
    return make_counts(n_eff, k_eff, strategy.w, strategy.N_prime - alpha_lambda, strategy.a, b)


def is_feasible(params: RslParams, counts: CountSet, b: int) -> bool:
    """Linearization condition: enough independent rows to leave a line."""
    if params.q == 2:
        return params.m * counts.N_leq_b_f2 >= counts.M_leq_b_f2 - 1
    if b >= params.q:
        return False
    return params.m * counts.N_b >= counts.M_b - 1


def min_b(
    params: RslParams,
    strategy: StrategyParams,
    b_max: int = 8,
    alpha_C: int = 0,
    alpha_lambda: int = 0,
) -> Optional[tuple[int, CountSet]]:
    """Smallest b with a solvable linearization, or None up to b_max."""
    for b in range(1, b_max + 1):
        counts = _counts_for(params, strategy, b, alpha_C, alpha_lambda)
        if is_feasible(params, counts, b):
            return b, counts
    return None


@dataclass(frozen=True)
class CostReport:
    q: int
    m: int
    n: int
    k: int
    r: int
    N: int
    delta: int
    w: int
    a: int
    b: int
    alpha_C: int
    alpha_lambda: int
    algorithm: str
    log2_strassen: float
    log2_wiedemann: float
    log2_cost: float
    feasible: bool
    counts: CountSet
    omega: float

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "w": self.w,
            "a": self.a,
            "b": self.b,
            "alpha_C": self.alpha_C,
            "alpha_lambda": self.alpha_lambda,
            "algorithm": self.algorithm,
            "log2_cost": self.log2_cost,
            "feasible": self.feasible,
            "N_leq_b": self.counts.N_leq_b_f2 if self.q == 2 else self.counts.N_b,
            "M_leq_b": self.counts.M_leq_b_f2 if self.q == 2 else self.counts.M_b,
        }


def bit_cost(
    params: RslParams,
    strategy: StrategyParams,
    b: int,
    algorithm: Optional[str] = None,
    counts: Optional[CountSet] = None,
    alpha_C: int = 0,
    alpha_lambda: int = 0,
) -> CostReport:
    """Bit cost of solving at degree b.

    With algorithm=None the report carries the cheaper of the dense
    (strassen) and sparse (wiedemann) solve costs; naming an algorithm
    forces log2_cost to that solver's estimate.
    """
    if algorithm not in (None, "strassen", "wiedemann"):
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if counts is None:
        counts = _counts_for(params, strategy, b, alpha_C, alpha_lambda)
    M = counts.M_leq_b_f2 if params.q == 2 else counts.M_b
    M = max(M, 2)
    guess_bits = (strategy.w * alpha_C + alpha_lambda) * math.log2(params.q)
    log2_M = math.log2(M)
    row_weight = counts.N_eff * _comb(counts.k_eff + 1 + strategy.w, strategy.w)
    strassen = OMEGA * log2_M + guess_bits
    wiedemann = math.log2(3 * max(row_weight, 1)) + 2.0 * log2_M + guess_bits
    if algorithm is None:
        algorithm = "strassen" if strassen <= wiedemann else "wiedemann"
    return CostReport(
        q=params.q,
        m=params.m,
        n=params.n,
        k=params.k,
        r=params.r,
        N=params.N,
        delta=strategy.delta,
        w=strategy.w,
        a=strategy.a,
        b=b,
        alpha_C=alpha_C,
        alpha_lambda=alpha_lambda,
        algorithm=algorithm,
        log2_strassen=strassen,
        log2_wiedemann=wiedemann,
        log2_cost=strassen if algorithm == "strassen" else wiedemann,
        feasible=is_feasible(params, counts, b),
        counts=counts,
        omega=OMEGA,
    )


@dataclass(frozen=True)
class CodewordStats:
    """Moments of the number of weight-w words in the error-span code."""

    q: int
    r: int
    n: int
    N: int
    w: int
    sphere: int
    expectation: Fraction
    variance: Fraction
    delta: int
    feasible: bool


def codeword_stats(q: int, r: int, n: int, N: int, w: int) -> CodewordStats:
    if not 0 <= w <= r:
        raise ValueError(f"need 0 <= w <= r, got w={w}")
    S = sphere_size(w, r, n, q)
    scale = Fraction(q) ** (N - r * n)
    expectation = S * scale
    variance = S * (q - 1) * (scale - scale * scale)
    delta = r - w
    return CodewordStats(
        q=q,
        r=r,
        n=n,
        N=N,
        w=w,
        sphere=S,
        expectation=expectation,
        variance=variance,
        delta=delta,
        feasible=N >= delta * (n - r + delta),
    )


def delta_max(params: RslParams) -> int:
    """Largest weight reduction delta = r - w that still leaves words of
    weight w in the error-span code in expectation."""
    best = 0
    for delta in range(1, params.r):
        if params.N >= delta * (params.n - params.r + delta):
            best = delta
    return best


@dataclass(frozen=True)
class GhptCost:
    e_minus: int
    e_plus: int
    log2_cost: float
    degenerate: bool


def ghpt_cost(m: int, n: int, k: int, r: int, N: int, w: int, q: int = 2) -> GhptCost:
    """Combinatorial baseline: q^min(e-, e+) with K = km + N."""
    K = k * m + N
    t = N // n
    T = K // n
    e_minus = (w - t) * (T - t)
    e_plus = (w - t - 1) * (T - t - 1) + n * (T - t - 1)
    best = min(e_minus, e_plus)
    return GhptCost(
        e_minus=e_minus,
        e_plus=e_plus,
        log2_cost=max(best, 0) * math.log2(q),
        degenerate=best <= 0,
    )


@dataclass
class OptimizeResult:
    best: Optional[CostReport]
    rows: list[CostReport]

    def best_for_delta(self, delta: int) -> Optional[CostReport]:
        picks = [r for r in self.rows if r.delta == delta]
        return min(picks, key=lambda r: r.log2_cost) if picks else None


def optimize(
    params: RslParams,
    b_max: int = 5,
    deltas: Optional[list[int]] = None,
    alpha_C: int = 0,
    alpha_lambda: int = 0,
) -> OptimizeResult:
    """Exhaustive sweep over (delta, a, minimal b); returns every feasible
    strategy's report and the overall cheapest.

    The fully specialized search (delta=0) is costed with the dense solve;
    shortened searches (delta>0) take the cheaper of dense and sparse.
    """
    if deltas is None:
        deltas = list(range(0, delta_max(params) + 1))
    rows: list[CostReport] = []
    for delta in deltas:
        if delta == 0:
            candidates = [strategy_params(params, 0)]
        else:
            try:
                widest = strategy_params(params, delta)
            except ValueError:
                continue
            candidates = [
                strategy_params(params, delta, a) for a in range(widest.a + 1)
            ]
        algorithm = "strassen" if delta == 0 else None
        for strat in candidates:
            found = min_b(params, strat, b_max, alpha_C, alpha_lambda)
            if found is None:
                continue
            b, counts = found
            rows.append(
                bit_cost(params, strat, b, algorithm, counts, alpha_C, alpha_lambda)
            )
    best = min(rows, key=lambda r: r.log2_cost) if rows else None
    return OptimizeResult(best=best, rows=rows)


# Benchmark parameter sets (m, n, k, r, N expression, N) with the reference
# delta=0 cost/b and, where the reference avoids hybrid guessing, the
# delta>0 cost/b/w/a.  Hybrid reference entries are not comparable and carry
# None.  Reference delta=0 costs are dense-solve figures; the non-hybrid
# delta>0 references are sparse-solve figures.
TABLE2_ROWS: list[tuple] = [
    (277, 358, 179, 7, "k*(r-3)", 716, (173, 2), (174, 3, 6, 60)),
    (277, 358, 179, 7, "k*(r-2)", 895, (147, 1), None),
    (277, 358, 179, 7, "k*(r-1)", 1074, (145, 1), None),
    (281, 242, 121, 8, "k*(r-2)", 726, (170, 2), (170, 3, 7, 70)),
    (281, 242, 121, 8, "k*(r-1)", 847, (144, 1), None),
    (293, 254, 127, 8, "k*(r-2)", 762, (172, 2), (172, 3, 7, 73)),
    (293, 254, 127, 8, "k*(r-1)", 889, (145, 1), None),
    (307, 274, 137, 9, "k*(r-2)", 959, (187, 2), (187, 3, 8, 86)),
    (307, 274, 137, 9, "k*(r-1)", 1096, (159, 1), (165, 2, 8, 103)),
]

DELTA0_TOL = 2.0
DELTA_POS_TOL = 3.0


def run_table2(b_max: int = 4) -> dict:
    """Re-derive the benchmark table and diff against the reference values.

    delta=0 rows must match within DELTA0_TOL bits with equal b; delta>0 rows
    (non-hybrid ones) within DELTA_POS_TOL bits with equal (b, w, a).
    """
    started = time.monotonic()
    out_rows = []
    all0 = True
    allpos = True
    for m, n, k, r, label, N, ref0, refpos in TABLE2_ROWS:
        params = RslParams(q=2, m=m, n=n, k=k, r=r, N=N)
        strat0 = strategy_params(params, 0)
        found = min_b(params, strat0, b_max)
        row: dict = {"m": m, "n": n, "k": k, "r": r, "N": N, "N_label": label}
        if found is None:
            row["delta0"] = {"feasible": False, "ok": False}
            all0 = False
        else:
            b, counts = found
            rep = bit_cost(params, strat0, b, "strassen", counts)
            exp_bits, exp_b = ref0
            ok = abs(rep.log2_cost - exp_bits) <= DELTA0_TOL and b == exp_b
            all0 = all0 and ok
            row["delta0"] = {
                "expected_bits": exp_bits,
                "expected_b": exp_b,
                "bits": round(rep.log2_cost, 2),
                "b": b,
                "a": strat0.a,
                "algorithm": rep.algorithm,
                "delta_bits": round(rep.log2_cost - exp_bits, 2),
                "ok": ok,
            }
        if refpos is None:
            row["delta_pos"] = None
        else:
            exp_bits, exp_b, exp_w, exp_a = refpos
            res = optimize(params, b_max=b_max, deltas=list(range(1, delta_max(params) + 1)))
            if res.best is None:
                row["delta_pos"] = {"feasible": False, "ok": False}
                allpos = False
            else:
                best = res.best
                ok = (
                    abs(best.log2_cost - exp_bits) <= DELTA_POS_TOL
                    and best.b == exp_b
                    and best.w == exp_w
                    and best.a == exp_a
                )
                allpos = allpos and ok
                row["delta_pos"] = {
                    "expected_bits": exp_bits,
                    "expected_b": exp_b,
                    "expected_w": exp_w,
                    "expected_a": exp_a,
                    "bits": round(best.log2_cost, 2),
                    "b": best.b,
                    "w": best.w,
                    "a": best.a,
                    "algorithm": best.algorithm,
                    "delta_bits": round(best.log2_cost - exp_bits, 2),
                    "ok": ok,
                }
        out_rows.append(row)
    return {
        "rows": out_rows,
        "delta0_ok": all0,
        "delta_pos_ok": allpos,
        "ok": all0 and allpos,
        "elapsed_s": round(time.monotonic() - started, 3),
    }
