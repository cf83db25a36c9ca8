"""Rank Support Learning instances.

An instance is a systematic parity-check matrix H = [A | I] of size
(n-k) x n over F_{q^m} together with N syndromes s_i = H e_i^T, where every
error e_i has all its entries inside one secret r-dimensional F_q-subspace V
of F_{q^m}.  The attacker sees (H, S); the planted witness keeps the support
basis C (an m x r matrix over F_q whose columns are the coordinates of a
basis of V) and the coordinate matrices R_i with e_i = beta C R_i, where
beta = (1, z, ..., z**(m-1)).

The problem is interesting for N < k r; for N >= k r the support leaks from
plain linear algebra and instances carry an easy-regime flag.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Optional

from .fields import ExtensionField, extension_field, prime_field
from .matrix import FieldMatrix, column_space_basis, rank_rows, solve_rows


@dataclass(frozen=True)
class RslParams:
    q: int
    m: int
    n: int
    k: int
    r: int
    N: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError("q must be at least 2")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if not 0 < self.k < self.n:
            raise ValueError(f"need 0 < k < n, got k={self.k}, n={self.n}")
        if not 0 < self.r <= min(self.m, self.n):
            raise ValueError(f"need 0 < r <= min(m, n), got r={self.r}")
        if self.N < 1:
            raise ValueError("N must be at least 1")

    @property
    def easy_regime(self) -> bool:
        """True when N >= k r, where the support is recoverable by direct
        linear algebra and the algebraic attack is overkill."""
        return self.N >= self.k * self.r


@dataclass
class SecretWitness:
    """Planted secret of a generated instance."""

    C: FieldMatrix  # m x r over F_q, full column rank
    R_list: list[FieldMatrix]  # N matrices, r x n over F_q

    def support_basis(self) -> FieldMatrix:
        """Canonical m x r basis of V = column span of C over F_q."""
        return column_space_basis(self.C)

    def error_vector(self, ext: ExtensionField, i: int) -> list[int]:
        """e_i = beta C R_i as a length-n vector over F_{q^m}."""
        prod = self.C.mul(self.R_list[i])  # m x n over F_q
        return [ext.fold(prod.col(j)) for j in range(prod.ncols)]


@dataclass
class RslInstance:
    params: RslParams
    field: ExtensionField
    H: FieldMatrix  # (n-k) x n over F_{q^m}, systematic [A | I]
    S: FieldMatrix  # (n-k) x N over F_{q^m}
    shortened_by: int = 0

    def __post_init__(self):
        p = self.params
        if self.H.nrows != p.n - p.k or self.H.ncols != p.n:
            raise ValueError("H has wrong shape")
        if self.S.nrows != p.n - p.k or self.S.ncols != p.N:
            raise ValueError("S has wrong shape")
        if not self.is_systematic():
            raise ValueError("H is not in systematic form [A | I]")

    def is_systematic(self) -> bool:
        p = self.params
        nk = p.n - p.k
        for i in range(nk):
            for j in range(nk):
                want = 1 if i == j else 0
                if self.H[i, p.k + j] != want:
                    return False
        return True

    def syndrome(self, i: int) -> list[int]:
        return self.S.col(i)

    def y_vector(self, i: int) -> list[int]:
        """Canonical preimage of syndrome i: zero on the first k coordinates,
        the syndrome itself on the identity block."""
        return [0] * self.params.k + self.S.col(i)


@dataclass(frozen=True)
class StrategyParams:
    """Shortening strategy for the attack.

    delta = 0 targets words of full weight r in the code augmented by all N'
    errors, with the unique shortening length a satisfying a r < N.  delta > 0
    lowers the target weight to w = r - delta, which needs
    N >= delta (n - r + delta) to leave a solution, and frees the choice of a.
    """

    delta: int
    w: int
    a: int
    N_prime: int

    def __post_init__(self):
        if self.delta < 0 or self.w < 1 or self.a < 0 or self.N_prime < 1:
            raise ValueError("invalid strategy")


def strategy_params(
    params: RslParams, delta: int = 0, a_override: Optional[int] = None
) -> StrategyParams:
    """Derive the shortening strategy for a given delta.

    delta = 0: a is forced by a r < N <= (a+1) r, capped at k so the identity
    block of H survives the shortening, and only N' = a r + 1 syndromes are
    kept.  delta > 0: w = r - delta, N' = delta (n - r + delta) + a (r - delta)
    with a maximal subject to N' <= N unless overridden.
    """
    n, k, r, N = params.n, params.k, params.r, params.N
    if delta < 0 or delta >= r:
        raise ValueError(f"delta must be in [0, r), got {delta}")
    if delta == 0:
        if a_override is not None:
            raise ValueError("a is determined when delta = 0")
        a = (N + r - 1) // r - 1
        a = min(a, k)
        return StrategyParams(delta=0, w=r, a=a, N_prime=a * r + 1)
    w = r - delta
    base = delta * (n - r + delta)
    if N < base:
        raise ValueError(
            f"delta={delta} infeasible: N={N} < delta*(n-r+delta)={base}"
        )
    a_max = min((N - base) // w, k, n - w - 1)
    a = a_max if a_override is None else a_override
    if not 0 <= a <= a_max:
        raise ValueError(f"a={a} outside feasible range [0, {a_max}]")
    return StrategyParams(delta=delta, w=w, a=a, N_prime=base + a * w)


def gen_instance(params: RslParams, seed: int) -> tuple[RslInstance, SecretWitness]:
    """Generate a uniformly random instance with a planted support.

    Deterministic in (params, seed).  The support basis C is resampled until
    it has full column rank r.
    """
    rng = random.Random(seed)
    ext = extension_field(params.q, params.m)
    fq = prime_field(params.q)
    for _ in range(200):
        C = FieldMatrix.random(fq, params.m, params.r, rng)
        if rank_rows(C.rows, fq) == params.r:
            break
    else:
        raise RuntimeError("could not sample a full-rank support basis")
    R_list = [
        FieldMatrix.random(fq, params.r, params.n, rng) for _ in range(params.N)
    ]
    nk = params.n - params.k
    A = FieldMatrix.random(ext, nk, params.k, rng)
    H = A.hstack(FieldMatrix.identity(ext, nk))
    witness = SecretWitness(C=C, R_list=R_list)
    syn_cols = []
    for i in range(params.N):
        e = witness.error_vector(ext, i)
        syn_cols.append(H.matvec(e))
    S = FieldMatrix(ext, [[syn_cols[i][u] for i in range(params.N)] for u in range(nk)], validate=False)
    return RslInstance(params=params, field=ext, H=H, S=S), witness


def check_assumption1(inst: RslInstance, w: int) -> bool:
    """True when the top n-k-w rows of the syndrome matrix have full rank
    over F_{q^m}; the echelonization of the bilinear system requires it."""
    nk = inst.params.n - inst.params.k
    if not 0 < w < nk:
        raise ValueError(f"need 0 < w < n-k, got w={w}")
    top = inst.S.rows[: nk - w]
    return rank_rows(top, inst.field) == nk - w


def shorten(inst: RslInstance, a: int) -> RslInstance:
    """Shortened view on the first a coordinates.

    Drops the first a columns of H and the first a rows of A's block, i.e.
    keeps rows as they are (H stays systematic because only code columns are
    removed) and re-labels n -> n-a, k -> k-a.  Syndromes are unchanged: the
    canonical preimages are zero on the dropped coordinates.
    """
    p = inst.params
    if not 0 <= a <= p.k:
        raise ValueError(f"shortening length must be in [0, k], got {a}")
    if a == 0:
        return inst
    new_params = RslParams(q=p.q, m=p.m, n=p.n - a, k=p.k - a, r=p.r, N=p.N)
    H = inst.H.submatrix(range(p.n - p.k), range(a, p.n))
    return RslInstance(
        params=new_params,
        field=inst.field,
        H=H,
        S=inst.S,
        shortened_by=inst.shortened_by + a,
    )


def truncate_syndromes(
    inst: RslInstance, n_keep: int, witness: Optional[SecretWitness] = None
) -> tuple[RslInstance, Optional[SecretWitness]]:
    """Keep only the first n_keep syndromes (and witness coordinates)."""
    p = inst.params
    if not 0 < n_keep <= p.N:
        raise ValueError(f"cannot keep {n_keep} of {p.N} syndromes")
    if n_keep == p.N:
        return inst, witness
    new_params = RslParams(q=p.q, m=p.m, n=p.n, k=p.k, r=p.r, N=n_keep)
    S = inst.S.submatrix(range(p.n - p.k), range(n_keep))
    out = RslInstance(
        params=new_params,
        field=inst.field,
        H=inst.H,
        S=S,
        shortened_by=inst.shortened_by,
    )
    if witness is None:
        return out, None
    return out, SecretWitness(C=witness.C, R_list=witness.R_list[:n_keep])


def verify_support(inst: RslInstance, v_basis: FieldMatrix) -> bool:
    """Check that every syndrome admits a preimage with entries in span(V).

    v_basis is an m x d matrix over F_q whose columns are coordinates of a
    basis of a candidate subspace.  Solvability of H e^T = s_i^T with every
    entry of e restricted to the span is a linear question over F_q; it is
    decided here by one rank comparison for all syndromes at once.
    """
    p = inst.params
    ext = inst.field
    fq = prime_field(p.q)
    d = v_basis.ncols
    if v_basis.nrows != p.m:
        raise ValueError("support basis must have m rows")
    if d == 0:
        return all(x == 0 for col in inst.S.rows for x in col)
    span_elems = [ext.fold(v_basis.col(t)) for t in range(d)]
    nk = p.n - p.k
    # unknowns x[j, t]: coordinate t of entry j of e; columns indexed j*d + t
    rows: list[list[int]] = []
    for u in range(nk):
        coeffs = []
        for j in range(p.n):
            h = inst.H[u, j]
            for t in range(d):
                coeffs.append(ext.mul(h, span_elems[t]) if h else 0)
        unfolded = [ext.unfold(c) for c in coeffs]
        for jc in range(p.m):
            rows.append([u_digits[jc] for u_digits in unfolded])
    rank_a = rank_rows(rows, fq)
    aug = [list(r) for r in rows]
    for i in range(p.N):
        digits = [ext.unfold(x) for x in inst.S.col(i)]
        col = [digits[u][jc] for u in range(nk) for jc in range(p.m)]
        for row, x in zip(aug, col):
            row.append(x)
    return rank_rows(aug, fq) == rank_a
