"""Solving the bilinear system and recovering the secret support.

Pipeline: shorten the instance per the chosen strategy, build and unfold the
minor equations, stack the cumulative Macaulay matrix at growing degree b,
take its right kernel, split the unique projective solution back into
(lambda, r_T), invert the Plucker coordinates into an echelon-form matrix,
then solve a final linear system for the support basis.

Verification caveat: a support candidate is checked against the original
instance, never the shortened view.  Shortening drops coordinates that the
individual error vectors do need, so the per-syndrome solvability test is
meaningless on the view.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Optional

from .estimator import make_counts
from .fields import PrimeField, prime_field
from .instance import (
    RslInstance,
    SecretWitness,
    StrategyParams,
    shorten,
    truncate_syndromes,
    verify_support,
)
from .matrix import FieldMatrix, column_space_basis, kernel_rows, solve_rows
from .modeling import (
    MacaulayMatrix,
    Monomial,
    build_macaulay,
    build_system,
    monomial_vector,
    unfold_system,
)


class NoSolutionError(RuntimeError):
    """The Macaulay matrix has a trivial kernel: no word of this weight."""


class UnderdeterminedError(RuntimeError):
    """Kernel dimension above 1: not enough equations at this degree."""

    def __init__(self, message: str, kernel_dim: int):
        super().__init__(message)
        self.kernel_dim = kernel_dim


class ExtractionError(RuntimeError):
    """Kernel vector does not decompose into a single (lambda, R) pair."""


@dataclass
class KernelSolution:
    field: object
    col_labels: list[Monomial]
    vector: list[int]
    kernel_dim: Optional[int]  # None when found without a full kernel basis
    n_lambda: int
    w: int
    n_cols: int

    def values(self) -> dict[Monomial, int]:
        return dict(zip(self.col_labels, self.vector))


WIEDEMANN_COLUMN_THRESHOLD = 200_000


def solve_linearized(
    mac: MacaulayMatrix, method: str = "auto", seed: int = 0
) -> KernelSolution:
    """Right kernel of the Macaulay matrix, expected one-dimensional.

    method "dense" computes the full kernel basis; "wiedemann" finds a single
    kernel vector iteratively and cannot certify uniqueness (kernel_dim is
    None).  "auto" picks dense below WIEDEMANN_COLUMN_THRESHOLD columns.
    """
    ncols = len(mac.col_labels)
    if method not in ("auto", "dense", "wiedemann"):
        raise ValueError(f"unknown method {method!r}")
    use_wiedemann = method == "wiedemann" or (
        method == "auto" and ncols > WIEDEMANN_COLUMN_THRESHOLD
    )
    if use_wiedemann:
        vec = wiedemann_kernel_vector(mac, seed=seed)
        if vec is None:
            raise NoSolutionError("no kernel vector found (retries exhausted)")
        dim = None
    else:
        basis = kernel_rows(mac.dense_rows(), mac.field)
        dim = len(basis)
        if dim == 0:
            raise NoSolutionError("no solution at this weight and strategy")
        if dim > 1:
            raise UnderdeterminedError(
                f"kernel dimension {dim}: insufficient equations, "
                "increase b or shorten more",
                dim,
            )
        vec = basis[0]
    return KernelSolution(
        field=mac.field,
        col_labels=list(mac.col_labels),
        vector=vec,
        kernel_dim=dim,
        n_lambda=mac.n_lambda,
        w=mac.w,
        n_cols=mac.n_cols_R,
    )


def rank1_extract(sol: KernelSolution) -> tuple[list[int], dict[tuple[int, ...], int]]:
    """Split the bi-degree (1,1) block Z[i, T] = value(lambda_i r_T) into an
    outer product lambda * rT.

    The first nonzero lambda entry is normalized to 1.  Every entry of Z is
    re-checked against the product; any mismatch means the block has rank at
    least 2 (multiple distinct solutions folded into one kernel vector).
    """
    f = sol.field
    Z: dict[tuple[int, tuple[int, ...]], int] = {}
    minors: set = set()
    for (mu, T), v in zip(sol.col_labels, sol.vector):
        if len(mu) != 1:
            continue
        minors.add(T)
        if v:
            Z[(mu[0], T)] = v
    if not Z:
        raise ExtractionError("no nonzero solution in the bilinear block")
    T0 = max(T for (_, T) in Z)
    pivot_rows = [i for i in range(1, sol.n_lambda + 1) if Z.get((i, T0))]
    i_first = pivot_rows[0]
    inv_p = f.inv(Z[(i_first, T0)])
    lam = [f.mul(Z.get((i, T0), 0), inv_p) for i in range(1, sol.n_lambda + 1)]
    rT = {T: Z.get((i_first, T), 0) for T in minors}
    for i in range(1, sol.n_lambda + 1):
        li = lam[i - 1]
        for T in minors:
            if Z.get((i, T), 0) != f.mul(li, rT[T]):
                raise ExtractionError(
                    "bilinear block has rank >= 2; the kernel mixes several "
                    "solutions (raise b or shorten more)"
                )
    return lam, rT


def plucker_reconstruct(
    rT: dict[tuple[int, ...], int], w: int, n_cols: int, field
) -> FieldMatrix:
    """Invert the maximal-minor map: build the unique w x n_cols matrix in
    reduced echelon profile with pivot set T0 whose minors are proportional
    to the given values.

    T0 is the largest index set with a nonzero value.  Entries off the pivot
    columns are signed ratios r_{(T0 minus t_u) + j} / r_{T0}.  All minors of
    the result are checked against the input; a mismatch means the input is
    not the minor vector of any single matrix.
    """
    nonzero = [T for T, v in rT.items() if v]
    if not nonzero:
        raise ExtractionError("all minors are zero")
    T0 = max(nonzero)
    if len(T0) != w:
        raise ValueError(f"minor index size {len(T0)} does not match w={w}")
    inv0 = field.inv(rT[T0])
    t0set = set(T0)
    rows = [[0] * n_cols for _ in range(w)]
    for u, t in enumerate(T0, start=1):
        rows[u - 1][t - 1] = 1
    for j in range(1, n_cols + 1):
        if j in t0set:
            continue
        for u, t in enumerate(T0, start=1):
            T = tuple(sorted((t0set - {t}) | {j}))
            val = rT.get(T, 0)
            if not val:
                continue
            c = T.index(j) + 1
            x = field.mul(val, inv0)
            if (u + c) % 2 == 1:
                x = field.neg(x)
            rows[u - 1][j - 1] = x
    M = FieldMatrix(field, rows, validate=False)
    for T0b, v in M.maximal_minors().items():
        T = tuple(t + 1 for t in T0b)
        if v != field.mul(rT.get(T, 0), inv0):
            raise ExtractionError(
                f"minor mismatch at {T}: input is not a consistent minor vector"
            )
    return M


@dataclass
class RecoveredSupport:
    """Candidate support subspace with provenance."""

    C: FieldMatrix  # m x d canonical column basis over F_q
    d: int
    strategy: Optional[StrategyParams]
    b: Optional[int]
    verified: bool


def recover_support(
    inst: RslInstance,
    lam_values: list[int],
    Rt: FieldMatrix,
    verify_on: Optional[RslInstance] = None,
    strategy: Optional[StrategyParams] = None,
    b: Optional[int] = None,
) -> RecoveredSupport:
    """Solve for the support basis C from the identity
    Sum_i lambda_i s_i = beta C (Rt H^T), beta = (1, z, .., z^(m-1)).

    inst is the (shortened) instance the extraction ran on; verification runs
    against verify_on when given (the attack passes the original instance,
    where per-syndrome preimages actually exist).
    """
    p = inst.params
    ext = inst.field
    fq = prime_field(p.q)
    if not any(lam_values):
        raise ExtractionError("zero lambda vector")
    w = Rt.nrows
    nk = p.n - p.k
    target = []
    for u in range(nk):
        acc = ext.zero
        for i, li in enumerate(lam_values):
            if li:
                acc = ext.add(acc, ext.mul(li, inst.S[u, i]))
        target.append(acc)
    P = FieldMatrix(ext, Rt.rows, validate=False).mul(inst.H.transpose())
    zpow = [pow(p.q, ell) for ell in range(p.m)]  # z^ell as element tokens
    rows: list[list[int]] = []
    rhs: list[int] = []
    for u in range(nk):
        coeffs = [
            ext.unfold(ext.mul(zpow[ell], P[c, u]))
            for c in range(w)
            for ell in range(p.m)
        ]
        tdig = ext.unfold(target[u])
        for jd in range(p.m):
            rows.append([cf[jd] for cf in coeffs])
            rhs.append(tdig[jd])
    x = solve_rows(rows, rhs, fq)
    if x is None:
        raise ExtractionError(
            "support system inconsistent: extraction was spurious"
        )
    C = FieldMatrix(
        fq, [[x[c * p.m + ell] for c in range(w)] for ell in range(p.m)], validate=False
    )
    basis = column_space_basis(C)
    d = basis.ncols
    if d == 0:
        raise ExtractionError("recovered support is zero")
    check_inst = verify_on if verify_on is not None else inst
    return RecoveredSupport(
        C=basis,
        d=d,
        strategy=strategy,
        b=b,
        verified=verify_support(check_inst, basis),
    )


def rotate_information_columns(inst: RslInstance, offset: int) -> RslInstance:
    """Cyclically permute the first k columns of H.  The code is the same up
    to coordinate relabeling and the support is unchanged, but shortening the
    rotated instance removes a different column set."""
    p = inst.params
    if p.k == 0 or offset % p.k == 0:
        return inst
    o = offset % p.k
    perm = list(range(o, p.k)) + list(range(o)) + list(range(p.k, p.n))
    H = inst.H.submatrix(range(p.n - p.k), perm)
    return RslInstance(
        params=p, field=inst.field, H=H, S=inst.S, shortened_by=inst.shortened_by
    )


def planted_solution(
    witness: SecretWitness, strategy: StrategyParams, n: int, q: int
) -> tuple[list[int], dict[tuple[int, ...], int], FieldMatrix]:
    """Ground-truth point of the shortened system, from the secret witness.

    Only for the full-weight strategy (w = r): lambda is any kernel vector of
    the stacked first-a-column blocks of the R_i (so the combined word
    vanishes on the dropped coordinates), and the minor values are those of
    Rt = Sum_i lambda_i R_i[:, a:].  Returns (lambda, minor values, Rt).
    """
    fq = prime_field(q)
    r = witness.C.ncols
    if strategy.w != r:
        raise ValueError("planted point construction needs w = r (delta = 0)")
    a, Np = strategy.a, strategy.N_prime
    R_list = witness.R_list[:Np]
    if len(R_list) < Np:
        raise ValueError(f"witness has {len(R_list)} coordinate blocks, need {Np}")
    rows = [
        [R_list[i][rho, j] for i in range(Np)]
        for rho in range(r)
        for j in range(a)
    ]
    basis = kernel_rows(rows, fq) if rows else kernel_rows([], fq)
    if not rows:
        lam = [1] + [0] * (Np - 1)
    else:
        if not basis:
            raise ExtractionError("no combination vanishes on the shortened columns")
        lam = basis[0]
    acc_rows = []
    for rho in range(r):
        row = []
        for j in range(a, n):
            s = 0
            for i, li in enumerate(lam):
                if li and R_list[i][rho, j]:
                    s = fq.add(s, fq.mul(li, R_list[i][rho, j]))
            row.append(s)
        acc_rows.append(row)
    Rt = FieldMatrix(fq, acc_rows, validate=False)
    rT = {tuple(t + 1 for t in T): v for T, v in Rt.maximal_minors().items()}
    return lam, rT, Rt


@dataclass
class AttackResult:
    success: bool
    support: Optional[RecoveredSupport]
    verified: bool
    strategy: StrategyParams
    b_history: list[dict]
    attempts: int
    message: str
    elapsed_s: float

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "verified": self.verified,
            "strategy": {
                "delta": self.strategy.delta,
                "w": self.strategy.w,
                "a": self.strategy.a,
                "N_prime": self.strategy.N_prime,
            },
            "support_dim": self.support.d if self.support else 0,
            "support_basis": self.support.C.rows if self.support else [],
            "b_history": self.b_history,
            "attempts": self.attempts,
            "message": self.message,
            "elapsed_s": round(self.elapsed_s, 3),
        }


def _attempt(
    inst: RslInstance,
    strategy: StrategyParams,
    b_max: int,
    method: str,
    offset: int,
    history: list[dict],
) -> Optional[RecoveredSupport]:
    rotated = rotate_information_columns(inst, offset)
    sh = shorten(rotated, strategy.a)
    sh, _ = truncate_syndromes(sh, strategy.N_prime)
    system = build_system(sh, strategy.w)
    unfolded = unfold_system(system)
    fq = unfolded.field
    for b in range(1, b_max + 1):
        try:
            mac = build_macaulay(unfolded, b, "cumulative")
        except ValueError:
            break  # degree bound b < q reached for this base field
        entry = {
            "offset": offset,
            "b": b,
            "rows": mac.shape[0],
            "cols": mac.shape[1],
        }
        try:
            sol = solve_linearized(mac, method)
        except UnderdeterminedError as exc:
            entry["kernel_dim"] = exc.kernel_dim
            history.append(entry)
            continue
        except NoSolutionError:
            entry["kernel_dim"] = 0
            history.append(entry)
            return None
        entry["kernel_dim"] = sol.kernel_dim
        try:
            lam, rT = rank1_extract(sol)
            Rt = plucker_reconstruct(rT, strategy.w, sh.params.n, fq)
            rec = recover_support(
                sh, lam, Rt, verify_on=inst, strategy=strategy, b=b
            )
        except ExtractionError as exc:
            entry["extraction_error"] = str(exc)
            history.append(entry)
            continue
        history.append(entry)
        return rec
    return None


def attack(
    inst: RslInstance,
    strategy: StrategyParams,
    b_max: int = 3,
    method: str = "auto",
    max_attempts: Optional[int] = None,
) -> AttackResult:
    """Full pipeline; for delta > 0 the recovered word only spans part of the
    support, so further runs on rotated shortening sets accumulate subspaces
    until the union has dimension r or attempts run out."""
    started = time.monotonic()
    p = inst.params
    if max_attempts is None:
        max_attempts = 1 if strategy.delta == 0 else max(4, 2 * p.r)
    history: list[dict] = []
    union: Optional[FieldMatrix] = None
    last_b = None
    attempts = 0
    # rotating the information columns by t makes shortening drop a different
    # column window; k rotations exhaust the distinct windows
    for offset in range(min(max_attempts, max(p.k, 1))):
        attempts += 1
        rec = _attempt(inst, strategy, b_max, method, offset, history)
        if rec is None:
            continue
        last_b = rec.b
        union = rec.C if union is None else column_space_basis(union.hstack(rec.C))
        if union.ncols >= p.r:
            break
    elapsed = time.monotonic() - started
    if union is None:
        counts = make_counts(
            p.n - strategy.a,
            p.k - strategy.a,
            strategy.w,
            strategy.N_prime,
            strategy.a,
            max(b_max, 1),
        )
        dim_note = next(
            (h["kernel_dim"] for h in reversed(history) if "kernel_dim" in h), None
        )
        return AttackResult(
            success=False,
            support=None,
            verified=False,
            strategy=strategy,
            b_history=history,
            attempts=attempts,
            message=(
                f"no recovery up to b={b_max}: last kernel dim {dim_note}, "
                f"N_leq_b={counts.N_leq_b_f2}, M_leq_b={counts.M_leq_b_f2}"
            ),
            elapsed_s=elapsed,
        )
    verified = verify_support(inst, union)
    support = RecoveredSupport(
        C=union, d=union.ncols, strategy=strategy, b=last_b, verified=verified
    )
    success = verified and union.ncols == p.r
    message = "support recovered" if success else (
        f"partial support of dimension {union.ncols}"
        + ("" if verified else " (verification failed)")
    )
    return AttackResult(
        success=success,
        support=support,
        verified=verified,
        strategy=strategy,
        b_history=history,
        attempts=attempts,
        message=message,
        elapsed_s=time.monotonic() - started,
    )


# -- iterative kernel backend -------------------------------------------------


def _berlekamp_massey(seq: list[int], field) -> tuple[list[int], int]:
    """Minimal LFSR for the sequence: returns (c, L) with register length L
    and connection polynomial c (ascending, c[0] = 1, trailing zeros
    stripped) satisfying sum_j c[j] seq[i-j] = 0 for L <= i < len(seq).

    deg(c) < L exactly when the recurrence ends in zero taps, which makes
    the annihilating polynomial rev_L(c) divisible by x."""
    f = field
    c = [1]
    bpoly = [1]
    L = 0
    mshift = 1
    bval = 1
    for i, s in enumerate(seq):
        delta = s
        for j in range(1, L + 1):
            if j < len(c) and c[j]:
                delta = f.add(delta, f.mul(c[j], seq[i - j]))
        if delta == 0:
            mshift += 1
            continue
        coef = f.mul(delta, f.inv(bval))
        if 2 * L <= i:
            old_c = list(c)
            need = len(bpoly) + mshift
            if len(c) < need:
                c = c + [0] * (need - len(c))
            for j, bj in enumerate(bpoly):
                if bj:
                    c[j + mshift] = f.sub(c[j + mshift], f.mul(coef, bj))
            L = i + 1 - L
            bpoly = old_c
            bval = delta
            mshift = 1
        else:
            need = len(bpoly) + mshift
            if len(c) < need:
                c = c + [0] * (need - len(c))
            for j, bj in enumerate(bpoly):
                if bj:
                    c[j + mshift] = f.sub(c[j + mshift], f.mul(coef, bj))
            mshift += 1
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c, L


def wiedemann_kernel_vector(
    mac: MacaulayMatrix, seed: int = 0, max_tries: int = 8
) -> Optional[list[int]]:
    """Single right-kernel vector of the Macaulay matrix by the iterative
    minimal-polynomial method, using only sparse matrix-vector products.

    Squares the system as B = E A with a random sparse E and runs
    Berlekamp-Massey on a projected Krylov sequence of B.  The reversal of
    the connection polynomial annihilates the Krylov space; its power-of-x
    factor (the register length minus the polynomial degree) is peeled off
    to land in the kernel.  A candidate is accepted only if A z = 0, which
    guards against both projection loss and ker(E) artifacts.  Returns None
    when the kernel is trivial or all retries failed.  Prime fields only.
    """
    f = mac.field
    if not isinstance(f, PrimeField):
        raise ValueError("iterative backend supports prime fields only")
    R, C = mac.shape
    if C == 0:
        return None
    rng = random.Random(seed)
    nnz_per_row = min(R, 4)
    for _ in range(max_tries):
        E = []
        for _ in range(C):
            cols = rng.sample(range(R), nnz_per_row) if R else []
            E.append({c: rng.randrange(1, f.q) for c in cols})
        def bmul(v: list[int]) -> list[int]:
            t = mac.apply(v)
            out = []
            for row in E:
                acc = 0
                for idx, coef in row.items():
                    if t[idx]:
                        acc = f.add(acc, f.mul(coef, t[idx]))
                out.append(acc)
            return out
        u = [rng.randrange(f.q) for _ in range(C)]
        v0 = [rng.randrange(f.q) for _ in range(C)]
        seq = []
        vec = v0
        for _ in range(2 * C + 2):
            acc = 0
            for ui, vi in zip(u, vec):
                if ui and vi:
                    acc = f.add(acc, f.mul(ui, vi))
            seq.append(acc)
            vec = bmul(vec)
        c, L = _berlekamp_massey(seq, f)
        s = L - (len(c) - 1)
        if s <= 0:
            # full-degree recurrence: zero is not an eigenvalue of B as seen
            # through this projection, retry with fresh vectors
            continue
        # rev_L(c) = x^s h(x) annihilates the Krylov space of v0
        h = list(reversed(c))
        # z = h(B) B^(s-1) v0, so B z = rev_L(c)(B) v0 = 0
        base = v0
        for _ in range(s - 1):
            base = bmul(base)
        z = [0] * C
        term = base
        for hj in h:
            if hj:
                z = [f.add(zi, f.mul(hj, ti)) for zi, ti in zip(z, term)]
            term = bmul(term)
        if not any(z):
            continue
        if any(mac.apply(z)):
            continue
        return z
    return None
