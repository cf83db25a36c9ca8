"""Bilinear modeling of the support-recovery problem.

A candidate low-weight word of the augmented code is written as a combination
Sum_i lambda_i y_i with unknown lambda over F_q, and its support is carried by
an unknown w x n coefficient matrix R over F_q.  Compatibility with the
parity-check matrix forces the (1+w) x (n-k) matrix

    Delta = [ Sum_i lambda_i s_i ; R Ht^T ]

to have rank at most w, so every maximal minor Q_J (one per (w+1)-subset J of
the rows {1..n-k}) vanishes.  Expanding Q_J by multilinearity gives a bilinear
polynomial in the lambda_i and the maximal minors r_T = |R|_{*,T}; those
polynomials, their unfolding over F_q, their Macaulay matrices at bi-degree
(b,1) and the structural relations between them are built here.

Monomials are pairs (mu, T): mu is a sorted tuple of lambda indices (1-based,
repeats allowed), T a sorted w-tuple of column indices (1-based).  The order
puts every r_T below every lambda, lambda_N < ... < lambda_1, compares minors
by tuple lexicography, and breaks ties between lambda parts of equal degree by
grevlex.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Optional, TextIO

from .fields import prime_field
from .instance import RslInstance
from .matrix import det_rows, rank_rows

LamMono = tuple[int, ...]
MinorIndex = tuple[int, ...]
Monomial = tuple[LamMono, MinorIndex]


class RankAssumptionError(RuntimeError):
    """The syndrome block that the echelonization pivots on is rank-deficient."""


def grevlex_subkey(mu: LamMono, n_lambda: int) -> tuple[int, ...]:
    """Tie-break key for lambda-monomials of equal degree: grevlex with
    lambda_1 largest.  Ascending key order = ascending monomial order."""
    exp = [0] * (n_lambda + 1)
    for i in mu:
        exp[i] += 1
    return tuple(-exp[i] for i in range(n_lambda, 0, -1))


def monomial_key(mono: Monomial, n_lambda: int) -> tuple:
    """Sort key; comparing keys realizes the monomial order (ascending)."""
    mu, T = mono
    return (len(mu), tuple(T), grevlex_subkey(mu, n_lambda))


@dataclass
class BilinearEquation:
    """Polynomial with every term carrying exactly one minor factor.

    terms maps (mu, T) to a nonzero coefficient; J records which row subset
    the equation came from, when it came from one.
    """

    field: object
    terms: dict[Monomial, int]
    J: Optional[tuple[int, ...]] = None

    def leading_monomial(self, n_lambda: int) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=lambda mono: monomial_key(mono, n_lambda))

    def evaluate(self, lam_values: list[int], rT_values: dict[MinorIndex, int]) -> int:
        f = self.field
        acc = f.zero
        for (mu, T), c in self.terms.items():
            v = c
            for i in mu:
                v = f.mul(v, lam_values[i - 1])
                if v == 0:
                    break
            if v == 0:
                continue
            v = f.mul(v, rT_values.get(T, 0))
            if v:
                acc = f.add(acc, v)
        return acc


@dataclass
class BilinearSystem:
    field: object
    n_cols: int  # column range of the minors: T subset of {1..n_cols}
    n_lambda: int
    w: int
    equations: list[BilinearEquation]


def build_QJ(inst: RslInstance, J: Iterable[int], w: int) -> BilinearEquation:
    """Maximal minor of Delta on rows J, expanded into bilinear terms.

    Writing the candidate word as (Sum_i lambda_i y_i) and stacking it over R,
    Delta equals [Sum lambda_i y_i ; R] Ht^T, so the minor expands over column
    subsets T0 of size w+1; the systematic form of H kills every T0 not inside
    {1..k} union (J+k).  The coefficient of lambda_i r_T collects
    y_i[t] * (-1)^(1+pos(t)) * |H|_{J, T u {t}} over the choices of the extra
    column t.
    """
    p = inst.params
    ext = inst.field
    k, nk = p.k, p.n - p.k
    J = tuple(sorted(J))
    if len(J) != w + 1 or J[0] < 1 or J[-1] > nk:
        raise ValueError(f"J must be a (w+1)-subset of 1..{nk}, got {J}")
    if not 0 < w <= p.r:
        raise ValueError(f"weight must be in 1..r, got {w}")
    rows0 = [j - 1 for j in J]
    ground = list(range(1, k + 1)) + [j + k for j in J]
    y = [inst.y_vector(i) for i in range(p.N)]
    terms: dict[Monomial, int] = {}
    for T0 in combinations(ground, w + 1):
        minor = det_rows([[inst.H[u, t - 1] for t in T0] for u in rows0], ext)
        if minor == 0:
            continue
        neg_minor = ext.neg(minor)
        for u, t in enumerate(T0, start=1):
            if t <= k:
                continue  # y_i is zero on the first k coordinates
            coeff = minor if u % 2 == 1 else neg_minor
            T = T0[:u - 1] + T0[u:]
            for i in range(p.N):
                yv = y[i][t - 1]
                if yv == 0:
                    continue
                key = ((i + 1,), T)
                acc = ext.add(terms.get(key, ext.zero), ext.mul(yv, coeff))
                if acc:
                    terms[key] = acc
                elif key in terms:
                    del terms[key]
    return BilinearEquation(field=ext, terms=terms, J=J)


def build_system(inst: RslInstance, w: int) -> BilinearSystem:
    """All C(n-k, w+1) minor equations, J in lexicographic order."""
    p = inst.params
    nk = p.n - p.k
    if not 0 < w < nk:
        raise ValueError(f"need 0 < w < n-k, got w={w}")
    eqs = [build_QJ(inst, J, w) for J in combinations(range(1, nk + 1), w + 1)]
    return BilinearSystem(
        field=inst.field, n_cols=p.n, n_lambda=p.N, w=w, equations=eqs
    )


def unfold_system(system: BilinearSystem) -> BilinearSystem:
    """Expand each equation over the extension field into m coordinate
    equations over F_q.  A point with F_q coordinates vanishes on the original
    iff it vanishes on all coordinates, so the solution set is preserved.
    Zero coordinate equations are kept so that counts stay m per input."""
    ext = system.field
    fq = prime_field(ext.q)
    out: list[BilinearEquation] = []
    for eq in system.equations:
        digit_terms: list[dict[Monomial, int]] = [{} for _ in range(ext.m)]
        for key, c in eq.terms.items():
            for jd, d in enumerate(ext.unfold(c)):
                if d:
                    digit_terms[jd][key] = d
        for jd in range(ext.m):
            out.append(BilinearEquation(field=fq, terms=digit_terms[jd], J=eq.J))
    return BilinearSystem(
        field=fq,
        n_cols=system.n_cols,
        n_lambda=system.n_lambda,
        w=system.w,
        equations=out,
    )


def _sequential_elim(rows: list[list[int]], field) -> tuple[list[list[int]], list[int]]:
    """Reduce each row against the previous ones only, without row swaps.

    Returns (E, lead) with E unit lower triangular, row i of E*M zero at every
    lead[j] for j < i, and lead[i] the first nonzero column of that row.
    Needs full row rank; raises RankAssumptionError otherwise.
    """
    nr = len(rows)
    nc = len(rows[0]) if rows else 0
    E = [[field.one if i == j else field.zero for j in range(nr)] for i in range(nr)]
    red = [list(r) for r in rows]
    lead: list[int] = []
    for i in range(nr):
        row = red[i]
        for jprev in range(i):
            c = row[lead[jprev]]
            if c == 0:
                continue
            piv = red[jprev][lead[jprev]]
            f = field.neg(field.mul(c, field.inv(piv)))
            prow = red[jprev]
            for t in range(nc):
                if prow[t]:
                    row[t] = field.add(row[t], field.mul(f, prow[t]))
            erow = E[jprev]
            for t in range(jprev + 1):
                if erow[t]:
                    E[i][t] = field.add(E[i][t], field.mul(f, erow[t]))
        li = next((t for t, x in enumerate(row) if x), None)
        if li is None:
            raise RankAssumptionError(
                f"top {nr} syndrome rows have rank {i}, need {nr}"
            )
        lead.append(li)
    return E, lead


def echelonize_tildeQ(
    system: BilinearSystem, inst: RslInstance, w: int
) -> tuple[BilinearSystem, list[Monomial]]:
    """Transform the minor equations so their leading monomials are pairwise
    distinct.

    Group equations by I = J minus its minimum j.  Every equation in the group
    of I has the same top minor r_{I+k}, with the linear form
    Sum_i s_{i,j} lambda_i as its coefficient.  Reducing those forms (rows
    1..n-k-w of S) against each other with a unit lower triangular transform E
    and combining equations with the same coefficients yields, for each (j, I),
    a leading monomial lambda_{c_j} r_{I+k} with the c_j pairwise distinct.
    Requires the top n-k-w rows of S to have full rank.
    """
    p = inst.params
    nk = p.n - p.k
    ext = inst.field
    if system.field is not ext:
        raise ValueError("system must be over the instance's extension field")
    E, lead = _sequential_elim([list(r) for r in inst.S.rows[: nk - w]], ext)
    eq_by_J = {eq.J: eq for eq in system.equations}
    out_eqs: list[BilinearEquation] = []
    leads: list[Monomial] = []
    for J in combinations(range(1, nk + 1), w + 1):
        j1, I = J[0], J[1:]
        terms: dict[Monomial, int] = {}
        for jp in range(1, j1 + 1):
            c = E[j1 - 1][jp - 1]
            if c == 0:
                continue
            for key, v in eq_by_J[(jp,) + I].terms.items():
                acc = ext.add(terms.get(key, ext.zero), ext.mul(c, v))
                if acc:
                    terms[key] = acc
                elif key in terms:
                    del terms[key]
        out_eqs.append(BilinearEquation(field=ext, terms=terms, J=J))
        leads.append(((lead[j1 - 1] + 1,), tuple(t + p.k for t in I)))
    transformed = BilinearSystem(
        field=ext,
        n_cols=system.n_cols,
        n_lambda=system.n_lambda,
        w=system.w,
        equations=out_eqs,
    )
    return transformed, leads


def lambda_monomials(n_lambda: int, degree: int, squarefree: bool) -> list[LamMono]:
    """All lambda-monomials of the given total degree, ascending tuples."""
    pool = range(1, n_lambda + 1)
    if squarefree:
        return [tuple(c) for c in combinations(pool, degree)]
    return [tuple(c) for c in combinations_with_replacement(pool, degree)]


@dataclass
class MacaulayMatrix:
    """Sparse matrix of all multiples of the equations at bi-degree (b,1).

    mode "exact": rows are (degree b-1 multiplier) x equation products, with
    formal multiset lambda-monomials and no reduction; columns are all
    monomials of lambda-degree exactly b.  mode "cumulative": multipliers of
    degree 0..b-1 and columns of lambda-degree 1..b; over F_2 monomials are
    squarefree and products reduce by lambda^2 = lambda, for q > 2 the degree
    bound b < q makes reduction vacuous.
    """

    field: object
    b: int
    mode: str
    n_lambda: int
    n_cols_R: int
    w: int
    row_labels: list[tuple[LamMono, Optional[tuple[int, ...]]]]
    col_labels: list[Monomial]
    rows: list[dict[int, int]]

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.col_labels))

    def dense_rows(self) -> list[list[int]]:
        ncols = len(self.col_labels)
        out = []
        for row in self.rows:
            dense = [0] * ncols
            for idx, c in row.items():
                dense[idx] = c
            out.append(dense)
        return out

    def rank(self) -> int:
        return rank_rows(self.dense_rows(), self.field)

    def column_index(self) -> dict[Monomial, int]:
        return {mono: i for i, mono in enumerate(self.col_labels)}

    def apply(self, values: list[int]) -> list[int]:
        """Matrix-vector product against a vector of column values."""
        f = self.field
        out = []
        for row in self.rows:
            acc = f.zero
            for idx, c in row.items():
                v = f.mul(c, values[idx])
                if v:
                    acc = f.add(acc, v)
            out.append(acc)
        return out


def build_macaulay(system: BilinearSystem, b: int, mode: str = "exact") -> MacaulayMatrix:
    """Stack all (lambda-multiplier) x equation products at bi-degree (b,1).

    Rows are grouped by equation, multipliers in descending monomial order;
    columns are sorted descending.  Column sets are enumerated in full from
    (n_cols, n_lambda, w), independent of which monomials actually occur.
    """
    if b < 1:
        raise ValueError("b must be at least 1")
    if mode not in ("exact", "cumulative"):
        raise ValueError(f"unknown mode {mode!r}")
    f = system.field
    q = f.q
    squarefree = False
    if mode == "cumulative":
        if q == 2:
            squarefree = True
        elif b >= q:
            raise ValueError(f"cumulative mode needs b < q, got b={b}, q={q}")
    N = system.n_lambda
    col_degs = [b] if mode == "exact" else list(range(1, b + 1))
    minors = [tuple(T) for T in combinations(range(1, system.n_cols + 1), system.w)]
    col_labels: list[Monomial] = [
        (mu, T)
        for d in col_degs
        for mu in lambda_monomials(N, d, squarefree)
        for T in minors
    ]
    col_labels.sort(key=lambda mono: monomial_key(mono, N), reverse=True)
    col_idx = {mono: i for i, mono in enumerate(col_labels)}
    mult_degs = [b - 1] if mode == "exact" else list(range(b))
    multipliers = [mu for d in mult_degs for mu in lambda_monomials(N, d, squarefree)]
    multipliers.sort(key=lambda mu: (len(mu), grevlex_subkey(mu, N)), reverse=True)
    rows: list[dict[int, int]] = []
    row_labels: list[tuple[LamMono, Optional[tuple[int, ...]]]] = []
    for eq in system.equations:
        for mu in multipliers:
            row: dict[int, int] = {}
            for (lam, T), c in eq.terms.items():
                if squarefree:
                    prod = tuple(sorted(set(mu) | set(lam)))
                else:
                    prod = tuple(sorted(mu + lam))
                idx = col_idx[(prod, T)]
                acc = f.add(row.get(idx, f.zero), c)
                if acc:
                    row[idx] = acc
                elif idx in row:
                    del row[idx]
            rows.append(row)
            row_labels.append((mu, eq.J))
    return MacaulayMatrix(
        field=f,
        b=b,
        mode=mode,
        n_lambda=N,
        n_cols_R=system.n_cols,
        w=system.w,
        row_labels=row_labels,
        col_labels=col_labels,
        rows=rows,
    )


def monomial_vector(
    col_labels: list[Monomial], lam_values: list[int], rT_values: dict[MinorIndex, int], field
) -> list[int]:
    """Evaluate every column monomial at a point (for kernel membership)."""
    out = []
    for mu, T in col_labels:
        v = rT_values.get(T, 0)
        for i in mu:
            if v == 0:
                break
            v = field.mul(v, lam_values[i - 1])
        out.append(v)
    return out


@dataclass
class Syzygy:
    """Relation Sum_J form_J * Q_J = 0 with degree-1 lambda-form entries.

    Duplicating the word row of Delta on rows K (a (w+2)-subset) gives a
    singular square matrix; expanding its determinant along the duplicate row
    produces the relation.  entries maps J = K minus one element to the form
    {lambda index -> coefficient}.
    """

    K: tuple[int, ...]
    entries: dict[tuple[int, ...], dict[int, int]]


def build_syzygies(inst: RslInstance, w: int) -> list[Syzygy]:
    p = inst.params
    nk = p.n - p.k
    ext = inst.field
    if not 0 < w + 2 <= nk:
        raise ValueError(f"need w + 2 <= n - k, got w={w}, n-k={nk}")
    out: list[Syzygy] = []
    for K in combinations(range(1, nk + 1), w + 2):
        entries: dict[tuple[int, ...], dict[int, int]] = {}
        for u, ku in enumerate(K, start=1):
            J = tuple(x for x in K if x != ku)
            positive = (w + u) % 2 == 0
            form: dict[int, int] = {}
            for i in range(p.N):
                s = inst.S[ku - 1, i]
                if s == 0:
                    continue
                form[i + 1] = s if positive else ext.neg(s)
            entries[J] = form
        out.append(Syzygy(K=K, entries=entries))
    return out


def apply_syzygy(syz: Syzygy, system: BilinearSystem) -> dict[Monomial, int]:
    """Formal product Sum_J form_J * Q_J with multiset lambda-monomials and no
    reduction; returns the surviving terms (empty for a true relation)."""
    f = system.field
    eq_by_J = {eq.J: eq for eq in system.equations}
    acc: dict[Monomial, int] = {}
    for J, form in syz.entries.items():
        eq = eq_by_J[J]
        for i, ci in form.items():
            for (lam, T), c in eq.terms.items():
                key = (tuple(sorted(lam + (i,))), T)
                v = f.add(acc.get(key, f.zero), f.mul(ci, c))
                if v:
                    acc[key] = v
                elif key in acc:
                    del acc[key]
    return acc


def syzygy_stack_rows(
    syzygies: list[Syzygy], system: BilinearSystem
) -> list[list[int]]:
    """Coefficient matrix of the syzygies: one row per relation, one column
    per (J, lambda index) pair, for independence checks."""
    nk_cols = [eq.J for eq in system.equations]
    index = {
        (J, i): t
        for t, (J, i) in enumerate(
            (J, i) for J in nk_cols for i in range(1, system.n_lambda + 1)
        )
    }
    rows = []
    for syz in syzygies:
        row = [0] * len(index)
        for J, form in syz.entries.items():
            for i, c in form.items():
                row[index[(J, i)]] = c
        rows.append(row)
    return rows


def dump_system(system: BilinearSystem, fh: TextIO) -> None:
    """One equation per line: J=<indices> : <coeff>*l<i>^<e>*..*r{T} + ...

    Terms in descending monomial order; coefficients as integer tokens."""
    N = system.n_lambda
    for eq in system.equations:
        label = ",".join(str(j) for j in eq.J) if eq.J else "-"
        parts = []
        for mono in sorted(eq.terms, key=lambda mn: monomial_key(mn, N), reverse=True):
            mu, T = mono
            factors = [str(eq.terms[mono])]
            exps: dict[int, int] = {}
            for i in mu:
                exps[i] = exps.get(i, 0) + 1
            for i in sorted(exps):
                factors.append(f"l{i}^{exps[i]}")
            factors.append("r{" + ",".join(str(t) for t in T) + "}")
            parts.append("*".join(factors))
        fh.write(f"J={label} : " + (" + ".join(parts) if parts else "0") + "\n")
