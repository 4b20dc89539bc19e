"""Symmetric F_q-bilinear forms on F_{q^n} and their invariants.

Two kinds of forms are supported: trace forms (x, y) -> Tr(lam * x * y)
for a nonzero multiplier lam, and explicit symmetric Gram matrices over
F_q in the polynomial basis.  Both are required to be non-degenerate.

The invariants computed here are the sign of the diagonalized form (odd
q), the largest totally isotropic dimension t, and the largest size M of
a pairwise orthogonal set of field elements.  For odd q both t and M
have closed forms; the searches that produce witnesses double as
independent oracles for them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConstructionFailed,
    DegenerateForm,
    EvenCharacteristic,
    StructureViolation,
)
from .gf import FieldCtx
from .linalg import Subspace, _rref, nullspace, span


class BilinearForm:
    """A non-degenerate symmetric F_q-bilinear form on F_{q^n}."""

    __slots__ = ("ctx", "lam", "_gram")

    def __init__(self, ctx: FieldCtx, lam: int | None, gram=None):
        self.ctx = ctx
        self.lam = lam
        self._gram = gram

    @classmethod
    def trace_form(cls, ctx: FieldCtx, lam: int) -> "BilinearForm":
        if lam == 0:
            raise DegenerateForm("the zero multiplier gives a degenerate form")
        form = cls(ctx, lam)
        form.gram_matrix()  # verifies non-degeneracy
        return form

    @classmethod
    def from_gram(cls, ctx: FieldCtx, gram) -> "BilinearForm":
        gram = tuple(tuple(int(v) for v in row) for row in gram)
        if len(gram) != ctx.n or any(len(row) != ctx.n for row in gram):
            raise DegenerateForm(f"gram matrix must be {ctx.n}x{ctx.n}")
        for i in range(ctx.n):
            for j in range(ctx.n):
                if gram[i][j] != gram[j][i]:
                    raise DegenerateForm("gram matrix must be symmetric")
                if not 0 <= gram[i][j] < ctx.q:
                    raise DegenerateForm("gram entries must be F_q scalars")
        form = cls(ctx, None, gram)
        if _rank(ctx, gram) != ctx.n:
            raise DegenerateForm("gram matrix is singular")
        return form

    def gram_matrix(self) -> tuple[tuple[int, ...], ...]:
        if self._gram is None:
            ctx = self.ctx
            basis = [ctx.basis_element(i) for i in range(ctx.n)]
            gram = tuple(
                tuple(
                    ctx.to_fq(ctx.trace(ctx.mul(self.lam, ctx.mul(bi, bj))))
                    for bj in basis
                )
                for bi in basis
            )
            if _rank(ctx, gram) != ctx.n:
                raise DegenerateForm(f"trace form with multiplier {self.lam} is degenerate")
            self._gram = gram
        return self._gram

    def evaluate(self, x: int, y: int) -> int:
        ctx = self.ctx
        if self.lam is not None:
            return ctx.to_fq(ctx.trace(ctx.mul(self.lam, ctx.mul(x, y))))
        gram = self._gram
        xs = ctx.element_coords(x)
        ys = ctx.element_coords(y)
        acc = 0
        for i, xi in enumerate(xs):
            if not xi:
                continue
            row = gram[i]
            inner = 0
            for j, yj in enumerate(ys):
                if yj and row[j]:
                    inner = ctx.add(inner, ctx.mul(row[j], yj))
            acc = ctx.add(acc, ctx.mul(xi, inner))
        return acc

    def __repr__(self) -> str:
        if self.lam is not None:
            return f"BilinearForm(trace, lam={self.lam})"
        return f"BilinearForm(gram={self._gram})"


def _rank(ctx: FieldCtx, gram) -> int:
    rows, _ = _rref(ctx, [list(r) for r in gram])
    return len(rows)


def diagonalize(form: BilinearForm) -> tuple[int, ...]:
    """Diagonal of a congruent diagonal Gram matrix (q odd).

    Symmetric row/column elimination with the first usable pivot by
    index; when every remaining diagonal entry vanishes, a row and column
    combination manufactures one (possible since q is odd).
    """
    ctx = form.ctx
    if ctx.p == 2:
        raise EvenCharacteristic("diagonalization by congruence needs q odd")
    n = ctx.n
    g = [list(row) for row in form.gram_matrix()]

    def add_multiple(dst, src, factor):
        # row operation followed by the mirror column operation
        for c in range(n):
            g[dst][c] = ctx.add(g[dst][c], ctx.mul(factor, g[src][c]))
        for r in range(n):
            g[r][dst] = ctx.add(g[r][dst], ctx.mul(factor, g[r][src]))

    def swap(i, j):
        g[i], g[j] = g[j], g[i]
        for r in range(n):
            g[r][i], g[r][j] = g[r][j], g[r][i]

    for k in range(n):
        if g[k][k] == 0:
            j = next((j for j in range(k + 1, n) if g[j][j]), None)
            if j is not None:
                swap(k, j)
            else:
                i, j = next(
                    (i, j)
                    for i in range(k, n)
                    for j in range(i + 1, n)
                    if g[i][j]
                )
                add_multiple(i, j, 1)  # doubles the off-diagonal entry onto g[i][i]
                if i != k:
                    swap(k, i)
        pivot = g[k][k]
        ipivot = ctx.inv(pivot)
        for r in range(k + 1, n):
            if g[r][k]:
                add_multiple(r, k, ctx.neg(ctx.mul(g[r][k], ipivot)))
    return tuple(g[k][k] for k in range(n))


def chi_of_form(form: BilinearForm) -> int:
    """Product of the quadratic characters over any diagonalization (q odd)."""
    sign = 1
    for a in diagonalize(form):
        sign *= form.ctx.quadratic_character(a)
    return sign


def orthogonal_complement(U: Subspace, form: BilinearForm) -> Subspace:
    """All w with B(u, w) = 0 for every u in U; dimension n - dim(U)."""
    ctx = form.ctx
    if U.dim == 0:
        return span(ctx, [ctx.basis_element(i) for i in range(ctx.n)])
    gram = form.gram_matrix()
    rows = []
    for u in U.basis:
        coords = ctx.element_coords(u)
        row = []
        for j in range(ctx.n):
            acc = 0
            for i, ci in enumerate(coords):
                if ci and gram[i][j]:
                    acc = ctx.add(acc, ctx.mul(ci, gram[i][j]))
            row.append(acc)
        rows.append(row)
    kernel = nullspace(ctx, rows)
    result = span(ctx, [ctx.element_from_coords(v) for v in kernel])
    if result.dim != ctx.n - U.dim:
        raise DegenerateForm("complement dimension is wrong; form must be degenerate")
    return result


# -- totally isotropic subspaces ---------------------------------------------


def isotropic_dimension_search(form: BilinearForm, target: int | None = None):
    """Largest totally isotropic subspace by exhaustive extension search.

    Explores index-increasing generating sequences, so every subspace is
    reachable through its greedy minimal basis.  With a target, stops as
    soon as a subspace of that dimension is found.
    """
    ctx = form.ctx
    limit = ctx.n // 2  # a totally isotropic space sits inside its own complement
    isotropic = [w for w in range(1, ctx.order) if form.evaluate(w, w) == 0]
    best: tuple[int, tuple[int, ...]] = (0, ())

    def extend(basis, span_set, cands):
        nonlocal best
        if len(basis) > best[0]:
            best = (len(basis), tuple(basis))
        if len(basis) == limit or (target is not None and best[0] >= target):
            return
        for idx, w in enumerate(cands):
            if w in span_set:
                continue
            sub = [
                x for x in cands[idx + 1 :]
                if x not in span_set and form.evaluate(w, x) == 0
            ]
            new_span = set(span_set)
            for lam in range(1, ctx.q):
                lw = ctx.mul(lam, w)
                new_span.update(ctx.add(s, lw) for s in span_set)
            extend(basis + [w], new_span, sub)
            if target is not None and best[0] >= target:
                return

    extend([], {0}, isotropic)
    return best[0], span(ctx, best[1])


def t_of_form(form: BilinearForm) -> tuple[int, Subspace]:
    """Largest totally isotropic dimension, with a verified witness subspace.

    Odd q: closed form (n odd gives (n-1)/2; n even adds the sign of the
    form times the sign of -1 raised to n/2), witness found by search.
    Even q: exhaustive search value.
    """
    ctx = form.ctx
    n = ctx.n
    if ctx.p != 2:
        if n % 2:
            t = (n - 1) // 2
        else:
            chi_m1 = 1 if ctx.q % 4 == 1 else -1
            t = (n + chi_of_form(form) * chi_m1 ** (n // 2) - 1) // 2
        found, witness = isotropic_dimension_search(form, target=t)
        if found != t:
            raise StructureViolation(f"isotropic search reached {found}, expected {t}")
    else:
        t, witness = isotropic_dimension_search(form)
    if t > n // 2:
        raise StructureViolation(f"t = {t} exceeds n/2")
    for u in witness.basis:
        for w in witness.basis:
            if form.evaluate(u, w) != 0:
                raise StructureViolation("witness is not totally isotropic")
    return t, witness


# -- pairwise orthogonal sets -------------------------------------------------


def orthogonality_adjacency(form: BilinearForm) -> list[int]:
    """Bit-packed graph on the field with edges where the form vanishes."""
    ctx = form.ctx
    n = ctx.order
    if form.lam is not None and ctx._exp_np is not None:
        trace = np.array(ctx._trace, dtype=np.int64)
        rows = [(1 << n) - 2]
        nbytes = (n + 7) // 8
        log_lam = int(ctx._log_np[form.lam]) if form.lam else 0
        vs = np.arange(1, n, dtype=np.int64)
        log_v = ctx._log_np[vs] + log_lam
        ws = np.arange(1, n, dtype=np.int64)
        log_w = ctx._log_np[ws]
        prod = ctx._exp_np[(log_v[:, None] + log_w[None, :]) % ctx.mord]
        orth = trace[prod] == 0
        bits = np.zeros((n - 1, n), dtype=bool)
        bits[:, 1:] = orth
        bits[:, 0] = True
        bits[np.arange(n - 1), vs] = False
        packed = np.packbits(bits, axis=1, bitorder="little")
        for i in range(n - 1):
            rows.append(int.from_bytes(packed[i, :nbytes].tobytes(), "little"))
        return rows
    rows = [(1 << n) - 2]
    for v in range(1, n):
        row = 1
        for w in range(1, n):
            if w != v and form.evaluate(v, w) == 0:
                row |= 1 << w
        rows.append(row)
    return rows


@dataclass(frozen=True)
class FormInvariants:
    """Invariants of a form: sign, isotropic dimension, orthogonal-set size."""

    chi: int | None
    t: int
    witness_W: Subspace
    M: int
    witness_E: tuple[int, ...]
    M_upper: int | None  # stated upper bound when q is even


def orthogonal_set_max(form: BilinearForm):
    """Exact largest pairwise-orthogonal set, by clique search."""
    from .graph import _Search  # local import to avoid a cycle

    adj = orthogonality_adjacency(form)
    search = _Search(adj, None, None)
    search.expand([], (1 << len(adj)) - 1)
    return search.best_size, tuple(sorted(search.best))


def M_of_form(form: BilinearForm, with_witness: bool = True) -> FormInvariants:
    """Largest pairwise-orthogonal set size, with witness and bound data.

    Odd q: the closed form q^t + n - 2t; the witness search must reach it.
    Even q: exact value by search, checked against the stated bound
    (n + 1 when q = 2 and t <= 2, else q^t + n - 2t).
    """
    ctx = form.ctx
    n = ctx.n
    if ctx.p != 2:
        chi = chi_of_form(form)
        t, witness_W = t_of_form(form)
        M = ctx.q**t + n - 2 * t
        witness_E: tuple[int, ...] = ()
        if with_witness:
            found, witness_E = orthogonal_set_max(form)
            if found != M:
                raise StructureViolation(f"orthogonal-set search reached {found}, expected {M}")
        return FormInvariants(chi, t, witness_W, M, witness_E, None)
    t, witness_W = t_of_form(form)
    if ctx.q == 2 and t <= 2:
        upper = n + 1
    else:
        upper = ctx.q**t + n - 2 * t
    M, witness_E = orthogonal_set_max(form)
    if M > upper:
        raise StructureViolation(f"M = {M} exceeds the bound {upper}")
    return FormInvariants(None, t, witness_W, M, witness_E, upper)


def verify_orthogonal_set(form: BilinearForm, E) -> bool:
    els = list(E)
    return all(
        form.evaluate(u, w) == 0 for i, u in enumerate(els) for w in els[i + 1 :]
    )


# -- the special orthogonal basis ---------------------------------------------


def special_basis(ctx: FieldCtx) -> tuple[tuple[int, ...], int]:
    """Basis b_1..b_n with Tr(b_i b_j) = 0 off the diagonal, Tr(b_i^2) = 1
    for i > 1, and Tr(b_1^2) = mu.

    mu is 1 when q is even or q and n are both odd, and the least
    non-square scalar of F_q when q is odd and n is even.  Vectors are
    found by a deterministic scan in index order, rescaled to hit the
    required self-pairing, with backtracking if a partial choice dead-ends.
    """
    form = BilinearForm.trace_form(ctx, 1)
    n = ctx.n
    if ctx.p == 2 or n % 2 == 1:
        mu = 1
    else:
        mu = ctx.least_nonsquare()
    targets = [mu] + [1] * (n - 1)

    def candidates(chosen: list[int], target: int):
        if chosen:
            ortho = orthogonal_complement(span(ctx, chosen), form)
            pool = ortho.enumerate_elements()
        else:
            pool = range(ctx.order)
        seen = set()
        for w in pool:
            if w == 0:
                continue
            qw = form.evaluate(w, w)
            if qw == 0:
                continue
            ratio = ctx.mul(target, ctx.inv(qw))
            lam = ctx.fq_sqrt(ratio)
            if lam is None:
                continue
            scaled = ctx.mul(lam, w)
            if scaled in seen:
                continue
            seen.add(scaled)
            yield scaled

    def extend(chosen: list[int]) -> tuple[int, ...] | None:
        if len(chosen) == n:
            return tuple(chosen)
        for w in candidates(chosen, targets[len(chosen)]):
            result = extend(chosen + [w])
            if result is not None:
                return result
        return None

    basis = extend([])
    if basis is None:
        raise ConstructionFailed(f"no orthogonal basis found for q={ctx.q}, n={n}")
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            want = 0 if i != j else targets[i]
            if form.evaluate(bi, bj) != want:
                raise StructureViolation("constructed basis fails its pairing table")
    if span(ctx, basis).dim != n:
        raise StructureViolation("constructed vectors do not form a basis")
    return basis, mu
