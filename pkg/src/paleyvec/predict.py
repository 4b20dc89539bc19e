"""Closed-form clique-number predictions and bound checkers.

This module is the reconciliation layer between the formulas (exact
values for dimensions 1, 2 and n-1, bounds everywhere else) and the
exact solver.  Every check is phrased so that a pass/fail decision never
rests on floating-point rounding: power comparisons are exact integer
arithmetic where the exponent is rational, and certified rational
enclosures (width well under 2^-40) where it is not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import NoNonzeroSquare, PreconditionViolated, WrongDimension
from .gf import FieldCtx, _divisors
from .linalg import (
    D_invariant,
    Subspace,
    contains_nonzero_square,
    s_invariant,
)


def omega_qn(q: int, n: int) -> int:
    """Largest clique number over all proper subspaces of F_{q^n}."""
    if q == 2 and 2 <= n <= 5:
        return n + 1
    if n % 2:
        return q ** ((n - 1) // 2) + 1
    return q ** (n // 2)


# -- the exponent bound -------------------------------------------------------


def _log2_enclosure(v: int) -> tuple[Fraction, Fraction]:
    """Certified rational enclosure of log2(v) for a positive integer."""
    if v == 1:
        return Fraction(0), Fraction(0)
    x = Fraction(math.log2(v))
    margin = Fraction(1, 1 << 44)  # libm is correct to ~1 ulp; 2^-44 is generous
    return x * (1 - margin), x * (1 + margin)


@dataclass(frozen=True)
class KappaBound:
    """The exponent cap max(D, 7d/8 + 7/(32 log2 q)), held exactly or enclosed."""

    d_U: int
    D_U: int
    q: int
    lo: Fraction
    hi: Fraction
    exact: bool

    @property
    def value(self) -> float:
        return float((self.lo + self.hi) / 2)

    def upper_holds(self, omega: int) -> bool:
        """Whether omega <= q^kappa + d_U, failing only when the whole
        enclosure fails."""
        rem = omega - self.d_U
        if rem <= 1:
            return True
        if self.exact and self.hi.denominator == 1:
            return rem <= self.q ** int(self.hi)
        if self.exact:
            # q is a power of two here, so the exponent of 2 is rational
            m = self.q.bit_length() - 1
            expo = self.hi * m
            return rem**expo.denominator <= 2**expo.numerator
        lhs_lo, _ = _log2_enclosure(rem)
        llo, lhi = _log2_enclosure(self.q)
        rhs_hi = self.hi * lhi
        return not lhs_lo > rhs_hi

    def lower_value(self) -> int:
        return self.q**self.D_U


def kappa_U(U: Subspace) -> KappaBound:
    """Exponent bound for the clique number of the graph of U."""
    ctx = U.ctx
    if not contains_nonzero_square(U):
        raise NoNonzeroSquare("the exponent bound needs a nonzero square in U")
    D = D_invariant(U)
    d = U.dim
    if ctx.p == 2:
        f = Fraction(7, 8) * d + Fraction(7, 32 * ctx.m)
        k = max(Fraction(D), f)
        return KappaBound(d, D, ctx.q, k, k, True)
    flo_l, fhi_l = _log2_enclosure(ctx.q)
    flo = Fraction(7, 8) * d + Fraction(7, 32) / fhi_l
    fhi = Fraction(7, 8) * d + Fraction(7, 32) / flo_l
    lo, hi = max(Fraction(D), flo), max(Fraction(D), fhi)
    return KappaBound(d, D, ctx.q, lo, hi, hi <= D)


# -- predictions --------------------------------------------------------------


@dataclass(frozen=True)
class OmegaPrediction:
    """Predicted clique number: an exact value or a checkable interval."""

    kind: str  # "exact" or "interval"
    value: int | None
    lo: int | None
    hi: int | None
    source: str
    q: int
    n: int
    d_U: int
    has_square: bool
    D_U: int | None
    kappa: KappaBound | None

    @property
    def exact_value(self) -> int | None:
        return self.value if self.kind == "exact" else None

    def admits(self, omega: int) -> bool:
        if self.kind == "exact":
            return omega == self.value
        return self._interval_admits(omega)

    def _interval_admits(self, omega: int) -> bool:
        q, d = self.q, self.d_U
        if not self.has_square:
            return omega == 3
        if omega < 3 or omega < q + min(1, d - 1):
            return False
        if omega > omega_qn(q, self.n):
            return False
        if omega < q**self.D_U:
            return False
        if not self.kappa.upper_holds(omega):
            return False
        if d >= 2:
            if omega > q**d:
                return False
            if omega != q**d and omega > q ** (d - 1) + 1:
                return False
            equality_allowed = (q == 2 and d == 2) or self.D_U == d
            if omega == q**d and not equality_allowed:
                return False
        return _shape_feasible(omega, q, d, self.kappa)

    def describe(self):
        if self.kind == "exact":
            return self.value
        return {"kind": "interval", "lo": self.lo, "hi": self.hi, "source": self.source}


def _shape_feasible(omega: int, q: int, d: int, kappa: KappaBound | None) -> bool:
    """Is omega = q^t + r for some admissible split (t, r)?"""
    t = 0
    while q**t <= omega:
        r = omega - q**t
        if t == 0:
            if r <= d + 1 and omega <= d + 2:
                return True
        elif r + t <= d:
            if omega <= d + 2:
                return True
            if kappa is None or not kappa.hi < t:
                return True
        t += 1
    return False


def predict_omega(U: Subspace) -> OmegaPrediction:
    """Best available prediction for the clique number of the graph of U.

    Exact for dimension 1, dimension 2, dimension n-1, and for any
    subspace without a nonzero square; an intersected-bound interval
    otherwise.
    """
    ctx = U.ctx
    q, n, d = ctx.q, ctx.n, U.dim
    if not 1 <= d <= n - 1:
        raise WrongDimension(f"need 1 <= dim <= {n - 1}, got {d}")
    has_sq = contains_nonzero_square(U)

    def exact(v, source):
        return OmegaPrediction(
            "exact", v, v, v, source, q, n, d, has_sq,
            D_invariant(U) if has_sq else None, kappa_U(U) if has_sq else None,
        )

    if not has_sq:
        return exact(3, "no-nonzero-square")
    if d == 1:
        if q in (2, 3):
            return exact(3, "dim-1")
        return exact(q, "dim-1")
    if d == 2:
        if q == 2:
            return exact(4, "dim-2")
        D = D_invariant(U)
        if n % 2 == 0 and D == 2:
            return exact(q * q, "dim-2 scaled-quadratic-subfield")
        return exact(q + 1, "dim-2")
    if d == n - 1:
        return exact(hyperplane_omega(U), "dim-(n-1)")
    D = D_invariant(U)
    kb = kappa_U(U)
    lo = max(3, q + min(1, d - 1), q**D)
    hi = min(omega_qn(q, n), q**d)
    return OmegaPrediction("interval", None, lo, hi, "bound-intersection",
                           q, n, d, True, D, kb)


def hyperplane_omega(U: Subspace) -> int:
    """Exact clique number of the graph of a dimension-(n-1) subspace."""
    ctx = U.ctx
    q, n = ctx.q, ctx.n
    if U.dim != n - 1:
        raise WrongDimension(f"need dimension {n - 1}, got {U.dim}")
    if q == 2 and n <= 5:
        return n + 1
    if ctx.p == 2 or n % 2 == 1:
        return q ** (n // 2) + n - 2 * (n // 2)
    s = s_invariant(U)
    big = {(1, 0, -1), (3, 0, -1), (3, 2, 1), (1, 2, -1)}
    if (q % 4, n % 4, s) in big:
        return q ** (n // 2)
    return q ** (n // 2 - 1) + 2


# -- bound reports ------------------------------------------------------------


def bounds_report(U: Subspace, omega: int) -> dict:
    """Check every applicable bound for an exactly computed clique number."""
    ctx = U.ctx
    q, d = ctx.q, U.dim
    has_sq = contains_nonzero_square(U)
    checks: dict[str, bool] = {"at-least-3": omega >= 3}
    if not has_sq:
        checks["no-square-exact-3"] = omega == 3
        checks["no-square-upper"] = omega <= d + 2
    else:
        kb = kappa_U(U)
        checks["subfield-lower"] = omega >= kb.lower_value()
        checks["square-lower"] = omega >= q + min(1, d - 1)
        checks["kappa-upper"] = kb.upper_holds(omega)
        checks["shape"] = _shape_feasible(omega, q, d, kb)
    checks["global-upper"] = omega <= omega_qn(q, ctx.n)
    if d >= 2:
        checks.update(_corollary_checks(U, omega, has_sq))
    return {"omega": omega, "dim": d, "has_square": has_sq,
            "checks": checks, "ok": all(checks.values())}


def _corollary_checks(U: Subspace, omega: int, has_sq: bool) -> dict[str, bool]:
    ctx = U.ctx
    q, d = ctx.q, U.dim
    out = {"power-upper": omega <= q**d}
    out["power-gap"] = omega == q**d or omega <= q ** (d - 1) + 1
    equality_expected = (q == 2 and d == 2) or (has_sq and D_invariant(U) == d)
    out["power-equality-iff"] = (omega == q**d) == equality_expected
    return out


def check_corollary_q_power(U: Subspace, omega: int, graph=None) -> dict:
    """The q^dim upper bound, its equality condition, and (for q = dim = 2,
    when the graph is supplied) the exact shape of every maximum clique."""
    ctx = U.ctx
    q, d = ctx.q, U.dim
    if d < 2:
        raise WrongDimension("the power bound needs dim >= 2")
    has_sq = contains_nonzero_square(U)
    checks = _corollary_checks(U, omega, has_sq)
    if graph is not None and q == 2 and d == 2 and omega == 4:
        checks["max-clique-shape"] = _check_q2_d2_shape(U, graph)
    return {"omega": omega, "checks": checks, "ok": all(checks.values())}


def _check_q2_d2_shape(U: Subspace, graph) -> bool:
    # maximum cliques are exactly {0, a, u/a, v/a} over pairs u != v from U*,
    # where a is the square root of uv/(u+v)
    from .graph import enumerate_maximal_cliques

    ctx = U.ctx
    members = [u for u in U.enumerate_elements() if u]
    expected = set()
    for i, u in enumerate(members):
        for v in members[i + 1 :]:
            a = ctx.sqrt(ctx.mul(ctx.mul(u, v), ctx.inv(ctx.add(u, v))))
            ia = ctx.inv(a)
            expected.add(tuple(sorted({0, a, ctx.mul(u, ia), ctx.mul(v, ia)})))
    if any(len(c) != 4 for c in expected):
        return False
    found = {
        tuple(sorted(c)) for c in enumerate_maximal_cliques(graph) if len(c) == 4
    }
    return found == expected


# -- additive-combinatorics audit ---------------------------------------------


def sum_product_check(ctx: FieldCtx, A, B) -> dict:
    """Audit one instance of the sum-product growth inequality.

    Requires |A| > 1 and B not inside any proper subfield of the top
    field.  The pass/fail comparison is done on 28th powers so no
    radicals or floats are involved.
    """
    A = sorted(set(A))
    B = sorted(set(B))
    if len(A) <= 1:
        raise PreconditionViolated("need |A| > 1")
    for k in _divisors(ctx.mn):
        if k == ctx.mn:
            continue
        if all(ctx.pow(b, ctx.p**k) == b for b in B):
            raise PreconditionViolated(
                f"B lies in the proper subfield of order {ctx.p}^{k}"
            )
    prods = sorted({ctx.mul(a, b) for a in A for b in B})
    plus = {ctx.add(a, t) for a in A for t in prods}
    minus = {ctx.sub(a, t) for a in A for t in prods}
    lhs = max(len(plus), len(minus))
    nA, nB = len(A), len(B)
    rhs28_scaled = min(nA**28 * nB**4, nA**24 * ctx.order**4)  # (rhs * 2^(1/4))^28
    ok = 2**7 * lhs**28 >= rhs28_scaled
    return {
        "size_A": nA,
        "size_B": nB,
        "size_plus": len(plus),
        "size_minus": len(minus),
        "lhs": lhs,
        "rhs": (rhs28_scaled / 2**7) ** (1 / 28),
        "ok": ok,
    }


# -- hyperplane census --------------------------------------------------------


def isomorphism_class_census(ctx: FieldCtx, omega_of) -> dict:
    """Partition the hyperplanes by sign class and audit sizes and clique
    numbers (q odd, n even).  omega_of maps a subspace to its exact value."""
    from .linalg import all_hyperplanes

    if ctx.p == 2 or ctx.n % 2:
        raise PreconditionViolated("the census needs q odd and n even")
    classes: dict[int, list[int]] = {1: [], -1: []}
    for _, U in all_hyperplanes(ctx):
        classes[s_invariant(U)].append(omega_of(U))
    expected = (ctx.order - 1) // (2 * (ctx.q - 1))
    sizes_ok = all(len(v) == expected for v in classes.values())
    constant_ok = all(len(set(v)) == 1 for v in classes.values())
    return {
        "expected_size": expected,
        "sizes": {s: len(v) for s, v in classes.items()},
        "omegas": {s: sorted(set(v)) for s, v in classes.items()},
        "ok": sizes_ok and constant_ok,
    }
