"""Exact dimension of shifted partial derivative spans.

The complexity measure is the rank, over the rationals, of the span of
{gamma * d_theta(P)} where theta ranges over degree-r derivative monomials
and gamma over degree-ell shifts, either of unrestricted support or of
support exactly m.  Rank is computed by streaming fraction-free
elimination on sparse integer rows; columns are ordered lex-descending so
pivot monomials coincide with leading monomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb, gcd
from typing import Dict, Iterable, List, Optional, Sequence, Union

from .errors import BudgetExceededError
from .nw import NWParams, derivative_index_set, generate_nw
from .poly import (
    Fraction,
    Monomial,
    Polynomial,
    Var,
    count_shift_monomials,
    enumerate_degree_monomials,
    enumerate_shift_monomials,
    leading_monomial,
    partial_derivative,
    shift,
)

DEFAULT_ROW_BUDGET = 10**6


@dataclass(frozen=True)
class MeasureQuery:
    """Order r, shift degree ell, optional exact support m.

    m = None is the unrestricted-support mode (all degree-ell shifts);
    derivative_index = None means all degree-r derivative monomials,
    otherwise the given monomials are used (e.g. a one-column-per-row set).
    """

    r: int
    ell: int
    m: Optional[int] = None
    derivative_index: Optional[Sequence[Monomial]] = None

    def __post_init__(self):
        if self.r < 0 or self.ell < 0:
            raise ValueError("r and ell must be nonnegative")
        if self.m is not None and not 1 <= self.m <= self.ell:
            raise ValueError("support m must satisfy 1 <= m <= ell")


class LexRankEliminator:
    """Streaming exact rank over Q of sparse rows keyed by Monomial.

    Incoming rows have their denominators cleared; elimination combines
    rows by integer cross-multiplication and gcd normalization, so every
    intermediate value stays an exact integer.
    """

    def __init__(self):
        self.basis: Dict[Monomial, Dict[Monomial, int]] = {}

    @staticmethod
    def _clear_denominators(row: Dict[Monomial, Fraction]) -> Dict[Monomial, int]:
        den = 1
        for c in row.values():
            f = Fraction(c)
            den = den * f.denominator // gcd(den, f.denominator)
        return {m: int(Fraction(c) * den) for m, c in row.items() if c}

    @staticmethod
    def _normalize(row: Dict[Monomial, int]) -> Dict[Monomial, int]:
        g = 0
        for v in row.values():
            g = gcd(g, v)
        if g > 1:
            row = {m: v // g for m, v in row.items()}
        return row

    def add(self, row: Dict[Monomial, Union[int, Fraction]]) -> bool:
        """Reduce a row against the basis; True if it increased the rank."""
        work = self._clear_denominators(row)
        while work:
            pivot = max(work)
            base = self.basis.get(pivot)
            if base is None:
                self.basis[pivot] = self._normalize(work)
                return True
            bp, wp = base[pivot], work[pivot]
            merged: Dict[Monomial, int] = {}
            for m in work.keys() | base.keys():
                val = bp * work.get(m, 0) - wp * base.get(m, 0)
                if val:
                    merged[m] = val
            work = self._normalize(merged)
        return False

    @property
    def rank(self) -> int:
        return len(self.basis)

    def pivot_monomials(self) -> List[Monomial]:
        return sorted(self.basis, reverse=True)


def derivative_monomials(p: Polynomial, r: int) -> List[Monomial]:
    """Degree-r monomials with a chance of a nonzero derivative of p.

    Restricting to the support of p with per-variable exponent caps is a
    pure optimization; derivatives outside this set are identically zero.
    """
    if r == 0:
        return [Monomial.unit()]
    caps: Dict[Var, int] = {}
    for m in p.terms:
        for v, e in m.exps:
            caps[v] = max(caps.get(v, 0), e)
    out = []
    for combo in combinations_with_replacement(sorted(caps), r):
        theta = Monomial.from_vars(combo)
        if all(e <= caps[v] for v, e in theta.exps):
            out.append(theta)
    return out


def _shift_monomials(
    variables: Union[int, Sequence[Var]], ell: int, m: Optional[int]
) -> Iterable[Monomial]:
    if ell == 0:
        return [Monomial.unit()]
    if m is None:
        return enumerate_degree_monomials(variables, ell)
    return enumerate_shift_monomials(variables, ell, m)


def _num_shifts(n_vars: int, ell: int, m: Optional[int]) -> int:
    if ell == 0:
        return 1
    if m is None:
        return comb(n_vars + ell - 1, ell)
    return count_shift_monomials(n_vars, ell, m)


def shifted_partials_dim(
    p: Polynomial,
    query: MeasureQuery,
    variables: Union[int, Sequence[Var]],
    budget: int = DEFAULT_ROW_BUDGET,
) -> int:
    return shifted_partials_report(p, query, variables, budget)["dim"]


def shifted_partials_report(
    p: Polynomial,
    query: MeasureQuery,
    variables: Union[int, Sequence[Var]],
    budget: int = DEFAULT_ROW_BUDGET,
) -> dict:
    """Computes the measure and returns {r, ell, m, generators, rows, cols, dim}."""
    if p.is_zero:
        return {
            "r": query.r, "ell": query.ell, "m": query.m,
            "generators": 0, "rows": 0, "cols": 0, "dim": 0,
        }
    n_vars = variables if isinstance(variables, int) else len(variables)
    thetas = (
        list(query.derivative_index)
        if query.derivative_index is not None
        else derivative_monomials(p, query.r)
    )
    n_shifts = _num_shifts(n_vars, query.ell, query.m)
    if len(thetas) * n_shifts > budget:
        raise BudgetExceededError(
            f"{len(thetas)} derivatives x {n_shifts} shifts exceeds budget {budget}"
        )
    derivatives = []
    for theta in thetas:
        dp = partial_derivative(p, theta)
        if not dp.is_zero:
            derivatives.append(dp)
    elim = LexRankEliminator()
    rows = 0
    cols = set()
    for gamma in _shift_monomials(variables, query.ell, query.m):
        for dp in derivatives:
            g = shift(dp, gamma)
            rows += 1
            cols.update(g.terms)
            elim.add(g.terms)
    return {
        "r": query.r,
        "ell": query.ell,
        "m": query.m,
        "generators": rows,
        "rows": rows,
        "cols": len(cols),
        "dim": elim.rank,
    }


def leading_monomial_count(polys: Iterable[Polynomial]) -> int:
    """Dimension of the span as the number of leading monomials of a fully
    row-reduced generating set (pivots under the lex-descending order)."""
    elim = LexRankEliminator()
    for p in polys:
        if not p.is_zero:
            elim.add(p.terms)
    return len(elim.pivot_monomials())


# ---------------------------------------------------------------------------
# shift intersections and the NW union count
# ---------------------------------------------------------------------------


def shift_set(
    alpha: Monomial, variables: Union[int, Sequence[Var]], ell: int, m: int
) -> set:
    return {gamma * alpha for gamma in enumerate_shift_monomials(variables, ell, m)}


def shift_intersection_count(
    alpha: Monomial,
    beta: Monomial,
    variables: Union[int, Sequence[Var]],
    ell: int,
    m: int,
    budget: int = DEFAULT_ROW_BUDGET,
) -> int:
    """Exact |S_alpha n S_beta| for support-m degree-ell shifts."""
    n_vars = variables if isinstance(variables, int) else len(variables)
    if 2 * count_shift_monomials(n_vars, ell, m) > budget:
        raise BudgetExceededError("shift enumeration exceeds budget")
    return len(shift_set(alpha, variables, ell, m) & shift_set(beta, variables, ell, m))


def shift_intersection_bound(n_vars: int, delta: int, ell: int, m: int) -> int:
    """C(N-delta, m-delta) * C(ell-1, m-1); zero when m < delta."""
    if m < delta or n_vars < delta:
        return 0
    return comb(n_vars - delta, m - delta) * comb(ell - 1, m - 1)


def nw_union_leading_count(
    params: NWParams,
    rows: Sequence[int],
    ell: int,
    m: int,
    budget: int = DEFAULT_ROW_BUDGET,
) -> int:
    """Exact size of the union of leading-monomial shift sets over the
    one-column-per-row derivative monomials of the given rows."""
    r = len(rows)
    n, d = params.n, params.d
    if r > d:
        # with more than d pinned rows some column choices admit no
        # univariate at all, so derivatives may vanish
        raise ValueError(f"need |rows| <= d, got {r} > {d}")
    nw_poly = generate_nw(params, budget)
    grid = params.grid_vars()
    n_shifts = count_shift_monomials(len(grid), ell, m)
    if (n**r) * n_shifts > budget:
        raise BudgetExceededError("union enumeration exceeds budget")
    leads = []
    for alpha in derivative_index_set(rows, params):
        dp = partial_derivative(nw_poly, alpha)
        leads.append(leading_monomial(dp))
    union = set()
    for gamma in enumerate_shift_monomials(grid, ell, m):
        for lm in leads:
            union.add(gamma * lm)
    return len(union)
