"""Homogeneous depth-4 circuits: sums of products of sparse polynomials.

A circuit is T products, each a list of polynomial factors; it is
homogeneous when every factor is homogeneous and every product's factor
degrees sum to the declared degree.  Bottom support s is the largest
support of any monomial inside any factor.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import comb
from typing import Iterable, List, Set, Tuple

from .errors import BudgetExceededError
from .poly import (
    Polynomial,
    Var,
    count_shift_monomials,
    kill_variables,
    poly_from_text,
    poly_to_text,
)

DEFAULT_EXPANSION_BUDGET = 10**6


@dataclass(frozen=True)
class Depth4Circuit:
    products: Tuple[Tuple[Polynomial, ...], ...]
    degree: int
    num_vars: int

    @staticmethod
    def build(products: Iterable[Iterable[Polynomial]], degree: int, num_vars: int) -> "Depth4Circuit":
        return Depth4Circuit(
            tuple(tuple(fs) for fs in products), degree, num_vars
        )

    @property
    def top_fanin(self) -> int:
        return len(self.products)


@dataclass(frozen=True)
class ValidationReport:
    homogeneous: bool
    bottom_support: int
    top_fanin: int
    bad_factors: Tuple[Tuple[int, int], ...]  # (product, factor) not homogeneous
    bad_products: Tuple[int, ...]  # factor degrees do not sum to the declared degree

    def in_support_class(self, s: int) -> bool:
        return self.homogeneous and self.bottom_support <= s


def validate(c: Depth4Circuit) -> ValidationReport:
    bad_factors: List[Tuple[int, int]] = []
    bad_products: List[int] = []
    support = 0
    for i, factors in enumerate(c.products):
        total = 0
        for j, q in enumerate(factors):
            if not q.is_homogeneous or q.is_zero:
                bad_factors.append((i, j))
            total += max(q.degree, 0)
            for m in q.terms:
                support = max(support, m.support)
        if total != c.degree:
            bad_products.append(i)
    return ValidationReport(
        homogeneous=not bad_factors and not bad_products,
        bottom_support=support,
        top_fanin=c.top_fanin,
        bad_factors=tuple(bad_factors),
        bad_products=tuple(bad_products),
    )


def expand(c: Depth4Circuit, budget: int = DEFAULT_EXPANSION_BUDGET) -> Polynomial:
    """The computed polynomial sum_i prod_j Q_{i,j}."""
    total = Polynomial.zero()
    for factors in c.products:
        size = 1
        for q in factors:
            size *= max(q.num_terms, 1)
            if size > budget:
                raise BudgetExceededError(
                    f"product expansion may reach {size} terms (budget {budget})"
                )
        prod = Polynomial.constant(1)
        for q in factors:
            prod = prod * q
        total = total + prod
    return total


def apply_restriction(c: Depth4Circuit, killed: Set[Var]) -> Depth4Circuit:
    """Drop every monomial mentioning a killed variable; a product with an
    emptied factor is dropped entirely."""
    new_products = []
    for factors in c.products:
        restricted = [kill_variables(q, killed) for q in factors]
        if any(q.is_zero for q in restricted):
            continue
        new_products.append(tuple(restricted))
    return Depth4Circuit(tuple(new_products), c.degree, c.num_vars)


def circuit_measure_upper_bound(
    n: int,
    num_vars: int,
    r: int,
    ell: int,
    m: int,
    s: int,
    top_fanin: int = 1,
    enforce_preconditions: bool = True,
) -> int:
    """Exact-count upper bound on the measure of a support-s circuit:

        T * C(n+r, r) * sum_{i=0}^{n-r} sum_{j=0}^{rs} C(N, m+j) * C(ell+i-1, m+j-1)

    This is the explicit monomial count from the product-gate argument,
    with no polynomial slack factor.  The stated parameter ranges
    m+rs <= N/2 and m+rs <= ell/2 are only needed for the collapsed
    one-term form, so they may be disabled explicitly.
    """
    if min(n, num_vars, r, ell, m, s, top_fanin) < 0 or m == 0:
        raise ValueError("parameters must be nonnegative (m positive)")
    if enforce_preconditions:
        if 2 * (m + r * s) > num_vars or 2 * (m + r * s) > ell:
            raise ValueError(
                f"need m+rs <= N/2 and m+rs <= ell/2 "
                f"(m+rs={m + r * s}, N={num_vars}, ell={ell})"
            )
    total = 0
    for i in range(n - r + 1):
        for j in range(r * s + 1):
            total += count_shift_monomials(num_vars, ell + i, m + j)
    return top_fanin * comb(n + r, r) * total


# ---------------------------------------------------------------------------
# text format: one product per line, parenthesized factors joined by '*'
# ---------------------------------------------------------------------------


def circuit_to_text(c: Depth4Circuit) -> str:
    lines = []
    for factors in c.products:
        lines.append("*".join(f"({poly_to_text(q)})" for q in factors))
    return "\n".join(lines)


def circuit_from_text(
    text: str, degree: int | None = None, num_vars: int | None = None
) -> Depth4Circuit:
    products: List[Tuple[Polynomial, ...]] = []
    for line in text.strip().splitlines():
        line = line.strip()
        if not line:
            continue
        chunks = re.findall(r"\(([^()]*)\)", line)
        if "*".join(f"({ch})" for ch in chunks) != line:
            raise ValueError(f"malformed circuit line {line!r}")
        products.append(tuple(poly_from_text(ch) for ch in chunks))
    if degree is None:
        degree = max(
            (sum(max(q.degree, 0) for q in fs) for fs in products), default=0
        )
    if num_vars is None:
        seen = set()
        for fs in products:
            for q in fs:
                seen |= q.support_vars()
        num_vars = len(seen)
    return Depth4Circuit(tuple(products), degree, num_vars)
