"""The Nisan-Wigderson polynomial family over an n x n variable grid.

Rows and columns of the grid are indexed by the 2^k field elements in
increasing bit-pattern order (0-based throughout), so the variable x[i,j]
is "the univariate takes value j at point i".  Each univariate f of degree
< d contributes the multilinear monomial prod_i x[i, f(i)].
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence, Set, Tuple

from .errors import BudgetExceededError
from .gf2 import GF2kField, default_field, gf_mul
from .poly import Monomial, Polynomial, Var, gridvar

DEFAULT_MONOMIAL_BUDGET = 10**6


@dataclass(frozen=True)
class NWParams:
    """n = 2^k rows and columns, univariate degree bound d (degree <= d-1)."""

    k: int
    d: int
    field: GF2kField = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.field is None:
            object.__setattr__(self, "field", default_field(self.k))
        if self.field.k != self.k:
            raise ValueError("field degree does not match k")
        if not 1 <= self.d < self.n:
            raise ValueError(f"need 1 <= d < n, got d={self.d}, n={self.n}")

    @property
    def n(self) -> int:
        return 1 << self.k

    @property
    def num_vars(self) -> int:
        return self.n * self.n

    @property
    def num_monomials(self) -> int:
        return self.n ** self.d

    def grid_vars(self) -> list:
        return [gridvar(i, j) for i in range(self.n) for j in range(self.n)]


def evaluate(coeffs: Sequence[int], point: int, field: GF2kField) -> int:
    """Horner evaluation of sum a_t z^t at the given field point."""
    acc = 0
    for c in reversed(coeffs):
        acc = gf_mul(acc, point, field) ^ c
    return acc


def coeffs_to_bits(coeffs: Sequence[int], k: int) -> int:
    """Concatenate coefficient bit patterns, lowest degree first."""
    bits = 0
    for t, c in enumerate(coeffs):
        bits |= c << (t * k)
    return bits


def bits_to_coeffs(bits: int, d: int, k: int) -> Tuple[int, ...]:
    mask = (1 << k) - 1
    return tuple((bits >> (t * k)) & mask for t in range(d))


def coeff_vectors(params: NWParams) -> Iterator[Tuple[int, ...]]:
    """All n^d coefficient tuples (a_0, ..., a_{d-1}), a_0 varying fastest."""
    for digits in product(range(params.n), repeat=params.d):
        yield digits[::-1]


def monomial_for(coeffs: Sequence[int], rows: Iterable[int], params: NWParams) -> Monomial:
    """The block monomial prod_{i in rows} x[i, f(i)]."""
    return Monomial.from_vars(
        gridvar(i, evaluate(coeffs, i, params.field)) for i in rows
    )


def full_monomial(coeffs: Sequence[int], params: NWParams) -> Monomial:
    return monomial_for(coeffs, range(params.n), params)


def iter_nw_monomials(params: NWParams) -> Iterator[Monomial]:
    for coeffs in coeff_vectors(params):
        yield full_monomial(coeffs, params)


def generate_nw(params: NWParams, budget: int = DEFAULT_MONOMIAL_BUDGET) -> Polynomial:
    """The full polynomial: n^d distinct multilinear degree-n monomials."""
    if params.num_monomials > budget:
        raise BudgetExceededError(
            f"n^d = {params.num_monomials} exceeds budget {budget}; "
            "iterate monomials instead"
        )
    return Polynomial((m, 1) for m in iter_nw_monomials(params))


def derivative_index_set(rows: Sequence[int], params: NWParams) -> Iterator[Monomial]:
    """The n^|rows| monomials choosing one column per given row."""
    n = params.n
    rows = sorted(rows)
    for cols in product(range(n), repeat=len(rows)):
        yield Monomial.from_vars(gridvar(i, j) for i, j in zip(rows, cols))


def restrict_nw(
    params: NWParams,
    killed: Set[Var],
    budget: int = DEFAULT_MONOMIAL_BUDGET,
) -> Polynomial:
    """The sub-sum over monomials avoiding every killed variable."""
    if params.num_monomials > budget:
        raise BudgetExceededError(
            f"n^d = {params.num_monomials} exceeds budget {budget}"
        )
    killed = frozenset(killed)
    return Polynomial(
        (m, 1)
        for m in iter_nw_monomials(params)
        if not (m.support_vars() & killed)
    )
