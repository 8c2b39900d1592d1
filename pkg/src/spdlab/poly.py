"""Sparse multivariate polynomials with exact rational coefficients.

Variables are (row, col) pairs from an n x n grid; single-index variables
for non-grid experiments live on row 0 via xvar(j).  The variable order is
x(i1,j1) > x(i2,j2) iff i1 < i2, or i1 = i2 and j1 < j2, so a variable is
larger exactly when its (row, col) key is smaller.  Monomials compare in
the lexicographic order this induces.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from itertools import combinations, combinations_with_replacement
from math import comb
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple, Union

Var = Tuple[int, int]


def gridvar(i: int, j: int) -> Var:
    return (i, j)


def xvar(j: int) -> Var:
    """Flattened single-index variable x_j."""
    return (0, j)


def flat_index(v: Var, n: int) -> int:
    return v[0] * n + v[1]


@total_ordering
class Monomial:
    """Immutable product of variable powers; exponents are kept positive.

    The exponent list is sorted by (row, col) key, i.e. from the largest
    variable to the smallest, which is the scan order of the lex compare.
    """

    __slots__ = ("exps", "_hash")

    def __init__(self, exps: Iterable[Tuple[Var, int]]):
        items = [(v, e) for v, e in exps if e != 0]
        for v, e in items:
            if e < 0:
                raise ValueError(f"negative exponent for {v}")
        object.__setattr__(self, "exps", tuple(sorted(items)))
        object.__setattr__(self, "_hash", hash(self.exps))

    @staticmethod
    def unit() -> "Monomial":
        return _UNIT

    @staticmethod
    def from_vars(vars: Iterable[Var]) -> "Monomial":
        counts: Dict[Var, int] = {}
        for v in vars:
            counts[v] = counts.get(v, 0) + 1
        return Monomial(counts.items())

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.exps == other.exps

    def __lt__(self, other: "Monomial") -> bool:
        return lex_compare(self, other) < 0

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.exps)

    @property
    def support(self) -> int:
        return len(self.exps)

    def support_vars(self) -> frozenset:
        return frozenset(v for v, _ in self.exps)

    @property
    def is_multilinear(self) -> bool:
        return all(e == 1 for _, e in self.exps)

    @property
    def is_unit(self) -> bool:
        return not self.exps

    def exponent(self, v: Var) -> int:
        for w, e in self.exps:
            if w == v:
                return e
        return 0

    def __mul__(self, other: "Monomial") -> "Monomial":
        counts = dict(self.exps)
        for v, e in other.exps:
            counts[v] = counts.get(v, 0) + e
        return Monomial(counts.items())

    def divides(self, other: "Monomial") -> bool:
        big = dict(other.exps)
        return all(big.get(v, 0) >= e for v, e in self.exps)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        counts = dict(self.exps)
        for v, e in other.exps:
            if counts.get(v, 0) < e:
                raise ValueError("not divisible")
            counts[v] -= e
        return Monomial(counts.items())

    def __repr__(self):
        return f"Monomial({monomial_to_text(self)})"


_UNIT = Monomial(())


def lex_compare(a: Monomial, b: Monomial) -> int:
    """-1, 0 or 1; scans variables from largest to smallest, the first
    differing exponent decides and the larger exponent wins."""
    ia, ib = a.exps, b.exps
    pa = pb = 0
    while pa < len(ia) or pb < len(ib):
        ka = ia[pa][0] if pa < len(ia) else None
        kb = ib[pb][0] if pb < len(ib) else None
        if kb is None or (ka is not None and ka < kb):
            return 1  # a has a positive power at a larger variable
        if ka is None or kb < ka:
            return -1
        ea, eb = ia[pa][1], ib[pb][1]
        if ea != eb:
            return 1 if ea > eb else -1
        pa += 1
        pb += 1
    return 0


def is_extension(big: Monomial, small: Monomial) -> bool:
    """True iff small divides big (exponent-wise)."""
    return small.divides(big)


def monomial_distance(a: Monomial, b: Monomial) -> int:
    """Multiset distance min(|S1| - |S1 n S2|, |S2| - |S1 n S2|)."""
    shared = 0
    eb = dict(b.exps)
    for v, e in a.exps:
        shared += min(e, eb.get(v, 0))
    return min(a.degree - shared, b.degree - shared)


Coeff = Union[int, Fraction]


class Polynomial:
    """Canonical sparse polynomial: Monomial -> nonzero Fraction."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Union[Dict[Monomial, Coeff], Iterable[Tuple[Monomial, Coeff]], None] = None):
        items = terms.items() if isinstance(terms, dict) else (terms or ())
        clean: Dict[Monomial, Fraction] = {}
        for m, c in items:
            c = Fraction(c)
            if c:
                acc = clean.get(m, Fraction(0)) + c
                if acc:
                    clean[m] = acc
                else:
                    clean.pop(m, None)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    @staticmethod
    def zero() -> "Polynomial":
        return Polynomial()

    @staticmethod
    def constant(c: Coeff) -> "Polynomial":
        return Polynomial({Monomial.unit(): c})

    @staticmethod
    def variable(v: Var) -> "Polynomial":
        return Polynomial({Monomial.from_vars([v]): 1})

    @staticmethod
    def from_monomial(m: Monomial, c: Coeff = 1) -> "Polynomial":
        return Polynomial({m: c})

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(frozenset(self.terms.items()))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self):
        return bool(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((m.degree for m in self.terms), default=-1)

    @property
    def is_homogeneous(self) -> bool:
        degrees = {m.degree for m in self.terms}
        return len(degrees) <= 1

    def support_vars(self) -> frozenset:
        out = set()
        for m in self.terms:
            out |= m.support_vars()
        return frozenset(out)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            acc = out.get(m, Fraction(0)) + c
            if acc:
                out[m] = acc
            else:
                out.pop(m, None)
        p = Polynomial()
        object.__setattr__(p, "terms", out)
        return p

    def __neg__(self) -> "Polynomial":
        p = Polynomial()
        object.__setattr__(p, "terms", {m: -c for m, c in self.terms.items()})
        return p

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, c: Coeff) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return Polynomial()
        p = Polynomial()
        object.__setattr__(p, "terms", {m: cc * c for m, cc in self.terms.items()})
        return p

    def __mul__(self, other: Union["Polynomial", Monomial, int, Fraction]) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, Monomial):
            return shift(self, other)
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 * m2
                acc = out.get(m, Fraction(0)) + c1 * c2
                if acc:
                    out[m] = acc
                else:
                    out.pop(m, None)
        p = Polynomial()
        object.__setattr__(p, "terms", out)
        return p

    __rmul__ = __mul__

    def __repr__(self):
        return f"Polynomial({poly_to_text(self)})"


def leading_monomial(p: Polynomial) -> Monomial:
    if p.is_zero:
        raise ValueError("zero polynomial has no leading monomial")
    return max(p.terms)


def shift(p: Polynomial, gamma: Monomial) -> Polynomial:
    """Multiply every term by gamma; degrees add, coefficients unchanged."""
    out = Polynomial()
    object.__setattr__(out, "terms", {m * gamma: c for m, c in p.terms.items()})
    return out


def partial_derivative(p: Polynomial, gamma: Monomial) -> Polynomial:
    """Iterated formal partial derivative of p with respect to gamma."""
    out: Dict[Monomial, Fraction] = {}
    for m, c in p.terms.items():
        coeff = c
        exps = dict(m.exps)
        dead = False
        for v, g in gamma.exps:
            e = exps.get(v, 0)
            if e < g:
                dead = True
                break
            mult = 1
            for t in range(g):
                mult *= e - t
            coeff *= mult
            if e == g:
                del exps[v]
            else:
                exps[v] = e - g
        if dead or not coeff:
            continue
        mm = Monomial(exps.items())
        acc = out.get(mm, Fraction(0)) + coeff
        if acc:
            out[mm] = acc
        else:
            out.pop(mm, None)
    res = Polynomial()
    object.__setattr__(res, "terms", out)
    return res


def kill_variables(p: Polynomial, killed: Iterable[Var]) -> Polynomial:
    """Set the given variables to zero: drop every term that mentions one."""
    dead = frozenset(killed)
    out = Polynomial()
    object.__setattr__(
        out,
        "terms",
        {m: c for m, c in p.terms.items() if not (m.support_vars() & dead)},
    )
    return out


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def _universe(variables: Union[int, Sequence[Var]]) -> List[Var]:
    if isinstance(variables, int):
        return [xvar(j) for j in range(variables)]
    return list(variables)


def enumerate_shift_monomials(
    variables: Union[int, Sequence[Var]], ell: int, m: int
) -> Iterator[Monomial]:
    """All monomials of support exactly m and degree exactly ell.

    Count is C(N, m) * C(ell-1, m-1); the stream is empty when m > N or
    m > ell.  An int universe means the flattened variables x_0..x_{N-1}.
    """
    univ = _universe(variables)
    if m == 0:
        if ell == 0:
            yield Monomial.unit()
        return
    if m > len(univ) or m > ell:
        return
    for supp in combinations(univ, m):
        # positive compositions of ell into m parts via cut points
        for cuts in combinations(range(1, ell), m - 1):
            bounds = (0,) + cuts + (ell,)
            exps = [(supp[t], bounds[t + 1] - bounds[t]) for t in range(m)]
            yield Monomial(exps)


def count_shift_monomials(n_vars: int, ell: int, m: int) -> int:
    if m == 0:
        return 1 if ell == 0 else 0
    if m > n_vars or m > ell:
        return 0
    return comb(n_vars, m) * comb(ell - 1, m - 1)


def enumerate_degree_monomials(
    variables: Union[int, Sequence[Var]], r: int
) -> Iterator[Monomial]:
    """All monomials of degree exactly r over the given variables."""
    univ = _universe(variables)
    for choice in combinations_with_replacement(univ, r):
        yield Monomial.from_vars(choice)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

_VAR_RE = re.compile(r"x\[(-?\d+),(-?\d+)\](?:\^(\d+))?$")
_COEF_RE = re.compile(r"-?\d+(?:/\d+)?$")


def monomial_to_text(m: Monomial) -> str:
    if m.is_unit:
        return "1"
    parts = []
    for (i, j), e in m.exps:
        parts.append(f"x[{i},{j}]" + (f"^{e}" if e > 1 else ""))
    return "*".join(parts)


def poly_to_text(p: Polynomial) -> str:
    """Canonical form: terms sorted lex-descending, '+'-joined."""
    if p.is_zero:
        return "0"
    parts = []
    for m in sorted(p.terms, reverse=True):
        c = p.terms[m]
        if m.is_unit:
            parts.append(str(c))
        elif c == 1:
            parts.append(monomial_to_text(m))
        elif c == -1:
            parts.append("-" + monomial_to_text(m))
        else:
            parts.append(f"{c}*{monomial_to_text(m)}")
    return " + ".join(parts)


def monomial_from_text(text: str) -> Tuple[Fraction, Monomial]:
    """Parse one term; returns (coefficient, monomial)."""
    text = text.strip()
    coeff = Fraction(1)
    if text.startswith("-"):
        coeff = Fraction(-1)
        text = text[1:].strip()
    if not text:
        raise ValueError("empty term")
    exps: Dict[Var, int] = {}
    for factor in text.split("*"):
        factor = factor.strip()
        mv = _VAR_RE.match(factor)
        if mv:
            v = (int(mv.group(1)), int(mv.group(2)))
            e = int(mv.group(3)) if mv.group(3) else 1
            exps[v] = exps.get(v, 0) + e
        elif _COEF_RE.match(factor):
            coeff *= Fraction(factor)
        else:
            raise ValueError(f"malformed factor {factor!r}")
    return coeff, Monomial(exps.items())


def poly_from_text(text: str) -> Polynomial:
    text = text.strip()
    if not text or text == "0":
        return Polynomial()
    out: Dict[Monomial, Fraction] = {}
    for term in re.split(r"\s*\+\s*", text):
        c, m = monomial_from_text(term)
        out[m] = out.get(m, Fraction(0)) + c
    return Polynomial(out)


def poly_to_lines(p: Polynomial) -> str:
    """File form: one canonical term per line, implicitly summed."""
    if p.is_zero:
        return "0\n"
    lines = []
    for m in sorted(p.terms, reverse=True):
        c = p.terms[m]
        if m.is_unit:
            lines.append(str(c))
        elif c == 1:
            lines.append(monomial_to_text(m))
        elif c == -1:
            lines.append("-" + monomial_to_text(m))
        else:
            lines.append(f"{c}*{monomial_to_text(m)}")
    return "\n".join(lines) + "\n"


def poly_from_lines(text: str) -> Polynomial:
    terms = [ln.strip() for ln in text.splitlines() if ln.strip()]
    return poly_from_text(" + ".join(terms))
