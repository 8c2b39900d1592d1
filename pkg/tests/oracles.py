"""Independent brute-force oracles for the measure engine.

Everything here is deliberately coded apart from the library paths it
checks: derivative monomials come from a recursive exponent-vector
enumeration without support pruning, shift monomials from a bitmask +
composition recursion, and rank from a dense Bareiss elimination over an
explicitly materialized monomial basis.
"""

import math
from fractions import Fraction

from spdlab.poly import Monomial, Polynomial, partial_derivative


def degree_monomials(variables, r):
    """All exponent vectors over `variables` summing to r."""
    variables = list(variables)
    out = []

    def rec(idx, remaining, acc):
        if idx == len(variables) - 1:
            out.append(Monomial(acc + [(variables[idx], remaining)]))
            return
        for e in range(remaining + 1):
            rec(idx + 1, remaining - e, acc + [(variables[idx], e)])

    if not variables:
        return [Monomial(())] if r == 0 else []
    rec(0, r, [])
    return out


def support_shift_monomials(variables, ell, m):
    """All support-exactly-m degree-exactly-ell monomials."""
    variables = list(variables)
    n = len(variables)
    out = []
    for mask in range(1 << n):
        chosen = [variables[i] for i in range(n) if (mask >> i) & 1]
        if len(chosen) != m:
            continue

        def rec(idx, remaining, acc):
            if idx == len(chosen) - 1:
                if remaining >= 1:
                    out.append(Monomial(acc + [(chosen[idx], remaining)]))
                return
            for e in range(1, remaining):
                rec(idx + 1, remaining - e, acc + [(chosen[idx], e)])

        if m == 0:
            if ell == 0:
                out.append(Monomial(()))
            continue
        rec(0, ell, [])
    return out


def bareiss_rank(rows):
    """Fraction-free rank of a dense integer matrix (list of lists)."""
    if not rows:
        return 0
    m = [r[:] for r in rows]
    nr, nc = len(m), len(m[0])
    prev = 1
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, nr):
            for j in range(c + 1, nc):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        r += 1
        if r == nr:
            break
    return r


def fraction_rank(rows):
    """Textbook Gaussian elimination over Fraction, for checking bareiss_rank."""
    if not rows:
        return 0
    m = [[Fraction(x) for x in r] for r in rows]
    nr, nc = len(m), len(m[0])
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nr):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == nr:
            break
    return r


def brute_force_dim(p: Polynomial, r: int, ell: int, m, variables) -> int:
    """Rank of the shifted-derivative span over an explicit dense basis."""
    derivs = []
    for theta in degree_monomials(variables, r):
        dp = partial_derivative(p, theta)
        if not dp.is_zero:
            derivs.append(dp)
    if ell == 0:
        shifts = [Monomial(())]
    elif m is None:
        shifts = degree_monomials(variables, ell)
    else:
        shifts = support_shift_monomials(variables, ell, m)
    generators = []
    for gamma in shifts:
        gp = Polynomial.from_monomial(gamma)
        for dp in derivs:
            generators.append(gp * dp)
    basis = sorted({mono for g in generators for mono in g.terms}, reverse=True)
    index = {mono: i for i, mono in enumerate(basis)}
    dense = []
    for g in generators:
        den = 1
        for c in g.terms.values():
            den = den * c.denominator // math.gcd(den, c.denominator)
        row = [0] * len(basis)
        for mono, c in g.terms.items():
            row[index[mono]] = int(c * den)
        dense.append(row)
    return bareiss_rank(dense)
