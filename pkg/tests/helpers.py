"""Shared random generators for the test suite."""

from fractions import Fraction

from spdlab.poly import Monomial, Polynomial, xvar


def random_monomial(rng, variables, degree, multilinear=False):
    if multilinear:
        vars_choice = rng.sample(list(variables), degree)
    else:
        vars_choice = [rng.choice(list(variables)) for _ in range(degree)]
    return Monomial.from_vars(vars_choice)


def random_polynomial(rng, variables, max_terms=5, max_degree=4, min_degree=0):
    terms = {}
    for _ in range(rng.randrange(1, max_terms + 1)):
        deg = rng.randrange(min_degree, max_degree + 1)
        m = random_monomial(rng, variables, deg)
        c = rng.choice([-3, -2, -1, 1, 2, 3])
        terms[m] = terms.get(m, Fraction(0)) + c
    p = Polynomial(terms)
    if p.is_zero:
        p = Polynomial({random_monomial(rng, variables, max(min_degree, 1)): 1})
    return p


def flat_vars(n):
    return [xvar(j) for j in range(n)]


def random_homogeneous_factor(rng, variables, degree, max_support):
    """Homogeneous degree-`degree` polynomial whose monomials have support
    at most max_support."""
    terms = {}
    for _ in range(rng.randrange(1, 4)):
        t = rng.randrange(1, min(max_support, degree, len(variables)) + 1)
        supp = rng.sample(list(variables), t)
        cuts = sorted(rng.sample(range(1, degree), t - 1)) if t > 1 else []
        bounds = [0] + cuts + [degree]
        exps = [bounds[i + 1] - bounds[i] for i in range(t)]
        m = Monomial(list(zip(supp, exps)))
        terms[m] = terms.get(m, Fraction(0)) + rng.choice([-2, -1, 1, 2, 3])
    p = Polynomial(terms)
    if p.is_zero:
        v = rng.choice(list(variables))
        p = Polynomial({Monomial([(v, degree)]): 1})
    return p


def random_support_circuit(rng, degree, variables, max_support, max_fanin=3):
    """Random homogeneous circuit in the bounded-bottom-support class."""
    from spdlab.circuit import Depth4Circuit

    products = []
    for _ in range(rng.randrange(1, max_fanin + 1)):
        remaining = degree
        factors = []
        while remaining > 0:
            e = rng.randrange(1, remaining + 1)
            factors.append(random_homogeneous_factor(rng, variables, e, max_support))
            remaining -= e
        products.append(factors)
    return Depth4Circuit.build(products, degree, len(variables))
