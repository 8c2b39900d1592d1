"""Acceptance gate: one test per criterion, at the stated tolerances.

Run `pytest -v tests/test_acceptance.py` for one pass/fail line per
criterion (each test also prints an ACCEPTANCE summary line, visible
with -s or -rA).
"""

import math
import random
import time
from fractions import Fraction
from itertools import combinations

from helpers import flat_vars, random_polynomial, random_support_circuit
from oracles import brute_force_dim
from spdlab.bounds import composed_size_bound, parameter_search, stirling_window_check, sweep_recipe
from spdlab.circuit import circuit_measure_upper_bound, expand, validate
from spdlab.measure import (
    MeasureQuery,
    shift_intersection_bound,
    shift_intersection_count,
    shifted_partials_dim,
)
from spdlab.nw import NWParams, bits_to_coeffs, derivative_index_set, evaluate, generate_nw
from spdlab.poly import Monomial, gridvar, monomial_distance, partial_derivative
from spdlab.report import fit_through_origin
from spdlab.restrict import (
    block_log2_counts,
    rich_block_threshold_log2,
    run_restriction,
    subspace_inclusion_mc,
    survival_probability_mc,
)


def report(criterion, detail):
    print(f"ACCEPTANCE {criterion}: PASS - {detail}")


def test_criterion_01_nw_structure():
    t0 = time.monotonic()
    for k, d in [(1, 1), (2, 2), (3, 2)]:
        p = NWParams(k=k, d=d)
        nw = generate_nw(p)
        n = p.n
        assert nw.num_terms == n**d
        monos = list(nw.terms)
        for m in monos:
            assert m.is_multilinear and m.degree == n
        for a, b in combinations(monos, 2):
            assert len(a.support_vars() & b.support_vars()) <= d - 1
    elapsed = time.monotonic() - t0
    assert elapsed < 5.0
    report(1, f"NW structure exact for (2,1),(4,2),(8,2) in {elapsed:.2f}s")


def test_criterion_02_measure_oracle_equivalence():
    t0 = time.monotonic()
    rng = random.Random(20240801)
    queries = [(r, 0, None) for r in range(3)] + [
        (r, ell, m)
        for r in range(3)
        for ell in range(1, 4)
        for m in range(1, min(ell, 3) + 1)
    ]
    checked = 0
    for _ in range(100):
        n_vars = rng.randrange(2, 7)
        vars_ = flat_vars(n_vars)
        p = random_polynomial(rng, vars_, max_terms=5, max_degree=4)
        for r, ell, m in queries:
            q = MeasureQuery(r=r, ell=ell, m=m)
            assert shifted_partials_dim(p, q, n_vars) == brute_force_dim(
                p, r, ell, m, vars_
            )
            checked += 1
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    report(2, f"{checked} (poly, query) pairs match the brute-force rank in {elapsed:.1f}s")


def test_criterion_03_subadditivity_and_scaling():
    rng = random.Random(3)
    for i in range(200):
        n_vars = rng.randrange(2, 5)
        vars_ = flat_vars(n_vars)
        p = random_polynomial(rng, vars_, max_terms=3, max_degree=3)
        q = random_polynomial(rng, vars_, max_terms=3, max_degree=3)
        a = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))
        b = Fraction(rng.choice([-3, -1, 1, 2]))
        ell = rng.randrange(1, 3)
        query = MeasureQuery(r=rng.randrange(0, 3), ell=ell, m=rng.randrange(1, ell + 1))
        combo = p.scale(a) + q.scale(b)
        assert shifted_partials_dim(combo, query, n_vars) <= (
            shifted_partials_dim(p, query, n_vars)
            + shifted_partials_dim(q, query, n_vars)
        )
        assert shifted_partials_dim(p.scale(a), query, n_vars) == shifted_partials_dim(
            p, query, n_vars
        )
    report(3, "subadditivity + scaling invariance exact on 200 instances")


def test_criterion_04_shift_intersection_bound():
    pairs = 0
    for n_vars in range(2, 7):
        vars_ = flat_vars(n_vars)
        for deg in range(1, n_vars + 1):
            monos = [Monomial.from_vars(c) for c in combinations(vars_, deg)]
            for i in range(len(monos)):
                for j in range(i, len(monos)):
                    a, b = monos[i], monos[j]
                    delta = monomial_distance(a, b)
                    for ell in range(1, 5):
                        for m in range(1, min(ell, 3) + 1):
                            got = shift_intersection_count(a, b, n_vars, ell, m)
                            assert got <= shift_intersection_bound(n_vars, delta, ell, m)
                            pairs += 1
    report(4, f"intersection bound holds on {pairs} exhaustive cases")


def test_criterion_05_distinct_derivatives():
    rng = random.Random(5)
    cases = [(2, 2, 0), (2, 3, 0), (3, 4, 1), (3, 4, 2), (3, 5, 2)]
    for k, d, r in cases:
        p = NWParams(k=k, d=d)
        n = p.n
        assert n - r > d and (r == 0 or r < d - 1)
        nw = generate_nw(p)
        for _ in range(3):
            rows = sorted(rng.sample(range(n), r))
            seen = set()
            for alpha in derivative_index_set(rows, p):
                dp = partial_derivative(nw, alpha)
                assert not dp.is_zero
                seen.add(dp)
            assert len(seen) == n**r
    report(5, "n^r distinct nonzero derivatives for all valid (n, d, r)")


def test_criterion_06_circuit_bound_soundness():
    rng = random.Random(606)
    checked = 0
    while checked < 100:
        n = rng.randrange(2, 5)
        n_vars = rng.randrange(4, 9)
        c = random_support_circuit(
            rng, degree=n, variables=flat_vars(n_vars), max_support=rng.randrange(1, 3)
        )
        rep = validate(c)
        assert rep.homogeneous and rep.top_fanin <= 3
        e = expand(c)
        if e.is_zero:
            continue
        s = max(rep.bottom_support, 1)
        r = rng.randrange(0, 2)
        m = 1
        if 2 * (m + r * s) > n_vars:
            continue
        ell = 2 * (m + r * s) + rng.randrange(0, 2)
        bound = circuit_measure_upper_bound(n, n_vars, r, ell, m, s, rep.top_fanin)
        dim = shifted_partials_dim(e, MeasureQuery(r=r, ell=ell, m=m), n_vars)
        assert dim <= bound
        checked += 1
    report(6, "measured dim <= exact-count bound on 100 random circuits")


def test_criterion_07_restriction_invariants():
    for k, d, eps in [(2, 2, Fraction(1, 2)), (4, 8, Fraction(1, 4))]:
        p = NWParams(k=k, d=d)
        dk = d * k
        enumerable = dk <= 16
        for seed in range(1000):
            out = run_restriction(p, eps, seed)
            assert out.rank == out.matrix.ncols  # independence at every step
            assert out.log2_an_size == dk - out.rank
            assert out.log2_an_size >= dk - eps * k * p.n
            if enumerable:
                cols = out.matrix.columns()
                an = [
                    f
                    for f in range(1 << dk)
                    if all(
                        (bin(f & c).count("1") & 1) == ((out.rhs >> t) & 1)
                        for t, c in enumerate(cols)
                    )
                ]
                assert len(an) == 1 << out.log2_an_size
                for i in range(p.n):
                    brute = {
                        evaluate(bits_to_coeffs(f, d, k), i, p.field) for f in an
                    }
                    assert set(out.surviving[i].enumerate()) == brute
    report(7, "feasibility, |A_n| claim and surviving values on 2 x 1000 runs")


def test_criterion_08_rich_block_guarantee():
    p = NWParams(k=4, d=8)
    eps = Fraction(1, 4)
    r = 2
    threshold = rich_block_threshold_log2(p, eps, r)
    assert threshold == 4  # n^(r(1 - eps n/d)) = 16^(2 * 1/2) = 2^4
    for seed in range(500):
        out = run_restriction(p, eps, seed)
        counts = block_log2_counts(out, r)
        assert max(counts) >= threshold
    report(8, "every one of 500 seeds exhibits a block with m_i >= 16")


def test_criterion_09_survival_probabilities():
    k, n = 4, 16
    eps = Fraction(1, 4)
    trials = 10**4
    failures = []

    def check(name, result, bound):
        sigma = math.sqrt(bound * (1 - bound) / result.qualifying)
        if result.frequency > bound + 3 * sigma:
            failures.append((name, result.frequency, bound + 3 * sigma))

    var00 = Monomial.from_vars([gridvar(0, 0)])
    # compact conditioning has mass at shallow d (constraints fill F_2^(dk))
    res = survival_probability_mc(
        NWParams(k=k, d=4), eps, var00, trials, seed=901, require_compact=[0]
    )
    assert res.qualifying >= trials // 2
    check("compact-single-variable", res, 1 / n)

    # deep d keeps every row non-compact at eps = 1/4
    res = survival_probability_mc(
        NWParams(k=k, d=8), eps, var00, trials, seed=902, require_noncompact=[0]
    )
    assert res.qualifying >= trials // 2
    check("noncompact-single-variable", res, n ** (-0.25))

    pair = Monomial.from_vars([gridvar(0, 0), gridvar(1, 1)])
    res = survival_probability_mc(
        NWParams(k=k, d=4), eps, pair, trials, seed=903, require_compact=[0, 1]
    )
    assert res.qualifying >= trials // 2
    check("two-compact-rows", res, 1 / n**2)

    for t, (dv, du, dw) in enumerate([(4, 2, 1), (4, 2, 2), (5, 3, 1), (6, 3, 2), (6, 4, 3)]):
        res = subspace_inclusion_mc(dv, du, dw, trials, seed=910 + t)
        check(f"subspace({dv},{du},{dw})", res, 2.0 ** (-(dv - du) * dw))

    assert not failures, f"bounds exceeded: {failures}"
    report(9, "8 survival/inclusion frequencies within bound + 3 sigma at 10^4 trials")


def test_criterion_10_asymptotic_reproduction():
    t0 = time.monotonic()
    ns = [64, 128, 256, 512, 1024]
    result = parameter_search(64, 32)
    rows = sweep_recipe(result.recipe, ns)
    per_n = [row["log2_ratio_per_n"] for row in rows]
    assert all(v > 0 for v in per_n)
    floor = min(per_n)
    assert floor > 0

    eps = Fraction(1, 64)
    recipe = result.recipe
    from spdlab.bounds import Recipe

    composed_recipe = Recipe(
        delta=recipe.delta, eta=recipe.eta, ell_ratio=recipe.ell_ratio,
        alpha=recipe.alpha, beta=recipe.beta, eps=eps,
    )
    records = [composed_size_bound(n, composed_recipe) for n in ns]
    assert all(rec["ratio_log2"] > 0 for rec in records)
    xs = [math.log2(n) * math.log2(math.log2(n)) for n in ns]
    ys = [rec["size_log2"] for rec in records]
    c = fit_through_origin(xs, ys)
    assert c > 0
    residual = max(abs(y - c * x) for x, y in zip(xs, ys))
    assert residual <= 1e-9 + 0.05 * max(ys)
    elapsed = time.monotonic() - t0
    assert elapsed < 600.0
    report(
        10,
        f"ratio floor {floor:.3f}/n > 0; composed log fits {c:.5f} * log2(n)log2log2(n) "
        f"in {elapsed:.1f}s",
    )


def test_criterion_11_approximation_window():
    worst = 0.0
    for a in (10**3, 10**4, 10**5, 10**6, 10**7):
        root = math.isqrt(a)
        for f, g in [(root, 0), (0, root), (root // 2, root - root // 2), (1, 1)]:
            res = stirling_window_check(a, f, g)
            assert res.within
            if res.ratio is not None:
                worst = max(worst, res.ratio)
    assert worst <= 8.0
    report(11, f"max residual ratio {worst:.3f} <= C = 8 over the grid")
