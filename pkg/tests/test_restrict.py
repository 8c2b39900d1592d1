import json
from fractions import Fraction

import pytest

from spdlab.errors import NoQualifyingTrialsError
from spdlab.gf2 import GF2Matrix
from spdlab.nw import NWParams, bits_to_coeffs, evaluate, full_monomial
from spdlab.poly import Monomial, gridvar
from spdlab.restrict import (
    AffineValues,
    RestrictionOutcome,
    block_log2_counts,
    is_compact,
    monomial_survives,
    outcome_to_record,
    rich_block_search,
    rich_block_threshold_log2,
    run_restriction,
    subspace_inclusion_mc,
    survival_probability_mc,
    surviving_values,
    trial_seeds,
    variable_survives,
    wilson_interval,
)


def test_eps_validation():
    p = NWParams(k=2, d=2)
    with pytest.raises(ValueError):
        run_restriction(p, Fraction(1, 3), seed=1)  # eps*k = 2/3
    with pytest.raises(ValueError):
        run_restriction(p, 0, seed=1)
    with pytest.raises(ValueError):
        run_restriction(p, 2, seed=1)


def test_hand_trace_k1():
    p = NWParams(k=1, d=1)
    for seed in range(20):
        out = run_restriction(p, 1, seed)
        assert out.rank == 1
        assert out.log2_an_size == 0
        b = out.particular & 1
        assert out.kernel == ()
        survivors = {v for v in [gridvar(i, j) for i in range(2) for j in range(2)]
                     if variable_survives(out, v)}
        assert survivors == {gridvar(0, b), gridvar(1, b)}
        assert out.compact_rows == (0, 1)
        assert out.killed == frozenset({gridvar(0, 1 - b), gridvar(1, 1 - b)})


def test_determinism():
    p = NWParams(k=4, d=8)
    a = run_restriction(p, Fraction(1, 4), seed=12345)
    b = run_restriction(p, Fraction(1, 4), seed=12345)
    assert a == b
    c = run_restriction(p, Fraction(1, 4), seed=54321)
    assert a != c
    assert json.dumps(outcome_to_record(a), sort_keys=True) == json.dumps(
        outcome_to_record(b), sort_keys=True
    )


def test_rank_equals_appended_columns_and_an_bound():
    for k, d, eps in [(2, 2, Fraction(1, 2)), (4, 8, Fraction(1, 4))]:
        p = NWParams(k=k, d=d)
        dk = d * k
        for seed in range(50):
            out = run_restriction(p, eps, seed)
            assert out.rank == out.matrix.ncols
            assert out.log2_an_size == dk - out.rank
            assert out.log2_an_size >= dk - eps * k * p.n


def test_surviving_values_match_exhaustive_an_enumeration():
    # dk <= 16 cases; survival read off via independent Horner evaluation
    for k, d, eps in [(2, 2, 1), (2, 2, Fraction(1, 2)), (2, 3, 1)]:
        p = NWParams(k=k, d=d)
        dk = d * k
        for seed in range(10):
            out = run_restriction(p, eps, seed)
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
                values = surviving_values(out, i)
                brute = {
                    evaluate(bits_to_coeffs(f, d, k), i, p.field) for f in an
                }
                assert set(values.enumerate()) == brute
                assert values == out.surviving[i]
            # monomials of constraint-satisfying univariates survive
            for f in an:
                m = full_monomial(bits_to_coeffs(f, d, k), p)
                assert monomial_survives(out, m)


def test_is_compact_agrees_with_outcome_and_empty_matrix_is_noncompact():
    p = NWParams(k=2, d=3)
    for seed in range(20):
        out = run_restriction(p, Fraction(1, 2), seed)
        for i in range(p.n):
            assert is_compact(out, i) == (i in out.compact_rows)
            if i in out.compact_rows:
                assert surviving_values(out, i).dim == 0
    empty = RestrictionOutcome(
        params=NWParams(k=1, d=1),
        eps=Fraction(1),
        seed=0,
        matrix=GF2Matrix(1, 0, (0,)),
        rhs=0,
        particular=0,
        kernel=(1,),
        surviving=(AffineValues(0, (1,)), AffineValues(0, (1,))),
        compact_rows=(),
        killed=frozenset(),
    )
    assert not is_compact(empty, 0)
    assert surviving_values(empty, 0).dim == 1  # unconstrained row keeps all values


def test_monomial_survival_trivials():
    p = NWParams(k=2, d=2)
    out = run_restriction(p, Fraction(1, 2), seed=7)
    assert monomial_survives(out, Monomial.unit())
    dead = next(iter(out.killed))
    assert not monomial_survives(out, Monomial.from_vars([dead]))


def test_mc_unit_monomial_always_survives():
    p = NWParams(k=2, d=2)
    res = survival_probability_mc(p, Fraction(1, 2), Monomial.unit(), 50, seed=5)
    assert res.frequency == 1.0
    assert res.qualifying == 50


def test_mc_contradictory_conditioning_raises():
    p = NWParams(k=2, d=2)
    with pytest.raises(NoQualifyingTrialsError):
        survival_probability_mc(
            p,
            Fraction(1, 2),
            Monomial.unit(),
            trials=20,
            seed=1,
            require_compact=[0],
            require_noncompact=[0],
        )


def test_mc_matches_full_runs():
    p = NWParams(k=2, d=3)
    var = Monomial.from_vars([gridvar(1, 2)])
    trials = 60
    res = survival_probability_mc(p, Fraction(1, 2), var, trials, seed=99)
    direct = sum(
        monomial_survives(run_restriction(p, Fraction(1, 2), s), var)
        for s in trial_seeds(99, trials)
    )
    assert res.successes == direct
    assert res.trials == trials


def test_wilson_interval_basics():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and hi < 0.05
    lo2, hi2 = wilson_interval(100, 100)
    assert hi2 > 0.999 and lo2 > 0.95
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_block_counts_unconstrained_outcome():
    # with no constraints the kernel is everything and every block is full
    p = NWParams(k=2, d=3)
    dk = p.d * p.k
    out = RestrictionOutcome(
        params=p,
        eps=Fraction(1, 2),
        seed=0,
        matrix=GF2Matrix(dk, 0, (0,) * dk),
        rhs=0,
        particular=0,
        kernel=tuple(1 << t for t in range(dk)),
        surviving=tuple(AffineValues(0, (1, 2)) for _ in range(p.n)),
        compact_rows=(),
        killed=frozenset(),
    )
    r = 1
    counts = block_log2_counts(out, r)
    assert counts == [r * p.k] * (p.d // r)
    idx, m_i = rich_block_search(out, r)
    assert idx == 0 and m_i == p.n**r


def test_block_precondition_rejected():
    p = NWParams(k=1, d=1)
    out = run_restriction(p, 1, seed=3)
    with pytest.raises(ValueError):
        block_log2_counts(out, 1)  # r < d-1 unsatisfiable at d=1
    p2 = NWParams(k=2, d=3)  # wait below: r=2 does not divide d=3
    out2 = run_restriction(p2, Fraction(1, 2), seed=3)
    with pytest.raises(ValueError):
        block_log2_counts(out2, 2)


def test_rich_block_guarantee_small():
    p = NWParams(k=4, d=8)
    eps = Fraction(1, 4)
    thresh = rich_block_threshold_log2(p, eps, 2)
    assert thresh == 4  # n^(2*(1 - 1/2)) = 16 = 2^4
    for seed in range(30):
        out = run_restriction(p, eps, seed)
        idx, m_i = rich_block_search(out, 2)
        assert 0 <= idx < p.d // 2
        assert m_i >= 1 << 4


def test_product_of_block_counts_covers_an():
    p = NWParams(k=4, d=8)
    for seed in range(10):
        out = run_restriction(p, Fraction(1, 4), seed)
        counts = block_log2_counts(out, 2)
        assert sum(counts) >= out.log2_an_size


def test_subspace_inclusion_trivials():
    res = subspace_inclusion_mc(4, 4, 2, trials=50, seed=2)
    assert res.frequency == 1.0
    res0 = subspace_inclusion_mc(5, 3, 0, trials=50, seed=2)
    assert res0.frequency == 1.0
    with pytest.raises(ValueError):
        subspace_inclusion_mc(3, 4, 1, trials=5, seed=0)


def test_subspace_inclusion_bound_small():
    res = subspace_inclusion_mc(4, 2, 1, trials=3000, seed=11)
    bound = 2 ** (-(4 - 2) * 1)
    assert res.frequency <= bound + 3 * res.sigma


def test_outcome_record_golden():
    # frozen run: k=2, d=2, eps=1/2, seed=42 pins f(z) = 3 + 2z
    # (hand-check: f(0)=3, f(1)=1, f(2)=0, f(3)=2 under modulus z^2+z+1)
    out = run_restriction(NWParams(k=2, d=2), Fraction(1, 2), 42)
    rec = outcome_to_record(out)
    assert rec["rank"] == 4
    assert rec["particular"] == 11
    assert rec["kernel"] == []
    assert rec["compact_rows"] == [0, 1, 2, 3]
    assert rec["killed_bitmap"] == "bed7"
    assert [row["point"] for row in rec["surviving"]] == [3, 1, 0, 2]
    assert rec["matrix"] == "1111\n1000\n0101\n0011"


def test_outcome_record_is_json_ready():
    p = NWParams(k=2, d=2)
    out = run_restriction(p, Fraction(1, 2), seed=42)
    rec = outcome_to_record(out)
    text = json.dumps(rec, sort_keys=True)
    assert json.loads(text)["k"] == 2
    assert len(rec["surviving"]) == p.n
    assert set(rec["killed_bitmap"]) <= set("0123456789abcdef")
