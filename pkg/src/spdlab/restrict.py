"""Affine random restriction of the coefficient space over GF(2^k).

One pass walks the n field points in increasing bit-pattern order and, at
each point, tries to impose eps*k fresh affine constraints on the dk-bit
coefficient vector [f]: a constraint is a not-yet-spanned F_2-combination
of the point's evaluation-matrix columns together with a random bit.
Constraint columns are independent by construction, so the final solution
space A_n is a nonempty affine subspace of dimension dk - rank.  A grid
variable x[i,j] survives exactly when some [f] in A_n evaluates to j at
point i; everything else is set to zero.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import sqrt
from typing import Dict, Iterable, List, Sequence, Tuple

from .errors import NoQualifyingTrialsError
from .gf2 import GF2Matrix, Gf2Span, eval_matrix, row_times, solve_linear_rows
from .nw import NWParams
from .poly import Monomial, Var, gridvar


@dataclass(frozen=True)
class AffineValues:
    """Affine subspace of F_2^k: point + span(basis)."""

    point: int
    basis: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __contains__(self, value: int) -> bool:
        return Gf2Span(self.basis).contains(value ^ self.point)

    def enumerate(self) -> List[int]:
        out = [self.point]
        for b in self.basis:
            out += [v ^ b for v in out]
        return out


@dataclass(frozen=True)
class RestrictionOutcome:
    params: NWParams
    eps: Fraction
    seed: int
    matrix: GF2Matrix  # dk x c constraint matrix, independent columns
    rhs: int  # c-bit right-hand side
    particular: int  # one solution of x * matrix = rhs
    kernel: Tuple[int, ...]  # basis of the homogeneous solutions
    surviving: Tuple[AffineValues, ...]  # per row, the reachable values
    compact_rows: Tuple[int, ...]
    killed: frozenset

    @property
    def rank(self) -> int:
        return self.matrix.ncols

    @property
    def log2_an_size(self) -> int:
        return self.params.d * self.params.k - self.rank


@lru_cache(maxsize=None)
def _row_data(params: NWParams) -> Tuple[Tuple[GF2Matrix, Tuple[int, ...]], ...]:
    """(Eval matrix, its column vectors) for every row point."""
    out = []
    for i in range(params.n):
        ev = eval_matrix(i, params.d, params.field)
        out.append((ev, tuple(ev.columns())))
    return tuple(out)


@lru_cache(maxsize=None)
def _row_combos(params: NWParams) -> Tuple[Tuple[int, ...], ...]:
    """Per row, the 2^k - 1 nonzero F_2-combinations of its columns, in
    mask order (the columns are independent, so combos are distinct)."""
    k = params.k
    out = []
    for _, ev_cols in _row_data(params):
        combos = [0] * (1 << k)
        for mask in range(1, 1 << k):
            low = mask & -mask
            combos[mask] = combos[mask ^ low] ^ ev_cols[low.bit_length() - 1]
        out.append(tuple(combos[1:]))
    return tuple(out)


def _check_eps(params: NWParams, eps) -> Tuple[Fraction, int]:
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError(f"eps must be in (0, 1], got {eps}")
    inner = eps * params.k
    if inner.denominator != 1:
        raise ValueError(f"eps*k must be integral, got {eps} * {params.k}")
    return eps, int(inner)


def _run_constraints(params: NWParams, inner: int, rng: random.Random):
    """The constraint-sampling pass; returns (columns, rhs bits, span)."""
    combos = _row_combos(params)
    span = Gf2Span()
    cols: List[int] = []
    rhs_bits: List[int] = []
    for i in range(params.n):
        row_combos = combos[i]
        for _ in range(inner):
            candidates = [c for c in row_combos if not span.contains(c)]
            if not candidates:
                continue  # all of this row's combinations already spanned
            col = rng.choice(candidates)
            bit = rng.randrange(2)
            span.add(col)
            cols.append(col)
            rhs_bits.append(bit)
    return cols, rhs_bits, span


def _affine_image(particular: int, kernel: Sequence[int], ev: GF2Matrix) -> AffineValues:
    point = row_times(particular, ev)
    span = Gf2Span()
    basis = []
    for v in kernel:
        img = row_times(v, ev)
        if span.add(img):
            basis.append(img)
    return AffineValues(point, tuple(basis))


def run_restriction(params: NWParams, eps, seed: int) -> RestrictionOutcome:
    """One full run; identical inputs give a bit-identical outcome."""
    eps, inner = _check_eps(params, eps)
    rng = random.Random(seed)
    cols, rhs_bits, span = _run_constraints(params, inner, rng)
    dk = params.d * params.k
    particular, kernel = solve_linear_rows(cols, dk, rhs_bits)
    row_data = _row_data(params)
    surviving = []
    compact = []
    killed = set()
    n = params.n
    for i in range(n):
        ev, ev_cols = row_data[i]
        if all(span.contains(c) for c in ev_cols):
            compact.append(i)
        values = _affine_image(particular, kernel, ev)
        surviving.append(values)
        alive = set(values.enumerate())
        for j in range(n):
            if j not in alive:
                killed.add(gridvar(i, j))
    matrix = GF2Matrix.from_cols(cols, dk)
    rhs = 0
    for t, b in enumerate(rhs_bits):
        rhs |= b << t
    return RestrictionOutcome(
        params=params,
        eps=eps,
        seed=seed,
        matrix=matrix,
        rhs=rhs,
        particular=particular,
        kernel=tuple(kernel),
        surviving=tuple(surviving),
        compact_rows=tuple(compact),
        killed=frozenset(killed),
    )


def surviving_values(outcome: RestrictionOutcome, row: int) -> AffineValues:
    """Values {f(row) : [f] in A_n} without enumerating A_n: the image of
    the particular solution plus the kernel images under Eval_row."""
    ev = _row_data(outcome.params)[row][0]
    return _affine_image(outcome.particular, outcome.kernel, ev)


def is_compact(outcome: RestrictionOutcome, row: int) -> bool:
    """Whether every column of Eval_row lies in the constraint column span."""
    span = Gf2Span(outcome.matrix.columns())
    return all(span.contains(c) for c in _row_data(outcome.params)[row][1])


def variable_survives(outcome: RestrictionOutcome, var: Var) -> bool:
    i, j = var
    return j in outcome.surviving[i]


def monomial_survives(outcome: RestrictionOutcome, m: Monomial) -> bool:
    """True iff no variable of the monomial was set to zero."""
    return all(variable_survives(outcome, v) for v in m.support_vars())


# ---------------------------------------------------------------------------
# Monte Carlo harnesses
# ---------------------------------------------------------------------------


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> Tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class McResult:
    trials: int
    qualifying: int
    successes: int

    @property
    def frequency(self) -> float:
        return self.successes / self.qualifying

    @property
    def wilson(self) -> Tuple[float, float]:
        return wilson_interval(self.successes, self.qualifying)

    @property
    def sigma(self) -> float:
        """Binomial standard error at the observed frequency."""
        f = self.frequency
        return sqrt(max(f * (1 - f), 1e-12) / self.qualifying)


def trial_seeds(master_seed: int, trials: int) -> List[int]:
    rng = random.Random(master_seed)
    return [rng.getrandbits(63) for _ in range(trials)]


def survival_probability_mc(
    params: NWParams,
    eps,
    monomial: Monomial,
    trials: int,
    seed: int,
    require_compact: Iterable[int] = (),
    require_noncompact: Iterable[int] = (),
) -> McResult:
    """Empirical survival frequency over independent seeded runs.

    Samples can be conditioned on designated rows ending the run compact or
    non-compact; qualifying counts are reported so thin conditioning events
    are visible rather than silently extrapolated.
    """
    eps, inner = _check_eps(params, eps)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    need_compact = sorted(set(require_compact))
    need_noncompact = sorted(set(require_noncompact))
    mono_rows: Dict[int, List[int]] = {}
    for (i, j) in monomial.support_vars():
        mono_rows.setdefault(i, []).append(j)
    row_data = _row_data(params)
    dk = params.d * params.k
    qualifying = successes = 0
    for s in trial_seeds(seed, trials):
        rng = random.Random(s)
        cols, rhs_bits, span = _run_constraints(params, inner, rng)
        ok = True
        for i in need_compact:
            if not all(span.contains(c) for c in row_data[i][1]):
                ok = False
                break
        if ok:
            for i in need_noncompact:
                if all(span.contains(c) for c in row_data[i][1]):
                    ok = False
                    break
        if not ok:
            continue
        qualifying += 1
        particular, kernel = solve_linear_rows(cols, dk, rhs_bits)
        survived = True
        for i, js in mono_rows.items():
            values = _affine_image(particular, kernel, row_data[i][0])
            if any(j not in values for j in js):
                survived = False
                break
        if survived:
            successes += 1
    if qualifying == 0:
        raise NoQualifyingTrialsError(
            f"conditioning event never occurred in {trials} trials"
        )
    return McResult(trials=trials, qualifying=qualifying, successes=successes)


def block_log2_counts(outcome: RestrictionOutcome, r: int) -> List[int]:
    """log2 of the number of distinct evaluation r-tuples per block.

    Blocks partition the first d row points into runs of length r; the
    count for a block is 2^(dimension of the affine image of A_n under the
    stacked evaluation map of its rows).
    """
    params = outcome.params
    d, k = params.d, params.k
    if r < 1 or r >= d - 1:
        raise ValueError(f"need 1 <= r < d-1, got r={r}, d={d}")
    if d % r != 0:
        raise ValueError(f"r={r} must divide d={d}")
    row_data = _row_data(params)
    counts = []
    for b in range(d // r):
        rows = range(b * r, (b + 1) * r)
        span = Gf2Span()
        for v in outcome.kernel:
            stacked = 0
            for t, i in enumerate(rows):
                stacked |= row_times(v, row_data[i][0]) << (t * k)
            span.add(stacked)
        counts.append(span.rank)
    return counts


def rich_block_threshold_log2(params: NWParams, eps, r: int) -> Fraction:
    """log2 of n^(r(1 - eps*n/d)), exact."""
    eps = Fraction(eps)
    return params.k * r * (1 - eps * params.n / Fraction(params.d))


def rich_block_search(outcome: RestrictionOutcome, r: int) -> Tuple[int, int]:
    """(block index, evaluation-tuple count) of the richest block."""
    counts = block_log2_counts(outcome, r)
    best = max(range(len(counts)), key=lambda b: (counts[b], -b))
    return best, 1 << counts[best]


def subspace_inclusion_mc(
    dim_v: int, dim_u: int, dim_w: int, trials: int, seed: int
) -> McResult:
    """Frequency that a fixed dim_w subspace lies inside a uniformly random
    dim_u subspace of a dim_v space."""
    if not 0 <= dim_w <= dim_u <= dim_v:
        raise ValueError("need 0 <= dimW <= dimU <= dimV")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    successes = 0
    for _ in range(trials):
        span = Gf2Span()
        while span.rank < dim_u:
            v = rng.randrange(1, 1 << dim_v)
            span.add(v)  # rejection keeps the subspace uniform
        if all(span.contains(1 << t) for t in range(dim_w)):
            successes += 1
    return McResult(trials=trials, qualifying=trials, successes=successes)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def outcome_to_record(outcome: RestrictionOutcome) -> dict:
    """JSON-ready record: stable field order and platform-free values."""
    n = outcome.params.n
    bitmap = 0
    for (i, j) in outcome.killed:
        bitmap |= 1 << (i * n + j)
    width = (n * n + 3) // 4
    return {
        "k": outcome.params.k,
        "d": outcome.params.d,
        "modulus": hex(outcome.params.field.modulus),
        "eps": str(outcome.eps),
        "seed": outcome.seed,
        "rank": outcome.rank,
        "log2_an_size": outcome.log2_an_size,
        "particular": outcome.particular,
        "kernel": list(outcome.kernel),
        "compact_rows": list(outcome.compact_rows),
        "surviving": [
            {"row": i, "point": av.point, "basis": list(av.basis)}
            for i, av in enumerate(outcome.surviving)
        ],
        "killed_bitmap": f"{bitmap:0{width}x}",
        "matrix": outcome.matrix.to_text(),
        "rhs": outcome.rhs,
    }
