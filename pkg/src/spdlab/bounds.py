"""Closed-form bound evaluation, constraint checking and parameter search.

Every bound is computed on two paths: an exact big-integer/rational path
(feasible at desk scale) and a log2 path through log-gamma (feasible up to
n = 2^20 and beyond).  A BigBound carries both and self-checks their
agreement to 1e-6 whenever the exact value exists.

The parameter bullets come in two strengths.  Hard bullets (m+rs <= N/2,
m+rs <= ell/2, n-r > d, r < d-1, m <= N, the Theta(N) bands) gate every
validated evaluation and the search.  The r-bullet's slack term has no
fixed sign, so both variants are evaluated and reported with explicit
constants but neither blocks a computation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, lgamma, log, log2
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .circuit import circuit_measure_upper_bound

_LN2 = log(2)
_NEG_INF = float("-inf")


class ConstraintViolationError(ValueError):
    """A validated bound was asked for outside its parameter range."""

    def __init__(self, checks):
        self.checks = checks
        bad = ", ".join(c.name for c in checks if c.required and not c.holds)
        super().__init__(f"constraints violated: {bad}")


def log2_factorial(x: int) -> float:
    if x < 0:
        raise ValueError("negative factorial")
    return lgamma(x + 1) / _LN2


def log2_comb(a: int, b: int) -> float:
    """log2 C(a, b); -inf outside the triangle."""
    if b < 0 or a < 0 or b > a:
        return _NEG_INF
    return log2_factorial(a) - log2_factorial(b) - log2_factorial(a - b)


def log2_fraction(x: Union[int, Fraction]) -> float:
    if x <= 0:
        raise ValueError("log2 of a nonpositive value")
    f = Fraction(x)
    return (log2(f.numerator) - log2(f.denominator))


def log2_sum(terms: Iterable[float]) -> float:
    """log2 of a sum given the log2 of each term."""
    terms = [t for t in terms if t != _NEG_INF]
    if not terms:
        return _NEG_INF
    mx = max(terms)
    return mx + log2(sum(2 ** (t - mx) for t in terms))


@dataclass(frozen=True)
class BoundsConfig:
    slack_constant: float = 8.0  # the explicit C inside every +/- O(.) term
    eta_band: Tuple[Fraction, Fraction] = (Fraction(1, 16), Fraction(1, 2))
    ell_ratio_band: Tuple[Fraction, Fraction] = (Fraction(1, 8), Fraction(8))
    exact_cutoff: int = 32  # largest n for which the exact path runs by default


DEFAULT_CONFIG = BoundsConfig()


@dataclass(frozen=True)
class ParamSet:
    """The shared parameter vocabulary: counts plus derived ratios."""

    n: int
    d: int
    r: int
    ell: int
    m: int
    s: int
    T: int = 1
    eps: Fraction = Fraction(0)

    @property
    def N(self) -> int:
        return self.n * self.n

    @property
    def delta(self) -> Fraction:
        return Fraction(self.d, self.n)

    @property
    def phi(self) -> Fraction:
        return Fraction(self.N, self.m)

    @property
    def eta(self) -> Fraction:
        return Fraction(self.m, self.ell)

    @property
    def alpha(self) -> float:
        return self.r * log2(self.n) / self.n

    @property
    def beta(self) -> float:
        return self.s / log2(self.n)

    def as_dict(self) -> Dict[str, object]:
        return {
            "n": self.n, "N": self.N, "d": self.d, "r": self.r,
            "ell": self.ell, "m": self.m, "s": self.s, "T": self.T,
            "eps": str(self.eps), "delta": str(self.delta),
            "phi": str(self.phi), "eta": str(self.eta),
            "alpha": self.alpha, "beta": self.beta,
        }


@dataclass(frozen=True)
class BigBound:
    """A bound as a high-precision log2 plus, when affordable, the exact value."""

    log2: float
    exact: Optional[Union[int, Fraction]] = None

    def __post_init__(self):
        if self.exact is not None and self.exact > 0 and self.log2 != _NEG_INF:
            if abs(log2_fraction(self.exact) - self.log2) > 1e-6:
                raise AssertionError(
                    f"dual-path disagreement: exact log2 {log2_fraction(self.exact)}"
                    f" vs log-gamma {self.log2}"
                )


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    holds: bool
    margin: float
    required: bool = True
    detail: str = ""


def _band_check(name: str, value: Fraction, band, required=True) -> ConstraintCheck:
    lo, hi = band
    margin = float(min(value - lo, hi - value))
    return ConstraintCheck(
        name, lo <= value <= hi, margin, required,
        detail=f"value={value} band=[{lo},{hi}]",
    )


def check_constraints(
    p: ParamSet, mode: str = "plain", config: BoundsConfig = DEFAULT_CONFIG
) -> List[ConstraintCheck]:
    """Every parameter bullet with exact margins.

    The r-bullet appears twice (optimistic + slack, pessimistic - slack),
    both advisory: the slack sign is not pinned down, so neither variant
    gates an evaluation; margins and the constant are reported.
    """
    if mode not in ("plain", "restricted"):
        raise ValueError(f"unknown mode {mode!r}")
    checks: List[ConstraintCheck] = []
    basic = min(p.n - 2, p.d - 1, p.r, p.ell - 1, p.m - 1, p.s, p.T - 1)
    checks.append(
        ConstraintCheck(
            "positive-parameters", basic >= 0, float(basic),
            detail="n>=2, d>=1, r>=0, ell>=1, m>=1, s>=0, T>=1",
        )
    )
    if basic < 0:
        return checks
    half_n = Fraction(p.N, 2)
    half_ell = Fraction(p.ell, 2)
    load = p.m + p.r * p.s
    checks.append(
        ConstraintCheck("m+rs<=N/2", load <= half_n, float(half_n - load))
    )
    checks.append(
        ConstraintCheck("m+rs<=ell/2", load <= half_ell, float(half_ell - load))
    )
    checks.append(ConstraintCheck("m<=N", p.m <= p.N, float(p.N - p.m)))
    checks.append(
        ConstraintCheck("n-r>d", p.n - p.r > p.d, float(p.n - p.r - p.d))
    )
    checks.append(ConstraintCheck("r<d-1", p.r < p.d - 1, float(p.d - 1 - p.r)))
    checks.append(
        _band_check("ell/N-band", Fraction(p.ell, p.N), config.ell_ratio_band)
    )
    checks.append(_band_check("eta-band", p.eta, config.eta_band))

    phi = p.phi
    log2_phi = log2_fraction(phi)
    if mode == "restricted":
        denom = (1 - float(p.eps) * p.n / p.d) * log2(p.n) + log2_phi
    else:
        denom = log2(p.n) + log2_phi
    slack = config.slack_constant * float(phi) * (p.n - p.d - p.r) ** 2 / p.N
    base = (p.n - p.d) * log2_phi
    for label, sign in (("optimistic", 1.0), ("pessimistic", -1.0)):
        if denom <= 0:  # eps n/d too large: the bullet degenerates
            checks.append(
                ConstraintCheck(
                    f"r-bullet-{label}", False, _NEG_INF, required=False,
                    detail="nonpositive denominator (eps*n/d too large)",
                )
            )
            continue
        rhs = (base + sign * slack) / denom
        checks.append(
            ConstraintCheck(
                f"r-bullet-{label}",
                p.r <= rhs,
                rhs - p.r,
                required=False,
                detail=f"rhs={rhs:.4f} slack_constant={config.slack_constant}",
            )
        )
    return checks


def constraints_hold(checks: Sequence[ConstraintCheck], include_advisory: bool = False) -> bool:
    return all(c.holds for c in checks if c.required or include_advisory)


def _validate(p: ParamSet, mode: str, config: BoundsConfig) -> None:
    checks = check_constraints(p, mode, config)
    if not constraints_hold(checks):
        raise ConstraintViolationError(checks)


def _want_exact(p: ParamSet, exact: Optional[bool], config: BoundsConfig) -> bool:
    return exact if exact is not None else p.n <= config.exact_cutoff


# ---------------------------------------------------------------------------
# the bounds
# ---------------------------------------------------------------------------


def _log2_count_sum(n: int, N: int, r: int, ell: int, m: int, s: int) -> float:
    """log2 of sum_{i<=n-r} sum_{j<=rs} C(N, m+j) C(ell+i-1, m+j-1).

    The inner i-sum telescopes (hockey stick) to
    C(ell+n-r, m+j) - C(ell-1, m+j), leaving one short sum over j.
    """
    terms = []
    for j in range(r * s + 1):
        q = m + j
        t1 = log2_comb(ell + n - r, q)
        if t1 == _NEG_INF:
            continue
        t2 = log2_comb(ell - 1, q)
        if t2 == _NEG_INF:
            diff = t1
        elif t2 < t1:
            diff = t1 + log2(1 - 2 ** (t2 - t1))
        else:
            continue  # i-sum is empty
        terms.append(log2_comb(N, q) + diff)
    return log2_sum(terms)


def circuit_upper_bound(
    p: ParamSet,
    exact: Optional[bool] = None,
    enforce_preconditions: bool = False,
    config: BoundsConfig = DEFAULT_CONFIG,
) -> BigBound:
    """The circuit-side exact-count bound T C(n+r,r) sum sum C C."""
    lg = (
        log2_fraction(p.T)
        + log2_comb(p.n + p.r, p.r)
        + _log2_count_sum(p.n, p.N, p.r, p.ell, p.m, p.s)
    )
    value = None
    if _want_exact(p, exact, config):
        value = circuit_measure_upper_bound(
            p.n, p.N, p.r, p.ell, p.m, p.s, top_fanin=p.T,
            enforce_preconditions=enforce_preconditions,
        )
    return BigBound(log2=lg, exact=value)


def nw_lower_bound(
    p: ParamSet,
    validate: bool = True,
    exact: Optional[bool] = None,
    config: BoundsConfig = DEFAULT_CONFIG,
) -> BigBound:
    """0.5 n^r C(N, m) C(ell-1, m-1)."""
    if validate:
        _validate(p, "plain", config)
    lg = -1 + p.r * log2(p.n) + log2_comb(p.N, p.m) + log2_comb(p.ell - 1, p.m - 1)
    value = None
    if _want_exact(p, exact, config):
        value = Fraction(
            p.n**p.r * comb(p.N, p.m) * comb(p.ell - 1, p.m - 1), 2
        )
    return BigBound(log2=lg, exact=value)


def _restricted_power_exponent(p: ParamSet) -> Fraction:
    return (1 - p.eps * p.n / Fraction(p.d)) * p.r


def restricted_nw_lower_bound(
    p: ParamSet,
    validate: bool = True,
    exact: Optional[bool] = None,
    config: BoundsConfig = DEFAULT_CONFIG,
) -> BigBound:
    """0.5 n^((1-eps n/d) r) C(N, m) C(ell-1, m-1).

    The n-power exponent is rational; the exact path only exists when the
    power is itself exactly representable (integer exponent, or n a power
    of two with an integral bit count), otherwise the log2 path stands
    alone and comparisons happen in log2 with 1e-6 tolerance.
    """
    if validate:
        _validate(p, "restricted", config)
    e = _restricted_power_exponent(p)
    lg = -1 + float(e) * log2(p.n) + log2_comb(p.N, p.m) + log2_comb(p.ell - 1, p.m - 1)
    value = None
    if _want_exact(p, exact, config):
        power = _exact_power(p.n, e)
        if power is not None:
            value = power * Fraction(comb(p.N, p.m) * comb(p.ell - 1, p.m - 1), 2)
    return BigBound(log2=lg, exact=value)


def _exact_power(n: int, e: Fraction) -> Optional[Fraction]:
    if e.denominator == 1:
        ei = int(e)
        return Fraction(n) ** ei
    if n & (n - 1) == 0:  # power of two: n^e = 2^(k e)
        ke = (n.bit_length() - 1) * e
        if ke.denominator == 1:
            return Fraction(2) ** int(ke)
    return None


def topfanin_ratio(
    p: ParamSet,
    restricted: bool = False,
    validate: bool = True,
    exact: Optional[bool] = None,
    config: BoundsConfig = DEFAULT_CONFIG,
) -> BigBound:
    """Polynomial-side lower bound over circuit-side exact-count bound.

    Any support-s top-fanin-T circuit computing the (restricted) NW
    polynomial forces this ratio <= 1, so its log2 is a lower bound on
    log2 of the required top fan-in at T = 1.
    """
    num = (
        restricted_nw_lower_bound(p, validate, exact, config)
        if restricted
        else nw_lower_bound(p, validate, exact, config)
    )
    den = circuit_upper_bound(p, exact, config=config)
    value = None
    if num.exact is not None and den.exact is not None:
        value = Fraction(num.exact) / Fraction(den.exact)
    return BigBound(log2=num.log2 - den.log2, exact=value)


def nw_union_ie_lower_bound(n: int, d: int, r: int, n_vars: int, ell: int, m: int) -> int:
    """Inclusion-exclusion lower bound on the union of leading-monomial
    shift sets: n^r C(N,m)C(ell-1,m-1) - C(n^r,2) C(N-D, m-D) C(ell-1,m-1),
    with D = n-d-r."""
    delta = n - d - r
    first = n**r * comb(n_vars, m) * comb(ell - 1, m - 1)
    if delta < 0:
        raise ValueError("need r <= n-d")
    if m < delta or n_vars < delta:
        overlap = 0
    else:
        overlap = comb(n_vars - delta, m - delta) * comb(ell - 1, m - 1)
    return first - comb(n**r, 2) * overlap


def ie_gate_holds(n: int, d: int, r: int, n_vars: int, m: int) -> bool:
    """The proof's sufficiency condition n^r C(N-D, m-D) <= C(N, m)."""
    delta = n - d - r
    if delta < 0:
        raise ValueError("need r <= n-d")
    if m < delta or n_vars < delta:
        return True
    return n**r * comb(n_vars - delta, m - delta) <= comb(n_vars, m)


# ---------------------------------------------------------------------------
# factorial-window approximation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StirlingResult:
    a: int
    f: int
    g: int
    lhs: float  # log2 (a+f)!/(a-g)!
    rhs: float  # (f+g) log2 a
    residual: float
    ratio: Optional[float]  # residual / ((f+g)^2 / a)
    within: bool
    flagged: bool  # (f+g)^2 > a, outside the checked window


def stirling_window_check(
    a: int, f: int, g: int, config: BoundsConfig = DEFAULT_CONFIG
) -> StirlingResult:
    if a < 1 or f < 0 or g < 0 or g > a:
        raise ValueError("need a >= 1, f, g >= 0, g <= a")
    lhs = log2_factorial(a + f) - log2_factorial(a - g)
    rhs = (f + g) * log2(a)
    residual = abs(lhs - rhs)
    window = (f + g) ** 2 / a
    ratio = residual / window if f + g > 0 else None
    within = residual <= config.slack_constant * window or f + g == 0
    return StirlingResult(
        a=a, f=f, g=g, lhs=lhs, rhs=rhs, residual=residual,
        ratio=ratio, within=within, flagged=(f + g) ** 2 > a,
    )


# ---------------------------------------------------------------------------
# recipes and search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Recipe:
    """Scale-free constants defining a ParamSet at any n."""

    delta: Fraction
    eta: Fraction  # m / ell
    ell_ratio: Fraction  # ell / N
    alpha: float  # r = alpha n / log2 n
    beta: float  # s = beta log2 n
    eps: Fraction = Fraction(0)
    T: int = 1

    def instantiate(self, n: int) -> ParamSet:
        N = n * n
        d = int(self.delta * n)
        ell = int(round(self.ell_ratio * N))
        m = max(1, int(round(self.eta * ell)))
        r = max(1, round(self.alpha * n / log2(n)))
        s = max(1, round(self.beta * log2(n)))
        return ParamSet(n=n, d=d, r=r, ell=ell, m=m, s=s, T=self.T, eps=self.eps)


DEFAULT_GRID = {
    "eta": [Fraction(1, 8), Fraction(1, 6), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)],
    "ell_ratio": [Fraction(1, 2), Fraction(1), Fraction(2)],
    "alpha": [1.0, 1.5, 2.0, 2.25, 2.5, 2.75],
    "beta": [0.05, 0.1],
}


@dataclass(frozen=True)
class SearchResult:
    recipe: Recipe
    params: ParamSet
    log2_ratio: float
    feasible_count: int
    evaluated: int


def parameter_search(
    n: int,
    d: int,
    mode: str = "plain",
    eps: Fraction = Fraction(0),
    grid: Optional[Dict[str, list]] = None,
    config: BoundsConfig = DEFAULT_CONFIG,
) -> SearchResult:
    """Deterministic grid search maximizing log2(topfanin_ratio).

    Keeps only points satisfying every required bullet for the given mode;
    the advisory r-bullet margins remain visible via check_constraints.
    Raises ConstraintViolationError when the feasible region is empty.
    """
    grid = dict(DEFAULT_GRID, **(grid or {}))
    restricted = mode == "restricted"
    delta = Fraction(d, n)
    best: Optional[Tuple[float, Recipe, ParamSet]] = None
    feasible = evaluated = 0
    last_checks = None
    for eta in grid["eta"]:
        for ell_ratio in grid["ell_ratio"]:
            for alpha in grid["alpha"]:
                for beta in grid["beta"]:
                    recipe = Recipe(
                        delta=delta, eta=eta, ell_ratio=ell_ratio,
                        alpha=alpha, beta=beta,
                        eps=eps if restricted else Fraction(0),
                    )
                    p = recipe.instantiate(n)
                    evaluated += 1
                    checks = check_constraints(p, mode, config)
                    last_checks = checks
                    if not constraints_hold(checks):
                        continue
                    feasible += 1
                    value = topfanin_ratio(
                        p, restricted=restricted, validate=False,
                        exact=False, config=config,
                    ).log2
                    if best is None or value > best[0]:
                        best = (value, recipe, p)
    if best is None:
        raise ConstraintViolationError(last_checks or [])
    return SearchResult(
        recipe=best[1], params=best[2], log2_ratio=best[0],
        feasible_count=feasible, evaluated=evaluated,
    )


def composed_size_bound(
    n: int,
    recipe: Recipe,
    rho: Optional[Fraction] = None,
    config: BoundsConfig = DEFAULT_CONFIG,
) -> Dict[str, object]:
    """The two-branch size bound min(n^(rho log2 log2 n), restricted ratio).

    rho defaults to eps/4, below the eps/2 and 1/2 ceilings the circuit
    simplification argument needs.
    """
    if recipe.eps <= 0:
        raise ValueError("composed bound needs a positive eps in the recipe")
    if rho is None:
        rho = recipe.eps / 4
    if not 0 < rho < min(recipe.eps / 2, Fraction(1, 2)):
        raise ValueError(f"rho must lie in (0, min(eps/2, 1/2)), got {rho}")
    p = recipe.instantiate(n)
    threshold_log2 = float(rho) * log2(n) * log2(log2(n))
    ratio_log2 = topfanin_ratio(
        p, restricted=True, validate=False, exact=False, config=config
    ).log2
    size_log2 = min(threshold_log2, ratio_log2)
    return {
        "n": n,
        "rho": str(rho),
        "threshold_log2": threshold_log2,
        "ratio_log2": ratio_log2,
        "size_log2": size_log2,
        "branch": "threshold" if threshold_log2 <= ratio_log2 else "ratio",
    }


def sweep_recipe(
    recipe: Recipe,
    ns: Sequence[int],
    restricted: bool = False,
    config: BoundsConfig = DEFAULT_CONFIG,
) -> List[Dict[str, object]]:
    """One record per n: parameters, every constraint margin, log2 ratio."""
    mode = "restricted" if restricted else "plain"
    rows = []
    for n in ns:
        p = recipe.instantiate(n)
        checks = check_constraints(p, mode, config)
        row: Dict[str, object] = dict(p.as_dict())
        row["feasible"] = constraints_hold(checks)
        for c in checks:
            row[f"holds[{c.name}]"] = c.holds
            row[f"margin[{c.name}]"] = c.margin
        value = topfanin_ratio(
            p, restricted=restricted, validate=False, exact=False, config=config
        ).log2
        row["log2_ratio"] = value
        row["log2_ratio_per_n"] = value / n
        rows.append(row)
    return rows
