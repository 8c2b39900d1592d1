"""Command-line front door.

Subcommands: `nw gen`, `measure`, `restrict`, `mc`, `bounds`, `verify`,
`report`.  Every run is fully determined by its flags (seeds included), so
identical invocations produce byte-identical outputs.

Exit codes: 0 success / all checks pass, 1 verification failure,
2 usage or parse error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import bounds as bounds_mod
from .errors import BudgetExceededError, NoQualifyingTrialsError
from .measure import MeasureQuery, shifted_partials_report
from .nw import DEFAULT_MONOMIAL_BUDGET, NWParams, generate_nw
from .poly import Monomial, gridvar, poly_from_lines, poly_to_lines
from .restrict import (
    outcome_to_record,
    run_restriction,
    subspace_inclusion_mc,
    survival_probability_mc,
    trial_seeds,
)
from .verify import run_verification

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _write_text(out: Optional[str], text: str) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _rows_to_csv(rows: List[Dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _emit(rows: List[Dict], fmt: str, out: Optional[str]) -> None:
    if fmt == "json":
        _write_text(out, json.dumps(rows, sort_keys=True, indent=2) + "\n")
    else:
        _write_text(out, _rows_to_csv(rows))


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _int_list(text: str) -> List[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an int list: {text!r}") from exc


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_nw_gen(args) -> int:
    params = NWParams(k=args.k, d=args.d)
    poly = generate_nw(params, budget=args.budget)
    _write_text(args.out, poly_to_lines(poly))
    return EXIT_OK


def _universe_for(args, poly):
    if args.k is not None:
        n = 1 << args.k
        return [gridvar(i, j) for i in range(n) for j in range(n)]
    vars_ = sorted(poly.support_vars())
    if not vars_:
        return 1
    if all(i == 0 for i, _ in vars_):
        return max(j for _, j in vars_) + 1
    size = max(max(i, j) for i, j in vars_) + 1
    return [gridvar(i, j) for i in range(size) for j in range(size)]


def cmd_measure(args) -> int:
    text = Path(args.infile).read_text() if args.infile != "-" else sys.stdin.read()
    poly = poly_from_lines(text)
    query = MeasureQuery(r=args.r, ell=args.ell, m=args.m)
    universe = _universe_for(args, poly)
    record = shifted_partials_report(poly, query, universe, budget=args.budget)
    _emit([record], args.format, args.out)
    return EXIT_OK


def cmd_restrict(args) -> int:
    params = NWParams(k=args.k, d=args.d)
    seeds = [args.seed] if args.trials <= 1 else trial_seeds(args.seed, args.trials)
    records = [
        outcome_to_record(run_restriction(params, args.eps, s)) for s in seeds
    ]
    if args.format == "csv":
        flat = [
            {
                key: rec[key]
                for key in (
                    "k", "d", "eps", "seed", "rank", "log2_an_size",
                    "compact_rows", "killed_bitmap",
                )
            }
            for rec in records
        ]
        for row in flat:
            row["compact_rows"] = " ".join(map(str, row["compact_rows"]))
        _emit(flat, "csv", args.out)
    else:
        _emit(records, "json", args.out)
    return EXIT_OK


SUBSPACE_TRIPLES = [(4, 2, 1), (4, 2, 2), (5, 3, 1), (6, 3, 2), (6, 4, 3)]


def mc_battery(
    k: int,
    eps: Fraction,
    trials: int,
    seed: int,
    d_compact: Optional[int] = None,
    d_noncompact: Optional[int] = None,
) -> List[Dict]:
    """The standard survival-probability table at n = 2^k.

    Conditioning rows use a d where the event has mass: shallow d makes the
    constraint matrix fill F_2^(dk) so rows end compact, deep d keeps them
    non-compact.  Sigma is the binomial standard error at the claimed
    bound, so `pass` means frequency <= bound + 3 sigma.
    """
    n = 1 << k
    d_compact = d_compact if d_compact is not None else max(2, n // 4)
    if d_noncompact is None:
        # non-compact rows exist only while rank can stay below dk, i.e. d > eps*n
        d_noncompact = min(n - 1, max(2, n // 2, int(eps * n) + 1))
    rows: List[Dict] = []

    def add_row(name, result, bound):
        sigma = (bound * (1 - bound) / result.qualifying) ** 0.5
        lo, hi = result.wilson
        rows.append({
            "check": name,
            "trials": result.trials,
            "qualifying": result.qualifying,
            "successes": result.successes,
            "frequency": result.frequency,
            "wilson_low": lo,
            "wilson_high": hi,
            "bound": bound,
            "bound_plus_3sigma": bound + 3 * sigma,
            "pass": result.frequency <= bound + 3 * sigma,
        })

    var00 = Monomial.from_vars([gridvar(0, 0)])
    res = survival_probability_mc(
        NWParams(k=k, d=d_compact), eps, var00, trials, seed, require_compact=[0]
    )
    add_row(f"compact-single-variable(d={d_compact})", res, 1 / n)

    res = survival_probability_mc(
        NWParams(k=k, d=d_noncompact), eps, var00, trials, seed + 1,
        require_noncompact=[0],
    )
    add_row(f"noncompact-single-variable(d={d_noncompact})", res, float(n ** -float(eps)))

    if 2 < d_compact - 1:  # the t-compact-rows claim needs t < d-1
        pair = Monomial.from_vars([gridvar(0, 0), gridvar(1, 1)])
        res = survival_probability_mc(
            NWParams(k=k, d=d_compact), eps, pair, trials, seed + 2,
            require_compact=[0, 1],
        )
        add_row(f"two-compact-rows(d={d_compact})", res, 1 / n**2)

    for t, (dv, du, dw) in enumerate(SUBSPACE_TRIPLES):
        res = subspace_inclusion_mc(dv, du, dw, trials, seed + 10 + t)
        add_row(f"subspace-inclusion({dv},{du},{dw})", res, 2.0 ** (-(dv - du) * dw))
    return rows


def cmd_mc(args) -> int:
    rows = mc_battery(
        args.k, args.eps, args.trials, args.seed,
        d_compact=args.d_compact, d_noncompact=args.d_noncompact,
    )
    _emit(rows, args.format, args.out)
    return EXIT_OK


def _bounds_rows(args):
    ns = args.ns
    search_n = args.search_n or min(ns)
    d_search = int(args.delta * search_n)
    result = bounds_mod.parameter_search(
        search_n, d_search, mode=args.mode, eps=args.eps
    )
    recipe = result.recipe
    if args.T != 1 or (args.mode == "restricted" and recipe.eps != args.eps):
        recipe = bounds_mod.Recipe(
            delta=recipe.delta, eta=recipe.eta, ell_ratio=recipe.ell_ratio,
            alpha=recipe.alpha, beta=recipe.beta,
            eps=args.eps if args.mode == "restricted" else Fraction(0),
            T=args.T,
        )
    rows = bounds_mod.sweep_recipe(recipe, ns, restricted=args.mode == "restricted")
    return recipe, rows


def cmd_bounds(args) -> int:
    _, rows = _bounds_rows(args)
    _emit(rows, args.format, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    ok = run_verification(seed=args.seed, scale=args.scale)
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_report(args) -> int:
    from .report import render_composed_figure, render_ratio_figure

    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    recipe, rows = _bounds_rows(args)
    _write_text(str(outdir / "bounds_sweep.csv"), _rows_to_csv(rows))
    floor = render_ratio_figure(rows, str(outdir / "topfanin_ratio.png"))

    eps = args.eps if args.eps > 0 else Fraction(1, 64)
    composed_recipe = bounds_mod.Recipe(
        delta=recipe.delta, eta=recipe.eta, ell_ratio=recipe.ell_ratio,
        alpha=recipe.alpha, beta=recipe.beta, eps=eps,
    )
    records = [bounds_mod.composed_size_bound(n, composed_recipe) for n in args.ns]
    _write_text(str(outdir / "composed_bound.csv"), _rows_to_csv(records))
    coeff = render_composed_figure(records, str(outdir / "composed_bound.png"))

    summary = {
        "recipe": {
            "delta": str(recipe.delta), "eta": str(recipe.eta),
            "ell_ratio": str(recipe.ell_ratio), "alpha": recipe.alpha,
            "beta": recipe.beta, "eps": str(eps),
        },
        "ratio_floor_per_n": floor,
        "composed_fit_coefficient": coeff,
        "ns": list(args.ns),
    }
    _write_text(str(outdir / "summary.json"), json.dumps(summary, sort_keys=True, indent=2) + "\n")
    sys.stdout.write(
        f"wrote bounds_sweep.csv, composed_bound.csv, topfanin_ratio.png, "
        f"composed_bound.png, summary.json to {outdir}\n"
        f"ratio floor per n: {floor:.4f}; composed fit coefficient: {coeff:.5f}\n"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spdlab",
        description="Exact experiments with bounded-support shifted partial derivatives.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    nw_parser = sub.add_parser("nw", help="Nisan-Wigderson polynomial commands")
    nw_sub = nw_parser.add_subparsers(dest="nw_command", required=True)
    gen = nw_sub.add_parser("gen", help="write the polynomial in canonical text form")
    gen.add_argument("--k", type=int, required=True, help="extension degree; n = 2^k")
    gen.add_argument("--d", type=int, required=True, help="univariate degree bound")
    gen.add_argument("--budget", type=int, default=DEFAULT_MONOMIAL_BUDGET)
    gen.add_argument("--out", default=None)
    gen.set_defaults(func=cmd_nw_gen)

    measure = sub.add_parser("measure", help="shifted-partials dimension of a polynomial file")
    measure.add_argument("--in", dest="infile", required=True, help="polynomial file ('-' = stdin)")
    measure.add_argument("--r", type=int, required=True)
    measure.add_argument("--ell", type=int, required=True)
    measure.add_argument("--m", type=int, default=None)
    measure.add_argument("--k", type=int, default=None, help="treat variables as the 2^k x 2^k grid")
    measure.add_argument("--budget", type=int, default=DEFAULT_MONOMIAL_BUDGET)
    measure.add_argument("--format", choices=("csv", "json"), default="json")
    measure.add_argument("--out", default=None)
    measure.set_defaults(func=cmd_measure)

    res = sub.add_parser("restrict", help="run the random restriction procedure")
    res.add_argument("--k", type=int, required=True)
    res.add_argument("--d", type=int, required=True)
    res.add_argument("--eps", type=_fraction, required=True, help="rational, eps*k must be integral")
    res.add_argument("--seed", type=int, default=0)
    res.add_argument("--trials", type=int, default=1, help="emit one outcome per derived seed")
    res.add_argument("--format", choices=("csv", "json"), default="json")
    res.add_argument("--out", default=None)
    res.set_defaults(func=cmd_restrict)

    mc = sub.add_parser("mc", help="Monte Carlo survival-probability table")
    mc.add_argument("--k", type=int, default=4)
    mc.add_argument("--eps", type=_fraction, default=Fraction(1, 4))
    mc.add_argument("--trials", type=int, default=10**4)
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--d-compact", type=int, default=None)
    mc.add_argument("--d-noncompact", type=int, default=None)
    mc.add_argument("--format", choices=("csv", "json"), default="csv")
    mc.add_argument("--out", default=None)
    mc.set_defaults(func=cmd_mc)

    bnd = sub.add_parser("bounds", help="closed-form bound sweep as CSV")
    bnd.add_argument("--ns", type=_int_list, default=[64, 128, 256, 512, 1024])
    bnd.add_argument("--delta", type=_fraction, default=Fraction(1, 2), help="d = delta * n")
    bnd.add_argument("--mode", choices=("plain", "restricted"), default="plain")
    bnd.add_argument("--eps", type=_fraction, default=Fraction(0))
    bnd.add_argument("--T", type=int, default=1)
    bnd.add_argument("--search-n", type=int, default=None, help="n used for the recipe search")
    bnd.add_argument("--format", choices=("csv", "json"), default="csv")
    bnd.add_argument("--out", default=None)
    bnd.set_defaults(func=cmd_bounds)

    ver = sub.add_parser("verify", help="run every module's invariant battery")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--scale", type=int, default=1, help="multiplier for randomized checks")
    ver.set_defaults(func=cmd_verify)

    rep = sub.add_parser("report", help="bounds sweep with figures rendered to files")
    rep.add_argument("--out-dir", required=True)
    rep.add_argument("--ns", type=_int_list, default=[64, 128, 256, 512, 1024])
    rep.add_argument("--delta", type=_fraction, default=Fraction(1, 2))
    rep.add_argument("--mode", choices=("plain", "restricted"), default="plain")
    rep.add_argument("--eps", type=_fraction, default=Fraction(0))
    rep.add_argument("--T", type=int, default=1)
    rep.add_argument("--search-n", type=int, default=None)
    rep.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NoQualifyingTrialsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
