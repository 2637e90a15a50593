"""Command-line front end: ``roabp <subcommand> ...``.

Reports are ``key: value`` lines on stdout (or one JSON object with
``--json``). Variables are 1-indexed on the command line and in every file
format. Exit codes: 0 ok, 2 negative answer or no path, 3 budget exhausted,
4 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

from . import boost, nisan, orderfind, reduction, witness
from .ffield import PRIME_ENV_VAR, PrimeField, resolve_prime
from .poly import (
    DEFAULT_EXPANSION_BUDGET,
    ExpansionBudgetError,
    PolyFormatError,
    PolyOracle,
    dense_oracle,
    dump_dense,
    format_sparse,
    load_dense,
    parse_sparse,
    sparse_oracle,
)
from .roabp import format_roabp, parse_roabp, sample_random_roabp

EXIT_OK, EXIT_NO, EXIT_BUDGET, EXIT_INPUT = 0, 2, 3, 4
DECIDE_WIDTH_CAP = 8


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise InputError(message)


@dataclass(frozen=True)
class RunConfig:
    prime: int
    seed: int
    budget_subsets: int
    budget_expansion: int
    verbosity: int = 0

    def rng(self) -> random.Random:
        return random.Random(self.seed)


class Report:
    def __init__(self, command: str, config: RunConfig):
        self.items: list[tuple[str, object]] = [("command", command)]
        self.items += [(k, v) for k, v in asdict(config).items()]

    def add(self, key: str, value) -> None:
        self.items.append((key, value))

    @staticmethod
    def _text(v) -> str:
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, (list, tuple)):
            return ",".join(map(Report._text, v))
        return str(v)

    def render(self, as_json: bool) -> str:
        if as_json:
            def conv(v):
                if isinstance(v, Fraction):
                    return str(v)
                if isinstance(v, tuple):
                    return [conv(x) for x in v]
                if isinstance(v, list):
                    return [conv(x) for x in v]
                return v
            return json.dumps({k: conv(v) for k, v in self.items}) + "\n"
        return "".join(f"{k}: {self._text(v)}\n" for k, v in self.items)


# --- argument helpers ----------------------------------------------------------


def _index_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise InputError(f"expected a comma-separated list of integers, got {text!r}") from None
    return vals


def _zero_based(vals: list[int], n: int, what: str) -> list[int]:
    if any(not 1 <= v <= n for v in vals):
        raise InputError(f"{what} entries must lie in 1..{n}")
    return [v - 1 for v in vals]


def _one_based(order) -> list[int]:
    return [v + 1 for v in order]


def _read_bytes(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _write(path: str, data: str | bytes) -> None:
    mode = "wb" if isinstance(data, bytes) else "w"
    try:
        with open(path, mode) as fh:
            fh.write(data)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e.strerror}") from None


def _check_prime(cfg: RunConfig, explicit: bool, p: int) -> None:
    if explicit and p != cfg.prime:
        raise InputError(f"file is over p={p} but the run was configured with p={cfg.prime}")


def _load_oracle(args, cfg: RunConfig) -> PolyOracle:
    if getattr(args, "roabp", None):
        R = parse_roabp(_read_bytes(args.roabp).decode("utf-8", "replace"))
        _check_prime(cfg, args.prime_explicit, R.field.p)
        return R.oracle()
    if not getattr(args, "poly", None):
        raise InputError("an input polynomial is required (--poly FILE or --roabp FILE)")
    data = _read_bytes(args.poly)
    if data.startswith(b"dense"):
        f = load_dense(data)
        _check_prime(cfg, args.prime_explicit, f.p)
        return dense_oracle(f)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise InputError(f"{args.poly}: not a polynomial file") from None
    if text.lstrip().startswith("roabp"):
        R = parse_roabp(text)
        _check_prime(cfg, args.prime_explicit, R.field.p)
        return R.oracle()
    f = parse_sparse(text)
    _check_prime(cfg, args.prime_explicit, f.field.p)
    return sparse_oracle(f)


def _load_graph(path: str) -> reduction.Graph:
    return reduction.parse_graph(_read_bytes(path).decode("utf-8", "replace"))


def _emit(args, text: str | bytes) -> str | None:
    """Write ``text`` to --out when given, otherwise return it for stdout."""
    if args.out:
        _write(args.out, text)
        return None
    if isinstance(text, bytes):
        raise InputError("binary output needs --out FILE")
    return text


# --- subcommands ---------------------------------------------------------------


def cmd_rank(args, cfg, rep):
    f = _load_oracle(args, cfg)
    T = _zero_based(_index_list(args.subset), f.n, "subset")
    rep.add("subset", _one_based(sorted(T)))
    if args.threshold is None:
        r = nisan.nisan_rank(f.to_dense(cfg.budget_expansion), T, cfg.budget_expansion)
        rep.add("mode", "exact")
        rep.add("rank", r)
        return EXIT_OK
    report = nisan.prob_rank_at_most(f, T, args.threshold, args.trials, cfg.rng())
    rep.add("mode", "randomized")
    rep.add("threshold", args.threshold)
    rep.add("verdict", report.verdict)
    rep.add("trials", report.trials)
    rep.add("determinant_nonzero", list(report.determinants_nonzero))
    rep.add("failure_bound", str(report.failure_bound))
    return EXIT_OK


def _order_report(rep, res: orderfind.OrderResult):
    rep.add("order", _one_based(res.tau))
    rep.add("width", res.claimed_width)
    rep.add("verification", res.verification)
    if res.per_layer is not None:
        rep.add("per_layer_ranks", list(res.per_layer))
    if res.lists is not None:
        rep.add("subset_tests", res.lists.tests)
        rep.add("list_sizes", res.lists.sizes())


def cmd_find_order(args, cfg, rep, force_min=False):
    f = _load_oracle(args, cfg)
    budget = args.budget if args.budget is not None else cfg.budget_subsets
    rng = cfg.rng()
    try:
        if force_min or args.min_width:
            res = orderfind.min_width_search(f, f.n, f.d, rng, budget, args.trials, args.verify,
                                             cfg.budget_expansion)
        else:
            if args.width is None:
                raise InputError("--width is required unless --min-width is given")
            res = orderfind.find_order(f, f.n, f.d, args.width, rng, budget, args.trials, args.verify,
                                       cfg.budget_expansion)
    except orderfind.NoPathFailure as e:
        rep.add("result", "budget" if e.reason == "budget" else "no-path")
        if e.lists is not None:
            rep.add("subset_tests", e.lists.tests)
            rep.add("list_sizes", e.lists.sizes())
        if e.bracket is not None:
            rep.add("width_bracket", list(e.bracket))
        return EXIT_BUDGET if e.reason == "budget" else EXIT_NO
    rep.add("result", "found")
    _order_report(rep, res)
    return EXIT_OK


def cmd_min_width(args, cfg, rep):
    return cmd_find_order(args, cfg, rep, force_min=True)


def cmd_decide_width(args, cfg, rep):
    f = _load_oracle(args, cfg)
    if f.n > DECIDE_WIDTH_CAP:
        raise InputError(
            f"decide-width enumerates all n! orders and is capped at n <= {DECIDE_WIDTH_CAP} "
            f"(got n={f.n}); deciding ROABP width is NP-hard in general"
        )
    width, tau = orderfind.brute_force_best_order(f.to_dense(cfg.budget_expansion), DECIDE_WIDTH_CAP,
                                                  cfg.budget_expansion)
    yes = width <= args.width
    rep.add("width_bound", args.width)
    rep.add("answer", "yes" if yes else "no")
    rep.add("min_width", width)
    rep.add("order", _one_based(tau))
    return EXIT_OK if yes else EXIT_NO


def cmd_reduce(args, cfg, rep):
    G = _load_graph(args.graph)
    f = reduction.build_gadget_poly(G, PrimeField(cfg.prime))
    rep.add("vertices", G.n)
    rep.add("edges", G.m)
    rep.add("max_degree", G.max_degree)
    rep.add("individual_degree", f.d)
    rep.add("terms", len(f.terms))
    out = _emit(args, format_sparse(f))
    if out is not None:
        rep.add("poly", out.rstrip("\n").replace("\n", " | "))
    return EXIT_OK


def cmd_certify(args, cfg, rep):
    G = _load_graph(args.graph)
    cert = reduction.certify_rank_cut_identity(G, cfg.budget_expansion, PrimeField(cfg.prime))
    rep.add("partitions", len(cert.checks))
    rep.add("mismatches", len(cert.failures()))
    rep.add("pass", cert.passed)
    if cfg.verbosity:
        for c in cert.checks:
            rep.add("partition " + ",".join(map(str, _one_based(c.subset.members))),
                    f"rank={c.rank} expected={c.expected}")
    return EXIT_OK if cert.passed else EXIT_NO


def cmd_cutwidth(args, cfg, rep):
    G = _load_graph(args.graph)
    width, order = reduction.cutwidth_exact(G, args.cap)
    rep.add("cutwidth", width)
    rep.add("arrangement", _one_based(order))
    return EXIT_OK


def _read_order(path: str, n: int) -> list[int]:
    text = _read_bytes(path).decode("utf-8", "replace")
    text = " ".join(ln.split("#", 1)[0] for ln in text.splitlines()).replace("order", " ")
    return _zero_based(_index_list(text), n, "order")


def cmd_witness(args, cfg, rep):
    n = args.n
    T = _zero_based(_index_list(args.subset), n, "subset")
    sigma = _read_order(args.order, n) if args.order else list(range(n))
    if sorted(sigma) != list(range(n)):
        raise InputError("order file is not a permutation of 1..n")
    try:
        f = witness.witness_sparse(n, args.d, args.w, T, sigma, PrimeField(cfg.prime))
    except witness.WitnessHypothesisError as e:
        raise InputError(f"hypothesis not met: {e}") from None
    rep.add("pairs_k", witness.pair_count(args.d, args.w))
    rep.add("order", _one_based(sigma))
    rep.add("terms", len(f.terms))
    out = _emit(args, format_sparse(f))
    if out is not None:
        rep.add("poly", out.rstrip("\n").replace("\n", " | "))
    return EXIT_OK


def cmd_boost(args, cfg, rep):
    f = _load_oracle(args, cfg)
    spec = boost.TensorSpec(f, args.k)
    g = boost.tensor_power_oracle(spec).to_dense(cfg.budget_expansion)
    rep.add("k", args.k)
    rep.add("boosted_degree", spec.degree)
    rep.add("nonzero_terms", g.nonzero_count())
    if args.format == "dense":
        _write(args.out, dump_dense(g))
    else:
        _write(args.out, format_sparse(g.to_sparse()))
    rep.add("written", args.out)
    return EXIT_OK


def cmd_ptas(args, cfg, rep):
    f = _load_oracle(args, cfg)
    if args.approx == "brute":
        approx = boost.BruteForceApprox(budget=cfg.budget_expansion)
    else:
        approx = boost.MockTwoApprox(budget=cfg.budget_expansion)
    if args.alpha is not None:
        approx.ratio = Fraction(args.alpha)
    res = boost.width_ptas(f, f.n, f.d, Fraction(args.epsilon), approx)
    rep.add("approx", args.approx)
    rep.add("alpha", str(approx.ratio))
    rep.add("epsilon", args.epsilon)
    rep.add("k", res.k)
    rep.add("boosted_degree", res.boosted_degree)
    rep.add("boosted_estimate", res.boosted_estimate)
    rep.add("order", _one_based(res.order))
    rep.add("width_estimate", res.width_estimate)
    return EXIT_OK


def cmd_sample_roabp(args, cfg, rep):
    order = _zero_based(_index_list(args.order), args.n, "order") if args.order else list(range(args.n))
    if sorted(order) != list(range(args.n)):
        raise InputError("--order must be a permutation of 1..n")
    R = sample_random_roabp(args.n, args.d, args.w, order, cfg.rng(), PrimeField(cfg.prime))
    rep.add("order", _one_based(R.order))
    rep.add("widths", list(R.widths))
    out = _emit(args, format_roabp(R))
    if out is not None:
        sys.stdout.write(out)
        return None
    rep.add("written", args.out)
    return EXIT_OK


def cmd_expand(args, cfg, rep):
    f = _load_oracle(args, cfg)
    g = f.to_dense(cfg.budget_expansion)
    rep.add("grid_size", len(g.coeffs))
    rep.add("nonzero_terms", g.nonzero_count())
    _write(args.out, dump_dense(g) if args.format == "dense" else format_sparse(g.to_sparse()))
    rep.add("written", args.out)
    return EXIT_OK


# --- parser --------------------------------------------------------------------


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--prime", type=int, default=d(None), help=f"field modulus (else ${PRIME_ENV_VAR}, else 2^61-1)")
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--budget-subsets", type=int, default=d(orderfind.DEFAULT_SUBSET_BUDGET))
    p.add_argument("--budget-expansion", type=int, default=d(DEFAULT_EXPANSION_BUDGET))
    p.add_argument("--json", action="store_true", default=d(False))
    p.add_argument("-v", "--verbose", action="count", default=d(0))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="roabp", description="Order finding and width tools for read-once oblivious ABPs.")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        _add_globals(p, suppress=True)
        p.set_defaults(func=fn)
        return p

    def poly_in(p, roabp=True):
        p.add_argument("--poly")
        if roabp:
            p.add_argument("--roabp")

    p = add("rank", cmd_rank, "exact or randomized Nisan rank at a subset")
    poly_in(p)
    p.add_argument("--subset", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true")
    g.add_argument("--threshold", type=int)
    p.add_argument("--trials", type=int, default=nisan.DEFAULT_TRIALS)

    for name, fn, help_ in (("find-order", cmd_find_order, "find an order of width at most W"),
                            ("min-width", cmd_min_width, "search for the smallest findable width")):
        p = add(name, fn, help_)
        poly_in(p)
        p.add_argument("--width", type=int)
        p.add_argument("--min-width", action="store_true")
        p.add_argument("--budget", type=int, help="subset-test budget (overrides --budget-subsets)")
        p.add_argument("--trials", type=int, default=nisan.DEFAULT_TRIALS)
        p.add_argument("--verify", choices=("auto", "exact", "probabilistic", "none"), default="auto")

    p = add("decide-width", cmd_decide_width, "exact yes/no: does some order have width <= W (n <= 8)")
    poly_in(p)
    p.add_argument("--width", type=int, required=True)

    p = add("reduce", cmd_reduce, "gadget polynomial of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--out")

    p = add("certify", cmd_certify, "check rank = 2 + cut on every bipartition")
    p.add_argument("--graph", required=True)

    p = add("cutwidth", cmd_cutwidth, "exact cutwidth of a small graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--cap", type=int, default=reduction.DEFAULT_CUTWIDTH_CAP)

    p = add("witness", cmd_witness, "narrow-in-order, high-rank-at-T witness polynomial")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--subset", required=True)
    p.add_argument("--order", help="file holding the order as 1-indexed variables")
    p.add_argument("--out")

    p = add("boost", cmd_boost, "k-th tensor power of a polynomial")
    poly_in(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("sparse", "dense"), default="sparse")

    p = add("ptas", cmd_ptas, "boost an approximate order finder")
    poly_in(p)
    p.add_argument("--epsilon", required=True)
    p.add_argument("--alpha")
    p.add_argument("--approx", choices=("brute", "mock2"), default="brute")

    p = add("sample-roabp", cmd_sample_roabp, "random ROABP in a given order")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--order")
    p.add_argument("--out")

    p = add("expand", cmd_expand, "dense coefficient grid of a polynomial or ROABP")
    poly_in(p)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("sparse", "dense"), default="dense")
    return parser


def _config(args) -> RunConfig:
    try:
        prime = resolve_prime(args.prime)
        PrimeField(prime)
    except ValueError as e:
        raise InputError(f"bad prime: {e}") from None
    if args.budget_subsets < 1 or args.budget_expansion < 1:
        raise InputError("budgets must be positive")
    return RunConfig(prime, args.seed, args.budget_subsets, args.budget_expansion, args.verbose)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise InputError("a subcommand is required")
        cfg = _config(args)
        args.prime_explicit = args.prime is not None or bool(os.environ.get(PRIME_ENV_VAR))
        rep = Report(args.command, cfg)
        code = args.func(args, cfg, rep)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ExpansionBudgetError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (PolyFormatError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if code is None:  # subcommand already wrote its artifact to stdout
        return EXIT_OK
    sys.stdout.write(rep.render(args.json))
    return code


if __name__ == "__main__":
    sys.exit(main())
