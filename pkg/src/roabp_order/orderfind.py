"""Order finding: grow families of low-rank subsets, then read an order off a path.

Subsets are bitmasks over the variables 0..n-1 throughout this module.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator

from .nisan import DEFAULT_TRIALS, RankCache, RankTestReport, VarSubset, prefix_subsets, prob_rank_at_most
from .poly import DEFAULT_EXPANSION_BUDGET, DensePoly, PolyOracle, grid_size
from .roabp import Order

DEFAULT_SUBSET_BUDGET = 10**6
DEFAULT_BRUTE_FORCE_CAP = 8
MAX_VERIFIED_PATHS = 10_000


@dataclass
class GoodSetLists:
    """L_0, ..., L_{n-1}: subsets of each size that passed the rank test.

    ``levels[k]`` keeps insertion order, which is reproducible for a fixed seed.
    """

    n: int
    levels: list[list[int]]
    reports: dict[int, RankTestReport] = field(default_factory=dict)
    tests: int = 0
    complete: bool = True

    def sizes(self) -> list[int]:
        return [len(level) for level in self.levels]

    def subsets(self, k: int) -> list[VarSubset]:
        return [VarSubset(m, self.n) for m in self.levels[k]]


class OrderFindingError(Exception):
    pass


class BudgetExhausted(OrderFindingError):
    def __init__(self, lists: GoodSetLists, budget: int):
        super().__init__(f"subset-test budget of {budget} exhausted after {lists.tests} tests")
        self.lists = lists
        self.budget = budget


class NoPathFailure(OrderFindingError):
    """``reason`` is "no-path" (w is likely too small) or "budget"."""

    def __init__(self, reason: str, lists: GoodSetLists | None, message: str = ""):
        super().__init__(message or reason)
        self.reason = reason
        self.lists = lists
        self.bracket: tuple[int, int] | None = None


@dataclass(frozen=True)
class OrderResult:
    tau: Order
    claimed_width: int
    verification: str
    per_layer: tuple[int, ...] | None = None
    lists: GoodSetLists | None = field(default=None, repr=False, compare=False)


def _check_dims(f: PolyOracle, n: int, d: int) -> None:
    if (f.n, f.d) != (n, d):
        raise ValueError(f"oracle has n={f.n}, d={f.d} but n={n}, d={d} were given")


def populate_graph(f: PolyOracle, n: int, d: int, w: int, rng: random.Random,
                   budget: int = DEFAULT_SUBSET_BUDGET, trials: int = DEFAULT_TRIALS) -> GoodSetLists:
    """Breadth-wise extension of good subsets, one size at a time.

    Every candidate T0 + {i} is rank-tested at most once per level; the
    terminal level L_n is never built.
    """
    _check_dims(f, n, d)
    if w < 1:
        raise ValueError("w must be at least 1")
    if budget < n:
        raise ValueError("budget must be at least n")
    lists = GoodSetLists(n, [[0]])
    for k in range(1, n):
        level: list[int] = []
        lists.levels.append(level)
        seen: set[int] = set()
        for base in lists.levels[k - 1]:
            for i in range(n):
                T = base | 1 << i
                if T == base or T in seen:
                    continue
                seen.add(T)
                if lists.tests >= budget:
                    lists.complete = False
                    raise BudgetExhausted(lists, budget)
                lists.tests += 1
                report = prob_rank_at_most(f, VarSubset(T, n), w, trials, rng, early_stop=True)
                if report.at_most:
                    level.append(T)
                    lists.reports[T] = report
    return lists


def iter_paths(lists: GoodSetLists) -> Iterator[Order]:
    """Depth-first enumeration of empty-set-to-full-set paths, smallest element first."""
    n = lists.n
    full = (1 << n) - 1
    good = [set(level) for level in lists.levels] + [{full}]
    dead: set[int] = set()
    path: list[int] = []

    def walk(S: int, k: int):
        if k == n:
            yield tuple(path)
            return
        found = False
        for t in range(n):
            T = S | 1 << t
            if T == S or T not in good[k + 1] or T in dead:
                continue
            path.append(t)
            for tau in walk(T, k + 1):
                found = True
                yield tau
            path.pop()
        if not found:
            dead.add(S)

    if n == 0 or 0 in good[0]:
        yield from walk(0, 0)


def resolve_verification(mode: str, n: int, d: int, expansion_budget: int | None) -> str:
    if mode == "auto":
        fits = expansion_budget is None or grid_size(n, d) <= expansion_budget
        return "exact" if fits else "probabilistic"
    if mode not in ("exact", "probabilistic", "none"):
        raise ValueError(f"unknown verification mode {mode!r}")
    return mode


class _Verifier:
    def __init__(self, f: PolyOracle, w: int, mode: str, rng: random.Random, trials: int, expansion_budget):
        mode = resolve_verification(mode, f.n, f.d, expansion_budget)
        self.mode, self.f, self.w, self.trials = mode, f, w, trials
        self.rng = random.Random(rng.getrandbits(64))
        self.ranks = RankCache(f.to_dense(expansion_budget), expansion_budget) if mode == "exact" else None

    def check(self, tau: Order) -> tuple[bool, tuple[int, ...] | None]:
        if self.mode == "none":
            return True, None
        prefixes = prefix_subsets(tau)
        if self.mode == "exact":
            per_layer = tuple(self.ranks(T.mask) for T in prefixes)
            return all(r <= self.w for r in per_layer), per_layer
        ok = all(prob_rank_at_most(self.f, T, self.w, self.trials, self.rng).at_most for T in prefixes)
        return ok, None


def find_order(f: PolyOracle, n: int, d: int, w: int, rng: random.Random,
               budget: int = DEFAULT_SUBSET_BUDGET, trials: int = DEFAULT_TRIALS,
               verify: str = "auto", expansion_budget: int | None = DEFAULT_EXPANSION_BUDGET) -> OrderResult:
    """Return an order whose prefixes all passed the rank-<=w test.

    ``verify`` chooses how the candidate order is re-checked: "exact" (dense
    expansion and exact ranks), "probabilistic" (fresh rank tests on every
    prefix), "none", or "auto" (exact when the grid fits the expansion
    budget). Candidates failing the re-check are skipped in favour of the
    next path.
    """
    try:
        lists = populate_graph(f, n, d, w, rng, budget, trials)
    except BudgetExhausted as e:
        raise NoPathFailure("budget", e.lists, str(e)) from e
    verifier = None
    for attempt, tau in enumerate(iter_paths(lists)):
        if attempt >= MAX_VERIFIED_PATHS:
            break
        verifier = verifier or _Verifier(f, w, verify, rng, trials, expansion_budget)
        ok, per_layer = verifier.check(tau)
        if ok:
            return OrderResult(tau, w, verifier.mode, per_layer, lists)
    raise NoPathFailure("no-path", lists, f"no order of width <= {w} found (sizes {lists.sizes()})")


def max_possible_width(n: int, d: int) -> int:
    return (d + 1) ** (n // 2)


def min_width_search(f: PolyOracle, n: int, d: int, rng: random.Random,
                     budget: int = DEFAULT_SUBSET_BUDGET, trials: int = DEFAULT_TRIALS,
                     verify: str = "auto", expansion_budget: int | None = DEFAULT_EXPANSION_BUDGET) -> OrderResult:
    """Smallest w for which :func:`find_order` succeeds: doubling, then bisection.

    Runs that were not exactly verified get one retry before a w is declared
    infeasible.
    """
    _check_dims(f, n, d)
    cap = max_possible_width(n, d)
    retries = 1 if resolve_verification(verify, n, d, expansion_budget) == "exact" else 2
    lo = 0  # largest w known to fail

    def attempt(w):
        for _ in range(retries):
            try:
                return find_order(f, n, d, w, rng, budget, trials, verify, expansion_budget)
            except NoPathFailure as e:
                if e.reason == "budget":
                    e.bracket = (lo, w)
                    raise
        return None

    w, best = 1, None
    while True:
        w = min(w, cap)
        best = attempt(w)
        if best is not None or w >= cap:
            break
        lo = w
        w *= 2
    if best is None:
        raise NoPathFailure("no-path", None, f"no order found even at the trivial width {cap}")
    hi = w
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        res = attempt(mid)
        if res is None:
            lo = mid
        else:
            hi, best = mid, res
    return best


def brute_force_best_order(f: DensePoly, cap: int = DEFAULT_BRUTE_FORCE_CAP,
                           budget: int | None = DEFAULT_EXPANSION_BUDGET) -> tuple[int, Order]:
    """Minimum width over all n! orders; ties go to the lexicographically least order."""
    if f.n > cap:
        raise ValueError(f"brute force over {f.n}! orders exceeds the cap of n <= {cap}")
    ranks = RankCache(f, budget)
    best_w, best_tau = None, None
    for perm in itertools.permutations(range(f.n)):
        mask, width = 0, 1
        for v in perm[:-1]:
            mask |= 1 << v
            width = max(width, ranks(mask))
            if best_w is not None and width >= best_w:
                break
        else:
            if best_w is None or width < best_w:
                best_w, best_tau = width, perm
    return best_w, tuple(best_tau)


def order_widths(f: DensePoly, cap: int = DEFAULT_BRUTE_FORCE_CAP,
                 budget: int | None = DEFAULT_EXPANSION_BUDGET) -> dict[Order, int]:
    """Exact width of f in every order, in lexicographic order of the permutations."""
    if f.n > cap:
        raise ValueError(f"enumerating {f.n}! orders exceeds the cap of n <= {cap}")
    ranks = RankCache(f, budget)
    out = {}
    for perm in itertools.permutations(range(f.n)):
        mask, width = 0, 1
        for v in perm[:-1]:
            mask |= 1 << v
            width = max(width, ranks(mask))
        out[perm] = width
    return out
