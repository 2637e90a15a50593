"""Witness polynomials: narrow in a given order, yet high-rank across a given split.

f = prod_l (1 + x_{i_l} x_{j_l} + ... + (x_{i_l} x_{j_l})^d) with every i_l in T
and every j_l outside T. T splits all k pairs, so its rank is (d+1)^k; every
prefix of the order keeps at least one pair whole, so prefix ranks stay at or
below (d+1)^(k-1).

Variables and positions are 0-indexed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .ffield import PrimeField
from .nisan import as_subset
from .poly import DEFAULT_EXPANSION_BUDGET, DensePoly, SparsePoly
from .roabp import Order, check_order, identity_order


class WitnessHypothesisError(ValueError):
    """Raised when (n, d, w, T, order) is outside the construction's hypotheses.

    ``condition`` names the failed hypothesis: "parameters", "n-too-small",
    "k-too-small", "size", "left-heavy" or "prefix".
    """

    def __init__(self, condition: str, message: str):
        super().__init__(f"{condition}: {message}")
        self.condition = condition


def pair_count(d: int, w: int) -> int:
    """k = floor(log_{d+1} w) + 1, i.e. the least k with (d+1)^k > w."""
    if d < 1 or w < 1:
        raise WitnessHypothesisError("parameters", f"need d >= 1 and w >= 1, got d={d}, w={w}")
    k = 0
    while (d + 1) ** k <= w:
        k += 1
    return k


@dataclass(frozen=True)
class PairSelection:
    """Pairs (i_l, j_l) with i_l in T, j_l outside T; the first pair lies left of the second."""

    n: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        flat = [v for pair in self.pairs for v in pair]
        if len(set(flat)) != len(flat) or any(not 0 <= v < self.n for v in flat):
            raise ValueError(f"pair indices must be distinct and in range: {self.pairs}")
        if len(self.pairs) >= 2:
            (i1, j1), (i2, j2) = self.pairs[:2]
            if max(i1, j1) >= min(i2, j2):
                raise ValueError(f"first pair {self.pairs[0]} is not left of the second {self.pairs[1]}")

    @property
    def k(self) -> int:
        return len(self.pairs)

    def split_by(self, mask: int) -> int:
        """Number of pairs with exactly one endpoint in ``mask``."""
        return sum((mask >> i & 1) != (mask >> j & 1) for i, j in self.pairs)

    def mapped(self, perm: Sequence[int]) -> tuple[tuple[int, int], ...]:
        return tuple((perm[i], perm[j]) for i, j in self.pairs)


def _left_heavy(members: Sequence[int], n: int) -> bool:
    half = n // 2
    left = sum(1 for v in members if v < half)
    return left >= len(members) - left


def _is_prefix(members: Sequence[int]) -> bool:
    return sorted(members) == list(range(len(members)))


def select_pairs(n: int, k: int, T: Sequence[int]) -> PairSelection:
    """The pair choice for the identity order, without hypothesis checks.

    i_1 = min T, j_1 = min of the rest, i_2 = max T, j_2 = max of the rest,
    then the leftover indices of each side in ascending order. The left-of
    condition holds whenever neither T nor its complement is a prefix and
    both have at least two elements.
    """
    inside = sorted(T)
    outside = sorted(set(range(n)) - set(inside))
    if k == 1:
        return PairSelection(n, ((inside[0], outside[0]),))
    i1, i2, j1, j2 = inside[0], inside[-1], outside[0], outside[-1]
    rest_i = [v for v in inside if v not in (i1, i2)][: k - 2]
    rest_j = [v for v in outside if v not in (j1, j2)][: k - 2]
    return PairSelection(n, ((i1, j1), (i2, j2), *zip(rest_i, rest_j)))


def _check_common(n: int, d: int, w: int) -> int:
    k = pair_count(d, w)
    if (d + 1) ** n < w**3:
        raise WitnessHypothesisError("n-too-small", f"need n >= 3 log_{d + 1}({w}), got n={n}")
    if k < 2:
        # one pair is always split by the prefix ending at its left endpoint,
        # giving rank d+1 > w along the order
        raise WitnessHypothesisError("k-too-small", f"w={w} < d+1={d + 1} leaves a single pair; need w >= d+1")
    return k


def _sparse(n: int, d: int, pairs: Sequence[tuple[int, int]], field: PrimeField) -> SparsePoly:
    terms = []
    for es in itertools.product(range(d + 1), repeat=len(pairs)):
        exps = [0] * n
        for (i, j), e in zip(pairs, es):
            exps[i] = exps[j] = e
        terms.append((tuple(exps), 1))
    return SparsePoly(n, d, tuple(terms), field)


def witness_pairs_for_id(n: int, d: int, w: int, T) -> PairSelection:
    T = as_subset(T, n)
    k = _check_common(n, d, w)
    members = T.members
    if not k <= len(members) <= n / 2:
        raise WitnessHypothesisError("size", f"need {k} <= |T| <= n/2, got |T|={len(members)}")
    if not _left_heavy(members, n):
        raise WitnessHypothesisError("left-heavy", f"T={T} has more elements in the right half")
    if _is_prefix(members):
        raise WitnessHypothesisError("prefix", f"T={T} is a prefix of the identity order")
    return select_pairs(n, k, members)


def witness_for_id(n: int, d: int, w: int, T, field: PrimeField | None = None,
                   budget: int | None = DEFAULT_EXPANSION_BUDGET) -> DensePoly:
    sel = witness_pairs_for_id(n, d, w, T)
    return _sparse(n, d, sel.pairs, field or PrimeField()).to_dense(budget)


def witness_pairs_general(n: int, d: int, w: int, T, sigma: Sequence[int] | None = None) -> tuple[tuple[int, int], ...]:
    """Pairs over the original variables for an arbitrary order ``sigma``.

    Works in positions of sigma, swaps T for its complement when T is the
    larger side, and mirrors positions when T is right-heavy. A set that
    is right-heavy both ways round (possible for odd n) goes straight to
    :func:`select_pairs`, which needs only the non-prefix conditions.
    """
    T = as_subset(T, n)
    sigma = check_order(sigma if sigma is not None else identity_order(n), n)
    k = _check_common(n, d, w)
    if not k <= len(T) <= n - k:
        raise WitnessHypothesisError("size", f"need {k} <= |T| <= n-{k}, got |T|={len(T)}")
    pos = {v: q for q, v in enumerate(sigma)}
    S = sorted(pos[v] for v in T)
    if _is_prefix(S) or _is_prefix(sorted(set(range(n)) - set(S))):
        raise WitnessHypothesisError("prefix", f"T={T} or its complement is a prefix of the order")
    if len(S) > n / 2:
        S = sorted(set(range(n)) - set(S))
    back = list(range(n))
    if not _left_heavy(S, n):
        mirrored = sorted(n - 1 - q for q in S)
        if _left_heavy(mirrored, n):
            S, back = mirrored, [n - 1 - q for q in range(n)]
    sel = select_pairs(n, k, S)
    return tuple((sigma[back[a]], sigma[back[b]]) for a, b in sel.pairs)


def witness_general(n: int, d: int, w: int, T, sigma: Sequence[int] | None = None,
                    field: PrimeField | None = None,
                    budget: int | None = DEFAULT_EXPANSION_BUDGET) -> DensePoly:
    pairs = witness_pairs_general(n, d, w, T, sigma)
    return _sparse(n, d, pairs, field or PrimeField()).to_dense(budget)


def witness_sparse(n: int, d: int, w: int, T, sigma: Sequence[int] | None = None,
                   field: PrimeField | None = None) -> SparsePoly:
    """Same polynomial as :func:`witness_general` in sparse form, with no grid expansion."""
    pairs = witness_pairs_general(n, d, w, T, sigma)
    return _sparse(n, d, pairs, field or PrimeField())


def admissible(n: int, d: int, w: int, T, sigma: Order) -> bool:
    try:
        witness_pairs_general(n, d, w, T, sigma)
    except WitnessHypothesisError:
        return False
    return True
