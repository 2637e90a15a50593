"""Nisan matrices, exact ranks over F_p, and randomized rank-threshold tests."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import flint
import numpy as np

from .poly import DEFAULT_EXPANSION_BUDGET, DensePoly, PolyOracle, check_budget
from .roabp import check_order

DEFAULT_TRIALS = 3


@dataclass(frozen=True)
class VarSubset:
    """A subset of the variables {0, ..., n-1}, stored as a bitmask."""

    mask: int
    n: int

    def __post_init__(self):
        if self.n < 0 or self.mask < 0 or self.mask >> self.n:
            raise ValueError(f"mask {self.mask:#x} is not a subset of {self.n} variables")

    @classmethod
    def of(cls, members: Iterable[int], n: int) -> VarSubset:
        mask = 0
        for v in members:
            if not 0 <= v < n:
                raise ValueError(f"variable {v} out of range for n={n}")
            mask |= 1 << v
        return cls(mask, n)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.n) if self.mask >> v & 1)

    @property
    def complement(self) -> VarSubset:
        return VarSubset(((1 << self.n) - 1) & ~self.mask, self.n)

    def __len__(self):
        return self.mask.bit_count()

    def __contains__(self, v):
        return 0 <= v < self.n and bool(self.mask >> v & 1)

    def __iter__(self):
        return iter(self.members)

    def add(self, v: int) -> VarSubset:
        return VarSubset(self.mask | 1 << v, self.n)

    def is_prefix_of(self, order: Sequence[int]) -> bool:
        k = len(self)
        return VarSubset.of(order[:k], self.n) == self

    def __repr__(self):
        return "{" + ",".join(map(str, self.members)) + "}"


def as_subset(T, n: int) -> VarSubset:
    if isinstance(T, VarSubset):
        if T.n != n:
            raise ValueError(f"subset lives over {T.n} variables, expected {n}")
        return T
    if isinstance(T, int):
        return VarSubset(T, n)
    return VarSubset.of(T, n)


def prefix_subsets(order: Sequence[int]) -> list[VarSubset]:
    """The proper non-empty prefixes of ``order`` (lengths 1..n-1)."""
    n = len(order)
    out, mask = [], 0
    for v in order[:-1]:
        mask |= 1 << v
        out.append(VarSubset(mask, n))
    return out


# --- exact ----------------------------------------------------------------


def nisan_matrix(f: DensePoly, T, budget: int | None = DEFAULT_EXPANSION_BUDGET) -> np.ndarray:
    """Coefficient matrix with rows indexed by monomials over T, columns by the rest.

    Row and column indices use the same mixed-radix convention as the dense
    grid: the lowest-numbered variable of each side is the least-significant
    digit.
    """
    check_budget(f.n, f.d, budget)
    T = as_subset(T, f.n)
    n = f.n
    rows = [n - 1 - v for v in reversed(T.members)]
    cols = [n - 1 - v for v in reversed(T.complement.members)]
    g = f.grid().transpose(rows + cols) if n else f.grid()
    return g.reshape((f.d + 1) ** len(T), (f.d + 1) ** (n - len(T)))


def _rank_elimination(M: np.ndarray, p: int) -> int:
    # small primes fit products in int64; large ones fall back to Python ints
    A = M.astype(np.int64) if p < 2**31 else M.astype(object)
    rows, cols = A.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        nz = np.flatnonzero(A[rank:, c] != 0)
        if not len(nz):
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            A[[rank, piv]] = A[[piv, rank]]
        inv = pow(int(A[rank, c]), p - 2, p)
        A[rank, c:] = A[rank, c:] * inv % p
        below = rank + 1 + np.flatnonzero(A[rank + 1 :, c] != 0)
        if len(below):
            A[below, c:] = (A[below, c:] - np.outer(A[below, c], A[rank, c:])) % p
        rank += 1
    return rank


def _reduced(M, p: int) -> np.ndarray:
    # machine words when every entry fits, Python ints otherwise
    A = np.asarray(M, dtype=object)
    try:
        return A.astype(np.uint64) % np.uint64(p)
    except OverflowError:
        return A % p


def exact_rank(M, p: int, backend: str = "flint") -> int:
    """Rank of M over F_p.

    ``backend="elimination"`` is the in-package row reduction (pivot on the
    first nonzero entry, lowest row index first); ``"flint"`` hands the
    reduced matrix to FLINT's nmod_mat. Both drop all-zero rows and columns
    first, which keeps the sparse gadget matrices tiny.
    """
    A = _reduced(M, p)
    if A.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    nz = A != 0
    A = A[nz.any(axis=1)][:, nz.any(axis=0)]
    if A.size == 0:
        return 0
    if backend == "elimination":
        return _rank_elimination(A.astype(object), p)
    if backend == "flint":
        r, c = A.shape
        return flint.nmod_mat(r, c, A.ravel().tolist(), p).rank()
    raise ValueError(f"unknown rank backend {backend!r}")


def nisan_rank(f: DensePoly, T, budget: int | None = DEFAULT_EXPANSION_BUDGET) -> int:
    return exact_rank(nisan_matrix(f, T, budget), f.p)


class RankCache:
    """Memoized exact Nisan ranks of one dense polynomial, keyed by bitmask."""

    def __init__(self, f: DensePoly, budget: int | None = DEFAULT_EXPANSION_BUDGET):
        check_budget(f.n, f.d, budget)
        self.f = f
        self.full = (1 << f.n) - 1
        self._ranks: dict[int, int] = {}

    def __call__(self, mask: int) -> int:
        mask = int(mask)
        r = self._ranks.get(mask)
        if r is None:
            r = nisan_rank(self.f, mask, None)
            # rank is symmetric under complementation
            self._ranks[mask] = self._ranks[self.full ^ mask] = r
        return r


def exact_width_in_order(f: DensePoly, order: Sequence[int], budget: int | None = DEFAULT_EXPANSION_BUDGET,
                         ranks: RankCache | None = None) -> tuple[int, list[int]]:
    """Width of the optimal ROABP for f in ``order`` and the n-1 inner layer widths.

    Layers 0 and n always have one vertex, so the width is at least 1.
    """
    order = check_order(order, f.n)
    ranks = ranks or RankCache(f, budget)
    per_layer = [ranks(T.mask) for T in prefix_subsets(order)]
    return max([1, *per_layer]), per_layer


# --- randomized -----------------------------------------------------------


@dataclass(frozen=True)
class RankTestReport:
    subset: VarSubset
    threshold: int
    verdict: str
    trials: int
    failure_bound: Fraction
    determinants_nonzero: tuple[bool, ...] = ()

    def __post_init__(self):
        if self.verdict not in ("at_most_w", "exceeds_w"):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.failure_bound >= 1:
            raise ValueError(
                f"Schwartz-Zippel failure bound {self.failure_bound} is not below 1; use a larger prime"
            )

    @property
    def at_most(self) -> bool:
        return self.verdict == "at_most_w"


def failure_bound(n: int, d: int, w: int, trials: int, p: int) -> Fraction:
    return Fraction(n * d * (w + 1) ** 2 * trials, p)


def evaluation_matrix(f: PolyOracle, T: VarSubset, rows: list[list[int]], cols: list[list[int]]) -> list[list[int]]:
    """Matrix of f(x_T = alpha_i, x_rest = beta_j)."""
    t_vars, c_vars = T.members, T.complement.members
    point = [0] * f.n
    out = []
    for alpha in rows:
        for v, a in zip(t_vars, alpha):
            point[v] = a
        row = []
        for beta in cols:
            for v, b in zip(c_vars, beta):
                point[v] = b
            row.append(f(point))
        out.append(row)
    return out


def prob_rank_at_most(f: PolyOracle, T, w: int, trials: int = DEFAULT_TRIALS,
                      rng: random.Random | None = None, early_stop: bool = False) -> RankTestReport:
    """Decide rank(M_T(f)) <= w from (w+1) x (w+1) evaluation matrices.

    A nonzero determinant certifies rank > w outright. An all-zero run is
    wrong with probability at most the report's ``failure_bound``. With
    ``early_stop`` the remaining trials are skipped once a nonzero
    determinant shows up. When T or its complement is so small that the
    matrix has at most w rows or columns, the answer is returned without
    sampling (``trials == 0``).
    """
    if w < 0 or trials < 1:
        raise ValueError("need w >= 0 and trials >= 1")
    T = as_subset(T, f.n)
    k = len(T)
    if (f.d + 1) ** min(k, f.n - k) <= w:
        # the Nisan matrix has at most w rows or columns: no sampling needed
        return RankTestReport(T, w, "at_most_w", 0, Fraction(0))
    rng = rng or random.Random()
    field = f.field
    bound = failure_bound(f.n, f.d, w, trials, field.p)
    statuses = []
    for _ in range(trials):
        alphas = [field.sample(rng, k) for _ in range(w + 1)]
        betas = [field.sample(rng, f.n - k) for _ in range(w + 1)]
        E = evaluation_matrix(f, T, alphas, betas)
        statuses.append(exact_rank(E, field.p) == w + 1)
        if early_stop and statuses[-1]:
            break
    verdict = "exceeds_w" if any(statuses) else "at_most_w"
    return RankTestReport(T, w, verdict, trials, bound, tuple(statuses))
