"""CutWidth to ROABP-width: gadget polynomials, exact cutwidth, and the rank = 2 + cut certificate.

Vertices are 0-indexed here; the graph file format is 1-indexed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .ffield import PrimeField
from .nisan import RankCache, VarSubset, as_subset
from .poly import DEFAULT_EXPANSION_BUDGET, PolyFormatError, SparsePoly, _content_lines, _parse_header, check_budget
from .roabp import Order

DEFAULT_CUTWIDTH_CAP = 10


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a graph needs at least one vertex")
        clean = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            clean.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        edges = list(edges)
        canon = {(min(u, v), max(u, v)) for u, v in edges}
        if len(canon) != len(edges):
            raise ValueError("repeated edge (graphs must be simple)")
        return cls(n, frozenset(canon))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        nbrs = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(x)) for x in nbrs)

    @property
    def max_degree(self) -> int:
        """Delta, except that an edgeless graph gets 1 so vertex gadgets stay x_v^2."""
        return max(1, max(len(x) for x in self.neighbors))

    def neighbor_index(self, u: int, v: int) -> int:
        """1-based rank of v among u's neighbours in increasing vertex order."""
        return self.neighbors[u].index(v) + 1

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def build_gadget_poly(G: Graph, field: PrimeField | None = None) -> SparsePoly:
    """sum_v x_v^(Delta+1) + sum_{uv} x_u^{n_u(v)} x_v^{n_v(u)}, individual degree Delta+1."""
    field = field or PrimeField()
    n, delta = G.n, G.max_degree
    terms = []
    for v in range(n):
        e = [0] * n
        e[v] = delta + 1
        terms.append((tuple(e), 1))
    for u, v in G.sorted_edges():
        e = [0] * n
        e[u] = G.neighbor_index(u, v)
        e[v] = G.neighbor_index(v, u)
        terms.append((tuple(e), 1))
    return SparsePoly(n, delta + 1, tuple(terms), field)


def cut_size(G: Graph, A) -> int:
    A = as_subset(A, G.n)
    return sum((u in A) != (v in A) for u, v in G.edges)


def _cut_table(G: Graph) -> list[int]:
    # cut(S) for every mask, built incrementally from S without its top bit
    cut = [0] * (1 << G.n)
    nbr_mask = [0] * G.n
    for u, v in G.edges:
        nbr_mask[u] |= 1 << v
        nbr_mask[v] |= 1 << u
    for S in range(1, 1 << G.n):
        v = S.bit_length() - 1
        rest = S ^ 1 << v
        inside = (nbr_mask[v] & rest).bit_count()
        cut[S] = cut[rest] - inside + (len(G.neighbors[v]) - inside)
    return cut


def cutwidth_exact(G: Graph, cap: int = DEFAULT_CUTWIDTH_CAP) -> tuple[int, Order]:
    """Optimal cutwidth and the lexicographically least optimal arrangement.

    Dynamic programme over vertex subsets: best[S] is the least achievable
    maximum cut over arrangements that start with S (cut of S included).
    The arrangement is rebuilt greedily, taking the smallest vertex that
    keeps the optimum, which yields the lexicographically least one.
    """
    n = G.n
    if n > cap:
        raise ValueError(f"cutwidth brute force limited to n <= {cap}, got n={n}")
    full = (1 << n) - 1
    cut = _cut_table(G)
    best = [0] * (1 << n)
    for S in range(full - 1, -1, -1):
        rest = min(best[S | 1 << v] for v in range(n) if not S >> v & 1)
        best[S] = max(cut[S] if S else 0, rest)
    width, S, order = best[0], 0, []
    while S != full:
        v = next(v for v in range(n) if not S >> v & 1 and best[S | 1 << v] <= width)
        order.append(v)
        S |= 1 << v
    return width, tuple(order)


def cutwidth_bruteforce(G: Graph, cap: int = 8) -> tuple[int, Order]:
    """Plain enumeration of all n! arrangements; kept as the cross-check for :func:`cutwidth_exact`."""
    if G.n > cap:
        raise ValueError(f"n={G.n} exceeds the enumeration cap {cap}")
    best = None
    for perm in itertools.permutations(range(G.n)):
        S, width = 0, 0
        for v in perm[:-1]:
            S |= 1 << v
            width = max(width, cut_size(G, S))
        if best is None or width < best[0]:
            best = (width, perm)
    return best


@dataclass(frozen=True)
class PartitionCheck:
    subset: VarSubset
    rank: int
    expected: int

    @property
    def ok(self) -> bool:
        return self.rank == self.expected


@dataclass(frozen=True)
class RankCutCertificate:
    graph: Graph
    checks: tuple[PartitionCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[PartitionCheck]:
        return [c for c in self.checks if not c.ok]


def certify_rank_cut_identity(G: Graph, budget: int | None = DEFAULT_EXPANSION_BUDGET,
                              field: PrimeField | None = None) -> RankCutCertificate:
    """Compare the exact Nisan rank of f_G with 2 + cut on all 2^n - 2 nontrivial sides."""
    if G.n < 2:
        raise ValueError("certificate needs n >= 2: a single vertex has no nontrivial partition")
    f = build_gadget_poly(G, field)
    check_budget(f.n, f.d, budget)
    ranks = RankCache(f.to_dense(budget), budget)
    checks = tuple(
        PartitionCheck(VarSubset(A, G.n), ranks(A), 2 + cut_size(G, A))
        for A in range(1, (1 << G.n) - 1)
    )
    return RankCutCertificate(G, checks)


# --- graph files -------------------------------------------------------------


def format_graph(G: Graph) -> str:
    lines = [f"graph n={G.n}"] + [f"{u + 1} {v + 1}" for u, v in G.sorted_edges()]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    lines = _content_lines(text)
    if not lines:
        raise PolyFormatError("empty graph file")
    hdr = _parse_header(lines[0], "graph")
    if "n" not in hdr:
        raise PolyFormatError("graph header missing n")
    edges = []
    for line in lines[1:]:
        parts = line.split()
        try:
            u, v = (int(t) for t in parts)
        except ValueError:
            raise PolyFormatError(f"expected 'u v' edge line, got {line!r}") from None
        edges.append((u - 1, v - 1))
    try:
        return Graph.from_edges(hdr["n"], edges)
    except ValueError as e:
        raise PolyFormatError(str(e)) from None
