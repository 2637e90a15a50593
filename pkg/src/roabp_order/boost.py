"""Tensoring that raises every Nisan rank to a power, and the approximation-boosting wrapper.

g(x) = prod_{j<k} f(x_1^{(d+1)^j}, ..., x_n^{(d+1)^j}) has individual degree
(d+1)^k - 1. Writing each exponent of g in base d+1 splits its monomials
uniquely into k monomials of f, so every Nisan matrix of g is a row/column
permutation of the k-fold Kronecker power of the matching matrix of f.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .nisan import VarSubset, as_subset, exact_width_in_order
from .orderfind import DEFAULT_BRUTE_FORCE_CAP, brute_force_best_order, order_widths
from .poly import DEFAULT_EXPANSION_BUDGET, DensePoly, PolyOracle, check_budget, power_substituted_oracle
from .roabp import Order


@dataclass(frozen=True)
class TensorSpec:
    base: PolyOracle
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("tensor power k must be at least 1")

    @property
    def degree(self) -> int:
        return (self.base.d + 1) ** self.k - 1


def _outer_power(f: DensePoly, k: int) -> np.ndarray:
    # axes of the result: copy j, then f's own grid axes
    grid = f.grid()
    out = grid
    for _ in range(k - 1):
        out = np.multiply.outer(out, grid) % f.p
    return out


def tensor_power_dense(f: DensePoly, k: int, budget: int | None = DEFAULT_EXPANSION_BUDGET) -> DensePoly:
    """Coefficient grid of g, the k-fold power-substituted product of f.

    The coefficient of prod_i x_i^{E_i} with E_i = sum_j e_{i,j} (d+1)^j is
    prod_j c_f(e_{1,j}, ..., e_{n,j}).
    """
    if k < 1:
        raise ValueError("tensor power k must be at least 1")
    n, d = f.n, f.d
    dk = (d + 1) ** k - 1
    check_budget(n, dk, budget)
    if n == 0:
        return DensePoly(0, dk, f.coeffs ** k % f.p, f.field)
    outer = _outer_power(f, k)
    # grid axis a of g is variable n-1-a; its digits run most significant first
    axes = [j * n + a for a in range(n) for j in reversed(range(k))]
    coeffs = np.ascontiguousarray(outer.transpose(axes)).ravel()
    return DensePoly(n, dk, coeffs, f.field)


def tensor_power_oracle(spec: TensorSpec) -> PolyOracle:
    """Evaluation oracle for g; each query costs k queries to the base."""
    base, k = spec.base, spec.k
    p = base.field.p
    factors = [power_substituted_oracle(base, j) for j in range(k)]

    def eval_(point):
        acc = 1
        for fac in factors:
            acc = acc * fac(point) % p
        return acc

    def expand(budget):
        check_budget(base.n, spec.degree, budget)
        return tensor_power_dense(base.to_dense(budget), k, budget)

    return PolyOracle(base.n, spec.degree, base.field, eval_, "tensor-composite", expand)


def block_tensor(f: DensePoly, k: int, budget: int | None = DEFAULT_EXPANSION_BUDGET) -> DensePoly:
    """h_k(y) = prod_l f(y_{0,l}, ..., y_{n-1,l}) on n*k variables; y_{i,l} is variable i*k + l."""
    if k < 1:
        raise ValueError("k must be at least 1")
    n = f.n
    N = n * k
    check_budget(N, f.d, budget)
    outer = _outer_power(f, k)
    axes = []
    for b in range(N):
        var = N - 1 - b
        i, ell = divmod(var, k)
        axes.append(ell * n + (n - 1 - i))
    coeffs = np.ascontiguousarray(outer.transpose(axes)).ravel() if N else outer.ravel()
    return DensePoly(N, f.d, coeffs, f.field)


def lifted_partition(A, n: int, k: int) -> VarSubset:
    """The block set {y_{i,l} : i in A, 0 <= l < k} over n*k variables."""
    if k < 1:
        raise ValueError("k must be at least 1")
    A = as_subset(A, n)
    return VarSubset.of((i * k + ell for i in A for ell in range(k)), n * k)


# --- approximation boosting ---------------------------------------------------


class ApproxOracle(abc.ABC):
    """Order finder with a declared approximation ratio.

    Called as ``approx(oracle, n, d)`` and returns ``(order, width_estimate)``.
    """

    ratio: Fraction

    @abc.abstractmethod
    def __call__(self, f: PolyOracle, n: int, d: int) -> tuple[Order, int]:
        ...


class BruteForceApprox(ApproxOracle):
    """Exact optimum by enumeration; declares a ratio just above 1."""

    def __init__(self, ratio=Fraction(101, 100), cap: int = DEFAULT_BRUTE_FORCE_CAP,
                 budget: int | None = DEFAULT_EXPANSION_BUDGET):
        self.ratio = Fraction(ratio)
        self.cap, self.budget = cap, budget

    def __call__(self, f, n, d):
        width, tau = brute_force_best_order(f.to_dense(self.budget), self.cap, self.budget)
        return tau, width


class MockTwoApprox(ApproxOracle):
    """Deliberately poor 2-approximation: the widest order whose width is still at most 2 * opt.

    Ties go to the lexicographically least order.
    """

    def __init__(self, cap: int = DEFAULT_BRUTE_FORCE_CAP, budget: int | None = DEFAULT_EXPANSION_BUDGET):
        self.ratio = Fraction(2)
        self.cap, self.budget = cap, budget

    def __call__(self, f, n, d):
        widths = order_widths(f.to_dense(self.budget), self.cap, self.budget)
        limit = 2 * min(widths.values())
        width = max(w for w in widths.values() if w <= limit)
        tau = next(t for t, w in widths.items() if w == width)
        return tau, width


def ptas_power(alpha, epsilon) -> int:
    """ceil(log alpha / log(1 + epsilon)), computed exactly as the least k with (1+eps)^k >= alpha."""
    alpha, epsilon = Fraction(str(alpha)), Fraction(str(epsilon))
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if alpha <= 1:
        raise ValueError("approximation ratio must exceed 1")
    k, acc = 0, Fraction(1)
    while acc < alpha:
        k += 1
        acc *= 1 + epsilon
    return max(k, 1)


def integer_root_ceil(x: int, k: int) -> int:
    """Least integer r >= 0 with r^k >= x."""
    if x < 0 or k < 1:
        raise ValueError("need x >= 0 and k >= 1")
    lo, hi = 0, 1
    while hi**k < x:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**k >= x:
            hi = mid
        else:
            lo = mid + 1
    return lo


@dataclass(frozen=True)
class PtasResult:
    order: Order
    width_estimate: int
    k: int
    boosted_degree: int
    boosted_estimate: int


def width_ptas(f: PolyOracle, n: int, d: int, epsilon, approx: ApproxOracle) -> PtasResult:
    """Run ``approx`` on the k-th tensor power of f and read the answer back.

    The order is returned unchanged; the width estimate is the integer
    ceiling of the k-th root of the boosted estimate.
    """
    if (f.n, f.d) != (n, d):
        raise ValueError(f"oracle has n={f.n}, d={f.d} but n={n}, d={d} were given")
    k = ptas_power(approx.ratio, epsilon)
    spec = TensorSpec(f, k)
    g = tensor_power_oracle(spec)
    tau, w_star = approx(g, n, spec.degree)
    return PtasResult(tuple(tau), integer_root_ceil(w_star, k), k, spec.degree, w_star)


def width_in_order(f: DensePoly, tau: Order, budget: int | None = DEFAULT_EXPANSION_BUDGET) -> int:
    return exact_width_in_order(f, tau, budget)[0]
