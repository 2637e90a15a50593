"""Read-once oblivious ABPs in matrix form.

Variables are 0-indexed. ``order[i]`` is the variable read at position i, and
``layers[i][j]`` is the coefficient matrix of ``x_{order[i]}^j`` at that
position, of shape widths[i] x widths[i+1].
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ffield import PrimeField
from .poly import (
    DEFAULT_EXPANSION_BUDGET,
    DensePoly,
    PolyFormatError,
    PolyOracle,
    _content_lines,
    _object_array,
    _parse_header,
    check_budget,
    grid_size,
)

Order = tuple[int, ...]
Matrix = tuple[tuple[int, ...], ...]


def check_order(order: Sequence[int], n: int) -> Order:
    order = tuple(int(v) for v in order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"{order} is not a permutation of 0..{n - 1}")
    return order


def identity_order(n: int) -> Order:
    return tuple(range(n))


@dataclass(frozen=True)
class Roabp:
    n: int
    d: int
    order: Order
    widths: tuple[int, ...]
    layers: tuple[tuple[Matrix, ...], ...]
    field: PrimeField

    def __post_init__(self):
        n, d = self.n, self.d
        object.__setattr__(self, "order", check_order(self.order, n))
        widths = tuple(int(w) for w in self.widths)
        if len(widths) != n + 1 or widths[0] != 1 or widths[-1] != 1 or min(widths) < 1:
            raise ValueError(f"widths must be (1, w_1, ..., w_{{n-1}}, 1) with positive entries, got {widths}")
        object.__setattr__(self, "widths", widths)
        if len(self.layers) != n:
            raise ValueError(f"expected {n} layers, got {len(self.layers)}")
        p = self.field.p
        layers = []
        for i, layer in enumerate(self.layers):
            if len(layer) != d + 1:
                raise ValueError(f"layer {i} needs {d + 1} coefficient matrices, got {len(layer)}")
            mats = []
            for j, mat in enumerate(layer):
                rows = tuple(tuple(int(a) % p for a in row) for row in mat)
                if len(rows) != widths[i] or any(len(r) != widths[i + 1] for r in rows):
                    raise ValueError(
                        f"layer {i}, degree {j}: expected shape {widths[i]}x{widths[i + 1]} (shape chain broken)"
                    )
                mats.append(rows)
            layers.append(tuple(mats))
        object.__setattr__(self, "layers", tuple(layers))

    @property
    def width(self) -> int:
        return max(self.widths)

    def __call__(self, point: Sequence[int]) -> int:
        return roabp_eval(self, point)

    def oracle(self, budget: int | None = DEFAULT_EXPANSION_BUDGET) -> PolyOracle:
        return PolyOracle(self.n, self.d, self.field, self.__call__, "roabp-backed", lambda b: roabp_to_dense(self, b))


def _vec_mat(vec: Sequence[int], mat: Matrix, p: int) -> list[int]:
    cols = len(mat[0])
    out = [0] * cols
    for a, row in zip(vec, mat):
        if a:
            for c in range(cols):
                out[c] += a * row[c]
    return [v % p for v in out]


def roabp_eval(R: Roabp, point: Sequence[int]) -> int:
    if len(point) != R.n:
        raise ValueError(f"point has {len(point)} coordinates, ROABP has {R.n} variables")
    p = R.field.p
    vec = [1]
    for var, layer in zip(R.order, R.layers):
        x = int(point[var]) % p
        # Horner in the layer: v * (A_0 + x (A_1 + x (...)))
        acc = _vec_mat(vec, layer[R.d], p)
        for j in range(R.d - 1, -1, -1):
            low = _vec_mat(vec, layer[j], p)
            acc = [(x * a + b) % p for a, b in zip(acc, low)]
        vec = acc
    return vec[0]


def sample_random_roabp(n: int, d: int, w: int, order: Sequence[int], rng: random.Random,
                        field: PrimeField | None = None) -> Roabp:
    """Draw a random width-w ROABP in ``order``, trimmed to widths (1, w, ..., w, 1).

    Only row 0 of the first layer and column 0 of the last layer reach the
    (0, 0) output entry, so sampling just those entries gives the same
    distribution as sampling full w x w matrices.
    """
    if n < 1 or d < 0 or w < 1:
        raise ValueError("need n >= 1, d >= 0, w >= 1")
    field = field or PrimeField()
    order = check_order(order, n)
    widths = (1,) + (w,) * (n - 1) + (1,)
    layers = []
    for i in range(n):
        r, c = widths[i], widths[i + 1]
        layers.append(tuple(
            tuple(tuple(field.sample(rng, c)) for _ in range(r)) for _ in range(d + 1)
        ))
    return Roabp(n, d, order, widths, tuple(layers), field)


def roabp_to_dense(R: Roabp, budget: int | None = DEFAULT_EXPANSION_BUDGET) -> DensePoly:
    """Expand R into its coefficient grid.

    The coefficient of prod_i x_{order[i]}^{e_i} is the single entry of
    prod_i A_{i, e_i}; prefix products are shared across the enumeration.
    """
    n, d, p = R.n, R.d, R.field.p
    check_budget(n, d, budget)
    # (partial linear index, row vector) for every exponent choice so far
    frontier = [(0, [1])]
    for i, var in enumerate(R.order):
        stride = (d + 1) ** var
        layer = R.layers[i]
        frontier = [
            (idx + e * stride, _vec_mat(vec, layer[e], p))
            for idx, vec in frontier
            for e in range(d + 1)
        ]
    coeffs = [0] * grid_size(n, d)
    for idx, vec in frontier:
        coeffs[idx] = vec[0]
    return DensePoly(n, d, _object_array(coeffs), R.field)


def roabp_from_matrices(order: Sequence[int], d: int, layers: Sequence[Sequence[Sequence[Sequence[int]]]],
                        field: PrimeField) -> Roabp:
    """Build a Roabp, reading the widths off the matrix shapes."""
    n = len(order)
    widths = [1] + [len(layers[i][0][0]) for i in range(n)]
    return Roabp(n, d, tuple(order), tuple(widths), tuple(tuple(layer) for layer in layers), field)


# --- text format -----------------------------------------------------------


def format_roabp(R: Roabp) -> str:
    lines = [
        f"roabp n={R.n} d={R.d} p={R.field.p}",
        "order " + " ".join(str(v + 1) for v in R.order),
        "widths " + " ".join(map(str, R.widths)),
    ]
    for i, layer in enumerate(R.layers):
        for j, mat in enumerate(layer):
            lines.append(f"layer {i + 1} {j}")
            lines.extend(" ".join(map(str, row)) for row in mat)
    return "\n".join(lines) + "\n"


def parse_roabp(text: str) -> Roabp:
    lines = _content_lines(text)
    if len(lines) < 3:
        raise PolyFormatError("ROABP file is truncated")
    hdr = _parse_header(lines[0], "roabp")
    try:
        n, d, p = hdr["n"], hdr["d"], hdr["p"]
    except KeyError as e:
        raise PolyFormatError(f"header missing {e.args[0]}") from None

    def ints(line, key):
        parts = line.split()
        if not parts or parts[0] != key:
            raise PolyFormatError(f"expected a {key!r} line, got {line!r}")
        try:
            return [int(t) for t in parts[1:]]
        except ValueError:
            raise PolyFormatError(f"non-integer token in {line!r}") from None

    order = tuple(v - 1 for v in ints(lines[1], "order"))
    widths = tuple(ints(lines[2], "widths"))
    if len(order) != n or len(widths) != n + 1:
        raise PolyFormatError("order/widths length does not match n")
    layers = [[None] * (d + 1) for _ in range(n)]
    pos = 3
    while pos < len(lines):
        head = ints(lines[pos], "layer")
        if len(head) != 2:
            raise PolyFormatError(f"malformed layer line {lines[pos]!r}")
        i, j = head[0] - 1, head[1]
        if not (0 <= i < n and 0 <= j <= d):
            raise PolyFormatError(f"layer index out of range in {lines[pos]!r}")
        rows = lines[pos + 1 : pos + 1 + widths[i]]
        if len(rows) != widths[i]:
            raise PolyFormatError(f"layer {i + 1} {j} is truncated")
        try:
            layers[i][j] = tuple(tuple(int(t) for t in r.split()) for r in rows)
        except ValueError:
            raise PolyFormatError(f"non-integer entry in layer {i + 1} {j}") from None
        pos += 1 + widths[i]
    if any(m is None for layer in layers for m in layer):
        raise PolyFormatError("some layer blocks are missing")
    try:
        return Roabp(n, d, order, widths, tuple(tuple(l) for l in layers), PrimeField(p))
    except ValueError as e:
        raise PolyFormatError(str(e)) from None


def roabp_matrix_product(R: Roabp, exps: Sequence[int]) -> int:
    """Entry (0, 0) of prod_i A_{i, e_{order[i]}}, computed with numpy object matrices."""
    p = R.field.p
    acc = np.array([[1]], dtype=object)
    for i, var in enumerate(R.order):
        acc = acc.dot(np.array(R.layers[i][exps[var]], dtype=object)) % p
    return int(acc[0, 0])
