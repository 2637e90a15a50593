"""Dense, sparse and black-box polynomial representations over a prime field.

Dense layout: an n-variate polynomial of individual degree d is a flat array
of (d+1)^n residues; the coefficient of x_0^{e_0} ... x_{n-1}^{e_{n-1}} sits at
linear index sum_i e_i (d+1)^i, so variable 0 is the least-significant digit.
Reshaping that array C-order to (d+1,)*n therefore puts variable n-1-a on
axis a.
"""

from __future__ import annotations

import io
import itertools
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import flint
import numpy as np

from .ffield import PrimeField

DEFAULT_EXPANSION_BUDGET = 2**24


class ExpansionBudgetError(ValueError):
    """A dense expansion would exceed the configured entry budget."""

    def __init__(self, required: int, budget: int):
        super().__init__(f"dense expansion needs {required} entries, budget is {budget}")
        self.required = required
        self.budget = budget


class PolyFormatError(ValueError):
    pass


def grid_size(n: int, d: int) -> int:
    return (d + 1) ** n


def check_budget(n: int, d: int, budget: int | None) -> None:
    size = grid_size(n, d)
    if budget is not None and size > budget:
        raise ExpansionBudgetError(size, budget)


def linear_index(exps: Sequence[int], d: int) -> int:
    idx = 0
    for e in reversed(exps):
        idx = idx * (d + 1) + e
    return idx


def exponent_vector(idx: int, n: int, d: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        idx, r = divmod(idx, d + 1)
        out.append(r)
    return tuple(out)


class _CompiledPoly:
    """FLINT multivariate polynomial used for fast point evaluation."""

    def __init__(self, n: int, p: int, terms: Iterable[tuple[tuple[int, ...], int]]):
        self.n, self.p = n, p
        terms = dict(terms)
        if n == 0:
            self.const = terms.get((), 0) % p
            self.poly = None
        else:
            ctx = flint.nmod_mpoly_ctx.get(("x", n), modulus=p)
            self.poly = ctx.from_dict(terms) if terms else ctx.from_dict({(0,) * n: 0})

    def __call__(self, point: Sequence[int]) -> int:
        if self.poly is None:
            return self.const
        return int(self.poly(*(int(x) % self.p for x in point)))


def _object_array(values: Iterable[int]) -> np.ndarray:
    vals = list(values)
    arr = np.empty(len(vals), dtype=object)
    arr[:] = vals
    return arr


@dataclass(frozen=True, eq=False)
class DensePoly:
    n: int
    d: int
    coeffs: np.ndarray
    field: PrimeField

    def __post_init__(self):
        if self.n < 0 or self.d < 0:
            raise ValueError("n and d must be non-negative")
        coeffs = self.coeffs
        if not (isinstance(coeffs, np.ndarray) and coeffs.dtype == object):
            coeffs = _object_array(int(c) for c in np.ravel(coeffs))
        coeffs = coeffs.ravel() % self.field.p
        if len(coeffs) != grid_size(self.n, self.d):
            raise ValueError(f"expected {grid_size(self.n, self.d)} coefficients, got {len(coeffs)}")
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zeros(cls, n: int, d: int, field: PrimeField) -> DensePoly:
        return cls(n, d, _object_array([0] * grid_size(n, d)), field)

    @classmethod
    def from_terms(cls, n: int, d: int, field: PrimeField, terms: Iterable[tuple[Sequence[int], int]]) -> DensePoly:
        """Build a grid by accumulating (exponents, coefficient) pairs."""
        arr = [0] * grid_size(n, d)
        for exps, c in terms:
            arr[linear_index(exps, d)] += c
        return cls(n, d, _object_array(arr), field)

    @property
    def p(self) -> int:
        return self.field.p

    def grid(self) -> np.ndarray:
        return self.coeffs.reshape((self.d + 1,) * self.n)

    def coeff(self, exps: Sequence[int]) -> int:
        if len(exps) != self.n or any(not 0 <= e <= self.d for e in exps):
            return 0
        return self.coeffs[linear_index(exps, self.d)]

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.coeffs != 0))

    @cached_property
    def _compiled(self) -> _CompiledPoly:
        return _CompiledPoly(self.n, self.p, self.to_sparse().terms)

    def __call__(self, point: Sequence[int]) -> int:
        if len(point) != self.n:
            raise ValueError(f"point has {len(point)} coordinates, polynomial has {self.n} variables")
        return self._compiled(point)

    def __eq__(self, other):
        if not isinstance(other, DensePoly):
            return NotImplemented
        return (
            (self.n, self.d, self.field) == (other.n, other.d, other.field)
            and bool(np.all(self.coeffs == other.coeffs))
        )

    def __repr__(self):
        return f"DensePoly(n={self.n}, d={self.d}, p={self.p}, nnz={self.nonzero_count()})"

    def to_sparse(self) -> SparsePoly:
        terms = [
            (exponent_vector(int(i), self.n, self.d), int(self.coeffs[i]))
            for i in np.flatnonzero(self.coeffs != 0)
        ]
        return SparsePoly(self.n, self.d, tuple(terms), self.field)

    def rename(self, new_var: Sequence[int]) -> DensePoly:
        """Return the polynomial with variable i renamed to variable new_var[i]."""
        n = self.n
        if sorted(new_var) != list(range(n)):
            raise ValueError("renaming must be a permutation of the variables")
        # axis a of grid() holds variable n-1-a; target axis of var v is n-1-new_var[v]
        src_axes = [n - 1 - v for v in range(n)]
        dst_axes = [n - 1 - new_var[v] for v in range(n)]
        g = np.moveaxis(self.grid(), src_axes, dst_axes) if n else self.grid()
        return DensePoly(n, self.d, np.ascontiguousarray(g).ravel(), self.field)


def _powers(x: int, d: int, p: int) -> np.ndarray:
    pw = [1] * (d + 1)
    for j in range(1, d + 1):
        pw[j] = pw[j - 1] * x % p
    return _object_array(pw)


def dense_eval(f: DensePoly, point: Sequence[int]) -> int:
    if len(point) != f.n:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {f.n} variables")
    p = f.p
    arr = f.grid()
    # last axis is always the lowest remaining variable
    for v in range(f.n):
        arr = np.dot(arr, _powers(int(point[v]) % p, f.d, p)) % p
    return int(arr) if f.n else int(f.coeffs[0])


@dataclass(frozen=True)
class SparsePoly:
    n: int
    d: int
    terms: tuple[tuple[tuple[int, ...], int], ...]
    field: PrimeField

    def __post_init__(self):
        seen = set()
        clean = []
        for exps, c in self.terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.n:
                raise PolyFormatError(f"exponent vector {exps} does not have length {self.n}")
            if any(not 0 <= e <= self.d for e in exps):
                raise PolyFormatError(f"exponent vector {exps} exceeds individual degree {self.d}")
            if exps in seen:
                raise PolyFormatError(f"duplicate exponent vector {exps}")
            seen.add(exps)
            c = int(c) % self.field.p
            if c:
                clean.append((exps, c))
        object.__setattr__(self, "terms", tuple(sorted(clean)))

    @cached_property
    def _compiled(self) -> _CompiledPoly:
        return _CompiledPoly(self.n, self.field.p, self.terms)

    def __call__(self, point: Sequence[int]) -> int:
        if len(point) != self.n:
            raise ValueError(f"point has {len(point)} coordinates, polynomial has {self.n} variables")
        return self._compiled(point)

    def total_degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=0)

    def to_dense(self, budget: int | None = DEFAULT_EXPANSION_BUDGET) -> DensePoly:
        return sparse_to_dense(self, budget)


def sparse_eval(f: SparsePoly, point: Sequence[int]) -> int:
    if len(point) != f.n:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {f.n} variables")
    p = f.field.p
    total = 0
    for exps, c in f.terms:
        term = c
        for x, e in zip(point, exps):
            if e:
                term = term * pow(int(x), e, p) % p
        total += term
    return total % p


def sparse_to_dense(f: SparsePoly, budget: int | None = DEFAULT_EXPANSION_BUDGET) -> DensePoly:
    check_budget(f.n, f.d, budget)
    return DensePoly.from_terms(f.n, f.d, f.field, f.terms)


# --- black-box oracles ---------------------------------------------------


@dataclass(frozen=True)
class PolyOracle:
    """Evaluation access to an n-variate polynomial of individual degree d.

    ``expand``, when present, produces the dense grid without interpolation;
    otherwise :meth:`to_dense` falls back to querying a (d+1)^n grid.
    """

    n: int
    d: int
    field: PrimeField
    eval: Callable[[Sequence[int]], int] = dc_field(repr=False)
    provenance: str = "black-box"
    expand: Callable[[int | None], DensePoly] | None = dc_field(default=None, repr=False)

    def __call__(self, point: Sequence[int]) -> int:
        if len(point) != self.n:
            raise ValueError(f"point has {len(point)} coordinates, oracle has {self.n} variables")
        return self.eval(point)

    def to_dense(self, budget: int | None = DEFAULT_EXPANSION_BUDGET) -> DensePoly:
        check_budget(self.n, self.d, budget)
        if self.expand is not None:
            return self.expand(budget)
        return interpolate_dense(self, budget)


def dense_oracle(f: DensePoly) -> PolyOracle:
    return PolyOracle(f.n, f.d, f.field, f.__call__, "dense-backed", lambda budget: f)


def sparse_oracle(f: SparsePoly) -> PolyOracle:
    return PolyOracle(f.n, f.d, f.field, f.__call__, "sparse-backed", f.to_dense)


def power_substituted_oracle(f: PolyOracle, j: int) -> PolyOracle:
    """Oracle for x -> f(x_1^{(d+1)^j}, ..., x_n^{(d+1)^j})."""
    if j < 0:
        raise ValueError("j must be non-negative")
    p = f.field.p
    step = (f.d + 1) ** j

    def eval_(point):
        return f([pow(int(x), step, p) for x in point])

    expand = None
    if f.expand is not None:

        def expand(budget):
            d_new = f.d * step
            check_budget(f.n, d_new, budget)
            base = f.expand(budget)
            return DensePoly.from_terms(
                f.n, d_new, f.field, ((tuple(e * step for e in exps), c) for exps, c in base.to_sparse().terms)
            )

    return PolyOracle(f.n, f.d * step, f.field, eval_, "power-substituted", expand)


def _lagrange_inverse(d: int, p: int) -> np.ndarray:
    """Inverse of the Vandermonde matrix V[t, e] = t^e on the nodes 0..d.

    Row e of the result holds the x^e coefficients of the Lagrange basis
    polynomials, so coefficients = inv @ values.
    """
    inv = np.empty((d + 1, d + 1), dtype=object)
    for t in range(d + 1):
        poly = [1]
        denom = 1
        for s in range(d + 1):
            if s == t:
                continue
            # poly *= (x - s)
            poly = [((poly[i - 1] if i else 0) - s * (poly[i] if i < len(poly) else 0)) % p for i in range(len(poly) + 1)]
            denom = denom * (t - s) % p
        scale = pow(denom, p - 2, p)
        for e in range(d + 1):
            inv[e, t] = poly[e] * scale % p
    return inv


def interpolate_dense(f: PolyOracle, budget: int | None = DEFAULT_EXPANSION_BUDGET) -> DensePoly:
    """Recover the coefficient grid of ``f`` from its values on {0..d}^n."""
    n, d, p = f.n, f.d, f.field.p
    check_budget(n, d, budget)
    f.field.check_degree(d)
    values = _object_array(f(list(reversed(pt))) for pt in itertools.product(range(d + 1), repeat=n))
    # product() varies the last coordinate fastest, so reversing puts var 0 in the LSB
    arr = values.reshape((d + 1,) * n)
    vinv = _lagrange_inverse(d, p)
    for axis in range(n):
        arr = np.moveaxis(np.tensordot(vinv, arr, axes=([1], [axis])), 0, axis) % p
    return DensePoly(n, d, np.ascontiguousarray(arr).ravel(), f.field)


# --- file formats ----------------------------------------------------------


def _parse_header(line: str, kind: str) -> dict[str, int]:
    parts = line.split()
    if not parts or parts[0] != kind:
        raise PolyFormatError(f"expected header starting with {kind!r}, got {line.strip()!r}")
    out = {}
    for tok in parts[1:]:
        key, sep, val = tok.partition("=")
        if not sep:
            raise PolyFormatError(f"malformed header field {tok!r}")
        try:
            out[key] = int(val)
        except ValueError:
            raise PolyFormatError(f"non-integer header value {tok!r}") from None
    return out


def _content_lines(text: str) -> list[str]:
    return [ln for ln in (raw.split("#", 1)[0].strip() for raw in text.splitlines()) if ln]


def format_sparse(f: SparsePoly) -> str:
    out = io.StringIO()
    out.write(f"poly n={f.n} d={f.d} p={f.field.p}\n")
    for exps, c in f.terms:
        out.write(" ".join(map(str, (c, *exps))) + "\n")
    return out.getvalue()


def parse_sparse(text: str) -> SparsePoly:
    lines = _content_lines(text)
    if not lines:
        raise PolyFormatError("empty polynomial file")
    hdr = _parse_header(lines[0], "poly")
    try:
        n, d, p = hdr["n"], hdr["d"], hdr["p"]
    except KeyError as e:
        raise PolyFormatError(f"header missing {e.args[0]}") from None
    field = PrimeField(p)
    terms = []
    for ln in lines[1:]:
        try:
            nums = [int(t) for t in ln.split()]
        except ValueError:
            raise PolyFormatError(f"non-integer token in term line {ln!r}") from None
        if len(nums) != n + 1:
            raise PolyFormatError(f"term line {ln!r} should have {n + 1} fields")
        terms.append((tuple(nums[1:]), nums[0]))
    return SparsePoly(n, d, tuple(terms), field)


def dump_dense(f: DensePoly) -> bytes:
    header = f"dense n={f.n} d={f.d} p={f.p}\n".encode()
    body = b"".join(int(c).to_bytes(8, "little") for c in f.coeffs)
    return header + body


def load_dense(data: bytes) -> DensePoly:
    nl = data.find(b"\n")
    if nl < 0:
        raise PolyFormatError("dense file has no header line")
    hdr = _parse_header(data[:nl].decode("ascii", "replace"), "dense")
    n, d, p = hdr.get("n"), hdr.get("d"), hdr.get("p")
    if None in (n, d, p):
        raise PolyFormatError("dense header needs n, d and p")
    body = data[nl + 1 :]
    size = grid_size(n, d)
    if len(body) != 8 * size:
        raise PolyFormatError(f"dense body has {len(body)} bytes, expected {8 * size}")
    vals = [int.from_bytes(body[8 * i : 8 * i + 8], "little") for i in range(size)]
    if any(v >= p for v in vals):
        raise PolyFormatError("dense body holds a non-canonical residue")
    return DensePoly(n, d, _object_array(vals), PrimeField(p))


def read_poly(path: str, budget: int | None = DEFAULT_EXPANSION_BUDGET) -> DensePoly:
    """Load a polynomial file in either the sparse text or dense binary format."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data.startswith(b"dense"):
        return load_dense(data)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise PolyFormatError(f"{path}: neither a sparse text nor a dense binary polynomial") from None
    return parse_sparse(text).to_dense(budget)
