"""Prime-field arithmetic and uniform sampling.

Hot loops elsewhere in the package work on plain ``int`` residues together
with a :class:`PrimeField`; :class:`FieldElement` is the boxed form for
callers who want operator syntax.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass

import flint

#: 2^61 - 1, a Mersenne prime.
DEFAULT_PRIME = 2305843009213693951
PRIME_ENV_VAR = "ROABP_PRIME"


def is_prime(p: int) -> bool:
    # FLINT's fmpz_is_prime is a proving test, not a probable-prime test.
    return p >= 2 and bool(flint.fmpz(p).is_prime())


@dataclass(frozen=True)
class PrimeField:
    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 3 or self.p >= 2**64:
            raise ValueError(f"modulus must be an odd prime below 2^64, got {self.p!r}")
        if not is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(int(value) % self.p, self)

    def __repr__(self):
        return f"PrimeField({self.p})"

    def reduce(self, a: int) -> int:
        return a % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse modulo {self.p}")
        return pow(a, self.p - 2, self.p)

    def div(self, a: int, b: int) -> int:
        return (a * self.inv(b)) % self.p

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            raise ValueError("exponent must be non-negative")
        return pow(a, e, self.p)

    def arith(self, a: int, b: int, op: str) -> int:
        """Apply ``op`` (one of add, sub, mul, div, pow) to residues ``a`` and ``b``.

        For ``pow`` the second operand is the (non-negative) exponent, not a
        residue.
        """
        try:
            fn = _OPS[op]
        except KeyError:
            raise ValueError(f"unknown operation {op!r}") from None
        return fn(self, a, b)

    def check_degree(self, d: int) -> None:
        """Refuse a degree bound that leaves fewer than d+1 distinct points."""
        if self.p < d + 2:
            raise ValueError(f"prime {self.p} too small for individual degree {d} (need p >= d + 2)")

    def sample(self, rng: random.Random, count: int) -> list[int]:
        if count < 0:
            raise ValueError("count must be non-negative")
        return [rng.randrange(self.p) for _ in range(count)]


_OPS = {
    "add": PrimeField.add,
    "sub": PrimeField.sub,
    "mul": PrimeField.mul,
    "div": PrimeField.div,
    "pow": PrimeField.pow,
}


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    def __post_init__(self):
        if not 0 <= self.value < self.field.p:
            raise ValueError(f"{self.value} is not a canonical residue modulo {self.field.p}")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("operands live in different fields")
            return other.value
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def _wrap(self, v: int) -> FieldElement:
        return FieldElement(v, self.field)

    def __add__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.sub(self.value, b))

    def __rsub__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.sub(b, self.value))

    def __mul__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.div(self.value, b))

    def __rtruediv__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.div(b, self.value))

    def __pow__(self, e: int):
        return self._wrap(self.field.pow(self.value, e))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def inverse(self) -> FieldElement:
        return self._wrap(self.field.inv(self.value))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.field.p})"


def sample_uniform(field: PrimeField, rng: random.Random, count: int) -> list[FieldElement]:
    return [FieldElement(v, field) for v in field.sample(rng, count)]


def resolve_prime(cli_value: int | str | None = None) -> int:
    """Pick the modulus: explicit value, then ``$ROABP_PRIME``, then the default."""
    if cli_value is not None:
        return int(cli_value)
    env = os.environ.get(PRIME_ENV_VAR)
    if env:
        return int(env)
    return DEFAULT_PRIME
