"""Exact arithmetic in the finite p-adic ring Z/p^kZ.

Norms are carried as integer exponents: a residue of valuation ``j`` has
p-adic norm ``p**-j``.  The zero residue has valuation ``k``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import BadScale, NotAUnit, RingMismatch, TooLarge

MAX_K = 10
# p^(2k) must stay well inside a signed 64-bit key.
_KEY_LIMIT = 1 << 62

# Enumeration guards; PADIC_GUARD_MAX_K overrides the k limit.
DEFAULT_GUARD_MAX_K = 5
DEFAULT_SPECTRAL_GUARD_MAX_K = 4
_ENUM_LIMIT = 1 << 24
_SPECTRAL_LIMIT = 1 << 20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True, slots=True)
class RingParams:
    """The ring R_k = Z/p^kZ."""

    p: int
    k: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ValueError(f"p={self.p!r} is not a prime")
        if not isinstance(self.k, int) or not 1 <= self.k <= MAX_K:
            raise BadScale(f"k={self.k!r} outside 1..{MAX_K}")
        if self.p ** (2 * self.k) >= _KEY_LIMIT:
            raise TooLarge(f"p^(2k) = {self.p}^{2 * self.k} does not fit a 64-bit key")

    @property
    def modulus(self) -> int:
        return self.p**self.k

    @property
    def n_points(self) -> int:
        return self.p ** (2 * self.k)

    def at_scale(self, j: int) -> "RingParams":
        """The ring R_j for the same prime."""
        if not 1 <= j <= MAX_K:
            raise BadScale(f"scale {j} must be at least 1")
        return RingParams(self.p, j)

    def __str__(self):
        return f"Z/{self.p}^{self.k}Z"


def guard_max_k(spectral: bool = False) -> int:
    env = os.environ.get("PADIC_GUARD_MAX_K")
    if env:
        return int(env)
    return DEFAULT_SPECTRAL_GUARD_MAX_K if spectral else DEFAULT_GUARD_MAX_K


def check_enumerable(params: RingParams, spectral: bool = False) -> None:
    """Raise TooLarge if exhaustive work over R_k^2 is out of budget."""
    limit = _SPECTRAL_LIMIT if spectral else _ENUM_LIMIT
    max_k = guard_max_k(spectral)
    if params.k > max_k or params.n_points > limit:
        raise TooLarge(
            f"{params}: enumeration of {params.n_points} points exceeds the guard "
            f"(k <= {max_k}, p^(2k) <= {limit})"
        )


def val(n: int, p: int, k: int) -> int:
    """Valuation of the integer ``n`` read modulo p^k, capped at k."""
    n %= p**k
    if n == 0:
        return k
    j = 0
    while n % p == 0:
        n //= p
        j += 1
    return j


def solve_linear(a: int, c: int, params: RingParams) -> list[int]:
    """All t in R_k with a*t = c (mod p^k), in increasing order."""
    p, k, q = params.p, params.k, params.modulus
    a %= q
    c %= q
    va = val(a, p, k)
    if va > val(c, p, k):
        return []
    if va == k:  # a = 0 and c = 0
        return list(range(q))
    step = p ** (k - va)
    unit = a // p**va
    t0 = (c // p**va) * pow(unit, -1, step) % step
    return [t0 + i * step for i in range(p**va)]


@dataclass(frozen=True, slots=True)
class Residue:
    value: int
    params: RingParams

    def __post_init__(self):
        if not 0 <= self.value < self.params.modulus:
            object.__setattr__(self, "value", self.value % self.params.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, Residue):
            if other.params != self.params:
                raise RingMismatch(f"{self.params} vs {other.params}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Residue(self.value + o, self.params)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Residue(self.value - o, self.params)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Residue(o - self.value, self.params)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Residue(self.value * o, self.params)

    __rmul__ = __mul__

    def __neg__(self):
        return Residue(-self.value, self.params)

    def __int__(self):
        return self.value

    def is_unit(self) -> bool:
        return self.value % self.params.p != 0

    def __repr__(self):
        return f"Residue({self.value} mod {self.params.p}^{self.params.k})"


def valuation(x: Residue) -> int:
    """Largest j <= k with p^j dividing x; valuation(0) == k."""
    return val(x.value, x.params.p, x.params.k)


def inverse(x: Residue) -> Residue:
    if x.value % x.params.p == 0:
        raise NotAUnit(f"{x.value} is divisible by {x.params.p}")
    return Residue(pow(x.value, -1, x.params.modulus), x.params)


def scalar_norm(x: Residue) -> int:
    """Exponent j with |x|_p = p^-j."""
    return valuation(x)


def units(params: RingParams) -> list[int]:
    return [u for u in range(params.modulus) if u % params.p]
