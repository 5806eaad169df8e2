"""Fourier analysis on R_k^2 and the high-low split of weighted incidences.

Convention: f_hat(xi) = p^-k * sum_x f(x) exp(-2 pi i <xi, x> / p^k).
Grid functions are indexed by point key x1 + p^k x2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import BadScale, NotASubmodule, RingMismatch, WeightedLines
from .geometry import Line
from .incidence import (
    WeightedLineSet,
    WeightedPointSet,
    incidences,
    thicken_lines,
    thicken_points,
)
from .ring import RingParams, check_enumerable

CANCELLATION_RTOL = 1e-6
DIRECT_RTOL = 1e-8


@dataclass(frozen=True)
class GridFunction:
    params: RingParams
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.params.n_points,):
            raise ValueError(f"expected {self.params.n_points} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, params: RingParams) -> "GridFunction":
        return cls(params, np.zeros(params.n_points, dtype=np.complex128))

    @classmethod
    def indicator(cls, params: RingParams, keys: Iterable[int]) -> "GridFunction":
        v = np.zeros(params.n_points, dtype=np.complex128)
        v[list(keys)] = 1.0
        return cls(params, v)

    def grid(self) -> np.ndarray:
        """Values as a (y, x) array."""
        m = self.params.modulus
        return self.values.reshape(m, m)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _same(self, other)
        return GridFunction(self.params, self.values + other.values)

    def __mul__(self, other) -> "GridFunction":
        if isinstance(other, GridFunction):
            _same(self, other)
            return GridFunction(self.params, self.values * other.values)
        return GridFunction(self.params, self.values * other)

    __rmul__ = __mul__


def _same(f: GridFunction, g: GridFunction) -> None:
    if f.params != g.params:
        raise RingMismatch(f"{f.params} vs {g.params}")


def twiddle_matrix(params: RingParams) -> np.ndarray:
    """W[a, b] = exp(-2 pi i a b / p^k) read off a table of p^k roots of unity."""
    m = params.modulus
    roots = np.exp(-2j * np.pi * np.arange(m) / m)
    a = np.arange(m)
    return roots[np.outer(a, a) % m]


def fourier(f: GridFunction) -> GridFunction:
    """Forward transform; the 2-D character sum factors as W V W."""
    check_enumerable(f.params, spectral=True)
    W = twiddle_matrix(f.params)
    out = (W @ f.grid() @ W) / f.params.modulus
    return GridFunction(f.params, out.reshape(-1))


def inverse_fourier(F: GridFunction) -> GridFunction:
    check_enumerable(F.params, spectral=True)
    W = twiddle_matrix(F.params).conj()
    out = (W @ F.grid() @ W) / F.params.modulus
    return GridFunction(F.params, out.reshape(-1))


def inner(f: GridFunction, g: GridFunction) -> complex:
    """sum_x f(x) conj(g(x))."""
    _same(f, g)
    return complex(np.vdot(g.values, f.values))


def plancherel_check(f: GridFunction, g: GridFunction) -> float:
    return abs(inner(f, g) - inner(fourier(f), fourier(g)))


def parseval_check(f: GridFunction) -> float:
    return plancherel_check(f, f)


def _diff_index(params: RingParams) -> np.ndarray:
    """D[x, y] = key(x - y)."""
    m = params.modulus
    keys = np.arange(params.n_points)
    xs, ys = keys % m, keys // m
    dx = (xs[:, None] - xs[None, :]) % m
    dy = (ys[:, None] - ys[None, :]) % m
    return dx + m * dy


def convolve(phi: GridFunction, psi: GridFunction) -> GridFunction:
    """(phi * psi)(x) = sum_y phi(x - y) psi(y), evaluated directly."""
    _same(phi, psi)
    check_enumerable(phi.params, spectral=True)
    D = _diff_index(phi.params)
    return GridFunction(phi.params, phi.values[D] @ psi.values)


def convolution_identity_check(phi: GridFunction, psi: GridFunction) -> float:
    lhs = fourier(convolve(phi, psi)).values
    rhs = phi.params.modulus * fourier(phi).values * fourier(psi).values
    return float(np.max(np.abs(lhs - rhs)))


def span(params: RingParams, generators: Sequence[tuple[int, int]]) -> frozenset[int]:
    """Keys of the R_k-submodule of R_k^2 generated by the given vectors."""
    m = params.modulus
    module = {0}
    for gx, gy in generators:
        multiples = {(t * gx) % m + m * ((t * gy) % m) for t in range(m)}
        module = {
            ((a % m + b % m) % m) + m * ((a // m + b // m) % m)
            for a in module
            for b in multiples
        }
    return frozenset(module)


def is_submodule(params: RingParams, keys: Iterable[int]) -> bool:
    m = params.modulus
    s = set(keys)
    if 0 not in s:
        return False
    for a in s:
        ax, ay = a % m, a // m
        for b in s:
            if ((ax + b % m) % m) + m * ((ay + b // m) % m) not in s:
                return False
    return True  # closed under addition in a finite group, so also under Z-scaling


def annihilator(params: RingParams, module: Iterable[int]) -> frozenset[int]:
    """M^perp = {y : <x, y> = 0 mod p^k for all x in M}, by enumeration."""
    keys = sorted(set(module))
    if not is_submodule(params, keys):
        raise NotASubmodule("point set is not closed under addition")
    check_enumerable(params, spectral=True)
    m = params.modulus
    mk = np.array(keys, dtype=np.int64)
    mx, my = mk % m, mk // m
    ys = np.arange(params.n_points, dtype=np.int64)
    yx, yy = ys % m, ys // m
    pair = (mx[:, None] * yx[None, :] + my[:, None] * yy[None, :]) % m
    return frozenset(int(y) for y in ys[np.all(pair == 0, axis=0)])


def character_annihilator(params: RingParams, module: Iterable[int], tol: float = 1e-9) -> frozenset[int]:
    """{y : chi_x(y) = 1 for all x in M}, tested numerically."""
    m = params.modulus
    mk = np.array(sorted(set(module)), dtype=np.int64)
    ys = np.arange(params.n_points, dtype=np.int64)
    phase = (mk[:, None] % m) * (ys[None, :] % m) + (mk[:, None] // m) * (ys[None, :] // m)
    chi = np.exp(-2j * np.pi * phase / m)
    return frozenset(int(y) for y in ys[np.all(np.abs(chi - 1) < tol, axis=0)])


def cube_indicator(params: RingParams, j: int) -> GridFunction:
    """Indicator of the p^-j cube containing the origin."""
    m, s = params.modulus, params.p**j
    keys = [x + m * y for y in range(0, m, s) for x in range(0, m, s)]
    return GridFunction.indicator(params, keys)


def low_pass_kernel(params: RingParams, j: int) -> GridFunction:
    """h = p^(k-2j) 1_{Q_(k-j)}; its transform is the cutoff eta = 1_{Q_j}."""
    return cube_indicator(params, params.k - j) * float(params.p ** (params.k - 2 * j))


def point_function(P: WeightedPointSet) -> GridFunction:
    v = np.zeros(P.params.n_points, dtype=np.complex128)
    for key, w in P.items():
        v[key] = w
    return GridFunction(P.params, v)


def line_function(L: WeightedLineSet) -> GridFunction:
    v = np.zeros(L.params.n_points, dtype=np.complex128)
    for key, w in L.items():
        v[Line.from_key(L.params, key).point_keys()] += w
    return GridFunction(L.params, v)


@dataclass(frozen=True)
class HighLowSplit:
    high: float
    low_spectral: float
    low_exact: Fraction
    incidences: int
    thickened_incidences: int
    imag_residual: float

    @property
    def low_residual(self) -> float:
        return abs(self.low_spectral - float(self.low_exact))

    @property
    def total_residual(self) -> float:
        return abs(self.high + self.low_spectral - self.incidences)

    def low_matches(self, rtol: float = CANCELLATION_RTOL) -> bool:
        return self.low_residual <= rtol * max(1.0, abs(float(self.low_exact)))

    def total_matches(self, rtol: float = CANCELLATION_RTOL) -> bool:
        return self.total_residual <= rtol * max(1.0, float(self.incidences))


def _check_split_args(P: WeightedPointSet, L: WeightedLineSet, j: int) -> None:
    if P.params != L.params:
        raise RingMismatch(f"{P.params} vs {L.params}")
    if not 1 <= j <= P.params.k - 1:
        raise BadScale(f"split scale j={j} needs 1 <= j <= k-1")
    if not L.is_unit():
        raise WeightedLines("the high-low split takes distinct unweighted lines")


def high_low_split(P: WeightedPointSet, L: WeightedLineSet, j: int) -> HighLowSplit:
    """Split I_w(P, L) into high and low frequency parts at cutoff p^-j.

    The low part is also computed combinatorially as
    p^-j * I_w(P_{k-j}, L_{k-j}) on the thickened sets.
    """
    _check_split_args(P, L, j)
    params = P.params
    fh = fourier(point_function(P)).values
    gh = fourier(line_function(L)).values
    eta = cube_indicator(params, j).values.real
    prod = fh * gh.conj()
    high = prod @ (1.0 - eta)
    low = prod @ eta
    exact = incidences(P, L).count
    thick = incidences(thicken_points(P, j), thicken_lines(L, j)).count
    return HighLowSplit(
        high=float(high.real),
        low_spectral=float(low.real),
        low_exact=Fraction(thick, params.p**j),
        incidences=exact,
        thickened_incidences=thick,
        imag_residual=float(abs(high.imag) + abs(low.imag)),
    )


@dataclass(frozen=True)
class Prop36Terms:
    lhs: int
    term1: float
    term1_squared: int
    term2: Fraction
    holds: bool

    @property
    def rhs(self) -> float:
        return self.term1 + float(self.term2)


def prop36_terms(P: WeightedPointSet, L: WeightedLineSet, j: int) -> Prop36Terms:
    """Both sides of the high-low incidence inequality.

    lhs = I_w(P, L);  rhs = p^((k+j-1)/2) |L|^(1/2) (sum w^2)^(1/2) + p^-j I_w(P_{k-j}, L_{k-j}).
    The comparison is exact: term1 is only ever compared through its square.
    """
    _check_split_args(P, L, j)
    params = P.params
    lhs = incidences(P, L).count
    term2 = Fraction(incidences(thicken_points(P, j), thicken_lines(L, j)).count, params.p**j)
    t1sq = params.p ** (params.k + j - 1) * len(L) * P.sum_sq_weights
    gap = lhs - term2
    holds = gap <= 0 or gap * gap <= t1sq
    return Prop36Terms(lhs, math.sqrt(t1sq), t1sq, term2, holds)
