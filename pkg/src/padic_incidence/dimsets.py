"""Dimensional spacing conditions and certified instance generators.

A weighted family at scale j (points or lines of R_j^2) is a
(p^-j, alpha, K)-set when every p^-l cell, l <= j, carries mass at most
K p^(alpha (j - l)).  Cells are cubes for points and tubes for lines.  All
threshold comparisons are exact: with alpha = a/q they are carried out as
mass^q <= K^q p^(a (j - l)) in integers/fractions.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from .errors import RingMismatch
from .geometry import (
    Line,
    Point,
    enumerate_lines,
    n_lines,
    one_separated,
    project_line,
)
from .incidence import WeightedLineSet, WeightedPointSet, WeightedSet
from .ring import RingParams, check_enumerable

Number = Union[int, float, str, Fraction]


def as_fraction(x: Number) -> Fraction:
    """Exact rational value of an exponent; floats go through their decimal repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class Witness:
    scale: int
    cell: int
    mass: int
    allowed: float

    def to_dict(self) -> dict:
        return {"scale": self.scale, "cell": self.cell, "mass": self.mass, "allowed": self.allowed}


@dataclass(frozen=True)
class SpacingReport:
    holds: bool
    witness: Optional[Witness]
    minimal_K: float
    alpha: Fraction
    K: Fraction

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "witness": self.witness.to_dict() if self.witness else None,
            "minimal_K": self.minimal_K,
            "alpha": str(self.alpha),
            "K": str(self.K),
        }


def cell_key(S: WeightedSet, key: int, scale: int) -> int:
    """Key of the scale-``scale`` cube/tube containing the element ``key``."""
    if scale == 0:
        return 0
    params = S.params
    if isinstance(S, WeightedPointSet):
        m, s = params.modulus, params.p**scale
        y, x = divmod(key, m)
        return x % s + s * (y % s)
    return project_line(Line.from_key(params, key), scale).key


def cell_masses(S: WeightedSet, scale: int) -> dict[int, int]:
    acc: dict[int, int] = {}
    for key, w in S.items():
        c = cell_key(S, key, scale)
        acc[c] = acc.get(c, 0) + w
    return acc


def _kq(S: WeightedSet, alpha: Fraction):
    """Yield (scale, cell, mass, ratio^q) with ratio = mass / p^(alpha (j - scale))."""
    a, q = alpha.numerator, alpha.denominator
    j, p = S.params.k, S.params.p
    for scale in range(j + 1):
        denom = p ** (a * (j - scale))
        for cell, mass in sorted(cell_masses(S, scale).items()):
            yield scale, cell, mass, Fraction(mass**q, denom)


def _root_up(value: Fraction, q: int) -> float:
    """Smallest double x with x^q >= value (exact test)."""
    x = float(value) ** (1.0 / q) if value else 0.0
    while Fraction(x) ** q < value:
        x = math.nextafter(x, math.inf)
    while x > 0:
        down = math.nextafter(x, 0.0)
        if Fraction(down) ** q >= value:
            x = down
        else:
            break
    return x


def _allowed(alpha: Fraction, K: Fraction, p: int, depth: int) -> float:
    return float(K) * p ** (float(alpha) * depth)


def _sweep(S: WeightedSet, alpha: Fraction):
    best = None
    for scale, cell, mass, rq in _kq(S, alpha):
        if best is None or rq > best[3]:
            best = (scale, cell, mass, rq)
    return best


def minimal_K(S: WeightedSet, alpha: Number) -> float:
    """max over cells of mass * p^(-alpha (j - l)), rounded up to a double."""
    alpha = as_fraction(alpha)
    best = _sweep(S, alpha)
    return 0.0 if best is None else _root_up(best[3], alpha.denominator)


def check_weighted_spacing(S: WeightedSet, alpha: Number, K: Number) -> SpacingReport:
    alpha = as_fraction(alpha)
    if not 0 <= alpha <= 2:
        raise ValueError(f"alpha={alpha} outside [0, 2]")
    # K is often a rounded-up double from minimal_K: keep its exact binary value
    K = Fraction(K) if isinstance(K, float) else as_fraction(K)
    q = alpha.denominator
    best = _sweep(S, alpha)
    if best is None:
        return SpacingReport(True, None, 0.0, alpha, K)
    scale, cell, mass, rq = best
    holds = rq <= K**q
    witness = Witness(scale, cell, mass, _allowed(alpha, K, S.params.p, S.params.k - scale))
    return SpacingReport(holds, witness, _root_up(rq, q), alpha, K)


def check_alpha_set(P: WeightedPointSet, alpha: Number) -> SpacingReport:
    """|P cap Q_j| <= p^(alpha (k - j)) for every cube at every scale."""
    if not P.is_unit():
        raise ValueError("alpha-set check takes an unweighted point set")
    return check_weighted_spacing(P, alpha, 1)


def check_beta_set(L: WeightedLineSet, beta: Number) -> SpacingReport:
    if not L.is_unit():
        raise ValueError("beta-set check takes an unweighted line set")
    return check_weighted_spacing(L, beta, 1)


def _int_root_floor(n: int, q: int) -> int:
    """Largest r with r^q <= n."""
    r = int(round(n ** (1.0 / q))) if n else 0
    while r**q > n:
        r -= 1
    while (r + 1) ** q <= n:
        r += 1
    return r


def mass_caps(params: RingParams, alpha: Number) -> list[int]:
    """Largest integer mass allowed per cell at each scale for an alpha-set."""
    alpha = as_fraction(alpha)
    a, q = alpha.numerator, alpha.denominator
    return [_int_root_floor(params.p ** (a * (params.k - s)), q) for s in range(params.k + 1)]


# -- generators ---------------------------------------------------------------


def full_grid(params: RingParams) -> tuple[WeightedPointSet, WeightedLineSet]:
    check_enumerable(params)
    return (
        WeightedPointSet(params, {k: 1 for k in range(params.n_points)}),
        WeightedLineSet(params, {k: 1 for k in range(n_lines(params))}),
    )


def full_two_set(params: RingParams) -> tuple[WeightedPointSet, WeightedLineSet]:
    """All points with all non-steep lines.

    The complete line set overshoots the 2-set bound at the coarsest scale
    by a factor 1 + 1/p; dropping the p^(2k-1) steep lines leaves exactly
    p^(2k) lines and every tube at its cap.
    """
    check_enumerable(params)
    m = params.modulus
    return (
        WeightedPointSet(params, {k: 1 for k in range(params.n_points)}),
        WeightedLineSet(params, {k: 1 for k in range(m * m)}),
    )


def cartesian_product(params: RingParams, A: Iterable[int], B: Iterable[int]) -> WeightedPointSet:
    m = params.modulus
    return WeightedPointSet(params, {a % m + m * (b % m): 1 for a in set(A) for b in set(B)})


def line_union(params: RingParams, lines: Iterable[Line]) -> WeightedPointSet:
    keys = {k for l in lines for k in l.point_keys()}
    return WeightedPointSet(params, {k: 1 for k in keys})


def random_mass_set(
    params: RingParams,
    alpha: Number,
    seed: int,
    kind: str = "points",
    size: Optional[int] = None,
    attempts: int = 8,
) -> tuple[WeightedSet, SpacingReport]:
    """A random unweighted alpha-set (points) or beta-set (lines).

    Elements are visited in random order and kept while every cell stays
    under its cap; the result is re-checked and returned with its
    certificate.  ``size`` stops the scan early.
    """
    check_enumerable(params)
    cls = WeightedPointSet if kind == "points" else WeightedLineSet
    universe = params.n_points if kind == "points" else n_lines(params)
    caps = mass_caps(params, alpha)
    rng = random.Random(seed)
    probe = cls(params, {})
    for _ in range(attempts):
        order = list(range(universe))
        rng.shuffle(order)
        masses = [dict() for _ in range(params.k + 1)]
        chosen: dict[int, int] = {}
        for key in order:
            if size is not None and len(chosen) >= size:
                break
            cells = [cell_key(probe, key, s) for s in range(params.k + 1)]
            if all(masses[s].get(c, 0) + 1 <= caps[s] for s, c in enumerate(cells)):
                for s, c in enumerate(cells):
                    masses[s][c] = masses[s].get(c, 0) + 1
                chosen[key] = 1
        S = cls(params, chosen)
        report = check_weighted_spacing(S, alpha, 1)
        if report.holds:
            return S, report
    raise RuntimeError("could not certify a random spacing set")  # pragma: no cover


def random_weighted_set(
    params: RingParams, seed: int, kind: str = "points", n: int = 20, max_weight: int = 4
) -> WeightedSet:
    rng = random.Random(seed)
    cls = WeightedPointSet if kind == "points" else WeightedLineSet
    universe = params.n_points if kind == "points" else n_lines(params)
    n = min(n, universe)
    keys = rng.sample(range(universe), n)
    return cls(params, {k: rng.randint(1, max_weight) for k in keys})


def certified(S: WeightedSet, alpha: Number) -> tuple[float, SpacingReport]:
    """The smallest K making S a (p^-k, alpha, K)-set, with its certificate."""
    K = minimal_K(S, alpha)
    report = check_weighted_spacing(S, alpha, K)
    assert report.holds
    return K, report


def separated_lines(params: RingParams, seed: int, n: int) -> WeightedLineSet:
    """Random lines, pairwise 1-separated in direction or in distance."""
    check_enumerable(params)
    rng = random.Random(seed)
    pool = enumerate_lines(params)
    rng.shuffle(pool)
    chosen: list[Line] = []
    for l in pool:
        if len(chosen) >= n:
            break
        if all(one_separated(l, m) for m in chosen):
            chosen.append(l)
    return WeightedLineSet(params, {l.key: 1 for l in chosen})


def embed_prime_field(
    P: WeightedPointSet, L: WeightedLineSet, k: int
) -> tuple[WeightedPointSet, WeightedLineSet]:
    """Embed an F_p configuration into R_k^2 through F_p = p^(k-1) R_k.

    (x, y) goes to (p^(k-1) x, p^(k-1) y); y = o + b x goes to
    y = p^(k-1) o + b x and x = o goes to x = p^(k-1) o.  Incidences and
    non-incidences are both preserved; weights are carried over.
    """
    if P.params != L.params:
        raise RingMismatch(f"{P.params} vs {L.params}")
    if P.params.k != 1:
        raise ValueError("configuration must live over the prime field (k = 1)")
    target = RingParams(P.params.p, k)
    s = target.p ** (k - 1)
    points = {Point(target, s * q.x, s * q.y).key: P.weight(q.key) for q in P.points()}
    lines = {}
    for l in L.lines():
        if l.direction.steep:
            nl = Line.steep(target, 0, s * l.offset)
        else:
            nl = Line.slope(target, l.direction.val, s * l.offset)
        lines[nl.key] = L.weight(l.key)
    return WeightedPointSet(target, points), WeightedLineSet(target, lines)
