"""Weighted incidence counting, degrees, neighbour structures and thickening."""

from __future__ import annotations

from typing import Iterable, Mapping, NamedTuple, Optional, Union

import numpy as np

from .errors import BadScale, RingMismatch
from .geometry import (
    Line,
    Point,
    angle,
    enumerate_directions,
    intersects,
    project_line,
    project_point,
)
from .ring import RingParams

_INT64_SAFE = 1 << 62


class _WeightedSet:
    """Immutable map from canonical key to a positive integer weight."""

    __slots__ = ("params", "_entries")

    def __init__(self, params: RingParams, entries: Union[Mapping[int, int], Iterable] = ()):
        self.params = params
        acc: dict[int, int] = {}
        items = entries.items() if isinstance(entries, Mapping) else ((self._key_of(e), 1) for e in entries)
        for key, w in items:
            if not isinstance(w, (int, np.integer)) or w < 1:
                raise ValueError(f"weights must be positive integers, got {w!r} for key {key}")
            key = int(key)
            if not 0 <= key < self._key_bound():
                raise ValueError(f"key {key} out of range for {params}")
            acc[key] = acc.get(key, 0) + int(w)
        self._entries = dict(sorted(acc.items()))

    def _key_of(self, obj) -> int:
        if isinstance(obj, int):
            return obj
        if obj.params != self.params:
            raise RingMismatch(f"{obj.params} vs {self.params}")
        return obj.key

    def _key_bound(self) -> int:
        raise NotImplementedError

    @property
    def entries(self) -> dict[int, int]:
        return dict(self._entries)

    def items(self):
        return self._entries.items()

    def keys(self):
        return self._entries.keys()

    def weight(self, key: int) -> int:
        return self._entries.get(key, 0)

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key):
        if not isinstance(key, int):
            key = key.key
        return key in self._entries

    def __eq__(self, other):
        return type(self) is type(other) and self.params == other.params and self._entries == other._entries

    def __hash__(self):
        return hash((type(self).__name__, self.params, tuple(self._entries.items())))

    @property
    def total_weight(self) -> int:
        return sum(self._entries.values())

    @property
    def max_weight(self) -> int:
        return max(self._entries.values(), default=0)

    @property
    def sum_sq_weights(self) -> int:
        return sum(w * w for w in self._entries.values())

    def is_unit(self) -> bool:
        return all(w == 1 for w in self._entries.values())

    def __repr__(self):
        return f"{type(self).__name__}({self.params}, {len(self)} entries, |.|_w={self.total_weight})"


class WeightedPointSet(_WeightedSet):
    __slots__ = ()

    def _key_bound(self):
        return self.params.n_points

    def points(self) -> list[Point]:
        return [Point.from_key(self.params, k) for k in self._entries]


class WeightedLineSet(_WeightedSet):
    __slots__ = ()

    def _key_bound(self):
        q = self.params.modulus
        return q * (q + q // self.params.p)

    def lines(self) -> list[Line]:
        return [Line.from_key(self.params, k) for k in self._entries]


WeightedSet = Union[WeightedPointSet, WeightedLineSet]


def total_weight(S: WeightedSet) -> int:
    return S.total_weight


class IncidenceCount(NamedTuple):
    count: int
    pairs: Optional[list[tuple[int, int]]] = None


def _line_key_matrix(L: WeightedLineSet) -> np.ndarray:
    """Point keys of every line of L, one row per line (row order = key order)."""
    params = L.params
    m, p = params.modulus, params.p
    keys = np.fromiter(L.keys(), dtype=np.int64, count=len(L))
    index, offset = np.divmod(keys, m)
    steep = index >= m
    v = np.where(steep, index - m, index)
    t = np.arange(m, dtype=np.int64)
    moving = (offset[:, None] + np.where(steep, p * v, v)[:, None] * t[None, :]) % m
    xs = np.where(steep[:, None], moving, t[None, :])
    ys = np.where(steep[:, None], t[None, :], moving)
    return xs + m * ys


def _check_same(P: WeightedPointSet, L: WeightedLineSet) -> None:
    if P.params != L.params:
        raise RingMismatch(f"{P.params} vs {L.params}")


def incidences(P: WeightedPointSet, L: WeightedLineSet, with_pairs: bool = False) -> IncidenceCount:
    """I_w(P, L) = sum of w(q) * omega(l) over incident pairs.

    Walks the points of each line against a dense weight table, so the cost
    is O(|L| p^k).
    """
    _check_same(P, L)
    if not len(P) or not len(L):
        return IncidenceCount(0, [] if with_pairs else None)
    params = P.params
    if params.modulus * P.max_weight >= _INT64_SAFE:
        raise OverflowError("point weights too large for exact line sums")
    dense = np.zeros(params.n_points, dtype=np.int64)
    pk = np.fromiter(P.keys(), dtype=np.int64, count=len(P))
    dense[pk] = np.fromiter(P._entries.values(), dtype=np.int64, count=len(P))
    keys = _line_key_matrix(L)
    per_line = dense[keys].sum(axis=1)
    total = 0
    for lw, s in zip(L._entries.values(), per_line.tolist()):
        total += lw * s
    pairs = None
    if with_pairs:
        hit = dense[keys] > 0
        lkeys = list(L.keys())
        pairs = sorted(
            (int(keys[r, c]), lkeys[r]) for r, c in zip(*np.nonzero(hit))
        )
    return IncidenceCount(total, pairs)


def point_degree(q: Point, L: WeightedLineSet) -> int:
    """Weighted number of lines of L through q."""
    if q.params != L.params:
        raise RingMismatch(f"{q.params} vs {L.params}")
    return sum(L.weight(Line.through(q, d).key) for d in enumerate_directions(q.params))


def line_degree(l: Line, P: WeightedPointSet) -> int:
    """Weighted number of points of P on l."""
    if l.params != P.params:
        raise RingMismatch(f"{l.params} vs {P.params}")
    return sum(P.weight(k) for k in l.point_keys())


def lines_through(q: Point, L: WeightedLineSet) -> list[Line]:
    """L(q): lines of L containing q."""
    if q.params != L.params:
        raise RingMismatch(f"{q.params} vs {L.params}")
    out = []
    for d in enumerate_directions(q.params):
        l = Line.through(q, d)
        if l.key in L:
            out.append(l)
    return out


def neighbor_lines(l: Line, L: WeightedLineSet, j: int) -> list[Line]:
    """L_j(l): lines of L meeting l at angle exactly p^-j."""
    if l.params != L.params:
        raise RingMismatch(f"{l.params} vs {L.params}")
    return [m for m in L.lines() if angle(l, m) == j and intersects(l, m)]


def _check_thicken_scale(params: RingParams, j: int) -> None:
    if not 1 <= j <= params.k - 1:
        raise BadScale(f"thickening factor p^{j} needs 1 <= j <= k-1 = {params.k - 1}")


def thicken_points(P: WeightedPointSet, j: int) -> WeightedPointSet:
    """Thicken by p^j: the weighted cubes of R_{k-j}^2, colliding weights summed."""
    _check_thicken_scale(P.params, j)
    s = P.params.k - j
    target = P.params.at_scale(s)
    acc: dict[int, int] = {}
    for key, w in P.items():
        nk = project_point(Point.from_key(P.params, key), s).key
        acc[nk] = acc.get(nk, 0) + w
    return WeightedPointSet(target, acc)


def thicken_lines(L: WeightedLineSet, j: int) -> WeightedLineSet:
    _check_thicken_scale(L.params, j)
    s = L.params.k - j
    target = L.params.at_scale(s)
    acc: dict[int, int] = {}
    for key, w in L.items():
        nk = project_line(Line.from_key(L.params, key), s).key
        acc[nk] = acc.get(nk, 0) + w
    return WeightedLineSet(target, acc)


def layer_decompose(S: WeightedSet) -> list[WeightedSet]:
    """Threshold layers {a : w(a) >= i}, i = 1..max weight, all unit-weighted."""
    cls = type(S)
    return [
        cls(S.params, {k: 1 for k, w in S.items() if w >= i})
        for i in range(1, S.max_weight + 1)
    ]


def unit_points(params: RingParams, points: Iterable[Point]) -> WeightedPointSet:
    return WeightedPointSet(params, {q.key: 1 for q in points})


def unit_lines(params: RingParams, lines: Iterable[Line]) -> WeightedLineSet:
    return WeightedLineSet(params, {l.key: 1 for l in lines})
