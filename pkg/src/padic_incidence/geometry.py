"""Points, directions, lines, cubes and tubes in R_k^2.

Canonical forms
---------------
Every direction has exactly one canonical representative:

* ``slope`` ``b``: the vector (1, b), b in [0, p^k)
* ``steep`` ``c``: the vector (p*c, 1), c in [0, p^(k-1))

A slope line with offset ``o`` is {(t, o + b t)}; a steep line with offset
``o`` is {(o + p c s, s)}.  The offset is the coordinate where the line
crosses the axis x = 0 (slope) or y = 0 (steep), so (direction, offset) is a
bijection onto the nondegenerate lines.

Integer keys
------------
point key = x + p^k * y
direction index = b for slope b, p^k + c for steep c
line key = offset + p^k * direction index
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .errors import BadScale, EmptyIntersection, LinesIntersect, NotInCube, RingMismatch
from .ring import RingParams, Residue, check_enumerable, solve_linear, val


def _same_ring(a: RingParams, b: RingParams) -> None:
    if a != b:
        raise RingMismatch(f"{a} vs {b}")


@dataclass(frozen=True, slots=True)
class Point:
    params: RingParams
    x: int
    y: int

    def __post_init__(self):
        q = self.params.modulus
        if not (0 <= self.x < q and 0 <= self.y < q):
            object.__setattr__(self, "x", self.x % q)
            object.__setattr__(self, "y", self.y % q)

    @property
    def key(self) -> int:
        return self.x + self.params.modulus * self.y

    @classmethod
    def from_key(cls, params: RingParams, key: int) -> "Point":
        y, x = divmod(key, params.modulus)
        return cls(params, x, y)

    @property
    def coords(self) -> tuple[Residue, Residue]:
        return Residue(self.x, self.params), Residue(self.y, self.params)

    def __sub__(self, other: "Point") -> tuple[int, int]:
        _same_ring(self.params, other.params)
        q = self.params.modulus
        return (self.x - other.x) % q, (self.y - other.y) % q

    def __repr__(self):
        return f"Point({self.x}, {self.y})"


@dataclass(frozen=True, slots=True)
class Direction:
    params: RingParams
    steep: bool
    val: int

    def __post_init__(self):
        bound = self.params.modulus // self.params.p if self.steep else self.params.modulus
        if not 0 <= self.val < bound:
            raise ValueError(f"direction parameter {self.val} outside [0, {bound})")

    @classmethod
    def slope(cls, params: RingParams, b: int) -> "Direction":
        return cls(params, False, b % params.modulus)

    @classmethod
    def steep_dir(cls, params: RingParams, c: int) -> "Direction":
        return cls(params, True, c % (params.modulus // params.p))

    @property
    def kind(self) -> str:
        return "steep" if self.steep else "slope"

    @property
    def index(self) -> int:
        return self.params.modulus + self.val if self.steep else self.val

    @classmethod
    def from_index(cls, params: RingParams, index: int) -> "Direction":
        q = params.modulus
        if index < q:
            return cls(params, False, index)
        return cls(params, True, index - q)

    @property
    def vector(self) -> tuple[int, int]:
        if self.steep:
            return (self.params.p * self.val) % self.params.modulus, 1
        return 1, self.val

    @classmethod
    def from_vector(cls, params: RingParams, dx: int, dy: int) -> "Direction":
        """Canonical direction of a vector with at least one unit component."""
        p, q = params.p, params.modulus
        dx %= q
        dy %= q
        if dx % p:
            return cls.slope(params, dy * pow(dx, -1, q))
        if dy % p:
            return cls.steep_dir(params, (dx * pow(dy, -1, q)) // p)
        raise ValueError(f"({dx}, {dy}) has no unit component")

    def __repr__(self):
        return f"{'Steep' if self.steep else 'Slope'}({self.val})"


@dataclass(frozen=True, slots=True)
class Line:
    direction: Direction
    offset: int

    def __post_init__(self):
        q = self.direction.params.modulus
        if not 0 <= self.offset < q:
            object.__setattr__(self, "offset", self.offset % q)

    @property
    def params(self) -> RingParams:
        return self.direction.params

    @property
    def key(self) -> int:
        return self.offset + self.params.modulus * self.direction.index

    @classmethod
    def from_key(cls, params: RingParams, key: int) -> "Line":
        index, offset = divmod(key, params.modulus)
        return cls(Direction.from_index(params, index), offset)

    @classmethod
    def slope(cls, params: RingParams, b: int, offset: int) -> "Line":
        return cls(Direction.slope(params, b), offset)

    @classmethod
    def steep(cls, params: RingParams, c: int, offset: int) -> "Line":
        return cls(Direction.steep_dir(params, c), offset)

    @classmethod
    def through(cls, q: Point, direction: Direction) -> "Line":
        """The line through ``q`` with the given direction."""
        _same_ring(q.params, direction.params)
        m = q.params.modulus
        if direction.steep:
            return cls(direction, (q.x - q.params.p * direction.val * q.y) % m)
        return cls(direction, (q.y - direction.val * q.x) % m)

    def contains(self, q: Point) -> bool:
        m = self.params.modulus
        d = self.direction
        if d.steep:
            return (self.offset + self.params.p * d.val * q.y - q.x) % m == 0
        return (self.offset + d.val * q.x - q.y) % m == 0

    def __contains__(self, q: Point) -> bool:
        return self.contains(q)

    def point_at(self, t: int) -> Point:
        m = self.params.modulus
        d = self.direction
        if d.steep:
            return Point(self.params, (self.offset + self.params.p * d.val * t) % m, t % m)
        return Point(self.params, t % m, (self.offset + d.val * t) % m)

    def point_keys(self) -> list[int]:
        """Keys of the p^k points, in parameter order."""
        m = self.params.modulus
        o, v = self.offset, self.direction.val
        if self.direction.steep:
            s = self.params.p * v
            return [(o + s * t) % m + m * t for t in range(m)]
        return [t + m * ((o + v * t) % m) for t in range(m)]

    def __repr__(self):
        return f"Line({self.direction!r}, offset={self.offset})"


def point_distance(q: Point, q2: Point) -> int:
    """Exponent j with ||q - q2|| = p^-j."""
    dx, dy = q - q2
    p, k = q.params.p, q.params.k
    return min(val(dx, p, k), val(dy, p, k))


def _as_direction(obj: Union[Direction, Line]) -> Direction:
    return obj.direction if isinstance(obj, Line) else obj


def angle(b: Union[Direction, Line], b2: Union[Direction, Line]) -> int:
    """Angle exponent: j with angle(b, b2) = p^-j; equal directions give k."""
    b, b2 = _as_direction(b), _as_direction(b2)
    _same_ring(b.params, b2.params)
    p, k = b.params.p, b.params.k
    if b.steep != b2.steep:
        return 0
    if b.steep:
        if k == 1:
            return k
        return min(1 + val(b.val - b2.val, p, k - 1), k)
    return val(b.val - b2.val, p, k)


def line_points(l: Line) -> list[Point]:
    return [l.point_at(t) for t in range(l.params.modulus)]


def _intersection_params(l: Line, l2: Line) -> tuple[str, list[int]]:
    """Solve l = l2; returns which coordinate parametrises the solutions."""
    _same_ring(l.params, l2.params)
    params = l.params
    p, m = params.p, params.modulus
    d, d2 = l.direction, l2.direction
    if not d.steep and not d2.steep:
        return "x", solve_linear(d.val - d2.val, l2.offset - l.offset, params)
    if d.steep and d2.steep:
        return "y", solve_linear(p * (d.val - d2.val), l2.offset - l.offset, params)
    if d.steep:
        l, l2 = l2, l
    # slope l: y = o + b x ; steep l2: x = o2 + p c y
    b, o = l.direction.val, l.offset
    pc, o2 = p * l2.direction.val, l2.offset
    x = (o2 + pc * o) * pow((1 - pc * b) % m, -1, m) % m
    return "x", [x]


def intersect(l: Line, l2: Line) -> frozenset[Point]:
    """The exact point set of l and l2 in common."""
    axis, sols = _intersection_params(l, l2)
    if axis == "y":
        return frozenset(l.point_at(y) for y in sols)
    base = l if not l.direction.steep else l2
    return frozenset(base.point_at(x) for x in sols)


def intersects(l: Line, l2: Line) -> bool:
    return bool(_intersection_params(l, l2)[1])


def intersection_size(l: Line, l2: Line) -> int:
    return len(_intersection_params(l, l2)[1])


def project_point(q: Point, j: int) -> Point:
    """Reduce coordinates mod p^j."""
    if not 1 <= j <= q.params.k:
        raise BadScale(f"projection scale {j} outside 1..{q.params.k}")
    target = q.params.at_scale(j)
    return Point(target, q.x % target.modulus, q.y % target.modulus)


def project_line(l: Line, j: int) -> Line:
    params = l.params
    if not 1 <= j <= params.k:
        raise BadScale(f"projection scale {j} outside 1..{params.k}")
    target = params.at_scale(j)
    d = l.direction
    if d.steep:
        nd = Direction.steep_dir(target, d.val)
    else:
        nd = Direction.slope(target, d.val)
    return Line(nd, l.offset % target.modulus)


def line_distance(l: Line, l2: Line) -> int:
    """Distance exponent between disjoint lines.

    Projects both lines to R_r, r = angle exponent, where they are parallel,
    and measures the distance of the parallel images (the largest
    point-distance exponent between them).
    """
    if intersects(l, l2):
        raise LinesIntersect(f"{l} and {l2} meet")
    r = angle(l, l2)
    a, b = project_line(l, r), project_line(l2, r)
    return val(a.offset - b.offset, a.params.p, r)


def separated_in_direction(l: Line, l2: Line, j: int) -> bool:
    return angle(l, l2) <= j


def separated_in_distance(l: Line, l2: Line, j: int) -> bool:
    if intersects(l, l2):
        return False
    return line_distance(l, l2) <= j


def one_separated(l: Line, l2: Line) -> bool:
    """Either 1-separated in direction or 1-separated in distance."""
    return separated_in_direction(l, l2, 0) or separated_in_distance(l, l2, 0)


@dataclass(frozen=True, slots=True)
class Cube:
    """The p^-scale cube {y : p^scale | y - base} of R_k^2."""

    params: RingParams
    scale: int
    bx: int
    by: int

    def __post_init__(self):
        if not 0 <= self.scale <= self.params.k:
            raise BadScale(f"cube scale {self.scale} outside 0..{self.params.k}")
        m = self.params.p**self.scale
        object.__setattr__(self, "bx", self.bx % m)
        object.__setattr__(self, "by", self.by % m)

    @classmethod
    def of(cls, q: Point, j: int) -> "Cube":
        return cls(q.params, j, q.x, q.y)

    @property
    def side(self) -> int:
        return self.params.p**self.scale

    @property
    def key(self) -> int:
        return self.bx + self.side * self.by

    def contains(self, q: Point) -> bool:
        _same_ring(self.params, q.params)
        m = self.side
        return (q.x - self.bx) % m == 0 and (q.y - self.by) % m == 0

    def __contains__(self, q: Point) -> bool:
        return self.contains(q)

    def points(self) -> Iterator[Point]:
        m = self.side
        n = self.params.modulus // m
        for v in range(n):
            for u in range(n):
                yield Point(self.params, self.bx + m * u, self.by + m * v)

    def as_point(self) -> Point:
        """The point of R_scale^2 identified with this cube."""
        return Point(self.params.at_scale(self.scale), self.bx, self.by)


@dataclass(frozen=True, slots=True)
class Tube:
    """pi_scale^-1(core); scale 0 is the whole plane and has no core."""

    params: RingParams
    scale: int
    core: Optional[Line]

    def __post_init__(self):
        if not 0 <= self.scale <= self.params.k:
            raise BadScale(f"tube scale {self.scale} outside 0..{self.params.k}")
        if self.scale == 0:
            if self.core is not None:
                raise ValueError("a scale-0 tube has no core line")
        elif self.core is None or self.core.params != RingParams(self.params.p, self.scale):
            raise RingMismatch("tube core must be a line over R_scale")

    @classmethod
    def of(cls, l: Line, j: int) -> "Tube":
        return cls(l.params, j, project_line(l, j) if j else None)

    @property
    def key(self) -> int:
        return self.core.key if self.core is not None else 0

    def contains_line(self, l: Line) -> bool:
        _same_ring(self.params, l.params)
        return self.scale == 0 or project_line(l, self.scale) == self.core

    def contains_point(self, q: Point) -> bool:
        return self.scale == 0 or self.core.contains(project_point(q, self.scale))

    def lines(self) -> Iterator[Line]:
        """All lines of R_k^2 inside this tube."""
        if self.scale == 0:
            yield from enumerate_lines(self.params)
            return
        params, j = self.params, self.scale
        p, m = params.p, params.modulus
        mj = p**j
        d = self.core.direction
        if d.steep:
            vals = range(d.val, m // p, mj // p)
        else:
            vals = range(d.val, m, mj)
        for v in vals:
            for o in range(self.core.offset, m, mj):
                yield Line(Direction(params, d.steep, v), o)


def _check_rescale_scale(Q: Cube) -> None:
    if Q.scale >= Q.params.k:
        raise BadScale("rescaling needs a cube of scale < k")


def rescale_point(Q: Cube, q: Point) -> Point:
    """iota_Q: write q = q_* + p^j q^* and return q^* in R_{k-j}^2."""
    _check_rescale_scale(Q)
    if not Q.contains(q):
        raise NotInCube(f"{q} not in cube {Q}")
    m = Q.side
    target = RingParams(Q.params.p, Q.params.k - Q.scale)
    return Point(target, (q.x - Q.bx) // m, (q.y - Q.by) // m)


def rescale_line(Q: Cube, l: Line) -> Line:
    """The line of R_{k-j}^2 whose point set is iota_Q(l intersected with Q)."""
    _check_rescale_scale(Q)
    _same_ring(Q.params, l.params)
    if Q.scale == 0:
        return l
    d = l.direction
    if d.steep:
        q0 = l.point_at(Q.by)
    else:
        q0 = l.point_at(Q.bx)
    if not Q.contains(q0):
        raise EmptyIntersection(f"{l} misses cube {Q}")
    start = rescale_point(Q, q0)
    target = start.params
    dx, dy = d.vector
    return Line.through(start, Direction.from_vector(target, dx, dy))


def line_meets_cube(l: Line, Q: Cube) -> bool:
    if Q.scale == 0:
        return True
    return project_line(l, Q.scale).contains(Point(l.params.at_scale(Q.scale), Q.bx, Q.by))


def enumerate_points(params: RingParams) -> list[Point]:
    check_enumerable(params)
    return [Point.from_key(params, key) for key in range(params.n_points)]


def enumerate_directions(params: RingParams) -> list[Direction]:
    check_enumerable(params)
    q = params.modulus
    return [Direction.from_index(params, i) for i in range(q + q // params.p)]


def enumerate_lines(params: RingParams) -> list[Line]:
    check_enumerable(params)
    q = params.modulus
    return [Line.from_key(params, key) for key in range(q * (q + q // params.p))]


def n_lines(params: RingParams) -> int:
    q = params.modulus
    return q * (q + q // params.p)


def lines_through(q: Point) -> list[Line]:
    """All p^k + p^(k-1) lines through q, by direction index."""
    return [Line.through(q, d) for d in enumerate_directions(q.params)]
