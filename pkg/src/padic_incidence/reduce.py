"""Rescale-and-project reduction of grid-like structures to (Z/pZ)^2.

A grid structure is two base points q0, q1, lines L0 through q0, lines L1
through q1, and a point set G where every point is the crossing of some
l0 in L0 and l1 in L1 at angle exponent 0.  The pipeline sends it to the
prime field without merging points of G, then a projective change of
coordinates moves q0 and q1 to infinity so that G sits in a product A x B.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .errors import DegenerateBase, GNotInCube, InvalidGrid, NotPrimeField
from .geometry import (
    Cube,
    Direction,
    Line,
    Point,
    angle,
    enumerate_points,
    intersect,
    line_meets_cube,
    point_distance,
    project_line,
    project_point,
    rescale_line,
    rescale_point,
)
from .ring import RingParams


@dataclass(frozen=True)
class GridStructure:
    q0: Point
    q1: Point
    L0: tuple[Line, ...]
    L1: tuple[Line, ...]
    G: tuple[Point, ...]

    def __post_init__(self):
        object.__setattr__(self, "L0", tuple(sorted(set(self.L0), key=lambda l: l.key)))
        object.__setattr__(self, "L1", tuple(sorted(set(self.L1), key=lambda l: l.key)))
        object.__setattr__(self, "G", tuple(sorted(set(self.G), key=lambda g: g.key)))

    @property
    def params(self) -> RingParams:
        return self.q0.params

    @property
    def base_distance(self) -> int:
        return point_distance(self.q0, self.q1)

    def incidence_count(self) -> int:
        """Incident pairs (g, l) with l in L0, plus those with l in L1."""
        return sum(1 for g in self.G for l in self.L0 + self.L1 if l.contains(g))

    def validate(self) -> None:
        """Raise InvalidGrid unless the structure satisfies the grid contract.

        Beyond covering, lines through a common base point must be pairwise
        transverse (angle exponent 0) and G must avoid the cells around q0
        and q1 one scale below their separation; points there merge with the
        base points after projection.
        """
        params = self.params
        objs = [self.q1, *self.G] + [l for l in self.L0 + self.L1]
        if any(o.params != params for o in objs):
            raise InvalidGrid("all objects must share one ring")
        if self.q0 == self.q1:
            raise InvalidGrid("base points coincide")
        for name, base, lines in (("L0", self.q0, self.L0), ("L1", self.q1, self.L1)):
            for l in lines:
                if not l.contains(base):
                    raise InvalidGrid(f"{l} in {name} misses {base}")
            for i, a in enumerate(lines):
                for b in lines[i + 1:]:
                    if angle(a, b) != 0:
                        raise InvalidGrid(f"{a} and {b} in {name} are not transverse")
        both = [l for l in self.L0 + self.L1 if l.contains(self.q0) and l.contains(self.q1)]
        d = self.base_distance
        cells = [Cube.of(self.q0, d + 1), Cube.of(self.q1, d + 1)] if d + 1 <= params.k else []
        for g in self.G:
            if not _covering_pair(self, g):
                raise InvalidGrid(f"{g} is not a transverse crossing of L0 and L1")
            if any(l.contains(g) for l in both):
                raise InvalidGrid(f"{g} lies on a line through both base points")
            if any(c.contains(g) for c in cells):
                raise InvalidGrid(f"{g} lies in a base cell at scale {d + 1}")


def _covering_pair(gs: GridStructure, g: Point) -> Optional[tuple[Line, Line]]:
    for l0 in gs.L0:
        if l0.contains(g):
            for l1 in gs.L1:
                if l1.contains(g) and angle(l0, l1) == 0:
                    return l0, l1
    return None


def verify_grid_cover(gs: GridStructure) -> bool:
    """Every point of G lies on a line of L0 and on a line of L1."""
    return all(
        any(l.contains(g) for l in gs.L0) and any(l.contains(g) for l in gs.L1) for g in gs.G
    )


@dataclass
class Reduction:
    grid: GridStructure
    trace: dict = field(default_factory=dict)


def _project_all(gs: GridStructure) -> GridStructure:
    return GridStructure(
        project_point(gs.q0, 1),
        project_point(gs.q1, 1),
        tuple(project_line(l, 1) for l in gs.L0),
        tuple(project_line(l, 1) for l in gs.L1),
        tuple(project_point(g, 1) for g in gs.G),
    )


def reduce_to_prime_field(gs: GridStructure) -> Reduction:
    """Send a grid structure over R_k to one over R_1 = F_p.

    Base points at distance exponent 0 are projected directly.  Otherwise
    every grid point lies in the common cube of the base points at their
    separation scale j; that cube is rescaled onto R_{k-j}^2, where the
    base points are at distance exponent 0, and then projected.
    """
    gs.validate()
    k = gs.params.k
    n_g, n_inc = len(gs.G), gs.incidence_count()
    trace: dict = {"input_k": k, "steps": [], "dropped_lines": 0,
                   "incidences_in": n_inc, "incidences_out": n_inc}
    if k == 1:
        trace["case"] = "identity"
        return Reduction(gs, trace)
    j = gs.base_distance
    cur = gs
    if j == 0:
        trace["case"] = 1
    else:
        trace["case"] = 2
        trace["scale"] = j
        Q = Cube.of(gs.q0, j)
        for g in gs.G:
            if not Q.contains(g):
                raise GNotInCube(f"{g} escaped the cube of {gs.q0} at scale {j}")
        kept0 = [l for l in gs.L0 if line_meets_cube(l, Q)]
        kept1 = [l for l in gs.L1 if line_meets_cube(l, Q)]
        trace["dropped_lines"] = len(gs.L0) + len(gs.L1) - len(kept0) - len(kept1)
        cur = GridStructure(
            rescale_point(Q, gs.q0),
            rescale_point(Q, gs.q1),
            tuple(rescale_line(Q, l) for l in kept0),
            tuple(rescale_line(Q, l) for l in kept1),
            tuple(rescale_point(Q, g) for g in gs.G),
        )
        trace["steps"].append({"op": "rescale", "scale": j, "to_k": cur.params.k})
        if point_distance(cur.q0, cur.q1) != 0:
            raise GNotInCube("rescaled base points are not at distance exponent 0")
    if cur.params.k > 1:
        cur = _project_all(cur)
        trace["steps"].append({"op": "project", "to_k": 1})
    if len(cur.G) != n_g:
        raise InvalidGrid(f"projection merged grid points ({n_g} -> {len(cur.G)})")
    if cur.q0 == cur.q1 or not verify_grid_cover(cur):
        raise InvalidGrid("reduction lost the base points or the cover")
    if len(cur.L0) > len(gs.L0) or len(cur.L1) > len(gs.L1):
        raise InvalidGrid("line counts grew under reduction")
    trace["incidences_out"] = cur.incidence_count()
    return Reduction(cur, trace)


# -- projective normalisation over F_p ---------------------------------------


def _det3(M, p):
    return (
        M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
        - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
        + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])
    ) % p


def inverse_mod(M: list[list[int]], p: int) -> list[list[int]]:
    det = _det3(M, p)
    if det == 0:
        raise DegenerateBase("matrix is singular mod p")
    inv_det = pow(det, -1, p)
    cof = [[0] * 3 for _ in range(3)]
    for r in range(3):
        for c in range(3):
            minor = [[M[i][j] for j in range(3) if j != c] for i in range(3) if i != r]
            cof[r][c] = (-1) ** (r + c) * (minor[0][0] * minor[1][1] - minor[0][1] * minor[1][0])
    return [[cof[c][r] * inv_det % p for c in range(3)] for r in range(3)]


def apply(M: list[list[int]], v: tuple[int, int, int], p: int) -> tuple[int, int, int]:
    return tuple(sum(M[r][c] * v[c] for c in range(3)) % p for r in range(3))


def to_affine(v: tuple[int, int, int], p: int) -> Optional[tuple[int, int]]:
    if v[2] % p == 0:
        return None
    zi = pow(v[2], -1, p)
    return v[0] * zi % p, v[1] * zi % p


def _collinear(a: Point, b: Point, c: Point, p: int) -> bool:
    return ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)) % p == 0


@dataclass
class ProjectiveFrame:
    A: list[int]
    B: list[int]
    transform: list[list[int]]
    anchor: tuple[int, int]
    G_image: list[tuple[int, int]]
    dropped_lines: int

    def to_dict(self) -> dict:
        return {
            "A": self.A,
            "B": self.B,
            "transform": self.transform,
            "anchor": list(self.anchor),
            "G_image": [list(g) for g in self.G_image],
            "dropped_lines": self.dropped_lines,
        }


def projective_normalize(gs: GridStructure) -> ProjectiveFrame:
    """Move q0 to [1:0:0] and q1 to [0:1:0] over F_p.

    The transform is the inverse of the matrix whose columns are q0, q1 and
    an anchor r (each as (x, y, 1)); r is the smallest-key point of F_p^2
    off the line q0 q1 and goes to the affine origin.  Lines through q1
    become verticals x = a, lines through q0 horizontals y = b; the line
    q0 q1 itself goes to infinity and is dropped.
    """
    params = gs.params
    if params.k != 1:
        raise NotPrimeField(f"projective normalisation needs k = 1, got {params}")
    if gs.q0 == gs.q1:
        raise DegenerateBase("base points coincide")
    p = params.p
    anchor = next(r for r in enumerate_points(params) if not _collinear(gs.q0, gs.q1, r, p))
    cols = [(gs.q0.x, gs.q0.y, 1), (gs.q1.x, gs.q1.y, 1), (anchor.x, anchor.y, 1)]
    Minv = [[cols[c][r] for c in range(3)] for r in range(3)]
    M = inverse_mod(Minv, p)

    def image(q: Point):
        return to_affine(apply(M, (q.x, q.y, 1), p), p)

    def line_coord(l: Line, base: Point, axis: int) -> Optional[int]:
        imgs = {image(l.point_at(t)) for t in range(p)} - {None}
        if not imgs:
            return None
        coords = {im[axis] for im in imgs}
        assert len(coords) == 1, "line through a base point must map to an axis-parallel line"
        return coords.pop()

    dropped = 0
    A, B = set(), set()
    for l in gs.L1:
        a = line_coord(l, gs.q1, 0)
        if a is None:
            dropped += 1
        else:
            A.add(a)
    for l in gs.L0:
        b = line_coord(l, gs.q0, 1)
        if b is None:
            dropped += 1
        else:
            B.add(b)
    G_image = []
    for g in gs.G:
        im = image(g)
        if im is None:
            raise InvalidGrid(f"{g} lies on the line through the base points")
        G_image.append(im)
    return ProjectiveFrame(sorted(A), sorted(B), M, (anchor.x, anchor.y), sorted(G_image), dropped)


# -- synthetic instances ------------------------------------------------------


def _transverse_lines(q: Point, rng: random.Random, n: int) -> list[Line]:
    """n lines through q with pairwise distinct directions mod p."""
    params = q.params
    p, m = params.p, params.modulus
    classes = list(range(p + 1))
    rng.shuffle(classes)
    out = []
    for c in classes[:n]:
        if c < p:
            d = Direction.slope(params, c + p * rng.randrange(m // p))
        else:
            d = Direction.steep_dir(params, rng.randrange(m // p))
        out.append(Line.through(q, d))
    return out


def synthetic_grid(params: RingParams, seed: int, case: int, max_tries: int = 200) -> GridStructure:
    """A random valid grid structure whose base points fall in the given case."""
    rng = random.Random(seed)
    p, k, m = params.p, params.k, params.modulus
    if case == 2 and k < 2:
        raise ValueError("case 2 needs k >= 2")
    for _ in range(max_tries):
        q0 = Point(params, rng.randrange(m), rng.randrange(m))
        if case == 1:
            q1 = Point(params, rng.randrange(m), rng.randrange(m))
            if point_distance(q0, q1) != 0:
                continue
        else:
            j = rng.randint(1, k - 1)
            s = p**j
            ux, uy = rng.randrange(m), rng.randrange(m)
            if ux % p == 0 and uy % p == 0:
                ux += 1
            q1 = Point(params, q0.x + s * ux, q0.y + s * uy)
        L0 = _transverse_lines(q0, rng, rng.randint(2, p + 1))
        L1 = _transverse_lines(q1, rng, rng.randint(2, p + 1))
        d = point_distance(q0, q1)
        cells = [Cube.of(q0, d + 1), Cube.of(q1, d + 1)] if d + 1 <= k else []
        both = [l for l in L0 + L1 if l.contains(q0) and l.contains(q1)]
        G = set()
        for l0 in L0:
            for l1 in L1:
                if angle(l0, l1) != 0:
                    continue
                for g in intersect(l0, l1):
                    if any(c.contains(g) for c in cells) or any(l.contains(g) for l in both):
                        continue
                    G.add(g)
        if not G:
            continue
        G = sorted(G, key=lambda g: g.key)
        keep = rng.randint(1, len(G))
        gs = GridStructure(q0, q1, tuple(L0), tuple(L1), tuple(rng.sample(G, keep)))
        gs.validate()
        return gs
    raise RuntimeError(f"no valid grid found for {params} case {case}")  # pragma: no cover
