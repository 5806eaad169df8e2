import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from padic_incidence.errors import (
    BadScale,
    EmptyIntersection,
    LinesIntersect,
    NotInCube,
    RingMismatch,
)
from padic_incidence.geometry import (
    Cube,
    Direction,
    Line,
    Point,
    Tube,
    angle,
    enumerate_directions,
    enumerate_lines,
    enumerate_points,
    intersect,
    line_distance,
    line_meets_cube,
    line_points,
    lines_through,
    n_lines,
    one_separated,
    point_distance,
    project_line,
    project_point,
    rescale_line,
    rescale_point,
    separated_in_direction,
    separated_in_distance,
)
from padic_incidence.ring import RingParams

SMALL = [(2, 1), (2, 2), (3, 1), (3, 2), (2, 3)]


def pts(S):
    return frozenset((q.x, q.y) for q in S)


@pytest.fixture(params=SMALL, ids=lambda pk: f"p{pk[0]}k{pk[1]}")
def ring(request):
    return RingParams(*request.param)


def rings():
    return st.sampled_from([RingParams(p, k) for p, k in SMALL + [(3, 3), (5, 2)]])


@st.composite
def points(draw, params):
    m = params.modulus
    return Point(params, draw(st.integers(0, m - 1)), draw(st.integers(0, m - 1)))


@st.composite
def lines(draw, params):
    return Line.from_key(params, draw(st.integers(0, n_lines(params) - 1)))


# -- worked examples ----------------------------------------------------------


def test_point_distance_examples():
    r = RingParams(3, 2)
    assert point_distance(Point(r, 0, 0), Point(r, 3, 3)) == 1
    assert point_distance(Point(r, 4, 5), Point(r, 4, 5)) == 2
    assert point_distance(Point(r, 0, 0), Point(r, 3, 1)) == 0
    with pytest.raises(RingMismatch):
        point_distance(Point(r, 0, 0), Point(RingParams(3, 1), 0, 0))


def test_angle_examples():
    r = RingParams(3, 2)
    assert angle(Direction.slope(r, 2), Direction.slope(r, 5)) == 1
    assert angle(Direction.slope(r, 4), Direction.slope(r, 4)) == 2
    assert angle(Direction.slope(r, 0), Direction.steep_dir(r, 0)) == 0


def test_line_points_examples():
    assert pts(line_points(Line.slope(RingParams(2, 1), 1, 0))) == {(0, 0), (1, 1)}
    assert [(q.x, q.y) for q in line_points(Line.steep(RingParams(2, 1), 0, 1))] == [(1, 0), (1, 1)]
    ps = line_points(Line.slope(RingParams(3, 2), 3, 1))
    assert len(ps) == 9 and (ps[2].x, ps[2].y) == (2, 7)


def test_intersect_examples():
    r1, r2 = RingParams(3, 1), RingParams(3, 2)
    assert pts(intersect(Line.slope(r1, 0, 0), Line.slope(r1, 1, 0))) == {(0, 0)}
    l = Line.slope(r2, 4, 2)
    assert intersect(l, l) == frozenset(line_points(l))
    assert intersect(Line.slope(r2, 0, 0), Line.slope(r2, 0, 3)) == frozenset()


def test_line_distance_examples():
    r = RingParams(3, 2)
    assert line_distance(Line.slope(r, 0, 0), Line.slope(r, 0, 1)) == 0
    assert line_distance(Line.slope(r, 0, 0), Line.slope(r, 0, 3)) == 1
    with pytest.raises(LinesIntersect):
        line_distance(Line.slope(r, 0, 0), Line.slope(r, 1, 0))


def test_separation_examples():
    r = RingParams(3, 2)
    a, b, c = Line.slope(r, 0, 0), Line.slope(r, 1, 0), Line.slope(r, 0, 1)
    assert separated_in_direction(a, b, 0)
    assert separated_in_distance(a, c, 0)
    assert not separated_in_direction(a, a, 0) and not separated_in_distance(a, a, 0)
    assert one_separated(a, b) and one_separated(a, c) and not one_separated(a, a)


def test_projection_examples():
    r = RingParams(3, 2)
    q = project_point(Point(r, 4, 7), 1)
    assert (q.x, q.y, q.params) == (1, 1, RingParams(3, 1))
    l = project_line(Line.slope(r, 5, 7), 1)
    assert l == Line.slope(RingParams(3, 1), 2, 1)
    assert project_line(Line.slope(r, 5, 7), 2) == Line.slope(r, 5, 7)
    with pytest.raises(BadScale):
        project_point(Point(r, 0, 0), 0)
    with pytest.raises(BadScale):
        project_line(Line.slope(r, 0, 0), 3)


def test_rescale_examples():
    r = RingParams(3, 2)
    Q = Cube.of(Point(r, 0, 0), 1)
    q = rescale_point(Q, Point(r, 3, 6))
    assert (q.x, q.y, q.params) == (1, 2, RingParams(3, 1))
    b = rescale_point(Q, Point(r, 0, 0))
    assert (b.x, b.y) == (0, 0)
    assert rescale_line(Q, Line.slope(r, 1, 0)) == Line.slope(RingParams(3, 1), 1, 0)
    with pytest.raises(NotInCube):
        rescale_point(Q, Point(r, 1, 0))
    with pytest.raises(EmptyIntersection):
        rescale_line(Q, Line.slope(r, 0, 1))


def test_enumeration_counts_examples():
    assert len(enumerate_directions(RingParams(3, 2))) == 12
    ls = enumerate_lines(RingParams(2, 2))
    assert len(ls) == 24 and all(len(set(line_points(l))) == 4 for l in ls)
    assert len({frozenset(line_points(l)) for l in ls}) == 24
    assert len(enumerate_points(RingParams(2, 1))) == 4 and len(enumerate_lines(RingParams(2, 1))) == 6


# -- against brute force ------------------------------------------------------


def test_canonical_directions_match_unit_orbits(ring):
    p, k = ring.p, ring.k
    orbits = oracles.direction_orbits(p, k)
    dirs = enumerate_directions(ring)
    assert len(dirs) == len(orbits) == p**k + p ** (k - 1)
    hit = [sum(1 for o in orbits if d.vector in o) for d in dirs]
    assert hit == [1] * len(dirs)


def test_angle_matches_brute_force_over_units(ring):
    p, k = ring.p, ring.k
    dirs = enumerate_directions(ring)
    for d, e in itertools.product(dirs, repeat=2):
        assert angle(d, e) == oracles.angle(d.vector, e.vector, p, k), (d, e)


def test_lines_are_exactly_the_nondegenerate_lines(ring):
    p, k = ring.p, ring.k
    ours = {frozenset((q.x, q.y) for q in line_points(l)) for l in enumerate_lines(ring)}
    assert ours == oracles.all_line_point_sets(p, k)
    assert len(ours) == p ** (2 * k) + p ** (2 * k - 1)


def test_intersection_and_distance_match_brute_force(ring):
    p, k = ring.p, ring.k
    ls = enumerate_lines(ring)
    sets = {l: pts(line_points(l)) for l in ls}
    for a, b in itertools.product(ls, repeat=2):
        common = sets[a] & sets[b]
        assert pts(intersect(a, b)) == common
        if not common:
            assert line_distance(a, b) == oracles.set_line_distance(sets[a], sets[b], p, k)


def test_keys_round_trip(ring):
    for l in enumerate_lines(ring):
        assert Line.from_key(ring, l.key) == l
    for q in enumerate_points(ring):
        assert Point.from_key(ring, q.key) == q
    assert [l.key for l in enumerate_lines(ring)] == list(range(n_lines(ring)))


def test_cubes_and_tubes_have_uniform_size(ring):
    p, k = ring.p, ring.k
    for j in range(k + 1):
        for q in random.Random(j).sample(enumerate_points(ring), 3):
            Q = Cube.of(q, j)
            inside = list(Q.points())
            assert len(set(inside)) == p ** (2 * (k - j))
            assert all(Q.contains(x) for x in inside)
    for j in range(1, k + 1):
        for l in random.Random(j).sample(enumerate_lines(ring), 3):
            T = Tube.of(l, j)
            members = list(T.lines())
            assert len(set(members)) == p ** (2 * (k - j))
            assert sorted(m.key for m in members) == sorted(
                m.key for m in enumerate_lines(ring) if T.contains_line(m)
            )


def test_coarsest_tube_holds_every_line(ring):
    # the scale-0 tube is the whole plane: it holds p^(2k) + p^(2k-1) lines, not p^(2k)
    p, k = ring.p, ring.k
    assert len(list(Tube(ring, 0, None).lines())) == p ** (2 * k) + p ** (2 * k - 1)


def test_lines_through_a_point(ring):
    for q in enumerate_points(ring)[:5]:
        through = lines_through(q)
        assert len(through) == ring.modulus + ring.modulus // ring.p
        assert all(l.contains(q) for l in through)


# -- invariants ---------------------------------------------------------------


@pytest.mark.parametrize("p,k", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_ultrametric_exhaustive(p, k):
    ps = enumerate_points(RingParams(p, k))
    for a, b, c in itertools.product(ps, repeat=3):
        assert point_distance(a, c) >= min(point_distance(a, b), point_distance(b, c))


def test_angle_symmetric_and_k_iff_equal(ring):
    dirs = enumerate_directions(ring)
    for d, e in itertools.product(dirs, repeat=2):
        assert angle(d, e) == angle(e, d)
        assert (angle(d, e) == ring.k) == (d == e)


def test_transverse_lines_meet_once(ring):
    ls = enumerate_lines(ring)
    for a, b in itertools.product(ls, repeat=2):
        if angle(a, b) == 0:
            assert len(intersect(a, b)) == 1


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_projection_preserves_incidence(data):
    r = data.draw(rings())
    l = data.draw(lines(r))
    q = l.point_at(data.draw(st.integers(0, r.modulus - 1)))
    j = data.draw(st.integers(1, r.k))
    assert project_line(l, j).contains(project_point(q, j))


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_rescale_line_is_image_of_intersection(data):
    r = data.draw(rings().filter(lambda r: r.k >= 2))
    j = data.draw(st.integers(1, r.k - 1))
    Q = Cube.of(data.draw(points(r)), j)
    l = data.draw(lines(r))
    if not line_meets_cube(l, Q):
        with pytest.raises(EmptyIntersection):
            rescale_line(Q, l)
        return
    image = {rescale_point(Q, x) for x in line_points(l) if Q.contains(x)}
    assert image == set(line_points(rescale_line(Q, l)))


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_rescale_point_is_a_bijection(data):
    r = data.draw(rings().filter(lambda r: r.k >= 2))
    j = data.draw(st.integers(0, r.k - 1))
    Q = Cube.of(data.draw(points(r)), j)
    image = [rescale_point(Q, x).key for x in Q.points()]
    assert sorted(image) == list(range(r.at_scale(r.k - j).n_points))


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_from_vector_is_canonical(data):
    r = data.draw(rings())
    d = Direction.from_index(r, data.draw(st.integers(0, r.modulus + r.modulus // r.p - 1)))
    u = data.draw(st.integers(1, r.modulus - 1).filter(lambda u: u % r.p))
    dx, dy = d.vector
    assert Direction.from_vector(r, u * dx, u * dy) == d
