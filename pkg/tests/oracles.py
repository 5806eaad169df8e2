"""Brute-force reference implementations.

Everything here works from raw tuples and definitions, never from the
library's closed forms, so agreement is evidence rather than tautology.
"""

from __future__ import annotations

import cmath
import itertools


def units(p, k):
    m = p**k
    return [r for r in range(m) if r % p]


def valuation(n, p, k):
    n %= p**k
    if n == 0:
        return k
    j = 0
    while n % p == 0:
        n //= p
        j += 1
    return j


def point_distance(a, b, p, k):
    return min(valuation(a[0] - b[0], p, k), valuation(a[1] - b[1], p, k))


def has_unit(v, p):
    return v[0] % p != 0 or v[1] % p != 0


def nondegenerate_vectors(p, k):
    m = p**k
    return [(x, y) for x in range(m) for y in range(m) if has_unit((x, y), p)]


def direction_orbits(p, k):
    """Classes of non-degenerate vectors under multiplication by units."""
    m = p**k
    seen, orbits = set(), []
    for v in nondegenerate_vectors(p, k):
        if v in seen:
            continue
        orb = frozenset(((r * v[0]) % m, (r * v[1]) % m) for r in units(p, k))
        seen |= orb
        orbits.append(orb)
    return orbits


def angle(v, w, p, k):
    """Largest j with r v = r' w mod p^j for some units r, r'."""
    best = 0
    for r in units(p, k):
        for r2 in units(p, k):
            j = min(valuation(r * v[0] - r2 * w[0], p, k), valuation(r * v[1] - r2 * w[1], p, k))
            best = max(best, j)
    return best


def line_point_set(a, v, p, k):
    m = p**k
    return frozenset(((a[0] + t * v[0]) % m, (a[1] + t * v[1]) % m) for t in range(m))


def all_line_point_sets(p, k):
    m = p**k
    pts = [(x, y) for x in range(m) for y in range(m)]
    return {line_point_set(a, v, p, k) for a in pts for v in nondegenerate_vectors(p, k)}


def set_line_distance(A, B, p, k):
    """Distance exponent between two point sets: the closest pair."""
    return max(point_distance(a, b, p, k) for a in A for b in B)


def incidences(points: dict, lines: dict):
    """points: {(x, y): w}; lines: {frozenset of (x, y): w}."""
    return sum(w * om for q, w in points.items() for l, om in lines.items() if q in l)


def dft(values: dict, p, k):
    """values: {(x, y): complex}. Returns the normalised forward transform."""
    m = p**k
    out = {}
    for xi in itertools.product(range(m), repeat=2):
        s = 0
        for x, fx in values.items():
            s += fx * cmath.exp(-2j * cmath.pi * ((xi[0] * x[0] + xi[1] * x[1]) % m) / m)
        out[xi] = s / m
    return out


def annihilator(module, p, k):
    m = p**k
    return {
        (y0, y1)
        for y0 in range(m)
        for y1 in range(m)
        if all((x0 * y0 + x1 * y1) % m == 0 for x0, x1 in module)
    }


def cube_masses(points: dict, scale, p):
    s = p**scale
    acc = {}
    for (x, y), w in points.items():
        acc[(x % s, y % s)] = acc.get((x % s, y % s), 0) + w
    return acc


def is_alpha_set(points: dict, alpha, p, k):
    """Direct float check with a tiny slack, only for cases far from ties."""
    for s in range(k + 1):
        cap = p ** (alpha * (k - s))
        if any(mass > cap * (1 + 1e-9) for mass in cube_masses(points, s, p).values()):
            return False
    return True
