"""Shared sampling helpers for the test suite.

All randomness is seeded; samplers enforce the genericity the library's
theorems assume (proper polygons, separated points), re-sampling on
degenerate draws.
"""

import math
import random

import pytest

from poncelet import (
    PonceletScene,
    ProjMap,
    ProjPoint,
    concentric_scene,
    proj_distance,
    transformed_scene,
)


def ring_points(rng: random.Random, k: int, minsep: float = 0.35,
                rmin: float = 0.85, rmax: float = 1.2) -> list[ProjPoint]:
    """k well-separated points near the unit circle (no 3 collinear, generic)."""
    while True:
        angs = sorted(rng.uniform(0, 2 * math.pi) for _ in range(k))
        gaps = [(angs[(i + 1) % k] - angs[i]) % (2 * math.pi) for i in range(k)]
        if min(gaps) > minsep:
            break
    return [
        ProjPoint(rng.uniform(rmin, rmax) * math.cos(a),
                  rng.uniform(rmin, rmax) * math.sin(a), 1)
        for a in angs
    ]


def circle_points(rng: random.Random, k: int, minsep: float = 0.3) -> list[ProjPoint]:
    """k separated points exactly on the unit circle."""
    while True:
        angs = sorted(rng.uniform(0, 2 * math.pi) for _ in range(k))
        gaps = [(angs[(i + 1) % k] - angs[i]) % (2 * math.pi) for i in range(k)]
        if min(gaps) > minsep:
            break
    return [ProjPoint(math.cos(a), math.sin(a), 1) for a in angs]


def random_map(rng: random.Random) -> ProjMap:
    """Well-conditioned random projective map."""
    while True:
        try:
            m = ProjMap([[rng.uniform(-1, 1) for _ in range(3)] for _ in range(3)])
        except Exception:
            continue
        if abs(m.det) > 0.05:
            return m


def random_closing_scene(rng: random.Random, n: int, density: int = 1) -> PonceletScene:
    """Random projective image of the concentric closing n-gon scene."""
    base = concentric_scene(n, start_angle=rng.uniform(0, 2 * math.pi), density=density)
    return transformed_scene(base, random_map(rng))


def proper(points, gap: float = 0.05) -> bool:
    return all(
        proj_distance(points[i], points[j]) > gap
        for i in range(len(points))
        for j in range(i + 1, len(points))
    )


@pytest.fixture
def rng():
    return random.Random(20240817)
