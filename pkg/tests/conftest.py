"""Shared helpers: random measure ensembles and a convex-hull distance oracle."""

import numpy as np
import pytest

from condensity import AtomicMeasure


def random_measure(rng, p=None, positive_weights=False, min_sep=0.1, radius=0.9,
                   min_weight_sum=0.3):
    """A random measure with separated nodes and moderate weights.

    Node separation and the lower bound on |sum of weights| keep the zero
    and pole recovery problems well conditioned, which the accuracy-style
    tests rely on.
    """
    if p is None:
        p = int(rng.integers(2, 7))
    while True:
        nodes = rng.uniform(-radius, radius, p) + 1j * rng.uniform(-radius, radius, p)
        if np.all(np.abs(nodes) < radius):
            sep = np.abs(nodes[:, None] - nodes[None, :]) + np.eye(p)
            if sep.min() > min_sep:
                break
    magnitudes = rng.uniform(0.5, 2.0, p)
    if positive_weights:
        weights = magnitudes.astype(complex)
    else:
        weights = magnitudes * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, p))
        if abs(weights.sum()) < min_weight_sum:
            weights[0] += 1.0
    return AtomicMeasure(weights=weights, nodes=nodes)


def _convex_hull(points):
    """Andrew monotone chain; returns hull vertices in order (collinear-safe)."""
    pts = sorted(set((p.real, p.imag) for p in points))
    if len(pts) <= 2:
        return [complex(*p) for p in pts]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return [complex(*p) for p in hull]


def _segment_distance(z, a, b):
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0.0:
        return abs(z - a)
    t = ((z - a).real * ab.real + (z - a).imag * ab.imag) / denom
    t = min(1.0, max(0.0, t))
    return abs(z - (a + t * ab))


def hull_distance(z, points):
    """Distance from z to the convex hull of the given points (0 if inside)."""
    hull = _convex_hull(points)
    if len(hull) == 1:
        return abs(z - hull[0])
    if len(hull) == 2:
        return _segment_distance(z, hull[0], hull[1])
    inside = True
    for i in range(len(hull)):
        a, b = hull[i], hull[(i + 1) % len(hull)]
        crossp = (b - a).real * (z - a).imag - (b - a).imag * (z - a).real
        if crossp < 0:
            inside = False
            break
    if inside:
        return 0.0
    return min(
        _segment_distance(z, hull[i], hull[(i + 1) % len(hull)])
        for i in range(len(hull))
    )


def pair_off(found, expected):
    """Greedy nearest-neighbor pairing; returns the per-pair distances."""
    found = list(found)
    dists = []
    for target in expected:
        gaps = [abs(target - f) for f in found]
        i = int(np.argmin(gaps))
        dists.append(gaps[i])
        found.pop(i)
    return np.array(dists)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
