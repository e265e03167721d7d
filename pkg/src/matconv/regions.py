"""Two-dimensional convex test region with an extreme-but-not-exposed corner.

The region is bounded by the cubic arc x2 = x1^3 for x1 in [0, 1], the top
edge x2 = 1, the left edge x1 = -1 and the bottom edge x2 = 0:

    K = {(x1, x2) : -1 <= x1, 0 <= x2 <= 1, x2 >= max(x1, 0)^3}.

The origin sits where the flat bottom edge meets the cubic arc with
matching tangents, so it is an extreme point whose only supporting line
also contains the whole bottom edge: extreme, not exposed.  All
classifications below are analytic; the region doubles as a classical
convexity fixture for the extremality testers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["CubicCornerRegion"]


@dataclass(frozen=True)
class CubicCornerRegion:
    """The fixture region; stateless, all methods are pure."""

    tol: float = 1e-9

    def contains(self, p) -> bool:
        x, y = float(p[0]), float(p[1])
        t = self.tol
        return (
            x >= -1.0 - t
            and y >= -t
            and y <= 1.0 + t
            and y >= max(x, 0.0) ** 3 - t
        )

    def on_boundary(self, p) -> bool:
        if not self.contains(p):
            return False
        x, y = float(p[0]), float(p[1])
        t = 10 * self.tol
        return (
            abs(x + 1.0) <= t
            or abs(y) <= t
            or abs(y - 1.0) <= t
            or (x >= -t and abs(y - max(x, 0.0) ** 3) <= t)
        )

    def is_extreme(self, p) -> bool:
        """Analytic extreme-point test.

        Extreme points: the corners (-1, 0), (-1, 1), (1, 1), the origin,
        and the cubic arc points (x, x^3) for x in (0, 1).
        """
        if not self.on_boundary(p):
            return False
        x, y = float(p[0]), float(p[1])
        t = 10 * self.tol
        for corner in ((-1.0, 0.0), (-1.0, 1.0), (1.0, 1.0), (0.0, 0.0)):
            if abs(x - corner[0]) <= t and abs(y - corner[1]) <= t:
                return True
        if t < x < 1.0 - t and abs(y - x**3) <= t:
            return True
        return False

    def is_exposed(self, p) -> bool:
        """Analytic exposed-point test: extreme points minus the origin."""
        if not self.is_extreme(p):
            return False
        x, y = float(p[0]), float(p[1])
        t = 10 * self.tol
        if abs(x) <= t and abs(y) <= t:
            return False  # the only supporting line at 0 contains the bottom edge
        return True

    def boundary_points(self, count: int) -> np.ndarray:
        """Deterministic walk around the boundary (arc, top, left, bottom)."""
        per = max(count // 4, 2)
        arc = [(s, s**3) for s in np.linspace(0.0, 1.0, per, endpoint=False)]
        top = [(1.0 - 2.0 * s, 1.0) for s in np.linspace(0.0, 1.0, per, endpoint=False)]
        left = [(-1.0, 1.0 - s) for s in np.linspace(0.0, 1.0, per, endpoint=False)]
        bottom = [(-1.0 + s, 0.0) for s in np.linspace(0.0, 1.0, per, endpoint=False)]
        return np.array(arc + top + left + bottom)
