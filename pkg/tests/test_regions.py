import numpy as np

from matconv.regions import CubicCornerRegion


def test_membership():
    K = CubicCornerRegion()
    assert K.contains((0.0, 0.5))
    assert K.contains((-0.5, 0.25))
    assert not K.contains((0.5, 0.05))  # below the cubic arc
    assert not K.contains((1.2, 1.0))
    assert not K.contains((0.0, -0.1))


def test_origin_extreme_not_exposed():
    K = CubicCornerRegion()
    assert K.is_extreme((0.0, 0.0))
    assert not K.is_exposed((0.0, 0.0))


def test_corner_classification():
    K = CubicCornerRegion()
    for corner in ((-1.0, 0.0), (-1.0, 1.0), (1.0, 1.0)):
        assert K.is_extreme(corner)
        assert K.is_exposed(corner)


def test_cubic_arc_points_exposed():
    K = CubicCornerRegion()
    for x in np.linspace(0.05, 0.95, 19):
        p = (x, x**3)
        assert K.on_boundary(p)
        assert K.is_extreme(p)
        assert K.is_exposed(p)


def test_edge_interiors_not_extreme():
    K = CubicCornerRegion()
    for p in ((-0.5, 0.0), (-1.0, 0.5), (0.0, 1.0), (-0.5, 1.0)):
        assert K.on_boundary(p)
        assert not K.is_extreme(p)
        assert not K.is_exposed(p)


def test_boundary_walk_consistency():
    K = CubicCornerRegion()
    pts = K.boundary_points(80)
    assert len(pts) == 80
    for p in pts:
        assert K.on_boundary(p)
        # exposed implies extreme on every sampled point
        if K.is_exposed(p):
            assert K.is_extreme(p)
