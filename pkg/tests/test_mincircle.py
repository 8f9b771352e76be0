"""Smallest enclosing circle against a brute-force reference."""

import numpy as np
import pytest

from oracles import brute_force_circle, random_point_set
from softmanip.errors import NoDetection
from softmanip.mincircle import smallest_enclosing_circle


def test_single_point_is_a_zero_circle():
    (cx, cy), r = smallest_enclosing_circle([(3.0, -4.5)])
    assert (cx, cy) == (3.0, -4.5)
    assert r == 0.0


def test_two_points_give_the_diameter_circle():
    (cx, cy), r = smallest_enclosing_circle([(0.0, 0.0), (2.0, 0.0)])
    assert cx == pytest.approx(1.0, abs=1e-12)
    assert cy == pytest.approx(0.0, abs=1e-12)
    assert r == pytest.approx(1.0, rel=1e-12)


def test_identical_points_collapse_to_radius_zero():
    (cx, cy), r = smallest_enclosing_circle([(5.0, 7.0)] * 9)
    assert (cx, cy) == (5.0, 7.0)
    assert r == 0.0


def test_collinear_points_use_the_extremes():
    pts = [(float(x), 2.0 * float(x)) for x in range(11)]
    (cx, cy), r = smallest_enclosing_circle(pts)
    assert cx == pytest.approx(5.0, abs=1e-9)
    assert cy == pytest.approx(10.0, abs=1e-9)
    assert r == pytest.approx(np.hypot(5.0, 10.0), rel=1e-9)


def test_empty_input_is_an_error():
    with pytest.raises(NoDetection):
        smallest_enclosing_circle([])


def test_matches_brute_force_on_random_sets():
    rng = np.random.default_rng(42)
    for _ in range(200):
        pts = random_point_set(rng)
        (cx, cy), r = smallest_enclosing_circle(pts)
        (ox, oy), orad = brute_force_circle(pts)
        assert abs(r - orad) <= 1e-6
        assert np.hypot(cx - ox, cy - oy) <= 1e-6


def test_every_point_is_enclosed():
    rng = np.random.default_rng(43)
    for _ in range(200):
        pts = random_point_set(rng)
        (cx, cy), r = smallest_enclosing_circle(pts)
        dists = np.hypot(pts[:, 0] - cx, pts[:, 1] - cy)
        assert np.all(dists <= r + 1e-9)


def test_shrinking_the_radius_excludes_a_point():
    rng = np.random.default_rng(44)
    for _ in range(200):
        pts = random_point_set(rng)
        (cx, cy), r = smallest_enclosing_circle(pts)
        dists = np.hypot(pts[:, 0] - cx, pts[:, 1] - cy)
        assert np.any(dists > r - 1e-6)
