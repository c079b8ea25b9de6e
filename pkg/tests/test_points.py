import numpy as np
import pytest

from kantorovich.points import as_point, coordinates, is_coordinate, point_to_json, points_equal


def test_canonical_forms():
    assert as_point("a") == "a"
    assert as_point(3) == (3.0,)
    assert as_point([1, 2]) == (1.0, 2.0)
    assert as_point(np.array([0.5, 0.25])) == (0.5, 0.25)
    assert as_point([[0], [1]]) == ((0.0,), (1.0,))


def test_pair_points_stay_distinct_from_coordinates():
    pair = as_point([[0.0], [1.0]])
    coord = as_point([0.0, 1.0])
    assert not points_equal(pair, coord)
    assert is_coordinate(coord) and not is_coordinate(pair)


def test_tolerant_equality():
    assert points_equal((0.0, 1.0), (0.0, 1.0 + 1e-13))
    assert not points_equal((0.0, 1.0), (0.0, 1.0 + 1e-6))
    assert points_equal("a", "a") and not points_equal("a", "b")
    assert not points_equal("a", (1.0,))


def test_json_round_trip():
    for p in ["a", (1.0, 2.0), ((0.0,), "b")]:
        assert as_point(point_to_json(p)) == p


def test_rejects_non_points():
    with pytest.raises(TypeError):
        as_point(True)
    with pytest.raises(TypeError):
        as_point({"x": 1})
    with pytest.raises(ValueError):
        as_point([])
    with pytest.raises(ValueError):
        coordinates("a")
