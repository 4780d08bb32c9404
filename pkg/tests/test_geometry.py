import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loceuclid import (
    Isometry,
    NoEmbeddingError,
    RangeError,
    angle_of_chord,
    antipode,
    apply,
    central_angle,
    chord_of_angle,
    d_E,
    point3,
    random_isometry,
    sphere_point,
    unit_sphere_through,
)
from loceuclid.geometry import random_orthogonal

coords = st.floats(-50, 50, allow_nan=False)
vec = st.tuples(coords, coords, coords).map(np.array)


def test_d_E_basic():
    assert d_E(point3(0, 0, 0), point3(3, 4, 0)) == 5.0
    assert d_E([1, 2, 3], [1, 2, 3]) == 0.0


def test_d_E_broadcasts():
    p = np.zeros((4, 3))
    q = np.eye(4, 3)
    np.testing.assert_allclose(d_E(p, q), [1, 1, 1, 0])


def test_point3_rejects_bad_shape():
    with pytest.raises(ValueError):
        point3([1.0, 2.0])


def test_sphere_point_normalizes():
    assert np.linalg.norm(sphere_point([3.0, 0.0, 4.0])) == pytest.approx(1.0, abs=1e-15)


def test_central_angle_examples():
    e1, e2 = point3(1, 0, 0), point3(0, 1, 0)
    assert central_angle(e1, e2) == pytest.approx(math.pi / 2, abs=1e-15)
    assert central_angle(e1, antipode(e1)) == pytest.approx(math.pi, abs=1e-15)
    assert central_angle(e1, e1) == 0.0


def test_chord_angle_round_trip():
    for theta in np.linspace(0, math.pi, 50):
        assert angle_of_chord(chord_of_angle(theta)) == pytest.approx(theta, abs=1e-7)
    assert chord_of_angle(math.pi) == pytest.approx(2.0)


def test_chord_angle_ranges():
    with pytest.raises(RangeError):
        chord_of_angle(4.0)
    with pytest.raises(RangeError):
        angle_of_chord(2.5)


def test_chord_matches_euclidean():
    rng = np.random.default_rng(3)
    p = sphere_point(rng.standard_normal((200, 3)))
    q = sphere_point(rng.standard_normal((200, 3)))
    np.testing.assert_allclose(chord_of_angle(central_angle(p, q)), d_E(p, q), atol=1e-14)


def test_random_orthogonal_is_orthogonal():
    rng = np.random.default_rng(0)
    rots = random_orthogonal(rng, 50)
    eye = np.broadcast_to(np.eye(3), rots.shape)
    np.testing.assert_allclose(np.einsum("nji,njk->nik", rots, rots), eye, atol=1e-12)
    dets = np.linalg.det(rots)
    assert set(np.round(dets).astype(int)) <= {-1, 1}
    assert np.all(np.linalg.det(random_orthogonal(rng, 50, reflect=False)) > 0)


def test_isometry_rejects_non_orthogonal():
    with pytest.raises(ValueError):
        Isometry(np.diag([1.0, 2.0, 1.0]), np.zeros(3))


@settings(max_examples=100, deadline=None)
@given(vec, vec, st.integers(0, 2**32 - 1))
def test_isometries_preserve_distance(p, q, seed):
    iso = random_isometry(np.random.default_rng(seed))
    assert d_E(apply(iso, p), apply(iso, q)) == pytest.approx(d_E(p, q), abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(vec, st.floats(0, 2), st.integers(0, 2**32 - 1))
def test_unit_sphere_through_contains_both(x, d, seed):
    rng = np.random.default_rng(seed)
    u = sphere_point(rng.standard_normal(3))
    y = x + d * u
    emb = unit_sphere_through(x, y, rng)
    for pt in (x, y):
        assert d_E(emb.center, pt) == pytest.approx(1.0, abs=1e-9)
        np.testing.assert_allclose(emb.to_space(emb.to_sphere(pt)), pt, atol=1e-9)
    assert d_E(emb.to_sphere(x), emb.to_sphere(y)) == pytest.approx(d, abs=1e-9)


def test_unit_sphere_through_too_far():
    with pytest.raises(NoEmbeddingError):
        unit_sphere_through(point3(0, 0, 0), point3(2.001, 0, 0))
