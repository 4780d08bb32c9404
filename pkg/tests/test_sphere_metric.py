import math

import numpy as np
import pytest
from conftest import alpha_mp, c_star_mp, chord_cost_mp
from hypothesis import given, settings
from hypothesis import strategies as st

from loceuclid import (
    ChainStepError,
    DomainError,
    Param,
    RangeError,
    antipode,
    chord_cost,
    chord_of_angle,
    d_t_pair,
    d_t_sphere,
    point3,
    sphere_point,
)

ts = st.floats(1e-6, 1.0)


@pytest.mark.parametrize("t", [0.0, -0.1, 1.0000001, math.nan, math.inf])
def test_param_domain(t):
    with pytest.raises(DomainError):
        Param(t)


def test_param_t_one():
    p = Param(1.0)
    assert p.alpha == 0.0
    assert p.c_star == 2.0


@pytest.mark.parametrize("t", [0.05, 0.3, 0.6, 0.99, 1.0])
def test_param_against_high_precision(t):
    p = Param(t)
    assert p.alpha == pytest.approx(alpha_mp(t), abs=1e-14)
    assert p.c_star == pytest.approx(c_star_mp(t), abs=1e-14)


def test_param_t06_values():
    p = Param(0.6)
    assert p.alpha == pytest.approx(0.3472491328, abs=1e-9)
    assert p.c_star == pytest.approx(1.880624847, abs=1e-9)
    assert p.threshold_angle == pytest.approx(2.4470943879632373, abs=1e-12)


def test_param_t099():
    p = Param(0.99)
    assert 0 < p.alpha < 0.01
    assert p.c_star < 2.0


@settings(max_examples=300)
@given(ts)
def test_c_star_identity(t):
    p = Param(t)
    assert abs(2 * math.cos(p.alpha) - (t + math.sqrt(2 - t * t))) <= 1e-10
    assert math.sqrt(2) <= p.c_star + 1e-12 and p.c_star <= 2.0
    assert 0.0 <= p.alpha < math.pi / 4


@settings(max_examples=300)
@given(ts, st.floats(0.0, 2.0))
def test_chord_cost_against_oracle(t, c):
    assert chord_cost(Param(t), c) == pytest.approx(chord_cost_mp(t, c), abs=1e-12)


def test_chord_cost_examples():
    p = Param(0.6)
    assert chord_cost(p, 1.0) == 1.0
    assert chord_cost(p, 1.9) == pytest.approx(1.8244997998398398, abs=1e-12)
    assert chord_cost(p, 2.0) == pytest.approx(1.2)
    assert chord_cost(p, 0.0) == 0.0


def test_chord_cost_array_matches_scalar():
    p = Param(0.45)
    cs = np.linspace(0, 2, 101)
    np.testing.assert_allclose(chord_cost(p, cs), [chord_cost(p, float(c)) for c in cs], atol=0)


@pytest.mark.parametrize("c", [-0.1, 2.1, math.nan])
def test_chord_cost_range(c):
    with pytest.raises(RangeError):
        chord_cost(Param(0.5), c)
    with pytest.raises(RangeError):
        chord_cost(Param(0.5), np.array([1.0, c]))


@settings(max_examples=200)
@given(st.floats(0.01, 0.999))
def test_chord_cost_continuous_at_threshold(t):
    # the jump shrinks linearly in eps; the concave shortcut branch is
    # steepest at the right end of the interval
    p = Param(t)
    for eps in (1e-4, 1e-6, 1e-8):
        c = p.c_star + eps
        if c >= 2:
            continue
        slope = c / math.sqrt(4 - c * c)
        jump = abs(chord_cost(p, p.c_star - eps) - chord_cost(p, p.c_star + eps))
        assert jump <= (1 + slope) * eps * 1.01 + 1e-14


def test_chord_cost_squeeze(param):
    cs = np.linspace(0, 2, 2001)
    f = chord_cost(param, cs)
    assert np.all(param.t * cs <= f + 1e-15)
    assert np.all(f <= cs + 1e-15)


def test_d_t_sphere_examples():
    p = Param(0.6)
    e1 = point3(1, 0, 0)
    assert d_t_sphere(p, e1, e1) == 0.0
    assert d_t_sphere(p, e1, antipode(e1)) == pytest.approx(1.2)
    theta = 3.0
    q = point3(math.cos(theta), math.sin(theta), 0)
    assert d_t_sphere(p, e1, q) == pytest.approx(1.3414744033, abs=1e-9)


def test_d_t_sphere_threshold_takes_euclidean_branch():
    p = Param(0.6)
    theta = p.threshold_angle
    q = point3(math.cos(theta), math.sin(theta), 0)
    assert d_t_sphere(p, point3(1, 0, 0), q) == pytest.approx(chord_of_angle(theta), abs=1e-12)


def test_d_t_sphere_depends_only_on_chord(param):
    rng = np.random.default_rng(11)
    P = sphere_point(rng.standard_normal((500, 3)))
    Q = sphere_point(rng.standard_normal((500, 3)))
    np.testing.assert_allclose(
        d_t_sphere(param, P, Q), chord_cost(param, np.linalg.norm(P - Q, axis=1)), atol=1e-10
    )


def test_d_t_pair_examples():
    p = Param(0.6)
    assert d_t_pair(p, point3(0, 0, 0), point3(1, 0, 0)) == pytest.approx(1.0, abs=1e-12)
    assert d_t_pair(p, point3(0, 0, 0), point3(2, 0, 0)) == pytest.approx(1.2, abs=1e-9)
    with pytest.raises(ChainStepError):
        d_t_pair(p, point3(0, 0, 0), point3(2.5, 0, 0))


def test_d_t_pair_embedding_independent():
    p = Param(0.35)
    rng = np.random.default_rng(4)
    x, y = point3(1, 2, 3), point3(1, 2, 3) + 1.95 * sphere_point([1, 1, 0])
    vals = [d_t_pair(p, x, y, rng) for _ in range(20)]
    assert max(vals) - min(vals) <= 1e-10
    assert vals[0] == pytest.approx(chord_cost(p, 1.95), abs=1e-10)
