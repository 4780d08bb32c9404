import json

import numpy as np
import pytest

from loceuclid import (
    Param,
    all_passed,
    chord_cost,
    d_E,
    format_reports,
    replay_space,
    replay_sphere,
    reports_to_jsonl,
    run_space_suite,
    run_sphere_suite,
)
from loceuclid.verify import SPHERE_AXIOMS


def drop_antipodal(param, p, q):
    c = d_E(p, q)
    return np.where(c <= param.c_star, c, 2.0 * param.t)


def squared(param, p, q):
    return d_E(p, q) ** 2


@pytest.mark.parametrize("t", [0.3, 0.6, 1.0])
def test_sphere_suite_passes(t):
    reports = run_sphere_suite(Param(t), 8000, seed=3)
    assert [r.axiom for r in reports] == list(SPHERE_AXIOMS)
    assert all_passed(reports), format_reports(reports)


def test_t_one_has_zero_violations():
    reports = run_sphere_suite(Param(1.0), 4000, axioms=("triangle", "squeeze", "small_value"))
    assert all(r.max_violation == 0.0 for r in reports)


def test_mutation_drop_antipodal_is_caught():
    reports = run_sphere_suite(Param(0.3), 8000, metric=drop_antipodal)
    failed = {r.axiom for r in reports if not r.passed}
    assert "triangle" in failed


def test_mutation_squared_is_caught():
    reports = run_sphere_suite(Param(0.5), 8000, metric=squared)
    failed = {r.axiom for r in reports if not r.passed}
    assert {"triangle", "squeeze"} <= failed


def test_mutation_in_space_bracket_is_caught():
    from loceuclid import IntervalEstimate

    def too_small(param, p, q):
        D = d_E(p, q)
        return IntervalEstimate(0.5 * param.t * D, 0.5 * param.t * D, D, param.t)

    reports = run_space_suite(Param(0.6), 30, axioms=("squeeze",), bracket=too_small)
    assert not reports[0].passed


def test_unconverged_bracket_is_inconclusive():
    from loceuclid import IntervalEstimate

    def vague(param, p, q):
        D = d_E(p, q)
        return IntervalEstimate(param.t * D, D, D, param.t, converged=False)

    r = run_space_suite(Param(0.6), 10, axioms=("squeeze",), bracket=vague)[0]
    assert r.inconclusive == 10 and r.status == "inconclusive" and not r.passed


def test_sphere_blocks_are_order_independent():
    a = run_sphere_suite(Param(0.6), 10_000, seed=5, axioms=("triangle",))
    b = run_sphere_suite(Param(0.6), 10_000, seed=5, axioms=("triangle",), workers=4)
    assert a[0].max_violation == b[0].max_violation
    assert a[0].witness == b[0].witness


def test_replay_sphere_witness():
    reports = run_sphere_suite(Param(0.3), 5000, metric=drop_antipodal, axioms=("triangle",))
    r = reports[0]
    assert replay_sphere(r, metric=drop_antipodal) == pytest.approx(r.max_violation, abs=1e-12)


def test_replay_space_witness():
    r = run_space_suite(Param(0.6), 20, axioms=("triangle",))[0]
    assert replay_space(r) == pytest.approx(r.max_violation, abs=1e-12)


def test_report_serialization():
    reports = run_space_suite(Param(0.6), 5, axioms=("identity", "symmetry"))
    lines = reports_to_jsonl(reports).splitlines()
    assert len(lines) == 2
    rec = json.loads(lines[0])
    for key in ("id", "samples", "max_violation", "pass", "seed"):
        assert key in rec
    text = format_reports(reports)
    assert text.splitlines()[0].startswith("PASS")


def test_sphere_suite_rejects_empty():
    with pytest.raises(ValueError):
        run_sphere_suite(Param(0.5), 0)


def test_chord_cost_metric_consistent():
    # the harness samples through d_t_sphere; chord_cost must give the same numbers
    param = Param(0.6)
    reports = run_sphere_suite(
        param, 3000, metric=lambda prm, p, q: chord_cost(prm, np.minimum(d_E(p, q), 2.0))
    )
    assert all_passed(reports)
