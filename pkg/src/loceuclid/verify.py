"""Sampled verification of the metric claims for d_t and rho_t.

Each check maps a batch of sample points to per-sample violation magnitudes
(0 when the claim holds). A suite runs every check over seeded sample
blocks and condenses each into an ``AxiomReport`` that keeps the worst
sample as a witness, so a failure can be replayed from the report alone.

Samples are drawn in fixed-size blocks, block ``b`` from the stream
``default_rng([seed, salt, b])``; results do not depend on how blocks are
scheduled.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .geometry import angle_of_chord, d_E, random_isometry, random_orthogonal, sphere_point
from .rho_metric import IntervalEstimate, rho
from .sphere_metric import Param, d_t_sphere

BLOCK = 4096

SPHERE_AXIOMS = (
    "identity",
    "symmetry",
    "triangle",
    "squeeze",
    "chord_dependence",
    "small_value",
    "locally_euclidean",
    "isometry",
)
SPACE_AXIOMS = (
    "identity",
    "symmetry",
    "triangle",
    "squeeze",
    "small_distance",
    "locally_euclidean",
    "isometry",
    "convergence",
)


@dataclass
class AxiomReport:
    axiom: str
    suite: str
    samples: int
    max_violation: float
    tol: float
    seed: int
    t: float
    witness: dict = field(default_factory=dict)
    inconclusive: int = 0

    @property
    def passed(self) -> bool:
        return self.inconclusive == 0 and self.max_violation <= self.tol

    @property
    def status(self) -> str:
        if self.inconclusive:
            return "inconclusive"
        return "pass" if self.passed else "fail"

    def merge(self, other: AxiomReport) -> AxiomReport:
        worst = other if other.max_violation > self.max_violation else self
        return AxiomReport(
            self.axiom,
            self.suite,
            self.samples + other.samples,
            worst.max_violation,
            self.tol,
            self.seed,
            self.t,
            worst.witness,
            self.inconclusive + other.inconclusive,
        )

    def line(self) -> str:
        return (
            f"{self.status.upper():<12} {self.suite}/{self.axiom:<18} t={self.t:g} "
            f"samples={self.samples} max_violation={self.max_violation:.3e} "
            f"tol={self.tol:.1e} seed={self.seed}"
        )

    def record(self) -> dict:
        out = asdict(self)
        out["id"] = self.axiom
        out["pass"] = self.passed
        out["status"] = self.status
        return out


def format_reports(reports) -> str:
    return "\n".join(r.line() for r in reports)


def reports_to_jsonl(reports) -> str:
    return "\n".join(json.dumps(r.record(), sort_keys=True) for r in reports)


def all_passed(reports) -> bool:
    return all(r.passed for r in reports)


def any_inconclusive(reports) -> bool:
    return any(r.inconclusive for r in reports)


def block_rng(seed: int, salt: int, block: int) -> np.random.Generator:
    return np.random.default_rng([seed, salt, block])


# ---------------------------------------------------------------- sampling


def _uniform_sphere(rng, n):
    return sphere_point(rng.standard_normal((n, 3)))


def _at_chord(rng, p, chord):
    """Points at the given chord distance from each row of p, random azimuth."""
    theta = angle_of_chord(np.clip(chord, 0.0, 2.0))
    w = rng.standard_normal(p.shape)
    w -= np.einsum("ij,ij->i", w, p)[:, None] * p
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    theta = np.asarray(theta)[:, None]
    return sphere_point(np.cos(theta) * p + np.sin(theta) * w)


def _mixed_chords(rng, param, n):
    """Chord lengths concentrated where the branches of d_t meet or end."""
    kind = rng.integers(0, 4, n)
    spread = 10.0 ** rng.uniform(-9, -1, n)
    return np.select(
        [kind == 0, kind == 1, kind == 2],
        [
            rng.uniform(0, 2, n),
            param.c_star + spread * rng.choice([-1.0, 1.0], n),
            2.0 - spread,
        ],
        rng.uniform(0, 2 * param.t, n),
    ).clip(0.0, 2.0)


def sphere_samples(param: Param, rng, n):
    """Triples (p, q, r) on S^2 stressing the threshold and antipodal regions."""
    p = _uniform_sphere(rng, n)
    q = _at_chord(rng, p, _mixed_chords(rng, param, n))
    uniform_q = rng.random(n) < 0.25
    q[uniform_q] = _uniform_sphere(rng, int(uniform_q.sum()))
    r = _at_chord(rng, q, _mixed_chords(rng, param, n))
    mid = p + q
    norm = np.linalg.norm(mid, axis=1)
    # opposite the midpoint of p and q: both chords from r can be long
    opposite = (rng.random(n) < 0.3) & (norm > 1e-9)
    if opposite.any():
        jitter = 0.05 * rng.standard_normal((int(opposite.sum()), 3))
        r[opposite] = sphere_point(-mid[opposite] / norm[opposite, None] + jitter)
    return p, q, r


# ---------------------------------------------------------------- sphere


def _sphere_points(axiom, param, rng, n):
    """Sample points for one block of a sphere check."""
    p, q, r = sphere_samples(param, rng, n)
    if axiom == "triangle":
        return (p, q, r)
    if axiom == "chord_dependence":
        p2 = _uniform_sphere(rng, n)
        return (p, q, p2, _at_chord(rng, p2, d_E(p, q)))
    if axiom == "locally_euclidean":
        t = param.t
        q = _at_chord(rng, p, rng.uniform(0, 1.05 * t, n))
        r = _at_chord(rng, p, rng.uniform(0, 1.05 * t, n))
        return (p, q, r)
    if axiom == "isometry":
        rot = random_orthogonal(rng, n)
        return (p, q, np.einsum("nij,nj->ni", rot, p), np.einsum("nij,nj->ni", rot, q))
    if axiom not in SPHERE_AXIOMS:
        raise ValueError(f"unknown sphere axiom {axiom!r}")
    return (p, q)


def _sphere_check(axiom, param, metric, pts):
    """(violations, qualified) for a batch of sphere samples."""
    t = param.t
    ok = np.ones(len(pts[0]), dtype=bool)
    if axiom == "identity":
        p, q = pts
        false_zero = (metric(param, p, q) == 0) & (d_E(p, q) > 1e-12)
        v = np.abs(metric(param, p, p)) + false_zero
    elif axiom == "symmetry":
        p, q = pts
        v = np.abs(metric(param, p, q) - metric(param, q, p))
    elif axiom == "triangle":
        p, q, r = pts
        v = metric(param, p, r) - metric(param, p, q) - metric(param, q, r)
    elif axiom == "squeeze":
        p, q = pts
        de, dt = d_E(p, q), metric(param, p, q)
        v = np.maximum(t * de - dt, dt - de)
    elif axiom in ("chord_dependence", "isometry"):
        p, q, p2, q2 = pts
        v = np.abs(metric(param, p, q) - metric(param, p2, q2))
    elif axiom == "small_value":
        p, q = pts
        dt = metric(param, p, q)
        ok = dt < 2 * t - 1e-9
        v = np.where(ok, np.abs(dt - d_E(p, q)), 0.0)
    elif axiom == "locally_euclidean":
        # radius t around p, taken from the ball argument in the R^3 proof
        p, q, r = pts
        ok = (metric(param, p, q) < t) & (metric(param, p, r) < t)
        v = np.where(ok, np.abs(metric(param, q, r) - d_E(q, r)), 0.0)
    else:
        raise ValueError(f"unknown sphere axiom {axiom!r}")
    return np.maximum(np.atleast_1d(np.asarray(v, dtype=float)), 0.0), ok


def _sphere_block(param, metric, axiom, seed, salt, block, size, tol):
    rng = block_rng(seed, salt, block)
    pts = _sphere_points(axiom, param, rng, size)
    v, ok = _sphere_check(axiom, param, metric, pts)
    i = int(np.argmax(v))
    witness = {
        "points": [pt[i].tolist() for pt in pts],
        "block": block,
        "index": i,
        "qualified": int(ok.sum()),
    }
    return AxiomReport(axiom, "sphere", size, float(v[i]), tol, seed, param.t, witness)


def run_sphere_suite(
    param: Param,
    n_samples: int = 100_000,
    seed: int = 0,
    tol: float = 1e-9,
    metric: Callable | None = None,
    axioms=SPHERE_AXIOMS,
    workers: int = 1,
) -> list[AxiomReport]:
    """Check the metric claims for d_t on S^2 on ``n_samples`` samples each.

    ``metric(param, p, q)`` must broadcast over rows; it defaults to
    ``d_t_sphere`` and exists so broken metrics can be fed to the harness.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    metric = metric or d_t_sphere
    reports = []
    for salt, axiom in enumerate(axioms):
        jobs = [
            (b, min(BLOCK, n_samples - b * BLOCK)) for b in range(math.ceil(n_samples / BLOCK))
        ]

        def run(job, axiom=axiom, salt=salt):
            return _sphere_block(param, metric, axiom, seed, salt, job[0], job[1], tol)

        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                parts = list(pool.map(run, jobs))
        else:
            parts = [run(job) for job in jobs]
        report = parts[0]
        for part in parts[1:]:
            report = report.merge(part)
        qualified = sum(part.witness["qualified"] for part in parts)
        report.witness = dict(report.witness, qualified=qualified)
        reports.append(report)
    return reports


def replay_sphere(report: AxiomReport, metric: Callable | None = None) -> float:
    """Recompute a sphere report's worst violation from its witness points."""
    pts = tuple(np.asarray(pt, dtype=float)[None] for pt in report.witness["points"])
    v, _ = _sphere_check(report.axiom, Param(report.t), metric or d_t_sphere, pts)
    return float(v[0])


# ---------------------------------------------------------------- space


def default_bracket(tol: float = 1e-9):
    def bracket(param, p, q) -> IntervalEstimate:
        return rho(param, p, q, tol=tol)

    return bracket


def _in_ball(rng, center, radius):
    u = sphere_point(rng.standard_normal(3))
    return center + u * radius * rng.random() ** (1.0 / 3.0)


def _space_sample(axiom, param, rng, box):
    """One sample's points for a space check."""
    half = box / 2.0
    P, Q, R = (rng.uniform(-half, half, 3) for _ in range(3))
    t = param.t
    if axiom == "small_distance":
        Q = P + sphere_point(rng.standard_normal(3)) * rng.uniform(0, 2 * t - 1e-6)
        return (P, Q)
    if axiom == "locally_euclidean":
        return (P, _in_ball(rng, P, t), _in_ball(rng, P, t))
    if axiom == "identity":
        Q = P + sphere_point(rng.standard_normal(3)) * 10.0 ** rng.uniform(-4, 1)
        return (P, Q)
    if axiom == "isometry":
        iso = random_isometry(rng, box=half)
        return (P, Q, iso(P), iso(Q))
    if axiom == "triangle":
        return (P, Q, R)
    return (P, Q)


def _space_violation(axiom, param, bracket, pts, tol):
    """(violation, inconclusive, qualified) for one sample of a space check."""
    t = param.t
    if axiom == "triangle":
        P, Q, R = pts
        ests = [bracket(param, P, R), bracket(param, P, Q), bracket(param, Q, R)]
        v = ests[0].lo - ests[1].hi - ests[2].hi
    elif axiom == "locally_euclidean":
        P, Q, R = pts
        ests = [bracket(param, P, Q), bracket(param, P, R)]
        if not all(e.converged for e in ests):
            return 0.0, True, False
        if not (ests[0].hi < t and ests[1].hi < t):
            return 0.0, False, False
        e = bracket(param, Q, R)
        ests.append(e)
        de = d_E(Q, R)
        v = max(abs(e.hi - de), abs(e.lo - de))
    elif axiom == "isometry":
        P, Q, P2, Q2 = pts
        ests = [bracket(param, P, Q), bracket(param, P2, Q2)]
        v = abs(ests[0].lo - ests[1].lo) + abs(ests[0].hi - ests[1].hi)
    else:
        P, Q = pts
        e = bracket(param, P, Q)
        ests = [e]
        D = d_E(P, Q)
        if axiom == "identity":
            zero = bracket(param, P, P)
            ests.append(zero)
            v = zero.hi + (D if e.lo <= 0 else 0.0)
        elif axiom == "symmetry":
            back = bracket(param, Q, P)
            ests.append(back)
            v = abs(e.lo - back.lo) + abs(e.hi - back.hi)
        elif axiom == "squeeze":
            v = max(t * D - e.lo, e.hi - D)
        elif axiom == "small_distance":
            v = max(e.hi - D, D - e.lo, e.hi - e.lo)
        elif axiom == "convergence":
            # sup (D - hi)/D must stay within the (1 - t) rate
            v = max((D - e.hi) / D - (1.0 - t), e.hi - D) if D > 0 else e.hi
        else:
            raise ValueError(f"unknown space axiom {axiom!r}")
    return max(float(v), 0.0), not all(e.converged for e in ests), True


def run_space_suite(
    param: Param,
    n_samples: int = 1000,
    box_size: float = 20.0,
    seed: int = 0,
    tol: float = 1e-5,
    bracket: Callable | None = None,
    axioms=SPACE_AXIOMS,
    tolerances: dict | None = None,
) -> list[AxiomReport]:
    """Check the metric claims for rho_t using certified brackets.

    A claim passes only if it holds at the worst values consistent with
    the brackets. Unconverged brackets make a report inconclusive, never a
    pass. Per-check tolerances default to ``tol`` except the isometry check
    (1e-9) and small_distance (1e-6); ``tolerances`` overrides them by name.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    bracket = bracket or default_bracket()
    tols = {"isometry": 1e-9, "small_distance": min(tol, 1e-6), "locally_euclidean": 2 * tol}
    tols.update(tolerances or {})
    reports = []
    for salt, axiom in enumerate(axioms):
        atol = tols.get(axiom, tol)
        worst, witness, inconclusive, qualified = 0.0, {}, 0, 0
        for b in range(math.ceil(n_samples / BLOCK)):
            rng = block_rng(seed, 100 + salt, b)
            for i in range(min(BLOCK, n_samples - b * BLOCK)):
                pts = _space_sample(axiom, param, rng, box_size)
                v, unsure, counted = _space_violation(axiom, param, bracket, pts, atol)
                inconclusive += unsure
                qualified += counted
                if v > worst or not witness:
                    worst = max(v, worst)
                    witness = {"points": [list(map(float, pt)) for pt in pts], "block": b, "index": i}
        witness["qualified"] = qualified
        reports.append(
            AxiomReport(axiom, "space", n_samples, worst, atol, seed, param.t, witness, inconclusive)
        )
    return reports


def replay_space(report: AxiomReport, bracket: Callable | None = None) -> float:
    bracket = bracket or default_bracket()
    pts = tuple(np.asarray(pt, dtype=float) for pt in report.witness["points"])
    v, _, _ = _space_violation(report.axiom, Param(report.t), bracket, pts, report.tol)
    return v
