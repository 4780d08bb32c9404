"""Chains of points with steps of length at most 2, and their step profiles.

A chain's d_t cost depends only on its step lengths, so a chain is reduced
to a ``StepProfile``: the step lengths plus the endpoint separation D. A
profile comes from some chain exactly when the steps and D can close up
into a polygon, which ``realizable`` checks and ``realize_chain`` builds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ChainStepError, RealizationError
from .geometry import STEP_SLACK, d_E
from .sphere_metric import Param, chord_cost

# absolute slack on the length equalities checked by ``realizable``
REALIZE_TOL = 1e-12


@dataclass(frozen=True)
class Chain:
    """Points X_0, ..., X_n (n >= 1) with every step of length <= 2."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 2:
            raise ValueError("a chain needs at least two points of R^3")
        if not np.all(np.isfinite(pts)):
            raise ValueError("chain has non-finite coordinates")
        steps = d_E(pts[:-1], pts[1:])
        if np.any(steps > 2.0 + STEP_SLACK):
            i = int(np.argmax(steps))
            raise ChainStepError(f"step {i + 1} has length {steps[i]!r} > 2")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def steps(self) -> np.ndarray:
        return d_E(self.points[:-1], self.points[1:])

    def snapped_steps(self) -> np.ndarray:
        """Step lengths with rounding noise around 2 snapped to exactly 2.

        The cost has infinite slope at a chord of 2, so one ulp below 2
        would otherwise add ~3e-8 to a step that was built to be full.
        """
        steps = self.steps
        return np.where(steps >= 2.0 - STEP_SLACK, 2.0, steps)

    def __len__(self):
        return len(self.points) - 1

    def reversed(self) -> Chain:
        return Chain(self.points[::-1])

    def profile(self) -> StepProfile:
        return StepProfile(
            tuple(float(c) for c in self.snapped_steps()),
            d_E(self.points[0], self.points[-1]),
        )


def chain_cost(param: Param, chain) -> float:
    """Sum of d_t over consecutive steps of ``chain`` (a Chain or point array)."""
    if not isinstance(chain, Chain):
        chain = Chain(chain)
    return math.fsum(chord_cost(param, chain.snapped_steps()))


@dataclass(frozen=True)
class StepProfile:
    lengths: tuple
    target: float

    def __post_init__(self):
        lengths = tuple(float(c) for c in self.lengths)
        if any(not (0.0 <= c <= 2.0) for c in lengths):
            raise ValueError(f"step lengths must lie in [0, 2]: {lengths}")
        if not (self.target >= 0.0 and math.isfinite(self.target)):
            raise ValueError(f"target distance must be finite and >= 0: {self.target}")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "target", float(self.target))

    def __len__(self):
        return len(self.lengths)

    @property
    def total(self) -> float:
        return math.fsum(self.lengths)

    def cost(self, param: Param) -> float:
        return math.fsum(chord_cost(param, c) for c in self.lengths)


def realizable(profile: StepProfile, tol: float = REALIZE_TOL) -> bool:
    """Whether some chain from P to Q, |PQ| = D, has exactly these step lengths.

    Equivalent to: the steps reach (sum >= D), no single step is longer than
    D plus all the others, and a lone step equals D.
    """
    n = len(profile)
    if n == 0:
        return False
    D = profile.target
    total = profile.total
    longest = max(profile.lengths)
    slack = tol * (1.0 + total + D)
    if total < D - slack:
        return False
    if 2.0 * longest > D + total + slack:
        return False
    if n == 1 and abs(profile.lengths[0] - D) > tol:
        return False
    return True


def _plane_basis(u: np.ndarray, rng) -> np.ndarray:
    """Unit vector perpendicular to the unit vector ``u``."""
    if rng is not None:
        v = np.random.default_rng(rng).standard_normal(3)
    else:
        v = np.zeros(3)
        v[int(np.argmin(np.abs(u)))] = 1.0
    v = v - np.dot(v, u) * u
    return v / np.linalg.norm(v)


def _planar_layout(lengths, D):
    """2-D vertices (0,0) -> ... -> (D,0) with the given step lengths.

    Splits the steps at the one containing the half-way mark of the total
    length; the steps before it form a straight rod from the start, the steps
    after it a straight rod into the end, and the middle step bridges the two
    rods (a four-bar linkage, always closable for realizable profiles).
    """
    c = np.asarray(lengths, dtype=float)
    n = len(c)
    prefix = np.concatenate([[0.0], np.cumsum(c)])
    total = prefix[-1]
    k = int(np.searchsorted(prefix[1:], total / 2.0))
    k = min(k, n - 1)
    x = prefix[k]
    y = total - prefix[k + 1]
    ck = c[k]

    # distance from the first rod's tip A to the end point
    lo = max(abs(D - x), abs(y - ck))
    hi = min(D + x, y + ck)
    delta = min(max((lo + hi) / 2.0, abs(D - x)), D + x)

    if x == 0.0:
        A = np.zeros(2)
    elif D == 0.0:
        A = np.array([x, 0.0])
    else:
        cos_phi = np.clip((x * x + D * D - delta * delta) / (2.0 * x * D), -1.0, 1.0)
        A = x * np.array([cos_phi, math.sqrt(max(0.0, 1.0 - cos_phi * cos_phi))])

    end = np.array([D, 0.0])
    if y == 0.0:
        B = end
    else:
        to_end = end - A
        dist = np.linalg.norm(to_end)
        if dist == 0.0:
            B = end + np.array([0.0, -y])
        else:
            e = to_end / dist
            e_perp = np.array([e[1], -e[0]])
            along = (ck * ck - y * y + dist * dist) / (2.0 * dist)
            across = math.sqrt(max(0.0, ck * ck - along * along))
            B = A + along * e + across * e_perp

    verts = np.empty((n + 1, 2))
    for j in range(k + 1):
        verts[j] = A * (prefix[j] / x) if x > 0 else 0.0
    verts[k + 1] = B
    for j in range(k + 2, n + 1):
        verts[j] = B + (end - B) * ((prefix[j] - prefix[k + 1]) / y) if y > 0 else end
    verts[0] = 0.0
    verts[n] = end
    return verts


def realize_chain(profile: StepProfile, p, q, rng=None) -> Chain:
    """A planar chain from p to q whose steps have the profile's lengths."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    D = d_E(p, q)
    if abs(D - profile.target) > 1e-9:
        raise RealizationError(
            f"endpoints are {D!r} apart but the profile targets {profile.target!r}"
        )
    if not realizable(profile):
        raise RealizationError(f"profile {profile.lengths} cannot close over D={profile.target}")
    if D > 0:
        u = (q - p) / D
    else:
        u = np.array([1.0, 0.0, 0.0])
    v = _plane_basis(u, rng)
    verts = _planar_layout(profile.lengths, D)
    pts = p + np.outer(verts[:, 0], u) + np.outer(verts[:, 1], v)
    pts[0] = p
    pts[-1] = q
    return Chain(pts)
