"""The deformed metric d_t on the unit sphere and its chord-cost form.

For 0 < t <= 1 the threshold angle is

    alpha = arcsin((sqrt(2 - t^2) - t) / 2)

and d_t(P, Q) is the chord |P - Q| when the central angle is at most
pi - 2*alpha, otherwise 2t + |(-P) - Q|. Since d_t only depends on the chord
c = |P - Q|, it is also exposed as the one-variable function ``chord_cost``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ChainStepError, DomainError, RangeError
from .geometry import STEP_SLACK, antipode, central_angle, d_E, unit_sphere_through


@dataclass(frozen=True)
class Param:
    """Deformation parameter t with its derived constants.

    ``alpha`` is the threshold angle; ``c_star`` the chord of the angle
    pi - 2*alpha, where the Euclidean and antipodal branches meet.
    """

    t: float
    alpha: float = field(init=False)
    c_star: float = field(init=False)

    def __post_init__(self):
        t = self.t
        if not (isinstance(t, (int, float)) and math.isfinite(t) and 0.0 < t <= 1.0):
            raise DomainError(f"t must lie in (0, 1], got {t!r}")
        alpha = math.asin((math.sqrt(2.0 - t * t) - t) / 2.0)
        object.__setattr__(self, "t", float(t))
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "c_star", 2.0 * math.cos(alpha))

    @property
    def threshold_angle(self) -> float:
        return math.pi - 2.0 * self.alpha


def make_param(t: float) -> Param:
    return Param(t)


def d_t_sphere(param: Param, p, q):
    """d_t between points of S^2 (broadcasts over leading axes).

    The angle test uses ``<=`` so that a pair sitting exactly on the
    threshold takes the Euclidean branch.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    theta = central_angle(p, q)
    euclid = d_E(p, q)
    shortcut = 2.0 * param.t + d_E(antipode(p), q)
    out = np.where(np.asarray(theta) <= param.threshold_angle, euclid, shortcut)
    return float(out) if out.ndim == 0 else out


def chord_cost(param: Param, c):
    """d_t of any sphere pair at chord distance ``c`` in [0, 2].

    Equal to ``c`` up to ``c_star`` and to ``2t + sqrt(4 - c^2)`` beyond it.
    """
    if isinstance(c, (float, int)):
        if not 0.0 <= c <= 2.0:
            raise RangeError(f"chord outside [0, 2]: {c}")
        if c <= param.c_star:
            return float(c)
        return 2.0 * param.t + math.sqrt((2.0 - c) * (2.0 + c))
    c = np.asarray(c, dtype=float)
    if np.any(c < 0) or np.any(c > 2) or np.any(np.isnan(c)):
        raise RangeError(f"chord outside [0, 2]: {c}")
    # (2 - c)(2 + c) keeps precision as c -> 2
    shortcut = 2.0 * param.t + np.sqrt((2.0 - c) * (2.0 + c))
    out = np.where(c <= param.c_star, c, shortcut)
    return float(out) if out.ndim == 0 else out


def d_t_pair(param: Param, x, y, rng=None) -> float:
    """d_t between two points of R^3 at most 2 apart.

    The pair is pulled back to S^2 through a randomly sampled unit sphere
    containing both points; the value does not depend on which sphere.
    """
    d = d_E(x, y)
    if d > 2.0 + STEP_SLACK:
        raise ChainStepError(f"step of length {d!r} exceeds 2")
    emb = unit_sphere_through(x, y, rng)
    return d_t_sphere(param, emb.to_sphere(x), emb.to_sphere(y))
