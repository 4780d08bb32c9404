"""Floating-point primitives for R^3 and the unit sphere S^2.

Points are plain ``numpy`` arrays with a trailing axis of length 3, so every
function here broadcasts over leading axes. The helpers ``point3`` and
``sphere_point`` validate and normalize single points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoEmbeddingError, RangeError

ORIGIN = np.zeros(3)

# slack allowed on the "step <= 2" constraint for floating-point inputs
STEP_SLACK = 1e-12


def point3(x, y=None, z=None) -> np.ndarray:
    """Build a finite point of R^3 from three coordinates or one 3-sequence."""
    if y is None and z is None:
        arr = np.array(x, dtype=float)
    else:
        arr = np.array([x, y, z], dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"expected 3 coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"non-finite coordinates: {arr}")
    return arr


def sphere_point(u) -> np.ndarray:
    """Normalize ``u`` onto S^2 (centered at the origin, radius 1)."""
    arr = np.asarray(u, dtype=float)
    norm = np.linalg.norm(arr, axis=-1, keepdims=True)
    if np.any(norm == 0) or not np.all(np.isfinite(arr)):
        raise ValueError("cannot project a zero or non-finite vector onto S^2")
    return arr / norm


def d_E(p, q):
    """Euclidean distance, broadcasting over leading axes."""
    diff = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
    if diff.ndim == 1:
        # hypot rescales, so tiny nonzero offsets never underflow to 0
        return math.hypot(*diff)
    return np.sqrt(np.einsum("...i,...i->...", diff, diff))


def central_angle(p, q):
    """Angle at the origin between unit vectors p and q, in [0, pi].

    Uses atan2(|p x q|, p . q), which keeps full precision near 0 and pi.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    cross = np.linalg.norm(np.cross(p, q), axis=-1)
    dot = np.einsum("...i,...i->...", p, q)
    out = np.arctan2(cross, dot)
    return float(out) if out.ndim == 0 else out


def chord_of_angle(theta):
    """Chord length 2 sin(theta/2) of a central angle theta in [0, pi]."""
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0) or np.any(theta > np.pi) or np.any(np.isnan(theta)):
        raise RangeError(f"angle outside [0, pi]: {theta}")
    out = 2.0 * np.sin(theta / 2.0)
    return float(out) if out.ndim == 0 else out


def angle_of_chord(c):
    """Central angle 2 arcsin(c/2) subtended by a chord c in [0, 2]."""
    c = np.asarray(c, dtype=float)
    if np.any(c < 0) or np.any(c > 2) or np.any(np.isnan(c)):
        raise RangeError(f"chord outside [0, 2]: {c}")
    out = 2.0 * np.arcsin(c / 2.0)
    return float(out) if out.ndim == 0 else out


def antipode(p):
    return -np.asarray(p, dtype=float)


def _unit_perpendicular(axis: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """A uniformly random unit vector orthogonal to the unit vector ``axis``."""
    while True:
        v = rng.standard_normal(3)
        v -= np.dot(v, axis) * axis
        n = np.linalg.norm(v)
        if n > 1e-8:
            return v / n


def haar_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform random element of SO(3) from a sign-corrected QR factorization."""
    return random_orthogonal(rng, 1, reflect=False)[0]


def random_orthogonal(rng: np.random.Generator, n: int, reflect: bool = True) -> np.ndarray:
    """Stack of n uniform random orthogonal 3x3 matrices.

    With ``reflect`` each matrix has determinant -1 with probability 1/2,
    otherwise all are rotations.
    """
    q, r = np.linalg.qr(rng.standard_normal((n, 3, 3)))
    q = q * np.sign(np.diagonal(r, axis1=1, axis2=2))[:, None, :]
    flip = np.linalg.det(q) < 0
    if reflect:
        flip ^= rng.random(n) < 0.5
    q[flip, :, 0] *= -1.0
    return q


@dataclass(frozen=True)
class Isometry:
    """Euclidean isometry ``x -> rotation @ x + translation``.

    ``rotation`` may have determinant -1 (a reflection).
    """

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rot = np.array(self.rotation, dtype=float)
        shift = np.array(self.translation, dtype=float)
        if rot.shape != (3, 3) or shift.shape != (3,):
            raise ValueError("rotation must be 3x3 and translation a 3-vector")
        if np.max(np.abs(rot.T @ rot - np.eye(3))) > 1e-12:
            raise ValueError("rotation part is not orthogonal")
        rot.flags.writeable = False
        shift.flags.writeable = False
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", shift)

    @classmethod
    def identity(cls) -> Isometry:
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def translation_by(cls, v) -> Isometry:
        return cls(np.eye(3), point3(v))

    def __call__(self, p):
        return apply(self, p)


def apply(iso: Isometry, p):
    """Apply ``iso`` to a point or an array of points."""
    return np.asarray(p, dtype=float) @ iso.rotation.T + iso.translation


def random_isometry(rng=None, box: float = 10.0, linear_only: bool = False) -> Isometry:
    """Random rotation, reflected with probability 1/2, plus a translation.

    Translation coordinates are uniform in [-box, box]. With ``linear_only``
    the translation is zero so the isometry fixes the origin (and S^2).
    """
    rng = np.random.default_rng(rng)
    rot = random_orthogonal(rng, 1)[0]
    shift = np.zeros(3) if linear_only else rng.uniform(-box, box, size=3)
    return Isometry(rot, shift)


@dataclass(frozen=True)
class SphereEmbedding:
    """Isometric embedding u -> center + frame @ u of S^2 into R^3."""

    center: np.ndarray
    frame: np.ndarray

    def to_space(self, u):
        return self.center + np.asarray(u, dtype=float) @ self.frame.T

    def to_sphere(self, x):
        """Pull a point of the embedded sphere back to S^2."""
        local = (np.asarray(x, dtype=float) - self.center) @ self.frame
        return sphere_point(local)


def unit_sphere_through(x, y, rng=None) -> SphereEmbedding:
    """Sample an isometric embedding of S^2 whose image contains x and y.

    Valid centers form a circle of radius sqrt(1 - (d/2)^2) around the
    midpoint of x, y (a sphere of radius 1 around x when x == y); one is
    drawn at random, together with a random orientation of the frame.
    """
    rng = np.random.default_rng(rng)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = d_E(x, y)
    if d > 2.0 + STEP_SLACK:
        raise NoEmbeddingError(f"points are {d!r} apart; a unit sphere needs <= 2")
    if d == 0.0:
        center = x + sphere_point(rng.standard_normal(3))
    else:
        axis = (y - x) / d
        offset = np.sqrt(max(0.0, 1.0 - (d / 2.0) ** 2))
        center = (x + y) / 2.0 + offset * _unit_perpendicular(axis, rng)
    frame = random_orthogonal(rng, 1)[0]
    return SphereEmbedding(center, frame)
