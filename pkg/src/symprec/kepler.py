"""Planar Kepler dynamics in units with GM = 1 and V(r) = -1/r.

Besides the force and the conserved quantities this module provides the
Laplace-Runge-Lenz (LRL) vector and a small tracker that follows its
direction continuously over many steps, which is how orbital precession is
measured throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from symprec.errors import DegenerateVectorError, DomainError, UnboundOrbitError

#: Vectors shorter than this are treated as having no direction.
MIN_VECTOR_NORM = 1e-300


def _as_vec(v) -> np.ndarray:
    arr = np.array(v, dtype=float).reshape(2)
    return arr


@dataclass(frozen=True)
class PhaseState:
    """Position ``q`` and momentum ``p`` (per unit mass) of a planar orbit."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = _as_vec(self.q)
        p = _as_vec(self.p)
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise DomainError(f"non-finite phase state q={q}, p={p}")
        if q[0] == 0.0 and q[1] == 0.0:
            raise DomainError("phase state at the origin")
        q.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_components(cls, qx: float, qy: float, px: float, py: float) -> PhaseState:
        return cls(np.array([qx, qy]), np.array([px, py]))

    def components(self) -> tuple[float, float, float, float]:
        """Return ``(qx, qy, px, py)`` as plain floats."""
        return float(self.q[0]), float(self.q[1]), float(self.p[0]), float(self.p[1])

    def flip_momentum(self) -> PhaseState:
        return PhaseState(self.q, -self.p)

    def rotated(self, phi: float) -> PhaseState:
        c, s = math.cos(phi), math.sin(phi)
        rot = np.array([[c, -s], [s, c]])
        return PhaseState(rot @ self.q, rot @ self.p)


@dataclass(frozen=True)
class OrbitElements:
    energy: float
    angular_momentum: float
    semi_major_axis: float
    eccentricity: float
    semi_latus_rectum: float
    period: float


def _radius(x: float, y: float) -> float:
    r = math.hypot(x, y)
    if r == 0.0:
        raise DomainError("evaluated at the origin")
    return r


def kepler_force(q) -> np.ndarray:
    """Return the Kepler force ``-q / |q|^3``."""
    x, y = _as_vec(q)
    r = _radius(x, y)
    r3 = r * r * r
    return np.array([-x / r3, -y / r3])


def energy(s: PhaseState) -> float:
    x, y, px, py = s.components()
    return 0.5 * (px * px + py * py) - 1.0 / _radius(x, y)


def angular_momentum(s: PhaseState) -> float:
    x, y, px, py = s.components()
    return x * py - y * px


def _lrl(x: float, y: float, px: float, py: float) -> tuple[float, float]:
    r = _radius(x, y)
    lz = x * py - y * px
    return py * lz - x / r, -px * lz - y / r


def lrl_vector(s: PhaseState) -> np.ndarray:
    """Laplace-Runge-Lenz vector ``p x L - q/|q|``.

    It points at perihelion and its length is the eccentricity.
    """
    return np.array(_lrl(*s.components()))


def orbit_elements(s: PhaseState) -> OrbitElements:
    """Kepler constants of a bound state.

    Raises:
        UnboundOrbitError: if the energy is not negative.
    """
    e_tot = energy(s)
    if not e_tot < 0.0:
        raise UnboundOrbitError(f"orbit is not bound (E={e_tot!r})")
    lz = angular_momentum(s)
    a = -1.0 / (2.0 * e_tot)
    ecc = float(np.hypot(*lrl_vector(s)))
    return OrbitElements(
        energy=e_tot,
        angular_momentum=lz,
        semi_major_axis=a,
        eccentricity=ecc,
        semi_latus_rectum=lz * lz,
        period=2.0 * math.pi * a**1.5,
    )


def signed_angle(u, v) -> float:
    """Signed rotation angle taking direction ``u`` to direction ``v``."""
    ux, uy = u
    vx, vy = v
    if math.hypot(ux, uy) < MIN_VECTOR_NORM or math.hypot(vx, vy) < MIN_VECTOR_NORM:
        raise DegenerateVectorError("cannot measure the angle of a zero vector")
    return math.atan2(ux * vy - uy * vx, ux * vx + uy * vy)


@dataclass
class LrlTracker:
    """Continuously unwrapped rotation angle of the LRL vector.

    Each update adds the signed angle between the previous and the new vector,
    which requires the per-update rotation to stay well below pi/2. The
    running total is then snapped onto the angle measured directly against
    the first vector, so rounding does not accumulate with the number of
    updates.
    """

    initial_vector: tuple[float, float]
    accumulated_angle: float = 0.0
    previous_vector: tuple[float, float] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.initial_vector = (float(self.initial_vector[0]), float(self.initial_vector[1]))
        if math.hypot(*self.initial_vector) < MIN_VECTOR_NORM:
            raise DegenerateVectorError("LRL vector has zero length (circular orbit)")
        if self.previous_vector is None:
            self.previous_vector = self.initial_vector

    @classmethod
    def from_state(cls, s: PhaseState) -> LrlTracker:
        return cls(tuple(lrl_vector(s)))

    @property
    def initial_angle(self) -> float:
        return math.atan2(self.initial_vector[1], self.initial_vector[0])

    def update_vector(self, vector) -> float:
        """Advance the tracker to a new LRL vector; return the accumulated angle."""
        new = (float(vector[0]), float(vector[1]))
        running = self.accumulated_angle + signed_angle(self.previous_vector, new)
        direct = signed_angle(self.initial_vector, new)
        turns = round((running - direct) / (2.0 * math.pi))
        self.accumulated_angle = direct + 2.0 * math.pi * turns
        self.previous_vector = new
        return self.accumulated_angle


def lrl_angle_update(tracker: LrlTracker, s: PhaseState) -> LrlTracker:
    """Return a new tracker advanced to the LRL vector of ``s``."""
    out = LrlTracker(tracker.initial_vector, tracker.accumulated_angle, tracker.previous_vector)
    out.update_vector(lrl_vector(s))
    return out
