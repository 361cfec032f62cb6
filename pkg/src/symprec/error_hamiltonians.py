"""Kepler error Hamiltonians up to fourth order and their equations of motion.

All six error terms conserve angular momentum, so their Hamiltonian vector
fields can be written in the form

    p' = f r_hat + g (p.q) p
    q' = -g (p.q) q + h p

with scalar functions f, g, h of the state. Central potentials (VTV, VTVTV)
have g = h = 0. The quadratic-in-p terms (TTV, TTVTV, VTTTV) are members of
the family ``scale * r**-n * (p**2 - alpha * (r_hat.p)**2)``; TTTTV is quartic
in p.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from symprec.errors import DomainError
from symprec.kepler import PhaseState


class ErrorHamiltonianId(str, enum.Enum):
    TTV = "TTV"
    VTV = "VTV"
    TTVTV = "TTVTV"
    VTVTV = "VTVTV"
    TTTTV = "TTTTV"
    VTTTV = "VTTTV"

    @property
    def order(self) -> int:
        return 2 if self in (ErrorHamiltonianId.TTV, ErrorHamiltonianId.VTV) else 4

    @property
    def partner(self) -> ErrorHamiltonianId:
        """The opposite member of the {T,Q} / {V,Q} pair."""
        name = self.value
        swapped = ("V" if name[0] == "T" else "T") + name[1:]
        return ErrorHamiltonianId(swapped)


@dataclass(frozen=True)
class QuadraticFamilyParams:
    """``scale * r**-n * (p**2 - alpha * (r_hat.p)**2)``."""

    n: int
    alpha: float
    scale: float = 1.0


@dataclass(frozen=True)
class EomFields:
    f: float
    g: float
    h: float


QUADRATIC_PARAMS: dict[ErrorHamiltonianId, QuadraticFamilyParams] = {
    ErrorHamiltonianId.TTV: QuadraticFamilyParams(3, 3.0, 1.0),
    ErrorHamiltonianId.TTVTV: QuadraticFamilyParams(6, 6.0, 4.0),
    ErrorHamiltonianId.VTTTV: QuadraticFamilyParams(6, 3.0, 9.0),
}

# -d v/dr * r**2 = coeff * r**-power for the potential-only terms
CENTRAL_TERMS: dict[ErrorHamiltonianId, tuple[int, float]] = {
    ErrorHamiltonianId.VTV: (3, 4.0),  # v = -r**-4
    ErrorHamiltonianId.VTVTV: (6, 28.0),  # v = -4 r**-7
}


def _radius2(x: float, y: float) -> float:
    r2 = x * x + y * y
    if r2 == 0.0:
        raise DomainError("error Hamiltonian evaluated at the origin")
    return r2


def _h_value(tag: ErrorHamiltonianId, x: float, y: float, px: float, py: float) -> float:
    r2 = _radius2(x, y)
    r = math.sqrt(r2)
    p2 = px * px + py * py
    u2 = (px * x + py * y) ** 2 / r2  # (r_hat . p)**2
    if tag is ErrorHamiltonianId.VTV:
        return -1.0 / (r2 * r2)
    if tag is ErrorHamiltonianId.VTVTV:
        return -4.0 * r**-7
    if tag is ErrorHamiltonianId.TTTTV:
        return -9.0 * r**-5 * (p2 * p2 - 10.0 * p2 * u2 + 35.0 / 3.0 * u2 * u2)
    prm = QUADRATIC_PARAMS[tag]
    return prm.scale * r ** -prm.n * (p2 - prm.alpha * u2)


def eval_error_h(tag: ErrorHamiltonianId | str, s: PhaseState) -> float:
    """Value of the error Hamiltonian ``tag`` at state ``s``."""
    return _h_value(ErrorHamiltonianId(tag), *s.components())


def _quadratic_fgh(prm: QuadraticFamilyParams, x, y, px, py) -> tuple[float, float, float]:
    r2 = _radius2(x, y)
    r = math.sqrt(r2)
    n, alpha, c = prm.n, prm.alpha, prm.scale
    p2 = px * px + py * py
    pr = px * x + py * y
    rn = r**-n
    f = c * rn * (n * p2 / r - alpha * (n + 2) * pr * pr / (r2 * r))
    g = c * 2.0 * alpha * rn / r2
    h = c * 2.0 * rn
    return f, g, h


def _quartic_fgh(x, y, px, py) -> tuple[float, float, float]:
    r2 = _radius2(x, y)
    r = math.sqrt(r2)
    p2 = px * px + py * py
    u2 = (px * x + py * y) ** 2 / r2
    f = -45.0 * r**-6 * (p2 * p2 - 14.0 * p2 * u2 + 21.0 * u2 * u2)
    g = 60.0 * r**-7 * (7.0 * u2 - 3.0 * p2)
    h = -36.0 * r**-5 * (p2 - 5.0 * u2)
    return f, g, h


def _central_fgh(tag, x, y) -> tuple[float, float, float]:
    power, coeff = CENTRAL_TERMS[tag]
    r2 = _radius2(x, y)
    return -coeff * math.sqrt(r2) ** -(power + 2), 0.0, 0.0


def _fgh(tag: ErrorHamiltonianId, x, y, px, py) -> tuple[float, float, float]:
    if tag in CENTRAL_TERMS:
        return _central_fgh(tag, x, y)
    if tag is ErrorHamiltonianId.TTTTV:
        return _quartic_fgh(x, y, px, py)
    return _quadratic_fgh(QUADRATIC_PARAMS[tag], x, y, px, py)


def quadratic_eom(params: QuadraticFamilyParams, s: PhaseState) -> EomFields:
    return EomFields(*_quadratic_fgh(params, *s.components()))


def quartic_eom(s: PhaseState) -> EomFields:
    """f, g, h for the quartic error Hamiltonian TTTTV."""
    return EomFields(*_quartic_fgh(*s.components()))


def eom_fields(tag: ErrorHamiltonianId | str, s: PhaseState) -> EomFields:
    return EomFields(*_fgh(ErrorHamiltonianId(tag), *s.components()))


def flow_field(tag: ErrorHamiltonianId, x: float, y: float, px: float, py: float):
    """Float-level ``(x', y', px', py')`` of the error Hamiltonian flow."""
    f, g, h = _fgh(tag, x, y, px, py)
    r = math.hypot(x, y)
    gpq = g * (px * x + py * y)
    return (
        -gpq * x + h * px,
        -gpq * y + h * py,
        f * x / r + gpq * px,
        f * y / r + gpq * py,
    )


def error_h_flow_derivatives(
    tag: ErrorHamiltonianId | str, s: PhaseState
) -> tuple[np.ndarray, np.ndarray]:
    """Hamilton's equations ``(q', p')`` for the error Hamiltonian ``tag``."""
    dx, dy, dpx, dpy = flow_field(ErrorHamiltonianId(tag), *s.components())
    return np.array([dx, dy]), np.array([dpx, dpy])


@dataclass(frozen=True)
class ErrorCoefficients:
    """Coefficients of a scheme's modified Hamiltonian.

    ``H_A = e_T T + e_V V + eps**2 (e_TTV H_TTV + e_VTV H_VTV)
    + eps**4 (e_TTTTV H_TTTTV + e_VTTTV H_VTTTV + e_TTVTV H_TTVTV + e_VTVTV H_VTVTV)``
    """

    e_T: float = 1.0
    e_V: float = 1.0
    e_TTV: float = 0.0
    e_VTV: float = 0.0
    e_TTTTV: float = 0.0
    e_VTTTV: float = 0.0
    e_TTVTV: float = 0.0
    e_VTVTV: float = 0.0

    def get(self, tag: ErrorHamiltonianId | str) -> float:
        return getattr(self, "e_" + ErrorHamiltonianId(tag).value)

    def is_paired(self, order: int, tol: float = 0.0) -> bool:
        """True if every {T,Q}/{V,Q} pair of the given order has equal coefficients."""
        tags = [t for t in ErrorHamiltonianId if t.order == order and t.value[0] == "T"]
        return all(abs(self.get(t) - self.get(t.partner)) <= tol for t in tags)

    def modified_hamiltonian_correction(self, s: PhaseState, eps: float) -> float:
        """``H_A - H0`` evaluated at ``s`` (through fourth order)."""
        out = 0.0
        for t in ErrorHamiltonianId:
            c = self.get(t)
            if c:
                out += c * eps**t.order * eval_error_h(t, s)
        return out
