"""Closed-form perihelion advance per period caused by each error Hamiltonian.

Contributions are expressed through the integrals

    C_n(e) = (1/e) * integral_0^{2 pi} (1 + e cos t)**n cos t dt
    S_n(e) = integral_0^{2 pi} (1 + e cos t)**n sin(t)**2 dt = C_{n+1} / (n + 1)

evaluated by their three-term recursion. Angles are in radians per period and
per unit error coefficient; a modified Hamiltonian ``H0 + c * H_X`` precesses
by ``c * delta_theta_for(X)``.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from functools import lru_cache

from symprec.error_hamiltonians import (
    CENTRAL_TERMS,
    QUADRATIC_PARAMS,
    ErrorCoefficients,
    ErrorHamiltonianId,
    QuadraticFamilyParams,
)

MAX_N = 16


def _check_range(n: int, e: float) -> None:
    if not 0 <= n <= MAX_N:
        raise ValueError(f"C_n is only provided for 0 <= n <= {MAX_N}, got n={n}")
    if not 0.0 <= e < 1.0:
        raise ValueError(f"eccentricity must lie in [0, 1), got e={e}")


@lru_cache(maxsize=256)
def _c_table(e: float) -> tuple[float, ...]:
    vals = [0.0, math.pi]
    one_m_e2 = 1.0 - e * e
    for n in range(1, MAX_N):
        nxt = ((2.0 + 1.0 / n) * vals[n] - one_m_e2 * vals[n - 1]) / (1.0 + 1.0 / (n + 1))
        vals.append(nxt)
    return tuple(vals)


def c_n(n: int, e: float) -> float:
    """C_n(e) from the upward recursion seeded with C_0 = 0, C_1 = pi."""
    _check_range(n, e)
    return _c_table(float(e))[n]


def s_n(n: int, e: float) -> float:
    """S_n(e) = C_{n+1}(e) / (n + 1)."""
    _check_range(n + 1, e)
    return c_n(n + 1, e) / (n + 1)


def delta_theta_central(lambda_series: Mapping[int, float], semi_latus: float, e: float) -> float:
    """Precession for a central perturbation with ``-f r**2 = sum lambda_n r**-n``."""
    if not semi_latus > 0.0:
        raise ValueError("semi-latus rectum must be positive")
    return sum(lam / semi_latus**n * c_n(n, e) for n, lam in lambda_series.items())


def delta_theta_g(rho_series: Mapping[int, float], semi_latus: float, e: float) -> float:
    """Precession from the ``g (p.r) p`` force term with ``g r**3 = sum rho_n r**-n``."""
    return sum(rho / semi_latus ** (n + 1) * s_n(n, e) for n, rho in rho_series.items())


@dataclass(frozen=True)
class PrecessionParts:
    f: float
    g: float
    h: float

    @property
    def total(self) -> float:
        return self.f + self.g + self.h


def quadratic_parts(params: QuadraticFamilyParams, semi_latus: float, e: float) -> PrecessionParts:
    """f/g/h contributions for ``scale * h(n, alpha)``, scale included.

    ``-f r**2`` is reduced to a function of r along the unperturbed orbit
    (p**2 = 2/r - 1/a, (p.r)**2 = p**2 r**2 - L**2) before integrating.
    """
    n, alpha, scale = params.n, params.alpha, params.scale
    if n < 1:
        raise ValueError("quadratic family requires n >= 1")
    if not semi_latus > 0.0:
        raise ValueError("semi-latus rectum must be positive")
    inv_a = (1.0 - e * e) / semi_latus
    k = alpha * (n + 2) - n
    f = delta_theta_central(
        {n: 2.0 * k, n - 1: -inv_a * k, n + 1: -alpha * (n + 2) * semi_latus},
        semi_latus,
        e,
    )
    g = delta_theta_g({n - 1: 2.0 * alpha}, semi_latus, e)
    h = delta_theta_central({n: -2.0}, semi_latus, e)
    return PrecessionParts(scale * f, scale * g, scale * h)


def delta_theta_quadratic(params: QuadraticFamilyParams, semi_latus: float, e: float) -> float:
    return quadratic_parts(params, semi_latus, e).total


def quartic_parts(semi_latus: float, e: float) -> PrecessionParts:
    """f/g/h contributions of TTTTV, before any use of the recursion."""
    if not semi_latus > 0.0:
        raise ValueError("semi-latus rectum must be positive")
    b = 1.0 - e * e
    c4, c5, c6, c7, c8 = (c_n(k, e) for k in range(4, 9))
    w = semi_latus**-6
    f = 9 * 8 * 5 * w * (4 * c6 - 4 * b * c5 + b * b * c4) + 9 * 7 * 5 * w * (
        3 * c8 - 8 * c7 + 4 * b * c6
    )
    g = 3 * 4 * w * (20.0 / 3.0 * c6 - 4 * b * c5 - 5 * c7)
    h = 9 * 4 * w * (-8 * c6 + 4 * b * c5 + 5 * c7)
    return PrecessionParts(f, g, h)


def delta_theta_for(tag: ErrorHamiltonianId | str, semi_latus: float, e: float) -> float:
    """Per-period precession caused by one error Hamiltonian (unit coefficient)."""
    tag = ErrorHamiltonianId(tag)
    if tag in CENTRAL_TERMS:
        power, coeff = CENTRAL_TERMS[tag]
        return delta_theta_central({power: coeff}, semi_latus, e)
    if tag is ErrorHamiltonianId.TTTTV:
        return quartic_parts(semi_latus, e).total
    return delta_theta_quadratic(QUADRATIC_PARAMS[tag], semi_latus, e)


@dataclass(frozen=True)
class PrecessionPrediction:
    """Precession of a scheme split by error Hamiltonian."""

    per_term: dict[ErrorHamiltonianId, float]
    coefficients: ErrorCoefficients

    def second_order(self) -> float:
        """Coefficient of eps**2 in the per-period precession."""
        return sum(
            self.coefficients.get(t) * self.per_term[t]
            for t in (ErrorHamiltonianId.TTV, ErrorHamiltonianId.VTV)
        )

    def fourth_order(self) -> float:
        """Coefficient of eps**4 in the per-period precession."""
        return sum(
            self.coefficients.get(t) * self.per_term[t]
            for t in ErrorHamiltonianId
            if t.order == 4
        )

    def contributions(self) -> dict[ErrorHamiltonianId, float]:
        return {t: self.coefficients.get(t) * v for t, v in self.per_term.items()}

    def total(self, eps: float) -> float:
        return eps**2 * self.second_order() + eps**4 * self.fourth_order()


def precession_prediction(coeffs: ErrorCoefficients, semi_latus: float, e: float) -> PrecessionPrediction:
    per_term = {t: delta_theta_for(t, semi_latus, e) for t in ErrorHamiltonianId}
    return PrecessionPrediction(per_term, coeffs)


def predict_algorithm_precession(
    coeffs: ErrorCoefficients, eps: float, semi_latus: float, e: float
) -> float:
    """Predicted LRL rotation after one period for a scheme with these coefficients."""
    return precession_prediction(coeffs, semi_latus, e).total(eps)
