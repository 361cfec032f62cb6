"""Splitting schemes for the Kepler problem.

A scheme is a palindromic list of elemental maps:

* ``Drift(c)``: ``q += c eps p``
* ``Kick(v)``: ``p += v eps F(q)`` with the Kepler force F
* ``GradientKick(v, u)``: a kick with the force of the effective potential
  ``v V - eps**2 u |grad V|**2``
* ``WStep(w)``: evolve the error Hamiltonian VTTTV for time ``w eps**5`` with one
  implicit-midpoint step

Stepping runs on plain floats; one Kepler step costs a handful of
microseconds, which keeps whole-period runs at ``eps = P/10000`` cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from symprec.error_hamiltonians import ErrorCoefficients, ErrorHamiltonianId, flow_field
from symprec.errors import SingularityError, UnknownAlgorithmError
from symprec.kepler import PhaseState

#: Substeps closer than this to the origin abort the integration.
SINGULARITY_RADIUS = 1e-8

DEFAULT_MIDPOINT_ITERATIONS = 2


@dataclass(frozen=True)
class Drift:
    c: float


@dataclass(frozen=True)
class Kick:
    v: float


@dataclass(frozen=True)
class GradientKick:
    v: float
    u: float


@dataclass(frozen=True)
class WStep:
    w: float


Stage = Drift | Kick | GradientKick | WStep

_DRIFT, _KICK, _WSTEP = 0, 1, 2


@dataclass(frozen=True)
class SplittingScheme:
    name: str
    stages: tuple[Stage, ...]
    order: int
    midpoint_iterations: int = DEFAULT_MIDPOINT_ITERATIONS
    _ops: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if not 0 <= self.midpoint_iterations <= 4:
            raise ValueError("midpoint_iterations must be between 0 and 4")
        ops = []
        for st in self.stages:
            if isinstance(st, Drift):
                ops.append((_DRIFT, float(st.c), 0.0))
            elif isinstance(st, Kick):
                ops.append((_KICK, float(st.v), 0.0))
            elif isinstance(st, GradientKick):
                ops.append((_KICK, float(st.v), float(st.u)))
            elif isinstance(st, WStep):
                ops.append((_WSTEP, float(st.w), 0.0))
            else:
                raise TypeError(f"unknown stage {st!r}")
        object.__setattr__(self, "_ops", tuple(ops))

    @property
    def coefficients_sum_T(self) -> float:
        return math.fsum(st.c for st in self.stages if isinstance(st, Drift))

    @property
    def coefficients_sum_V(self) -> float:
        return math.fsum(st.v for st in self.stages if isinstance(st, (Kick, GradientKick)))

    @property
    def force_evaluations(self) -> int:
        return sum(isinstance(st, (Kick, GradientKick)) for st in self.stages)


def palindrome(center_to_right) -> tuple[Stage, ...]:
    """Expand stages listed from the center outwards into the full symmetric list."""
    half = list(center_to_right)
    return tuple(reversed(half[1:])) + tuple(half)


# ---------------------------------------------------------------------------
# float kernels


def _check_radius(r2: float) -> None:
    if not r2 >= SINGULARITY_RADIUS * SINGULARITY_RADIUS:
        raise SingularityError(f"trajectory reached the singularity (r={math.sqrt(r2):.3g})")


def _w_increment(x, y, px, py, tau, iterations):
    """``tau * F(z_mid)`` for the implicit-midpoint step of the VTTTV flow."""
    half = 0.5 * tau
    dx, dy, dpx, dpy = flow_field(ErrorHamiltonianId.VTTTV, x, y, px, py)
    for _ in range(iterations):
        mx, my = x + half * dx, y + half * dy
        _check_radius(mx * mx + my * my)
        dx, dy, dpx, dpy = flow_field(ErrorHamiltonianId.VTTTV, mx, my, px + half * dpx, py + half * dpy)
    return tau * dx, tau * dy, tau * dpx, tau * dpy


def _step_floats(ops, z, eps, iterations):
    """One step on the compensated state ``z = (x, y, px, py, cx, cy, cpx, cpy)``.

    Every increment goes through Kahan summation, with the running
    compensation terms carried in ``z``. Over a whole period at
    ``eps = P/10000`` this keeps the accumulated rounding in the LRL angle
    well below the eps**4 * 1e-6 level the corrector schemes reach.
    """
    x, y, px, py, cx, cy, cpx, cpy = z
    eps2 = eps * eps
    for kind, a, b in ops:
        if kind == _DRIFT:
            c = a * eps
            d = c * px - cx
            t = x + d
            cx = (t - x) - d
            x = t
            d = c * py - cy
            t = y + d
            cy = (t - y) - d
            y = t
        elif kind == _KICK:
            r2 = x * x + y * y
            _check_radius(r2)
            r3 = r2 * math.sqrt(r2)
            k = eps * a / r3
            if b:
                k += 4.0 * eps * eps2 * b / (r3 * r3)
            d = -k * x - cpx
            t = px + d
            cpx = (t - px) - d
            px = t
            d = -k * y - cpy
            t = py + d
            cpy = (t - py) - d
            py = t
        else:
            dx, dy, dpx, dpy = _w_increment(x, y, px, py, a * eps**5, iterations)
            d = dx - cx
            t = x + d
            cx = (t - x) - d
            x = t
            d = dy - cy
            t = y + d
            cy = (t - y) - d
            y = t
            d = dpx - cpx
            t = px + d
            cpx = (t - px) - d
            px = t
            d = dpy - cpy
            t = py + d
            cpy = (t - py) - d
            py = t
    _check_radius(x * x + y * y)
    return x, y, px, py, cx, cy, cpx, cpy


def _lift(s: PhaseState) -> tuple:
    return (*s.components(), 0.0, 0.0, 0.0, 0.0)


def _lower(z) -> PhaseState:
    return PhaseState.from_components(z[0] - z[4], z[1] - z[5], z[2] - z[6], z[3] - z[7])


def w_step(s: PhaseState, tau: float, iterations: int = DEFAULT_MIDPOINT_ITERATIONS) -> PhaseState:
    """One implicit-midpoint step of length ``tau`` under the VTTTV flow.

    The midpoint equation ``z_mid = z + tau/2 F(z_mid)`` is solved by
    ``iterations`` fixed-point sweeps started from ``z``; zero sweeps reduce
    to an explicit Euler step.
    """
    if not 0 <= iterations <= 4:
        raise ValueError("iterations must be between 0 and 4")
    x, y, px, py = s.components()
    if tau == 0.0:
        return s
    dx, dy, dpx, dpy = _w_increment(x, y, px, py, tau, iterations)
    return PhaseState.from_components(x + dx, y + dy, px + dpx, py + dpy)


def step(scheme: SplittingScheme, s: PhaseState, eps: float) -> PhaseState:
    """Advance ``s`` by one step of size ``eps``."""
    if not eps > 0.0:
        raise ValueError("step size must be positive")
    return _lower(_step_floats(scheme._ops, _lift(s), eps, scheme.midpoint_iterations))


def advance(scheme: SplittingScheme, s: PhaseState, eps: float, n_steps: int) -> PhaseState:
    """Apply ``n_steps`` steps; singularity errors carry the failing step index."""
    if not eps > 0.0:
        raise ValueError("step size must be positive")
    ops, it = scheme._ops, scheme.midpoint_iterations
    z = _lift(s)
    for k in range(n_steps):
        try:
            z = _step_floats(ops, z, eps, it)
        except SingularityError as exc:
            raise SingularityError(f"{exc} during step {k}", step=k) from None
    return _lower(z)


# ---------------------------------------------------------------------------
# registry

ALGORITHM_NAMES = ("I", "II", "III", "IV", "VV", "TI", "NF", "FR", "C", "CPRIME", "TAILORED", "4S")

#: alpha of the C' family that sets e_TTVTV = e_VTVTV
CPRIME_ALPHA = 0.9
TAILORED_DEFAULT_E = 0.9

_SQ3 = math.sqrt(3.0)
_CBRT2 = 2.0 ** (1.0 / 3.0)


def _forest_ruth_like(v0, t1, v1, t2) -> tuple[Stage, ...]:
    return palindrome([Kick(v0), Drift(t1), Kick(v1), Drift(t2)])


def _c_family(alpha: float) -> tuple[Stage, ...]:
    return palindrome(
        [
            GradientKick(0.25, (1.0 - alpha) / 192.0),
            Drift(1.0 / 3.0),
            GradientKick(0.375, alpha / 2.0 / 192.0),
            Drift(1.0 / 6.0),
        ]
    )


def _c_family_coefficients(alpha: float) -> ErrorCoefficients:
    # linear in alpha, -1/3840 for both at alpha = 9/10. The commonly quoted
    # alpha = 0 pair (-7/23040, -11/46080) has the right difference but is
    # shifted by 1/4608; these values make H0 + eps**4 H4 conserved to eps**6.
    return ErrorCoefficients(
        e_TTTTV=-7.0 / 51840.0,
        e_VTTTV=-1.0 / 8640.0,
        e_TTVTV=-1.0 / 1920.0 + alpha / 3456.0,
        e_VTVTV=-7.0 / 15360.0 + alpha / 4608.0,
    )


def tailored_alpha(e: float) -> float:
    """Gradient split of the C' family whose total precession vanishes at eccentricity e."""
    from symprec.precession import delta_theta_for

    if not 0.0 < e < 1.0:
        raise ValueError(f"tailored scheme needs 0 < e < 1, got {e}")
    ratio = delta_theta_for("TTTTV", 1.0, e) / delta_theta_for("VTVTV", 1.0, e)
    return 0.9 - 4.0 / 15.0 * ratio


def _build(name: str, alpha: float | None, e: float | None):
    if name == "VV":
        stages = palindrome([Drift(1.0), Kick(0.5)])
        return stages, 2, ErrorCoefficients(e_TTV=1.0 / 12.0, e_VTV=1.0 / 24.0)
    if name == "I":
        stages = palindrome([Kick(2.0 / 3.0), Drift(0.5), Kick(1.0 / 6.0)])
        return stages, 2, ErrorCoefficients(e_VTV=-1.0 / 72.0)
    if name == "II":
        stages = palindrome([Drift(2.0 / 3.0), Kick(0.5), Drift(1.0 / 6.0)])
        return stages, 2, ErrorCoefficients(e_TTV=1.0 / 72.0)
    if name == "TI":
        stages = palindrome([GradientKick(1.0, 1.0 / 24.0), Drift(0.5)])
        return stages, 2, ErrorCoefficients(e_TTV=-1.0 / 24.0, e_VTV=-1.0 / 24.0)
    if name == "NF":
        v0 = 1.0 / (2.0 - _CBRT2)
        t2 = 0.5 * v0
        t1 = 0.5 - t2
        stages = _forest_ruth_like(v0, t1, t1, t2)
        return stages, 2, ErrorCoefficients(e_TTV=-0.0470817, e_VTV=-0.0470817)
    if name == "FR":
        v1 = 1.0 / (2.0 - _CBRT2)
        v0 = -_CBRT2 * v1
        t2 = 0.5 * v1
        t1 = 0.5 - t2
        stages = _forest_ruth_like(v0, t1, v1, t2)
        coeffs = ErrorCoefficients(
            e_TTTTV=-0.00041376, e_VTTTV=-0.00868165, e_TTVTV=0.00702660, e_VTVTV=-0.02604494
        )
        return stages, 4, coeffs
    if name == "III":
        stages = palindrome(
            [
                GradientKick(8.0 / 27.0, 3121.0 / 1710720.0),
                Drift(0.3),
                GradientKick(125.0 / 432.0, 1145.0 / 2737152.0),
                Drift(0.2),
                GradientKick(1.0 / 16.0, 409.0 / 1520640.0),
            ]
        )
        return stages, 4, ErrorCoefficients(e_VTTTV=1.0 / 207360.0)
    if name == "IV":
        stages = palindrome(
            [
                GradientKick(2.0 / 27.0 * (4.0 * _SQ3 - 3.0), (943.0 - 461.0 * _SQ3) / 98820.0),
                Drift(0.3),
                GradientKick(25.0 / 108.0 * (3.0 - _SQ3), 5.0 / 158112.0 * (481.0 - 266.0 * _SQ3)),
                Drift(0.2),
                GradientKick((_SQ3 - 1.0) / 12.0, (617.0 - 344.0 * _SQ3) / 87840.0),
            ]
        )
        return stages, 4, ErrorCoefficients(e_TTTTV=-(7.0 - 4.0 * _SQ3) / 14400.0)
    if name == "C":
        return _c_family(0.0), 4, _c_family_coefficients(0.0)
    if name == "CPRIME":
        a = CPRIME_ALPHA if alpha is None else float(alpha)
        return _c_family(a), 4, _c_family_coefficients(a)
    if name == "TAILORED":
        a = tailored_alpha(TAILORED_DEFAULT_E if e is None else float(e))
        return _c_family(a), 4, _c_family_coefficients(a)
    if name == "4S":
        a = 455.0 / 1102.0
        u = 29.0 / 4608.0
        stages = palindrome(
            [
                GradientKick(23.0 / 48.0, (1.0 - a) * u),
                Drift(0.4),
                GradientKick(25.0 / 96.0, 0.5 * a * u),
                Drift(0.1),
                WStep(-1.0 / 86400.0),
            ]
        )
        coeffs = ErrorCoefficients(
            e_TTTTV=1.0 / 28800.0,
            e_VTTTV=1.0 / 28800.0,
            e_TTVTV=53.0 / 437760.0,
            e_VTVTV=53.0 / 437760.0,
        )
        return stages, 4, coeffs
    raise UnknownAlgorithmError(f"unknown algorithm {name!r}; known: {', '.join(ALGORITHM_NAMES)}")


def normalize_name(name: str) -> str:
    key = name.strip().upper().replace("'", "PRIME").replace("′", "PRIME")
    aliases = {"FOURS": "4S", "C_PRIME": "CPRIME"}
    return aliases.get(key, key)


def named_scheme(
    name: str,
    *,
    alpha: float | None = None,
    e: float | None = None,
    midpoint_iterations: int = DEFAULT_MIDPOINT_ITERATIONS,
) -> tuple[SplittingScheme, ErrorCoefficients]:
    """Look up a registry algorithm.

    ``alpha`` applies to ``CPRIME`` (default 9/10) and ``e`` to ``TAILORED``
    (default 0.9); both are ignored for the other algorithms.
    """
    key = normalize_name(name)
    stages, order, coeffs = _build(key, alpha, e)
    return SplittingScheme(key, stages, order, midpoint_iterations), coeffs


# ---------------------------------------------------------------------------
# validation

_ORDER_PROBE_STATE = (1.0, 0.0, 0.0, 1.2)  # e = 0.44
_ORDER_PROBE_TIME = 2.0
_ORDER_PROBE_STEPS = (32, 64, 128)


@dataclass
class ValidationReport:
    scheme: str
    checks: dict[str, bool] = field(default_factory=dict)
    messages: list[str] = field(default_factory=list)
    measured_order: float | None = None

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list[str]:
        return [k for k, ok in self.checks.items() if not ok]


def _is_palindrome(stages) -> bool:
    return all(a == b for a, b in zip(stages, reversed(stages)))


def measure_order(scheme: SplittingScheme) -> float:
    """Convergence order from step halving on a short arc of an e = 0.44 orbit."""
    s0 = PhaseState.from_components(*_ORDER_PROBE_STATE)
    finals = [advance(scheme, s0, _ORDER_PROBE_TIME / n, n) for n in _ORDER_PROBE_STEPS]
    d1 = math.dist(finals[0].components(), finals[1].components())
    d2 = math.dist(finals[1].components(), finals[2].components())
    return math.log2(d1 / d2)


def validate_scheme(scheme: SplittingScheme, check_order: bool = True, tol: float = 1e-14) -> ValidationReport:
    """Check coefficient sums, symmetry and (optionally) the convergence order.

    Failures are reported, never raised.
    """
    rep = ValidationReport(scheme.name)
    st = scheme.coefficients_sum_T
    sv = scheme.coefficients_sum_V
    rep.checks["sum_T"] = abs(st - 1.0) <= tol
    rep.checks["sum_V"] = abs(sv - 1.0) <= tol
    if not rep.checks["sum_T"]:
        rep.messages.append(f"drift coefficients sum to {st!r}, not 1")
    if not rep.checks["sum_V"]:
        rep.messages.append(f"kick coefficients sum to {sv!r}, not 1")
    rep.checks["palindrome"] = _is_palindrome(scheme.stages)
    if not rep.checks["palindrome"]:
        rep.messages.append("stage list is not symmetric")
    if check_order:
        try:
            rep.measured_order = measure_order(scheme)
        except (SingularityError, ValueError, ZeroDivisionError) as exc:
            rep.checks["order"] = False
            rep.messages.append(f"order probe failed: {exc}")
        else:
            rep.checks["order"] = abs(rep.measured_order - scheme.order) <= 0.1
            if not rep.checks["order"]:
                rep.messages.append(
                    f"measured order {rep.measured_order:.3f}, declared {scheme.order}"
                )
    return rep
