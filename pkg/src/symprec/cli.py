"""Command-line front end.

Subcommands write CSV (17 significant digits) or plain-text tables; exit
codes are 0 on success, 2 for usage errors, 3 when a run hits the force
singularity and 4 when ``verify`` finds a failing comparison.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import sys
from dataclasses import dataclass

from symprec import experiments as ex
from symprec.error_hamiltonians import ErrorHamiltonianId
from symprec.errors import SingularityError, UnknownAlgorithmError
from symprec.integrators import ALGORITHM_NAMES, named_scheme, normalize_name
from symprec.kepler import PhaseState, orbit_elements
from symprec.precession import c_n, precession_prediction

EXIT_OK, EXIT_USAGE, EXIT_SINGULAR, EXIT_VERIFY = 0, 2, 3, 4

RUN_HEADER = ("t", "qx", "qy", "px", "py", "E", "L", "lrl_angle", "h0_dev")
TABLE_HEADER = ("n", "e", "C")
FIGURE_HEADER = ("t_over_P", "series_name", "value")

FIGURE_SERIES = {
    1: ("I", "II"),
    2: ("III", "IV"),
    3: ("VV", "TI", "NF"),
    4: ("C", "CPRIME", "4S"),
    5: ("C", "CPRIME", "4S"),
}
FIGURE_STEPS = {1: 10000, 2: 5000, 3: 10000, 4: 10000, 5: 10000}


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v)
    return f"{float(v):.17g}"


def write_csv(fh, header, rows) -> None:
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(fmt(v) for v in row) + "\n")


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


@dataclass
class RunConfig:
    algorithm: str
    steps_per_period: int = 10000
    periods: int = 1
    initial: PhaseState | None = None
    sample_every: int = 10
    output_path: str | None = None
    alpha: float | None = None
    e: float | None = None

    def __post_init__(self):
        if self.steps_per_period < 100:
            raise ValueError("--steps must be at least 100")
        if self.periods < 1:
            raise ValueError("--periods must be at least 1")
        if self.sample_every < 1:
            raise ValueError("--sample-every must be at least 1")

    def state(self) -> PhaseState:
        return ex.standard_initial_state() if self.initial is None else self.initial


def trajectory_rows(rec: ex.TrajectoryRecord):
    for i in range(len(rec)):
        yield (
            rec.t[i], rec.q[i, 0], rec.q[i, 1], rec.p[i, 0], rec.p[i, 1],
            rec.energy[i], rec.angular_momentum[i], rec.lrl_angle[i], rec.h0_deviation[i],
        )


def _tailored_e(cfg_e, s0: PhaseState) -> float:
    return orbit_elements(s0).eccentricity if cfg_e is None else cfg_e


def cmd_run(cfg: RunConfig) -> int:
    s0 = cfg.state()
    scheme, _ = named_scheme(cfg.algorithm, alpha=cfg.alpha, e=_tailored_e(cfg.e, s0))
    rec = ex.integrate_period(scheme, s0, cfg.steps_per_period, cfg.periods, cfg.sample_every)
    with _output(cfg.output_path) as fh:
        write_csv(fh, RUN_HEADER, trajectory_rows(rec))
    return EXIT_OK


def _default_eps(semi_latus: float, e: float) -> float:
    a = semi_latus / (1.0 - e * e)
    return 2.0 * math.pi * a**1.5 / 10000


def cmd_predict(algorithm: str, semi_latus: float, e: float, eps: float | None, out=None) -> int:
    out = out or sys.stdout
    scheme, coeffs = named_scheme(algorithm, e=e)
    eps = _default_eps(semi_latus, e) if eps is None else eps
    pred = precession_prediction(coeffs, semi_latus, e)
    scale, _ = ex.precession_scale(scheme.name, eps)
    print(f"algorithm {scheme.name}  p={semi_latus:g}  e={e:g}  eps={eps:.6g}", file=out)
    print(f"{'term':<8}{'coefficient':>16}{'delta_theta':>18}{'contribution':>18}", file=out)
    for tag in ErrorHamiltonianId:
        c = coeffs.get(tag)
        dt = pred.per_term[tag]
        print(f"{tag.value:<8}{c:>16.8g}{dt:>18.10g}{c * dt:>18.10g}", file=out)
    print(f"second order (x eps^2): {pred.second_order():.10g}", file=out)
    print(f"fourth order (x eps^4): {pred.fourth_order():.10g}", file=out)
    total = pred.total(eps)
    print(f"total per period: {total:.10g}", file=out)
    print(f"scaled total: {total / scale:.10g}", file=out)
    return EXIT_OK


def verify_lines(m: ex.MeasurementResult, ref: ex.Reference | None):
    """Yield ``(label, ok, detail)`` for each comparison on a measurement."""
    pred = m.predicted_scaled_precession
    meas = m.scaled_precession
    if pred != 0.0 and abs(pred) > 1e-9:
        rel = abs(meas - pred) / abs(pred)
        yield "prediction", rel < ex.PREDICTION_RTOL, f"measured {meas:.10g} predicted {pred:.10g} (rel {rel:.2e})"
    if ref is not None:
        diff = abs(meas - ref.scaled_precession)
        yield (
            "reference",
            diff <= ref.tolerance,
            f"measured {meas:.10g} reference {ref.scaled_precession:.10g} +- {ref.tolerance:g}",
        )
        if ref.max_abs_scaled is not None:
            yield (
                "max over period",
                m.max_abs_scaled_precession <= ref.max_abs_scaled,
                f"{m.max_abs_scaled_precession:.6g} <= {ref.max_abs_scaled:g}",
            )


def cmd_verify(algorithm: str, steps: int | None, out=None) -> int:
    out = out or sys.stdout
    key = normalize_name(algorithm)
    named_scheme(key)  # unknown ids fail before any work
    ref = ex.REFERENCE_MEASUREMENTS.get(key)
    if steps is None:
        steps = ref.steps_per_period if ref else 10000
    m = ex.measure_scaled_precession(key, steps)
    ok_all = True
    for label, ok, detail in verify_lines(m, ref):
        ok_all &= ok
        print(f"{'PASS' if ok else 'FAIL'} {key} N={steps} {label}: {detail}", file=out)
    return EXIT_OK if ok_all else EXIT_VERIFY


def table_rows(max_n: int, e_list):
    for n in range(max_n + 1):
        for e in e_list:
            yield n, e, c_n(n, e)


def cmd_table(max_n: int, e_list, output_path=None) -> int:
    with _output(output_path) as fh:
        write_csv(fh, TABLE_HEADER, table_rows(max_n, e_list))
    return EXIT_OK


def figure_rows(which: int, steps: int | None = None, sample_every: int = 10):
    """Rows ``(t/P, series, value)`` for one of the five figures."""
    if which not in FIGURE_SERIES:
        raise ValueError("figure must be between 1 and 5")
    steps = FIGURE_STEPS[which] if steps is None else steps
    s0 = ex.standard_initial_state()
    for name in FIGURE_SERIES[which]:
        scheme, _ = named_scheme(name)
        rec = ex.integrate_period(scheme, s0, steps, 1, sample_every)
        if which == 5:
            values = -rec.h0_deviation / rec.eps**4
        else:
            scale, _ = ex.precession_scale(name, rec.eps)
            values = rec.lrl_angle / scale
        for t, v in zip(rec.t / rec.period, values):
            yield t, name, v


def cmd_figure(which: int, output_path=None, steps=None, sample_every=10) -> int:
    rows = list(figure_rows(which, steps, sample_every))
    with _output(output_path) as fh:
        write_csv(fh, FIGURE_HEADER, rows)
    return EXIT_OK


def _parse_state(text: str) -> PhaseState:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected qx,qy,px,py") from None
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("expected qx,qy,px,py")
    return PhaseState.from_components(*vals)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symprec", description="Precession of symplectic integrators on Kepler orbits."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    names = ", ".join(ALGORITHM_NAMES)

    run = sub.add_parser("run", help="integrate an orbit and write the trajectory as CSV")
    run.add_argument("--algorithm", required=True, help=names)
    run.add_argument("--steps", type=int, default=10000, help="steps per period")
    run.add_argument("--periods", type=int, default=1)
    run.add_argument("--sample-every", type=int, default=10)
    run.add_argument("--initial", type=_parse_state, default=None, help="qx,qy,px,py")
    run.add_argument("--alpha", type=float, default=None, help="gradient split for CPRIME")
    run.add_argument("--e", type=float, default=None, help="eccentricity for TAILORED")
    run.add_argument("--out", default=None)

    pred = sub.add_parser("predict", help="analytic precession of an algorithm")
    pred.add_argument("--algorithm", required=True, help=names)
    pred.add_argument("--e", type=float, default=0.9)
    pred.add_argument("--p", type=float, default=1.0, help="semi-latus rectum")
    pred.add_argument("--eps", type=float, default=None, help="step size (default P/10000)")

    ver = sub.add_parser("verify", help="measure and compare against prediction and reference")
    ver.add_argument("--algorithm", required=True, help=names)
    ver.add_argument("--steps", type=int, default=None)

    tab = sub.add_parser("table", help="C_n(e) values as CSV")
    tab.add_argument("--max-n", type=int, default=8)
    tab.add_argument("--e", type=float, nargs="+", default=[0.0, 0.3, 0.9])
    tab.add_argument("--out", default=None)

    fig = sub.add_parser("figure", help="data series behind figures 1-5 as CSV")
    fig.add_argument("--which", type=int, required=True, choices=range(1, 6))
    fig.add_argument("--steps", type=int, default=None)
    fig.add_argument("--sample-every", type=int, default=10)
    fig.add_argument("--out", default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            cfg = RunConfig(
                algorithm=args.algorithm,
                steps_per_period=args.steps,
                periods=args.periods,
                initial=args.initial,
                sample_every=args.sample_every,
                output_path=args.out,
                alpha=args.alpha,
                e=args.e,
            )
            return cmd_run(cfg)
        if args.command == "predict":
            return cmd_predict(args.algorithm, args.p, args.e, args.eps)
        if args.command == "verify":
            return cmd_verify(args.algorithm, args.steps)
        if args.command == "table":
            return cmd_table(args.max_n, args.e, args.out)
        if args.command == "figure":
            return cmd_figure(args.which, args.out, args.steps, args.sample_every)
    except UnknownAlgorithmError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    except SingularityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
