"""Command-line front end.

    focalrenorm elliptic   --u 0.7 --m 0.25
    focalrenorm trajectory --potential pendulum --v 0.3 --t-max 20 --out traj.csv
    focalrenorm period     --potential quartic:-1 --v-grid 0.01:0.1:10 --fit --out T.csv
    focalrenorm renorm     --potential pendulum --n 100,1000,10000 --eps 0.2 --out conv.csv
    focalrenorm focal      --mode asymptotic --ell -1 --t-max 9.42 --out grid.csv --image grid.pgm

Exit status: 0 on success, 2 on usage errors, 1 when a computation rejects its
inputs (periodic band, time window, integration failure).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import dynamics, export, focal, period_map as period_mod, potentials as pot, renorm
from .elliptic import complete_k, jacobi_eval
from .errors import DomainError, IntegrationError


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return value


def _positive(text: str) -> float:
    value = _finite(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return value


def _int_list(text: str) -> list[int]:
    return [_count(s) for s in text.split(",") if s.strip()]


def _span(text: str):
    """``a:b:steps`` -> ``numpy.linspace(a, b, steps)``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected a:b:steps, got {text!r}")
    a, b, steps = _finite(parts[0]), _finite(parts[1]), _count(parts[2])
    return np.linspace(a, b, steps)


def _pair(text: str):
    parts = text.split(",") if "," in text else text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected lo,hi, got {text!r}")
    lo, hi = _finite(parts[0]), _finite(parts[1])
    if not lo < hi:
        raise argparse.ArgumentTypeError("need lo < hi")
    return lo, hi


def _ell(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("ell must be +1 or -1") from exc
    if value not in (-1, 1):
        raise argparse.ArgumentTypeError("ell must be +1 or -1")
    return value


def _potential(text: str):
    try:
        return pot.make_potential(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="focalrenorm", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("elliptic", help="Jacobi sn, cn, dn, sd and K(m)")
    p.add_argument("--u", type=_finite, required=True)
    p.add_argument("--m", type=_finite, required=True)
    p.add_argument("--out")

    p = sub.add_parser("trajectory", help="integrate x'' = -V'(x) from x=0, x'=v")
    p.add_argument("--potential", type=_potential, required=True)
    p.add_argument("--v", type=_finite, required=True)
    p.add_argument("--t-max", type=_finite, required=True)
    p.add_argument("--mode", choices=("adaptive", "symplectic"), default="adaptive")
    p.add_argument("--tol", type=_positive, default=dynamics.DEFAULT_TOL)
    p.add_argument("--step", type=_positive, default=dynamics.DEFAULT_STEP)
    p.add_argument("--samples", type=_count, default=1001)
    p.add_argument("--closed-form", action="store_true",
                   help="use the elliptic solution (quartic potentials only)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("period", help="period map T(v)")
    p.add_argument("--potential", type=_potential, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--v", type=_finite)
    g.add_argument("--v-grid", type=_span)
    p.add_argument("--fit", action="store_true", help="print the fitted v^2 coefficient")
    p.add_argument("--physical", action="store_true", help="velocities and periods in physical units")
    p.add_argument("--out", required=True)

    p = sub.add_parser("renorm", help="convergence of x_n to the universal trajectory")
    p.add_argument("--potential", type=_potential, required=True)
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--eps", type=_finite, required=True)
    p.add_argument("--v-grid", type=_span, default=None)
    p.add_argument("--t-samples", type=_count, default=64)
    p.add_argument("--k", type=_positive, default=renorm.K_WINDOW)
    p.add_argument("--threads", type=_count, default=1)
    p.add_argument("--cells", help="per-cell CSV path (default: <out>.cells.csv)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("focal", help="focal-decomposition index grid")
    p.add_argument("--mode", choices=("asymptotic", "numeric", "renormalized"), default="asymptotic")
    p.add_argument("--ell", type=_ell, default=None)
    p.add_argument("--potential", type=_potential, default=None)
    p.add_argument("--n", type=_count, default=10**4)
    p.add_argument("--t-max", type=_positive, default=3 * math.pi)
    p.add_argument("--t-steps", type=_count, default=512)
    p.add_argument("--x-steps", type=_count, default=256)
    p.add_argument("--x-max", type=_positive, default=None,
                   help="x range is [-x_max, x_max] (default 1, or 3 in numeric mode)")
    p.add_argument("--v-band", type=_pair, default=None)
    p.add_argument("--samples", type=_count, default=2001)
    p.add_argument("--units", choices=("normalized", "physical"), default=None)
    p.add_argument("--threads", type=_count, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--image")
    return parser


def _emit(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _cmd_elliptic(args, parser):
    if not 0.0 <= args.m < 1.0:
        parser.error("--m must lie in [0, 1)")
    tri = jacobi_eval(args.u, args.m)
    row = (args.u, args.m, tri.sn, tri.cn, tri.dn, tri.sn / tri.dn, complete_k(args.m))
    _emit(args.out, export.csv_text(("u", "m", "sn", "cn", "dn", "sd", "K"), [row]))


def _cmd_trajectory(args, parser):
    if args.t_max < 0:
        parser.error("--t-max must be non-negative")
    p = args.potential
    if args.t_max > 0:
        pot.check_band(p, args.v)
    t_eval = np.linspace(0.0, args.t_max, args.samples) if args.t_max > 0 else None
    if args.closed_form:
        if not p.is_quartic:
            parser.error("--closed-form needs a quartic potential")
        sample = dynamics.closed_form_sample(p.ell, args.v, t_eval if t_eval is not None else [0.0])
    else:
        sample = dynamics.integrate(p, args.v, args.t_max, mode=args.mode, tol=args.tol,
                                    t_eval=t_eval, step=args.step)
    rows = zip(sample.t, sample.x, sample.xdot, sample.energy)
    export.write_csv(args.out, ("t", "x", "xdot", "energy"), rows)


def _cmd_period(args, parser):
    p = args.potential
    grid = np.array([args.v]) if args.v is not None else args.v_grid
    scale = p.mu * p.omega if args.physical else 1.0
    vn = grid / scale
    pot.check_band(p, vn)
    T = period_mod.periods(p, vn) / (p.omega if args.physical else 1.0)
    export.write_csv(args.out, ("v", "T"), zip(grid, T))
    if args.fit:
        if vn.size < 2:
            parser.error("--fit needs --v-grid with at least 2 points")
        coef = period_mod.period_expansion_check(p, vn)
        expected = -0.75 * math.pi * p.ell
        print(f"# fit v2_coefficient={coef:.17g} expected={expected:.17g} "
              f"rel_err={abs(coef - expected) / abs(expected):.3e}")


def _cmd_renorm(args, parser):
    if not 0.0 < args.eps < 1.0 / 3.0:
        parser.error("--eps must lie in (0, 1/3)")
    if any(b <= a for a, b in zip(args.n, args.n[1:])):
        parser.error("--n values must be increasing")
    if args.v_grid is not None and np.any(np.abs(args.v_grid) > 1):
        parser.error("--v-grid must lie in [-1, 1]")
    table = renorm.convergence_experiment(
        args.potential, args.eps, args.n, v_grid=args.v_grid, t_samples=args.t_samples,
        k=args.k, threads=args.threads,
    )
    export.write_csv(args.out, ("n", "sup_error", "window"), table.rows)
    cells = args.cells or str(Path(args.out).with_suffix("")) + ".cells.csv"
    export.write_csv(cells, ("n", "v", "t", "x_n", "X", "abs_err"), table.cells)


def _cmd_focal(args, parser):
    if args.mode == "asymptotic":
        if args.ell is None:
            if args.potential is None:
                parser.error("asymptotic mode needs --ell or --potential")
            args.ell = args.potential.ell
        x_max = args.x_max or 1.0
        if x_max > 1:
            parser.error("asymptotic mode needs --x-max <= 1")
        grid = focal.asymptotic_grid(args.ell, (0.0, args.t_max), (-x_max, x_max),
                                     (args.t_steps, args.x_steps))
    else:
        if args.potential is None:
            parser.error(f"{args.mode} mode needs --potential")
        p = args.potential
        x_max = args.x_max or (3.0 if args.mode == "numeric" else 1.0)
        t_axis = np.linspace(0.0, args.t_max, args.t_steps + 1)[1:]
        x_axis = np.linspace(-x_max, x_max, args.x_steps)
        if args.mode == "numeric":
            units = args.units or ("physical" if p.kind == "pendulum" else "normalized")
            band = args.v_band or (-0.99 * pot.periodic_band(p, units == "physical"),
                                   0.99 * pot.periodic_band(p, units == "physical"))
            grid = focal.numeric_grid(p, t_axis, x_axis, band, samples=args.samples, units=units)
        else:
            grid = focal.renormalized_grid(p, args.n, t_axis, x_axis,
                                           resolution=args.samples, threads=args.threads)
    export.write_grid_csv(args.out, grid)
    if args.image:
        export.write_pgm(args.image, grid)


COMMANDS = {
    "elliptic": _cmd_elliptic,
    "trajectory": _cmd_trajectory,
    "period": _cmd_period,
    "renorm": _cmd_renorm,
    "focal": _cmd_focal,
}


_SPAN_FLAGS = ("--v-grid", "--v-band")


def _glue_spans(argv):
    """Let ``--v-grid -1:1:21`` through; argparse would read ``-1:1:21`` as a flag."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _SPAN_FLAGS:
            nxt = next(it, None)
            if nxt is not None:
                tok = f"{tok}={nxt}"
        out.append(tok)
    return out


def run(argv=None) -> int:
    parser = build_parser()
    argv = _glue_spans(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (DomainError, IntegrationError) as exc:
        print(f"focalrenorm: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
