"""Command-line front end: every command writes one CSV table.

Output starts with a ``# params: ...`` comment listing every resolved option
(re-running with those options reproduces the file byte for byte), then a
header row. Numbers are written with 17 significant digits.

Exit codes: 0 success, 1 numerical failure, 2 invalid usage.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import __version__
from ._backend import thread_count
from .errors import GbmExfunError
from .inversion import METHODS, InversionConfig, cdf_at, pdf_at
from .mc import INTEGRATORS, McConfig, empirical_cdf, simulate_integrals
from .model import GbmParams
from .pde import ode_residual, pde_residual, write_residual_csv
from .transforms import cdf_transform, ccdf_transform, pdf_transform

GRID_HELP = ("grid as START:STOP:COUNT:SPACING with SPACING 'linear' or 'log' "
             "(one flag instead of repeated values keeps command lines short)")


class Grid:
    """Parsed ``start:stop:count:spacing`` specification."""

    def __init__(self, text: str):
        parts = text.split(":")
        if len(parts) != 4:
            raise argparse.ArgumentTypeError(f"expected START:STOP:COUNT:SPACING, got {text!r}")
        try:
            self.start, self.stop = float(parts[0]), float(parts[1])
            self.count = int(parts[2])
        except ValueError:
            raise argparse.ArgumentTypeError(f"non-numeric grid bounds or count in {text!r}")
        self.spacing = {"lin": "linear"}.get(parts[3], parts[3])
        if self.spacing not in ("linear", "log"):
            raise argparse.ArgumentTypeError(f"spacing must be 'linear' or 'log', got {parts[3]!r}")
        if self.count < 1:
            raise argparse.ArgumentTypeError(f"grid count must be >= 1, got {self.count}")
        if not self.start < self.stop:
            raise argparse.ArgumentTypeError(f"grid start must be < stop in {text!r}")
        if self.spacing == "log" and self.start <= 0:
            raise argparse.ArgumentTypeError(f"log spacing needs positive endpoints in {text!r}")
        self.text = text

    def values(self) -> list:
        if self.count == 1:
            return [self.start]
        if self.spacing == "log":
            return list(np.geomspace(self.start, self.stop, self.count))
        return list(np.linspace(self.start, self.stop, self.count))

    def __str__(self):
        return self.text


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def _add_point_or_grid(parser, name: str, unit: str, required: bool = True):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument(f"--{name}", type=float, metavar="VALUE", help=f"single {name} value ({unit})")
    group.add_argument(f"--{name}-grid", type=Grid, metavar="SPEC", help=f"{name} {GRID_HELP} ({unit})")


def _add_model(parser):
    parser.add_argument("--mu", type=float, required=True, help="drift of X (per unit time, any sign)")
    parser.add_argument("--sigma", type=float, required=True, help="volatility of X (per sqrt time, > 0)")
    parser.add_argument("-o", "--output", default="-", help="output CSV path ('-' for stdout)")


def _add_inversion(parser):
    parser.add_argument("--method", default="gaver_stehfest", choices=list(METHODS) + ["stehfest"],
                        help="Laplace inversion scheme (default gaver_stehfest)")
    parser.add_argument("--nodes", type=int, default=None,
                        help="Stehfest order N (even, 8..20) or contour node count (dimensionless)")
    parser.add_argument("--contour-shift", type=float, default=11.5,
                        help="Bromwich abscissa times t (dimensionless; line Re(s) = shift/t)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gbm-exfun",
        description="Law of I_t = int_0^t exp(-(mu s + sigma W_s)) ds via Laplace inversion. "
                    "y and t are in time units, lambda in 1/time.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="closed-form transforms P, Fhat, phat at (y, lambda)")
    _add_model(p)
    _add_point_or_grid(p, "y", "level of I_t, time units")
    _add_point_or_grid(p, "lambda", "Laplace frequency, 1/time, > 0")

    for name, what in (("cdf", "CDF F(t, y) = P(I_t <= y)"), ("pdf", "density p_t(y) of I_t")):
        p = sub.add_parser(name, help=f"{what} by numerical inversion")
        _add_model(p)
        _add_point_or_grid(p, "t", "time horizon, > 0")
        _add_point_or_grid(p, "y", "level of I_t, time units, > 0")
        _add_inversion(p)

    p = sub.add_parser("table", help="CDF and density side by side on a (t, y) grid")
    _add_model(p)
    _add_point_or_grid(p, "t", "time horizon, > 0")
    _add_point_or_grid(p, "y", "level of I_t, time units, > 0")
    _add_inversion(p)

    p = sub.add_parser("mc-check", help="compare the inverted CDF with a Monte Carlo estimate")
    _add_model(p)
    _add_point_or_grid(p, "t", "time horizon, > 0")
    _add_point_or_grid(p, "y", "level of I_t, time units, > 0")
    _add_inversion(p)
    p.add_argument("--paths", type=int, default=100_000, help="number of simulated paths (count)")
    p.add_argument("--steps-per-unit", type=int, default=1000, help="time steps per unit time (1/time)")
    p.add_argument("--seed", type=int, default=0, help="64-bit unsigned RNG seed")
    p.add_argument("--integrator", default="trapezoid", choices=INTEGRATORS,
                   help="quadrature for the time integral of exp(-X)")
    p.add_argument("--bias", type=float, default=0.003,
                   help="discretization bias allowance added to 3 standard errors (probability)")

    p = sub.add_parser("verify", help="finite-difference residuals of the ODE (transform) or PDE (CDF)")
    _add_model(p)
    p.add_argument("--kind", choices=("ode", "pde"), default="ode", help="which equation to check")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="Laplace frequency for --kind ode (1/time)")
    p.add_argument("--t-grid", type=Grid, default=Grid("0.5:2:4:linear"),
                   help=f"t {GRID_HELP} for --kind pde (time units)")
    p.add_argument("--y-grid", type=Grid, default=Grid("0.1:10:50:log"),
                   help=f"y {GRID_HELP} (time units)")
    p.add_argument("--rel-step", type=float, default=None,
                   help="stencil step relative to the coordinate (dimensionless; "
                        "default 1e-4 for ode, 1e-2 for pde)")
    _add_inversion(p)
    return parser


def _values(args, name):
    single = getattr(args, name)
    grid = getattr(args, f"{name}_grid")
    return [single] if grid is None else grid.values()


def _flag_value(val) -> str:
    return repr(val) if isinstance(val, float) else str(val)


def _params_comment(args) -> str:
    """Provenance line; each ``key=value`` maps back to ``--key value``."""
    head = ("mu", "sigma", "seed")
    items = [f"{key}={_flag_value(getattr(args, key, None))}" for key in head]
    items.append(f"command={args.command}")
    for key in sorted(vars(args)):
        val = getattr(args, key)
        if key in head or key in ("command", "output") or val is None:
            continue
        items.append(f"{FLAG_NAMES.get(key, key.replace('_', '-'))}={_flag_value(val)}")
    return "# params: " + " ".join(items)


FLAG_NAMES = {"lam": "lambda"}


def _inversion_cfg(args) -> InversionConfig:
    return InversionConfig(method=args.method, nodes=args.nodes, contour_shift=args.contour_shift)


def _run_transform(args, params, writer):
    writer.writerow(["y", "lambda", "P", "Fhat", "phat"])
    for y in _values(args, "y"):
        for lam in _values(args, "lambda"):
            row = (ccdf_transform(params, y, lam).real, cdf_transform(params, y, lam).real,
                   pdf_transform(params, y, lam).real)
            writer.writerow([_fmt(y), _fmt(lam), *map(_fmt, row)])


def _run_inverted(args, params, writer, func):
    cfg = _inversion_cfg(args)
    writer.writerow(["t", "y", "value", "err_est"])
    for t in _values(args, "t"):
        for y in _values(args, "y"):
            r = func(params, t, y, cfg)
            writer.writerow([_fmt(t), _fmt(y), _fmt(r.value), _fmt(r.method_error_estimate)])


def _run_table(args, params, writer):
    cfg = _inversion_cfg(args)
    writer.writerow(["t", "y", "F", "p", "F_err", "p_err"])
    for t in _values(args, "t"):
        for y in _values(args, "y"):
            f = cdf_at(params, t, y, cfg)
            d = pdf_at(params, t, y, cfg)
            writer.writerow([_fmt(t), _fmt(y), _fmt(f.value), _fmt(d.value),
                             _fmt(f.method_error_estimate), _fmt(d.method_error_estimate)])


def _run_mc_check(args, params, writer):
    cfg = _inversion_cfg(args)
    ts = sorted(_values(args, "t"))
    mc = McConfig(paths=args.paths, steps_per_unit_time=args.steps_per_unit, horizon=ts[-1],
                  seed=args.seed, integrator=args.integrator)
    samples = simulate_integrals(params, mc, ts)
    writer.writerow(["t", "y", "analytic", "mc", "se", "pass"])
    for j, t in enumerate(ts):
        for y in _values(args, "y"):
            analytic = cdf_at(params, t, y, cfg).value
            est = empirical_cdf(samples[:, j], y)
            ok = abs(analytic - est.value) <= 3.0 * est.std_error + args.bias
            writer.writerow([_fmt(t), _fmt(y), _fmt(analytic), _fmt(est.value),
                             _fmt(est.std_error), "true" if ok else "false"])


def _run_verify(args, params, writer):
    ys = args.y_grid.values()
    if args.kind == "ode":
        report = ode_residual(params, args.lam, ys, rel_step=args.rel_step or 1e-4)
    else:
        step = args.rel_step or 1e-2
        report = pde_residual(params, args.t_grid.values(), ys, cfg=_inversion_cfg(args),
                              rel_step_t=step, rel_step_y=step)
    writer.writerow([f"# norm_rel={report.norm_rel:.17g} inversion_error={report.inversion_error:.17g}"])
    write_residual_csv(writer.stream, report)


def _validate(parser, args):
    if not args.sigma > 0:
        parser.error("--sigma must be > 0")
    for name in ("t", "y"):
        single = getattr(args, name, None)
        if single is not None and not single > 0:
            if name == "y" and args.command == "transform" and single == 0:
                continue
            parser.error(f"--{name} must be > 0")
    if args.command == "transform":
        lam = getattr(args, "lambda")
        if lam is not None and not lam > 0:
            parser.error("--lambda must be > 0")
        grid = getattr(args, "lambda_grid")
        if grid is not None and grid.start <= 0:
            parser.error("--lambda-grid must be > 0")
    for name in ("t_grid", "y_grid"):
        grid = getattr(args, name, None)
        if grid is not None and grid.start <= 0 and not (args.command == "transform" and grid.start == 0):
            parser.error(f"--{name.replace('_', '-')} must be > 0")
    if args.command == "verify" and args.kind == "ode" and not args.lam > 0:
        parser.error("--lambda must be > 0")
    if args.command == "mc-check":
        if args.paths < 1:
            parser.error("--paths must be >= 1")
        if args.steps_per_unit < 1:
            parser.error("--steps-per-unit must be >= 1")
        if not 0 <= args.seed < 2 ** 64:
            parser.error("--seed must be a 64-bit unsigned integer")
    if hasattr(args, "method"):
        try:
            _inversion_cfg(args)
        except ValueError as exc:
            parser.error(f"--nodes/--contour-shift: {exc}")
    try:
        thread_count()
    except ValueError as exc:
        parser.error(str(exc))


class _Writer:
    def __init__(self, stream):
        self.stream = stream
        self._csv = csv.writer(stream, lineterminator="\n")

    def writerow(self, row):
        if len(row) == 1 and str(row[0]).startswith("#"):
            self.stream.write(row[0] + "\n")
        else:
            self._csv.writerow(row)


RUNNERS = {
    "transform": _run_transform,
    "cdf": lambda a, p, w: _run_inverted(a, p, w, cdf_at),
    "pdf": lambda a, p, w: _run_inverted(a, p, w, pdf_at),
    "table": _run_table,
    "mc-check": _run_mc_check,
    "verify": _run_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    params = GbmParams(args.mu, args.sigma)
    out = sys.stdout if args.output == "-" else open(args.output, "w", newline="")
    try:
        writer = _Writer(out)
        writer.writerow([_params_comment(args)])
        RUNNERS[args.command](args, params, writer)
    except GbmExfunError as exc:
        print(f"gbm-exfun: numerical failure ({exc.kind}): {exc}", file=sys.stderr)
        return 1
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
