"""Command-line entry point: ``logse <subcommand> [options]``.

Subcommands
-----------
converge-time     errors vs τ for the Gausson on (-1, 1)^d; ``converge_time.csv``
converge-space    errors vs h (1D), or the 2D combined τ = h^2 study; ``converge_space.csv``
dynamics-1d       two-Gausson runs on (-40, 40); snapshot files ``x |u| Re Im``
dynamics-2d       tanh(x)tanh(y)exp(-x^2-y^2) on (-10, 10)^2; snapshot files ``x y |u| Re Im``
verify-lemmas     randomized bound checks; ``verify_lemmas.txt``
truncation-check  truncation error of the Gausson per τ; ``truncation.csv``

Convergence CSVs have columns ``h,tau,e2,einf,L2`` (one row per refinement)
and a companion ``*_slopes.csv`` with the least-squares log-log slopes.
Series files have columns ``t mass energy linf``.  Reals use 17 significant
digits.

``--config FILE`` reads flat ``key = value`` lines (``#`` starts a comment);
keys are the long option names without dashes, e.g. ``tau = 1e-3``.
Command-line flags override the file.

Exit status: 0 success, 1 configuration error or constraint violation
(violations only fail under ``--strict``), 2 solver failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .banded import SingularMatrixError
from .imex import check_constraints, n_steps
from .solutions import GaussonSpec

log = logging.getLogger("logse")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list:
    return [float(v) for v in str(text).split(",") if v.strip()]


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


# key -> converter; shared by flags and config files
KEYS = {
    "tau": float, "h": float, "degree": int, "lambda": float, "T": float, "case": str,
    "seed": int, "out": str, "samples": int, "dim": int, "workers": int,
    "taus": _floats, "hs": _floats, "times": _floats, "long": _bool, "strict": _bool,
}


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file."""
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file")
    common.add_argument("--out", help="output directory (default: current directory)")
    common.add_argument("--seed", type=int)
    common.add_argument("--tau", type=float, help="time step")
    common.add_argument("--h", type=float, help="mesh size (1D element length or 2D cell side)")
    common.add_argument("--degree", type=int, choices=(1, 2))
    common.add_argument("--lambda", dest="lambda", type=float, help="coupling constant (default -1)")
    common.add_argument("--T", type=float, help="final time")
    common.add_argument("--case", choices=("i", "ii", "iii"))
    common.add_argument("--dim", type=int, choices=(1, 2))
    common.add_argument("--taus", type=_floats, help="comma-separated time steps")
    common.add_argument("--hs", type=_floats, help="comma-separated mesh sizes")
    common.add_argument("--times", type=_floats, help="comma-separated snapshot times")
    common.add_argument("--samples", type=int, help="random samples per check")
    common.add_argument("--workers", type=int, help="parallel refinement runs")
    common.add_argument("--long", action="store_const", const=True,
                        help="converge-space: tau = 1e-5, T = 1")
    common.add_argument("--strict", action="store_const", const=True,
                        help="treat step-size constraint violations as errors")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="logse", description=__doc__.split("\n\n")[0],
                     epilog=__doc__.split("\n\n", 1)[1],
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in [
        ("converge-time", "temporal convergence table"),
        ("converge-space", "spatial (1D) or combined tau = h^2 (2D) convergence table"),
        ("dynamics-1d", "two-Gausson dynamics on (-40, 40)"),
        ("dynamics-2d", "tanh product dynamics on (-10, 10)^2"),
        ("verify-lemmas", "randomized checks of the nonlinearity and Gronwall bounds"),
        ("truncation-check", "truncation error of the exact Gausson"),
    ]:
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


DEFAULTS = {"out": ".", "seed": 0, "lambda": -1.0, "degree": 1, "dim": 1, "workers": 1,
            "samples": 100_000, "long": False, "strict": False, "case": "i"}


def resolve(args: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS)
    if args.config:
        opts.update(read_config(args.config))
    for key in KEYS:
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    return opts


class Context:
    def __init__(self, opts: dict):
        self.opts = opts
        self.out = Path(opts["out"])
        self.out.mkdir(parents=True, exist_ok=True)

    def get(self, key, default=None):
        return self.opts.get(key, default)

    def write(self, name: str, text: str) -> Path:
        path = self.out / name
        path.write_text(text)
        print(f"wrote {path}")
        return path

    def check(self, tau: float, h: float, degree: int, dim: int, T: float | None = None, diag=None):
        issues, ratio = check_constraints(tau, h, degree, dim)
        extra = f" (cell diagonal {diag:.6g})" if diag is not None else ""
        print(f"tau={tau:.6g} h={h:.6g}{extra} tau/h^(d/2)={ratio:.6g}")
        for msg in issues:
            log.warning("constraint violated: %s", msg)
        if issues and self.opts["strict"]:
            raise ConfigError(f"constraint violation under --strict: {'; '.join(issues)}")
        if T is not None:
            N = n_steps(T, tau)
            if not math.isclose(N * tau, T, rel_tol=1e-9, abs_tol=1e-15):
                log.warning("N_t * tau = %.17g differs from T = %.17g; final time is N_t * tau", N * tau, T)


def _gausson(opts, dim) -> GaussonSpec:
    return GaussonSpec(d=dim, b=1.0, lam=opts["lambda"])


def _report_table(ctx: Context, name: str, table: ex.ConvergenceTable) -> None:
    ctx.write(f"{name}.csv", table.to_csv())
    if len(table.rows) < 2:
        return
    ctx.write(f"{name}_slopes.csv", table.slopes_csv())
    for k, v in table.slopes.items():
        print(f"slope {k} vs {table.refined}: {v:.4f}")


def cmd_converge_time(ctx: Context) -> None:
    o = ctx.opts
    dim, r = o["dim"], o["degree"]
    h = o.get("h", 2**-5)
    T = o.get("T", 1.0)
    taus = o.get("taus") or ([o["tau"]] if "tau" in o else None) \
        or [(0.1 if dim == 1 else 0.01) * 2.0**-j for j in range(1, 6)]
    for tau in taus:
        ctx.check(tau, h, r, dim, T, diag=h * math.sqrt(2) if dim == 2 else None)
    table = ex.converge_time(_gausson(o, dim), h=h, taus=taus, r=r, T=T, workers=o["workers"])
    _report_table(ctx, "converge_time", table)


def cmd_converge_space(ctx: Context) -> None:
    o = ctx.opts
    if o["dim"] == 2:
        T = o.get("T", 1.0)
        for j in (1, 2, 3, 4):
            h = 1.0 / (20 + 4 * j)
            ctx.check(h * h, h, 1, 2, T, diag=h * math.sqrt(2))
        table = ex.converge_2d_combined(_gausson(o, 2), T=T, workers=o["workers"])
        _report_table(ctx, "converge_space", table)
        return
    r = o["degree"]
    tau, T = (1e-5, 1.0) if o["long"] else (o.get("tau", 1e-4), o.get("T", 0.01))
    hs = o.get("hs") or ([o["h"]] if "h" in o else None) or ex.default_space_steps(r)
    for h in hs:
        ctx.check(tau, h, r, 1, T)
    table = ex.converge_space(_gausson(o, 1), tau=tau, hs=hs, r=r, T=T, workers=o["workers"])
    _report_table(ctx, "converge_space", table)


def _fmt_time(t: float) -> str:
    return f"{t:.6g}"


def cmd_dynamics_1d(ctx: Context) -> None:
    o = ctx.opts
    tau, h, T = o.get("tau", 1e-4), o.get("h", 0.05), o.get("T", 1.0)
    ctx.check(tau, h, 1, 1, T)
    case = o["case"]
    snaps, series = ex.dynamics_two_gausson(case, T=T, tau=tau, h=h, lam=o["lambda"], times=o.get("times"))
    for k, t in enumerate(snaps.times):
        path = ctx.out / f"dynamics1d_case{case}_t{_fmt_time(t)}.dat"
        with open(path, "w") as fh:
            ex.write_snapshot(fh, snaps.rows(k), "x |u| Re Im")
        print(f"wrote {path}")
    with open(ctx.out / f"dynamics1d_case{case}_series.dat", "w") as fh:
        ex.write_series(fh, series)


def cmd_dynamics_2d(ctx: Context) -> None:
    o = ctx.opts
    tau, cell, T = o.get("tau", 1e-4), o.get("h", 0.1), o.get("T", 0.5)
    ctx.check(tau, cell, 1, 2, T, diag=cell * math.sqrt(2))
    times = o.get("times") or [0.0, 0.25, 0.5]
    snaps, series = ex.dynamics_2d_tanh(T=T, tau=tau, cell=cell, lam=o["lambda"], times=times)
    for k, t in enumerate(snaps.times):
        path = ctx.out / f"dynamics2d_t{_fmt_time(t)}.dat"
        with open(path, "w") as fh:
            ex.write_snapshot(fh, snaps.rows(k), "x y |u| Re Im")
        print(f"wrote {path}")
    with open(ctx.out / "dynamics2d_series.dat", "w") as fh:
        ex.write_series(fh, series)


def cmd_verify_lemmas(ctx: Context) -> int:
    report = ex.verify_lemmas(seed=ctx.opts["seed"], n_samples=ctx.opts["samples"])
    text = report.text()
    ctx.write("verify_lemmas.txt", text)
    sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_CONFIG


def cmd_truncation_check(ctx: Context) -> int:
    o = ctx.opts
    dim = o["dim"]
    h, T = o.get("h", 2**-5), o.get("T", 1.0)
    taus = o.get("taus") or [1e-2, 5e-3, 2.5e-3]
    reports = ex.truncation_study(_gausson(o, dim), taus=taus, T=T, n_cells=int(round(2.0 / h)))
    lines = ["tau,max_norm,max_bound,max_bound_laplacian,satisfied"]
    for rep in reports:
        lines.append(",".join([ex.FLOAT_FMT % rep.tau, ex.FLOAT_FMT % rep.max_norm,
                               ex.FLOAT_FMT % np.sqrt(rep.bounds.max()),
                               ex.FLOAT_FMT % np.sqrt(rep.bounds_laplacian.max()),
                               str(int(rep.satisfied))]))
    ctx.write("truncation.csv", "\n".join(lines) + "\n")
    for a, b in zip(reports[:-1], reports[1:]):
        print(f"max ||T^n|| ratio tau={a.tau:g} -> {b.tau:g}: {a.max_norm / b.max_norm:.4f}")
    return EXIT_OK if all(r.satisfied for r in reports) else EXIT_CONFIG


COMMANDS = {
    "converge-time": cmd_converge_time,
    "converge-space": cmd_converge_space,
    "dynamics-1d": cmd_dynamics_1d,
    "dynamics-2d": cmd_dynamics_2d,
    "verify-lemmas": cmd_verify_lemmas,
    "truncation-check": cmd_truncation_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        ctx = Context(resolve(args))
        status = COMMANDS[args.command](ctx) or EXIT_OK
    except ConfigError as exc:
        print(f"logse: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ex.SolverFailure, SingularMatrixError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"logse: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"logse: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return status


if __name__ == "__main__":
    sys.exit(main())
