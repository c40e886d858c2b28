"""Command-line front end.

    dkp-h3 geometry-check
    dkp-h3 mode --family sigma --eps 1.4142135623730951 --kappa 1 --m 1
    dkp-h3 verify --system full --family sigma --eps 1.4142135623730951 --kappa 1
    dkp-h3 dispersion --eps 1.4142135 --mass 1 --kappa-range 0:2:41
    dkp-h3 specfun --fn J --order 0 --arg 0

Exit status: 0 when every requested check passes, 1 on a tolerance failure,
2 on a usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .modes import QuantumNumbers, build_mode
from .operators import COMPONENT_NAMES
from .output import write_csv, write_json
from .specfun import FUNCTIONS, AccuracyLossError
from .verify import Grid, default_step, dispersion_scan, geometry_suite, verify_mode, _resolve

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
THREADS_ENV = "DKP_H3_THREADS"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    options: tuple[tuple[str, object], ...]

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        opts = {k: _plain(v) for k, v in vars(ns).items() if k not in ("command", "func")}
        return cls(ns.command, tuple(sorted(opts.items())))

    def header(self) -> dict:
        out = {"subcommand": self.subcommand, "version": __version__}
        out.update({k: v for k, v in self.options})
        return out


def _plain(v):
    """Config values as echoed in output headers."""
    if isinstance(v, tuple):
        return ":".join(format(x, ".17g") for x in v)
    if isinstance(v, complex):
        return f"{v.real:.17g}{v.imag:+.17g}j"
    if isinstance(v, float):
        return format(v, ".17g")
    return v


# ----------------------------------------------------------------------------
# argument helpers


def _range(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    if n < 1 or b < a:
        raise argparse.ArgumentTypeError(f"empty or decreasing range {text!r}")
    return (a, b, n)


def _sigma(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad sigma {text!r}") from None


def _positive(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return x


def _add_output(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", default="-", help="output path, '-' for stdout")


def _add_mode(p):
    p.add_argument("--family", choices=("sigma", "sigma0", "massless"), default="sigma")
    p.add_argument("--eps", type=float, default=2**0.5)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--lam", type=_positive, default=1.0)
    p.add_argument("--sigma", type=_sigma, default=None, help="helicity eigenvalue, e.g. 1j or 0.8")
    p.add_argument("--kappa", type=float, default=None, help="sigma = i*kappa")
    p.add_argument("--radial", choices=("J", "Y"), default="J")
    p.add_argument("--axial", choices=("decaying", "growing"), default="decaying")
    p.add_argument("--phi0", choices=("bessel", "gaussian"), default="bessel",
                   help="massless family: generating scalar")
    p.add_argument("--r-range", type=_range, default=(0.5, 3.0, 20), metavar="MIN:MAX:N")
    p.add_argument("--z-range", type=_range, default=(-1.0, 1.0, 20), metavar="MIN:MAX:N")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dkp-h3", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("geometry-check", help="closed-form geometry vs numeric oracle")
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--h", type=_positive, default=1e-4)
    p.add_argument("--tol", type=_positive, default=1e-7)
    p.set_defaults(func=cmd_geometry)

    p = sub.add_parser("mode", help="sample all ten components on a grid")
    _add_mode(p)
    p.set_defaults(func=cmd_mode)

    p = sub.add_parser("verify", help="residuals of a mode against an equation system")
    _add_mode(p)
    p.add_argument("--system", choices=("full", "full-expanded", "helicity", "sigma0", "massless", "scalar"),
                   default="full")
    p.add_argument("--h", type=_positive, default=None, help="FD step (default 1e-3; 1e-2 for scalar)")
    p.add_argument("--stencil", type=int, choices=(2, 4), default=2)
    p.add_argument("--no-richardson", action="store_true")
    p.add_argument("--tol", type=_positive, default=None, help="max relative residual (default 1e-6; 1e-7 scalar)")
    p.add_argument("--pointwise", action="store_true", help="JSON: include per-point residuals")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dispersion", help="scan the closure constraint over sigma = i*kappa")
    p.add_argument("--eps", type=float, required=False, default=None)
    p.add_argument("--mass", type=_positive, default=1.0)
    p.add_argument("--kappa-range", type=_range, default=(0.0, 2.0, 41), metavar="A:B:N")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--lam", type=_positive, default=1.0)
    p.add_argument("--r-range", type=_range, default=(0.5, 3.0, 20), metavar="MIN:MAX:N")
    p.add_argument("--z-range", type=_range, default=(-1.0, 1.0, 20), metavar="MIN:MAX:N")
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("specfun", help="evaluate one special function and its derivative")
    p.add_argument("--fn", choices=tuple(FUNCTIONS), required=False, default=None)
    p.add_argument("--order", type=float, default=None)
    p.add_argument("--arg", type=float, default=None)
    p.set_defaults(func=cmd_specfun)

    for action in sub.choices.values():
        _add_output(action)
        action.add_argument("--config", default=None, help="flat key=value file; flags override it")
    return parser


def _read_config(path: str) -> dict:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for n, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


_RANGE_FLAGS = ("--r-range", "--z-range", "--kappa-range")


def _glue_ranges(argv):
    """Let ``--z-range -1:1:20`` through; argparse would read ``-1:1:20`` as a flag."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in _RANGE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def parse_args(argv) -> argparse.Namespace:
    argv = _glue_ranges(argv)
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.config is None:
        return ns
    cfg = _read_config(ns.config)
    sub = parser._subparsers._group_actions[0].choices[ns.command]
    known = {a.dest: a for a in sub._actions}
    argv_cfg = []
    for key, value in cfg.items():
        action = known.get(key)
        if action is None or key in ("help", "config"):
            raise UsageError(f"unknown config key {key!r} for {ns.command}")
        flag = action.option_strings[-1] if action.option_strings[-1].startswith("--") else action.option_strings[0]
        if action.nargs == 0:
            if value.lower() in ("1", "true", "yes"):
                argv_cfg.append(flag)
        else:
            argv_cfg.append(f"{flag}={value}")
    # config first, then the command line so explicit flags win
    return parser.parse_args([ns.command, *argv_cfg, *argv[argv.index(ns.command) + 1:]])


# ----------------------------------------------------------------------------
# subcommands


def _emit(ns, text: str):
    if ns.output == "-":
        sys.stdout.write(text)
    else:
        with open(ns.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _grid(ns) -> Grid:
    (r0, r1, nr), (z0, z1, nz) = ns.r_range, ns.z_range
    try:
        return Grid(r0, r1, nr, z0, z1, nz)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _qn(ns) -> QuantumNumbers:
    if ns.sigma is not None and ns.kappa is not None:
        raise UsageError("give --sigma or --kappa, not both")
    if ns.family == "sigma":
        if ns.sigma is not None:
            sigma = ns.sigma
        elif ns.kappa is not None:
            sigma = 1j * ns.kappa
        else:
            if ns.eps**2 <= ns.mass**2:
                raise UsageError("--sigma/--kappa required when eps <= M")
            sigma = 1j * (ns.eps**2 - ns.mass**2) ** 0.5
    else:
        if (ns.sigma not in (None, 0)) or (ns.kappa not in (None, 0)):
            raise UsageError(f"family {ns.family} has sigma = 0")
        sigma = 0
    mass = 0.0 if ns.family == "massless" else ns.mass
    return QuantumNumbers(eps=ns.eps, m=ns.m, sigma=sigma, lam=ns.lam, mass=mass)


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def sample_mode(mode, grid: Grid, threads: int = 1) -> np.ndarray:
    """(n_r * n_z, 10) complex samples, row-major in r then z."""
    R, Z = grid.mesh()
    rows = np.array_split(np.arange(grid.n_r), max(1, min(threads, grid.n_r)))

    def chunk(idx):
        return mode.evaluate(R[idx], Z[idx]).data

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(chunk, rows))
    else:
        parts = [chunk(idx) for idx in rows]
    data = np.concatenate(parts, axis=1)  # (10, n_r, n_z)
    return data.reshape(10, -1).T


def cmd_geometry(ns, cfg: RunConfig) -> int:
    rows = geometry_suite(ns.points, ns.seed, ns.h, ns.tol)
    ok = all(r["pass"] for r in rows)
    if ns.format == "json":
        _emit(ns, write_json({"config": cfg.header(), "checks": rows, "pass": ok}))
    else:
        _emit(ns, write_csv(("check", "max_error", "tol", "pass"),
                            ([r["check"], r["max_error"], r["tol"], r["pass"]] for r in rows), cfg.header()))
    return EXIT_OK if ok else EXIT_FAIL


def _build(ns):
    qn = _qn(ns)
    try:
        return build_mode(ns.family, qn, ns.radial, ns.axial, ns.phi0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_mode(ns, cfg: RunConfig) -> int:
    mode = _build(ns)
    grid = _grid(ns)
    samples = sample_mode(mode, grid, _threads())
    R, Z = grid.mesh()
    columns = ["r", "z"] + [f"{part}({name})" for name in COMPONENT_NAMES for part in ("Re", "Im")]
    rows = []
    for (r, z), vals in zip(zip(R.ravel(), Z.ravel()), samples):
        row = [r, z]
        for v in vals:
            row += [v.real, v.imag]
        rows.append(row)
    meta = cfg.header() | {"is_solution": mode.is_solution}
    if ns.format == "json":
        _emit(ns, write_json({"config": meta, "mode": mode.metadata(), "columns": columns, "rows": rows}))
    else:
        _emit(ns, write_csv(columns, rows, meta))
    return EXIT_OK


def cmd_verify(ns, cfg: RunConfig) -> int:
    mode = _build(ns)
    grid = _grid(ns)
    system = _resolve(ns.system)
    h = default_step(system) if ns.h is None else ns.h
    tol = ns.tol if ns.tol is not None else (1e-7 if system == "scalar" else 1e-6)
    try:
        report = verify_mode(mode, system, grid, h, ns.stencil, extrapolate=not ns.no_richardson)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ok = report.diagnostic or report.passes(tol)
    if ns.format == "json":
        body = {"config": cfg.header(), "mode": mode.metadata(), "tolerance": tol,
                "pass": ok, "report": report.as_dict(ns.pointwise)}
        _emit(ns, write_json(body))
    else:
        meta = cfg.header() | {"tolerance": tol, "pass": ok, "diagnostic": report.diagnostic,
                               "extrapolated": report.extrapolated}
        cols = ("equation", "max_abs", "rms_abs", "max_rel", "rms_rel", "flagged_points", "convergence_order")
        _emit(ns, write_csv(cols, ([row[c] for c in cols] for row in report.rows()), meta))
    if not ok:
        print(f"verify: {system} exceeds tolerance {tol:g} in {', '.join(report.failing(tol))}",
              file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_dispersion(ns, cfg: RunConfig) -> int:
    if ns.eps is None:
        raise UsageError("dispersion needs --eps")
    a, b, n = ns.kappa_range
    kappas = np.linspace(a, b, n)
    rows = dispersion_scan(ns.eps, ns.mass, kappas, ns.m, ns.lam, _grid(ns))
    k_disp = min(rows, key=lambda r: r["dispersion_residual"])["kappa"]
    k_full = min(rows, key=lambda r: r["full_max_rel"])["kappa"]
    ok = k_disp == k_full
    meta = cfg.header() | {"kappa_min_dispersion": k_disp, "kappa_min_full": k_full, "pass": ok}
    if ns.format == "json":
        _emit(ns, write_json({"config": meta, "rows": rows}))
    else:
        cols = ("kappa", "dispersion_residual", "full_max_rel")
        _emit(ns, write_csv(cols, ([r[c] for c in cols] for r in rows), meta))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_specfun(ns, cfg: RunConfig) -> int:
    if ns.fn is None or ns.order is None or ns.arg is None:
        raise UsageError("specfun needs --fn, --order and --arg")
    try:
        val = FUNCTIONS[ns.fn](ns.order, ns.arg)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    row = {"fn": ns.fn, "order": ns.order, "arg": ns.arg,
           "value": float(np.real(val.value)), "derivative": float(np.real(val.derivative))}
    if ns.format == "json":
        _emit(ns, write_json({"config": cfg.header(), "result": row}))
    else:
        cols = ("fn", "order", "arg", "value", "derivative")
        _emit(ns, write_csv(cols, [[row[c] for c in cols]], cfg.header()))
    return EXIT_OK


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        ns = parse_args(argv)
        cfg = RunConfig.from_namespace(ns)
        return ns.func(ns, cfg)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"dkp-h3: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AccuracyLossError as exc:
        print(f"dkp-h3: accuracy loss: {exc} (achieved {exc.achieved:.2e})", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. `| head`); keep the interpreter from complaining at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = EXIT_OK
    sys.exit(code)
