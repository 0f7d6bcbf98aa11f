"""Command-line front end.

    lzring evolve   [--config FILE] [--KEY VALUE ...] [--output PATH]
    lzring sweep    [--config FILE] [--KEY VALUE ...] [--output PATH] [--threads N]
    lzring validate [--config FILE] [--KEY VALUE ...]
    lzring heatmap  SWEEP_CSV --x AXIS --y AXIS --output PATH

Config files hold one ``key = value`` pair per line; ``#`` starts a comment.
Command-line flags override file values.  Exit codes: 0 success, 1
config/input error, 2 numerical failure, 3 I/O failure.
"""

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from . import dynamics, model, observables, sweep
from .errors import ConfigError, GridError, LzError, NumericalError
from .operators import MAX_SITES

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2
EXIT_IO = 3

VALIDATE_RATES = (0.5, 1.0, 2.0, 7.0)
VALIDATE_LZ_TOL = 0.02
VALIDATE_FACTOR_TOL = 1e-8


@dataclass(frozen=True)
class RunConfig:
    n_sites: int = 4
    g: float = 1.0
    j1: float = 0.0
    j2: float = 0.0
    r: float = 1.0
    t_start: float = -30.0
    t_end: float = 30.0
    dt: float = 1e-3
    samples: int = 2001
    init_mode: str = "adiabatic"
    integrator: str = "split4"
    norm_tol: float = 1e-6
    threads: int = 0
    output: str = None
    j1_min: float = None
    j1_max: float = None
    j1_steps: int = 1
    j2_min: float = None
    j2_max: float = None
    j2_steps: int = 1
    r_min: float = None
    r_max: float = None
    r_steps: int = 1

    def integrator_config(self):
        return dynamics.IntegratorConfig(
            dt=self.dt,
            norm_tol=self.norm_tol,
            sample_count=self.samples,
            init_mode=self.init_mode,
            method=self.integrator,
        )

    def simulation(self):
        return sweep.Simulation(
            n=self.n_sites, g=self.g, t_start=self.t_start, t_end=self.t_end,
            integrator=self.integrator_config(),
        )

    def axis(self, name):
        lo = getattr(self, f"{name}_min")
        hi = getattr(self, f"{name}_max")
        steps = getattr(self, f"{name}_steps")
        base = getattr(self, name)
        lo = base if lo is None else lo
        hi = lo if hi is None else hi
        return sweep.Axis(lo, hi, steps)

    def grid(self):
        return sweep.GridSpec(j1=self.axis("j1"), j2=self.axis("j2"), r=self.axis("r"))

    @property
    def has_grid(self):
        return any(getattr(self, f"{a}_steps") > 1 for a in sweep.AXES)


_TYPES = {
    "n_sites": int, "samples": int, "threads": int,
    "j1_steps": int, "j2_steps": int, "r_steps": int,
    "init_mode": str, "integrator": str, "output": str,
}
KEYS = tuple(f.name for f in fields(RunConfig))


def _convert(key, raw, line=None):
    kind = _TYPES.get(key, float)
    text = raw.strip()
    if kind is str:
        if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
            text = text[1:-1]
        return text
    try:
        value = kind(text)
    except ValueError:
        raise ConfigError(f"cannot parse {text!r} as {kind.__name__}", key, line) from None
    if kind is float and not math.isfinite(value):
        raise ConfigError(f"value must be finite, got {text!r}", key, line)
    return value


def _validate(cfg, lines):
    def check(ok, key, message):
        if not ok:
            raise ConfigError(message, key, lines.get(key))

    check(1 <= cfg.n_sites <= MAX_SITES, "n_sites", f"must be in 1..{MAX_SITES}, got {cfg.n_sites}")
    check(cfg.g > 0, "g", f"must be > 0, got {cfg.g}")
    check(cfg.r > 0, "r", f"must be > 0, got {cfg.r}")
    check(cfg.t_start < cfg.t_end, "t_end", f"must exceed t_start={cfg.t_start}, got {cfg.t_end}")
    check(cfg.dt > 0, "dt", f"must be > 0, got {cfg.dt}")
    check(cfg.samples >= 2, "samples", f"must be >= 2, got {cfg.samples}")
    check((cfg.t_end - cfg.t_start) / cfg.dt >= cfg.samples, "samples",
          "window/dt must be at least the sample count")
    check(cfg.init_mode in dynamics.INIT_MODES, "init_mode",
          f"must be one of {', '.join(dynamics.INIT_MODES)}, got {cfg.init_mode!r}")
    check(cfg.integrator in dynamics.METHODS, "integrator",
          f"must be one of {', '.join(dynamics.METHODS)}, got {cfg.integrator!r}")
    check(cfg.norm_tol > 0, "norm_tol", f"must be > 0, got {cfg.norm_tol}")
    check(cfg.threads >= 0, "threads", f"must be >= 0, got {cfg.threads}")
    for name in sweep.AXES:
        steps = getattr(cfg, f"{name}_steps")
        lo = getattr(cfg, f"{name}_min")
        hi = getattr(cfg, f"{name}_max")
        check(steps >= 1, f"{name}_steps", f"must be >= 1, got {steps}")
        if steps > 1:
            check(lo is not None, f"{name}_min", f"required when {name}_steps > 1")
            check(hi is not None, f"{name}_max", f"required when {name}_steps > 1")
        if lo is not None and hi is not None:
            check(lo <= hi, f"{name}_max", f"must be >= {name}_min={lo}, got {hi}")
    r_axis = cfg.axis("r")
    check(r_axis.min > 0, "r_min", f"sweep rates must be > 0, got {r_axis.min}")
    grid = cfg.grid()
    check(grid.size <= sweep.MAX_POINTS, "j1_steps",
          f"grid has {grid.size} points, cap is {sweep.MAX_POINTS}")


def parse_config(text="", overrides=None):
    """Build a validated RunConfig from config-file text plus flag overrides."""
    values = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in KEYS:
            raise ConfigError("unknown key", key, lineno)
        if key in values:
            raise ConfigError(f"duplicate key (first set on line {lines[key]})", key, lineno)
        values[key] = _convert(key, value, lineno)
        lines[key] = lineno
    for key, value in (overrides or {}).items():
        if key not in KEYS:
            raise ConfigError("unknown key", key)
        values[key] = _convert(key, value) if isinstance(value, str) else value
        lines.pop(key, None)
    cfg = RunConfig(**values)
    _validate(cfg, lines)
    return cfg


# ------------------------------------------------------------------ formatting

def fmt(x):
    x = float(x)
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero
    return f"{x:.8e}"


def timeseries_csv(traj):
    buf = io.StringIO()
    header = ["t", "es_mean", "gs_mean", "norm"] + [f"es_site{k}" for k in range(traj.n)]
    buf.write(",".join(header) + "\n")
    for i, t in enumerate(traj.times):
        cells = [t, traj.es_mean[i], traj.gs_mean[i], traj.norm[i], *traj.site_flip_prob[i]]
        buf.write(",".join(fmt(c) for c in cells) + "\n")
    return buf.getvalue()


def sweep_csv(rows):
    buf = io.StringIO()
    buf.write("j1,j2,r,ftpe\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in (row.j1, row.j2, row.r, row.ftpe)) + "\n")
    return buf.getvalue()


def read_sweep_csv(text):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise GridError("empty sweep CSV") from None
    if [h.strip() for h in header] != ["j1", "j2", "r", "ftpe"]:
        raise GridError(f"unexpected sweep CSV header {header}")
    rows = []
    for lineno, record in enumerate(reader, start=2):
        if not record:
            continue
        if len(record) != 4:
            raise GridError(f"line {lineno}: expected 4 fields, got {len(record)}")
        try:
            rows.append(sweep.SweepRow(*(float(v) for v in record)))
        except ValueError:
            raise GridError(f"line {lineno}: non-numeric field") from None
    return rows


def _write(path, data):
    if isinstance(data, str):
        data = data.encode("ascii")
    if path in (None, "", "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    with open(path, "wb") as fh:
        fh.write(data)


# -------------------------------------------------------------------- commands

def _hamiltonian(cfg, n=None, j1=None, j2=None, r=None):
    params = model.CouplingParams(
        j1=cfg.j1 if j1 is None else j1,
        j2=cfg.j2 if j2 is None else j2,
        r=cfg.r if r is None else r,
        g=cfg.g,
    )
    return model.build_hamiltonian(params, model.ring_topology(cfg.n_sites if n is None else n))


def cmd_evolve(cfg):
    if cfg.has_grid:
        raise ConfigError("evolve takes a single parameter point; use 'sweep' for grids")
    traj = dynamics.evolve(_hamiltonian(cfg), cfg.integrator_config(), cfg.t_start, cfg.t_end)
    _write(cfg.output, timeseries_csv(traj))
    return EXIT_OK


def cmd_sweep(cfg):
    if not cfg.has_grid:
        raise ConfigError("sweep needs at least one axis with *_steps > 1")
    rows = sweep.run_grid(cfg.grid(), cfg.simulation(), threads=cfg.threads)
    _write(cfg.output, sweep_csv(rows))
    return EXIT_OK


def validation_report(cfg):
    """Run the closed-form and factorisation checks; return (lines, all_passed)."""
    icfg = cfg.integrator_config()
    lines = ["single-site Landau-Zener check (final flip probability)",
             f"{'r':>6} {'measured':>12} {'formula':>12} {'|delta|':>10}  status"]
    ok = True
    for r in VALIDATE_RATES:
        traj = dynamics.evolve(_hamiltonian(cfg, n=1, j1=0.0, j2=0.0, r=r), icfg, cfg.t_start, cfg.t_end)
        measured = float(traj.site_flip_prob[-1, 0])
        formula = dynamics.lz_closed_form(cfg.g, r)
        delta = abs(measured - formula)
        passed = delta <= VALIDATE_LZ_TOL
        ok &= passed
        lines.append(f"{r:6.2f} {measured:12.6f} {formula:12.6f} {delta:10.2e}  {'PASS' if passed else 'FAIL'}")

    n = max(cfg.n_sites, 2)
    single = dynamics.evolve(_hamiltonian(cfg, n=1, j1=0.0, j2=0.0), icfg, cfg.t_start, cfg.t_end)
    many = dynamics.evolve(_hamiltonian(cfg, n=n, j1=0.0, j2=0.0), icfg, cfg.t_start, cfg.t_end)
    dev = float(np.max(np.abs(many.site_flip_prob - single.site_flip_prob[:, :1])))
    passed = dev <= VALIDATE_FACTOR_TOL
    ok &= passed
    lines.append(f"factorisation check n={n}, j1=j2=0, r={cfg.r:g}: "
                 f"max deviation {dev:.2e}  {'PASS' if passed else 'FAIL'}")
    return lines, ok


def cmd_validate(cfg):
    lines, ok = validation_report(cfg)
    print("\n".join(lines))
    if not ok:
        print("validation FAILED", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_heatmap(csv_path, x_axis, y_axis, output):
    with open(csv_path, encoding="utf-8") as fh:
        text = fh.read()
    rows = read_sweep_csv(text)
    _write(output, sweep.render_heatmap(rows, x_axis, y_axis))
    return EXIT_OK


# ------------------------------------------------------------------------ main

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_config_flags(p):
    p.add_argument("--config", help="key = value config file")
    for key in KEYS:
        flags = [f"--{key}"]
        if "_" in key:
            flags.append(f"--{key.replace('_', '-')}")
        p.add_argument(*flags, dest=key, default=None, metavar="VALUE")


def build_parser():
    parser = _Parser(prog="lzring", description="Landau-Zener sweeps on an Ising-coupled spin ring")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (
        ("evolve", "time series CSV for one parameter point"),
        ("sweep", "FTPE table over a (j1, j2, r) grid"),
        ("validate", "closed-form and factorisation self-checks"),
    ):
        _add_config_flags(sub.add_parser(name, help=text))
    hm = sub.add_parser("heatmap", help="render a sweep CSV as a binary PGM")
    hm.add_argument("csv", help="sweep CSV produced by 'lzring sweep'")
    hm.add_argument("--x", dest="x_axis", choices=sweep.AXES, required=True)
    hm.add_argument("--y", dest="y_axis", choices=sweep.AXES, required=True)
    hm.add_argument("--output", required=True)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits on --help and on usage errors
        return exc.code
    try:
        if args.command == "heatmap":
            return cmd_heatmap(args.csv, args.x_axis, args.y_axis, args.output)
        text = ""
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        overrides = {k: getattr(args, k) for k in KEYS if getattr(args, k) is not None}
        cfg = parse_config(text, overrides)
        command = {"evolve": cmd_evolve, "sweep": cmd_sweep, "validate": cmd_validate}[args.command]
        return command(cfg)
    except NumericalError as exc:
        print(f"lzring: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, GridError) as exc:
        print(f"lzring: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (LzError, ValueError) as exc:
        print(f"lzring: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"lzring: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
