"""``oufrac`` command line: run verification suites, tabulate functions, export solutions.

Exit status is 0 when every check passes, 1 when any check fails and 2 for
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import bergman, extension, hardy, hls
from .report import dump_json, format_float, reports_to_csv, reports_to_json
from .spectral import DegreeMultiplier, HermiteExpansion
from .suites import SUITES, ConfigError, SuiteConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

TABLES = ("hardy_weight", "phi", "multipliers", "g_kernel", "sequence_weight")
CONFIG_KEYS = ("suite", "n", "s", "rho", "cutoff", "gh_order", "tol", "format", "out", "neumann")


# --------------------------------------------------------------------------
# parsing helpers


def _floats(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"not a comma-separated list of numbers: {text!r}") from None


def _ints(text: str) -> tuple[int, ...]:
    vals = _floats(text)
    if any(v != int(v) for v in vals):
        raise ConfigError(f"expected integers: {text!r}")
    return tuple(int(v) for v in vals)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def read_config(path: str) -> dict:
    """Parse a ``key = value`` file; ``#`` starts a comment."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    out = {}
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{num}: expected one of {CONFIG_KEYS} as 'key = value'")
        out[key] = value.strip()
    return out


_CONVERT = {
    "suite": str,
    "n": _ints,
    "s": _floats,
    "rho": _floats,
    "cutoff": int,
    "gh_order": int,
    "tol": float,
    "format": str,
    "out": str,
    "neumann": _bool,
}


def build_config(args: argparse.Namespace) -> SuiteConfig:
    """Config file values overlaid by explicit flags."""
    raw = read_config(args.config) if args.config else {}
    values = {}
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        text = raw.get(key)
        try:
            if flag is not None and flag is not False:
                values[key] = _CONVERT[key](flag) if isinstance(flag, str) and key not in ("suite", "format", "out") else flag
            elif text is not None:
                values[key] = _CONVERT[key](text)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from None
    return SuiteConfig(**values)


_TERM = re.compile(
    r"\s*([+-])?\s*(?:(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)\s*\*?\s*)?H\s*(\d+|\(\s*\d+(?:\s*,\s*\d+)*\s*\))\s*"
)


def parse_expansion(expr: str, basis: str = "gaussian", cutoff: int | None = None) -> HermiteExpansion:
    """Parse ``"H0 - 0.5*H2"`` or ``"2*H(1,0) + H(0,2)"`` into an expansion.

    ``H3`` is the one-dimensional mode 3; ``H(a,b)`` a multi-index.
    """
    pos, coeffs = 0, {}
    expr = expr.strip()
    if not expr:
        raise ValueError("empty expression")
    while pos < len(expr):
        m = _TERM.match(expr, pos)
        if not m or m.end() == pos or (m.group(1) is None and coeffs):
            raise ValueError(f"cannot parse expression at {expr[pos:]!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        c = float(m.group(2)) if m.group(2) else 1.0
        idx = m.group(3).strip("() ")
        alpha = tuple(int(v) for v in idx.split(","))
        coeffs[alpha] = coeffs.get(alpha, 0.0) + sign * c
        pos = m.end()
    dims = {len(a) for a in coeffs}
    if len(dims) != 1:
        raise ValueError("all terms must share one dimension")
    degree = max(sum(a) for a in coeffs)
    return HermiteExpansion(dims.pop(), max(degree, cutoff or 0), basis, coeffs)


# --------------------------------------------------------------------------
# output


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, (int, np.integer)) and not isinstance(v, bool) else format_float(v) for v in row])
    return buf.getvalue()


# --------------------------------------------------------------------------
# subcommands


def cmd_verify(args) -> int:
    cfg = build_config(args)
    reports = run_suite(cfg)
    text = reports_to_json(reports) if cfg.format == "json" else reports_to_csv(reports)
    _emit(text, cfg.out)
    failed = [r.id for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} checks passed", file=sys.stderr)
    for i in failed:
        print(f"FAIL {i}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


_DEFAULT_GRIDS = {
    "hardy_weight": lambda: np.linspace(0.1, 10, 100),
    "phi": lambda: np.linspace(0, 3, 31),
    "multipliers": lambda: np.arange(51),
    "g_kernel": lambda: np.linspace(0.1, 5, 50),
    "sequence_weight": lambda: np.arange(1, 201),
}


def _grid(args, what):
    if args.grid is None:
        return _DEFAULT_GRIDS[what]()
    text = args.grid.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError("range grid must be start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 0:
            raise ConfigError("grid count must be non-negative")
        return np.linspace(start, stop, count)
    return np.array(_floats(text), dtype=float)


def tabulate(what: str, n: int, s: float, rho: float, grid) -> str:
    """CSV text for one of :data:`TABLES` over ``grid``."""
    grid = np.asarray(grid, dtype=float)
    if what == "hardy_weight":
        w = hardy.HardyWeight(n, s)
        vals = np.atleast_1d(hardy.hardy_weight_value(w, grid)) if grid.size else []
        return _table_csv(["t", "w"], zip(grid, vals))
    if what == "phi":
        p = hardy.PhiParams(n, s, rho)
        pts = np.zeros((grid.size, n))
        pts[:, 0] = grid
        vals = np.atleast_1d(hardy.phi_closed(p, pts)) if grid.size else []
        return _table_csv(["x", "phi"], zip(grid, vals))
    if what == "multipliers":
        if np.any(grid < 0) or np.any(grid != np.round(grid)):
            raise ValueError("multiplier grid must hold non-negative integers")
        k = grid.astype(int)
        ls = np.atleast_1d(DegreeMultiplier("Ls", n, s)(k))
        us = np.atleast_1d(DegreeMultiplier("Us", n, s)(k))
        return _table_csv(["k", "Ls", "Us"], ((int(a), b, c) for a, b, c in zip(k, ls, us)))
    if what == "g_kernel":
        args = hls.GKernelArgs(n, s)
        vals = np.atleast_1d(hls.g_kernel(args, grid)) if grid.size else []
        return _table_csv(["r", "G"], zip(grid, vals))
    if what == "sequence_weight":
        if np.any(grid < 0) or np.any(grid != np.round(grid)):
            raise ValueError("sequence_weight grid must hold non-negative integers")
        a = bergman.SequenceWeightArgs(n, s, rho)
        return _table_csv(["k", "w"], ((int(k), float(bergman.sequence_weight(a, int(k)))) for k in grid))
    raise ValueError(f"unknown table {what!r}")


def _first(text, parse, default, name):
    """First entry of a comma list flag; an explicitly empty list is an error."""
    if text is None:
        return default
    vals = parse(text)
    if not vals:
        raise ConfigError(f"--{name} list is empty")
    return vals[0]


def cmd_tabulate(args) -> int:
    n = _first(args.n, _ints, 1, "n")
    s = _first(args.s, _floats, 0.5, "s")
    rho = _first(args.rho, _floats, 1.0, "rho")
    text = tabulate(args.what, n, s, rho, _grid(args, args.what))
    _emit(text, args.out)
    return EXIT_OK


def solve_export(f: HermiteExpansion, params: extension.ExtensionParams, rho, fmt: str = "csv", neumann: bool = False) -> str:
    """Serialized solution profile; with ``neumann`` each mode carries its boundary-flux limit."""
    prof = extension.solve_profile(f, params, rho)
    limits = None
    if neumann:
        if params.variant == "H":
            raise ValueError("the Neumann companion needs variant L or U")
        limits = extension.neumann_trace(f, params).limit
    if fmt == "json":
        payload = json.loads(prof.to_json())
        if limits is not None:
            payload["neumann"] = [{"alpha": list(a), "value": v} for a, v in limits.coeffs.items()]
        return dump_json(payload) + "\n"
    if limits is None:
        return prof.to_csv()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rho", "alpha", "coefficient", "neumann_limit"])
    for r, a, v in prof.rows():
        alpha = tuple(int(d) for d in a.split("."))
        w.writerow([format_float(r), a, format_float(v), format_float(limits[alpha])])
    return buf.getvalue()


def cmd_solve_export(args) -> int:
    variant = args.variant
    basis = "lebesgue" if variant == "H" else "gaussian"
    if (args.f is None) == (args.f_file is None):
        raise ConfigError("give exactly one of --f and --f-file")
    try:
        if args.f is not None:
            f = parse_expansion(args.f, basis, args.cutoff)
        else:
            f = HermiteExpansion.from_json(Path(args.f_file).read_text(encoding="utf-8"))
    except (ValueError, KeyError, TypeError, OSError) as exc:
        raise ConfigError(f"cannot read f: {exc}") from None
    s = _first(args.s, _floats, 0.5, "s")
    rho = _floats(args.rho) if args.rho is not None else (0.1, 0.25, 0.5, 1.0, 1.5, 2.0)
    if not rho:
        raise ConfigError("rho list is empty")
    params = extension.ExtensionParams(variant, s, f.dim)
    if args.save_f:
        _emit(f.to_json() + "\n", args.save_f)
    _emit(solve_export(f, params, rho, args.format or "csv", args.neumann), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oufrac", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite and write a report")
    v.add_argument("--config", help="key = value file; flags override it")
    v.add_argument("--suite", choices=SUITES + ("all",))
    v.add_argument("--n", help="comma list of dimensions")
    v.add_argument("--s", help="comma list of orders in (0, 1)")
    v.add_argument("--rho", help="comma list of positive rho")
    v.add_argument("--cutoff", type=int, help="expansion cutoff for extremizer checks")
    v.add_argument("--gh-order", dest="gh_order", type=int, help="Gauss-Hermite order per axis")
    v.add_argument("--tol", type=float, help="override per-check relative tolerances")
    v.add_argument("--format", choices=("json", "csv"))
    v.add_argument("--out", help="output file (default stdout)")
    v.add_argument("--neumann", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("tabulate", help="tabulate a function on a grid as CSV")
    t.add_argument("what", choices=TABLES)
    t.add_argument("--n")
    t.add_argument("--s")
    t.add_argument("--rho")
    t.add_argument("--grid", help="comma list or start:stop:count; empty gives a header-only table")
    t.add_argument("--out")
    t.set_defaults(func=cmd_tabulate)

    e = sub.add_parser("solve-export", help="solve the extension problem and export the profile")
    e.add_argument("--f", help='expansion such as "H0 - 0.5*H2" or "H(1,0)"')
    e.add_argument("--f-file", dest="f_file", help="expansion JSON file")
    e.add_argument("--save-f", dest="save_f", help="write the parsed expansion as JSON")
    e.add_argument("--variant", choices=("L", "U", "H"), default="L")
    e.add_argument("--s")
    e.add_argument("--rho")
    e.add_argument("--cutoff", type=int)
    e.add_argument("--format", choices=("json", "csv"))
    e.add_argument("--neumann", action="store_true", help="add the extrapolated boundary-flux limit per mode")
    e.add_argument("--out")
    e.set_defaults(func=cmd_solve_export)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"oufrac: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"oufrac: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
