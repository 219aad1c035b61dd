"""Command-line front end: figure data, parameter scans and spectral verification."""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .construction import Deformation, admissibility_check, available_levels
from .errors import CesError, InadmissibleError
from .families import FAMILIES, get_family
from .susy import SusyType
from .figures import (FIGURES, build_params, figure_curve, frange, get_figure, hydrogen_raster)
from .verifier import Discretization, numeric_spectrum, oracle_window, verify

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INADMISSIBLE = 2
EXIT_USAGE = 3

SCAN_POINTS = 2000


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# output helpers


def fmt(value) -> str:
    """15 significant digits for floats, 0/1 for flags, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return "%.15g" % float(value)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.generic):
        return _json_safe(value.item())
    return value


@dataclass
class RunManifest:
    command: str
    parameters: dict
    outputs: list[str] = field(default_factory=list)
    admissibility: list[dict] = field(default_factory=list)
    tool_version: str = __version__
    timestamp: str = field(default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))

    def add_output(self, name: str) -> None:
        if name in self.outputs:
            raise ValueError(f"output {name} listed twice")
        self.outputs.append(name)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
            "outputs": list(self.outputs),
            "admissibility": self.admissibility,
        }

    def write(self, path: Path) -> None:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            json.dump(_json_safe(self.as_dict()), fh, indent=2, allow_nan=False)
            fh.write("\n")


def _map(fn, items, jobs: int):
    # evaluation may run in threads; results keep input order so the writer is deterministic
    if jobs <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _output_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_figure(figure_id: int, output_dir: str, jobs: int = 1) -> RunManifest:
    spec = get_figure(figure_id)
    out = _output_dir(output_dir)
    man = RunManifest("figure", {"figure_id": spec.figure_id, "family": spec.family,
                                 "fixed": dict(spec.fixed), "swept": spec.swept.name,
                                 "grid": list(spec.grid), "description": spec.description})
    stem = f"fig{spec.figure_id:02d}"
    if spec.raster is not None:
        cells = hydrogen_raster(spec)
        name = f"{stem}_raster.csv"
        write_csv(out / name, ["gamma", "rho", "positivity_ok", "gamma_sign_ok", "region"],
                  ([c.gamma, c.rho, c.positivity, c.gamma_sign, c.region] for c in cells))
        man.add_output(name)
        counts = {r: sum(c.region == r for c in cells) for r in ("allowed", "positivity", "gamma-sign")}
        man.admissibility.append({"file": name, "cells": len(cells), "regions": counts})
    else:
        curves = _map(lambda v: figure_curve(spec, v), spec.swept.values, jobs)
        for i, c in enumerate(curves):
            name = f"{stem}_{i:03d}.csv"
            write_csv(out / name, ["x", "V_minus", "singular"], zip(c.x, c.v_minus, c.singular))
            man.add_output(name)
            man.admissibility.append({
                "file": name,
                spec.swept.name: c.value,
                "admissible": c.report.admissible,
                "violated": list(c.report.violated),
                "first_zero": c.report.first_zero,
                "singular_points": int(np.count_nonzero(c.singular)),
                "expected_inadmissible": bool(spec.expected_inadmissible(c.value)),
            })
    man.write(out / f"{stem}_manifest.json")
    return man


def ground_energy(family, params, n_points: int = SCAN_POINTS) -> float:
    """Lowest eigenvalue of H- on a single adapted grid (nan if unavailable)."""
    fam = get_family(family)
    try:
        d = Deformation(fam, params)
        # window for the analytic lowest level of H-: the zero mode when unbroken
        unbroken = fam.susy_type_seed is SusyType.UNBROKEN
        e_ref = 0.0 if unbroken else fam.energy_plus(d.params, 0)
        win = oracle_window(d.v_minus, fam, d.params, e_ref)
        return numeric_spectrum(d.v_minus, Discretization.from_window(win, n_points), 1)[0]
    except (CesError, ValueError, ArithmeticError) as exc:
        log.info("no numeric ground energy: %s", exc)
        return math.nan


@dataclass(frozen=True)
class ScanRow:
    value: float
    admissible: bool
    violated: str
    first_zero: float | None
    e0_numeric: float


def scan_point(family, fixed: dict, swept: str, value: float, beta_from_bound: float | None = None,
               energy: bool = True) -> ScanRow:
    fam = get_family(family)
    vals = {**fixed, swept: value}
    params = build_params(fam, vals)
    if beta_from_bound is not None:
        bound = fam.threshold(params)
        beta = beta_from_bound * bound if bound is not None and math.isfinite(bound) else 0.0
        params = params.with_mixing(params.alpha, beta)
    rep = admissibility_check(fam, params)
    e0 = ground_energy(fam, params) if (energy and rep.admissible) else math.nan
    return ScanRow(value, rep.admissible, ";".join(rep.violated), rep.first_zero, e0)


def cmd_scan(family: str, fixed: dict, swept: str, start: float, stop: float, step: float,
             output_dir: str, beta_from_bound: float | None = None, energy: bool = True,
             jobs: int = 1) -> tuple[RunManifest, list[ScanRow]]:
    fam = get_family(family)
    # validate the parameter names before the sweep starts
    build_params(fam, {**fixed, swept: start})
    values = frange(start, stop, step)
    out = _output_dir(output_dir)
    rows = _map(lambda v: scan_point(fam, fixed, swept, v, beta_from_bound, energy), values, jobs)
    man = RunManifest("scan", {"family": fam.id, "fixed": dict(fixed), "swept": swept, "start": start,
                               "stop": stop, "step": step, "beta_from_bound": beta_from_bound})
    name = f"scan_{fam.id}_{swept}.csv"
    write_csv(out / name, [swept, "admissible", "violated", "first_zero", "e0_numeric"],
              ([r.value, r.admissible, r.violated, r.first_zero, r.e0_numeric] for r in rows))
    man.add_output(name)
    man.admissibility = [{swept: r.value, "admissible": r.admissible,
                          "violated": r.violated.split(";") if r.violated else []} for r in rows]
    man.write(out / f"scan_{fam.id}_{swept}_manifest.json")
    return man, rows


def cmd_verify(family: str, params: dict, levels: int, tol: float,
               n_points: tuple[int, int] = (4000, 8000)) -> tuple[int, dict]:
    fam = get_family(family)
    p = build_params(fam, params)
    rep = admissibility_check(fam, p)
    result = {"family": fam.id, "parameters": p.as_dict(), "levels": levels, "tolerance": tol,
              "admissibility": rep.as_dict()}
    if not rep.admissible:
        return EXIT_INADMISSIBLE, result
    avail = available_levels(fam, p)
    if levels > avail:
        result["error"] = f"only {avail:g} levels exist for these parameters"
        return EXIT_FAILED, result
    try:
        ver = verify(fam, p, levels, tol, n_points)
    except InadmissibleError as exc:
        result["error"] = str(exc)
        return EXIT_INADMISSIBLE, result
    except CesError as exc:
        result["error"] = f"oracle failure: {exc}"
        return EXIT_FAILED, result
    result["report"] = ver.report.as_dict()
    result["zero_mode"] = rep.susy_type is SusyType.UNBROKEN
    result["grid_points"] = list(n_points)
    return (EXIT_OK if ver.report.passed else EXIT_FAILED), result


def families_table() -> list[dict]:
    out = []
    for fid, fam in FAMILIES.items():
        out.append({"id": fid, "title": fam.title, "domain": fam.domain.kind.value,
                    "susy_type": fam.susy_type_seed.value, "parameters": list(fam.param_names),
                    "defaults": fam.defaults(), "rho_parametrization": fam.rho_name is not None})
    return out


# ---------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _kv(text: str) -> tuple[str, float]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    name, raw = text.split("=", 1)
    try:
        return name.strip(), float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"value of {name!r} is not a number: {raw!r}") from None


def _points(text: str) -> tuple[int, int]:
    try:
        a, b = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected two integers as COARSE,FINE") from None
    return a, b


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cespot", description="Conditionally exactly solvable potentials.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, params=True):
        sp.add_argument("--config", help="JSON file with option values; command-line flags win")
        if params:
            sp.add_argument("--family")
            sp.add_argument("--param", action="append", type=_kv, default=None, metavar="NAME=VALUE",
                            help="family parameter (b, alpha, beta, rho, rho_i, gamma, a); repeatable")

    fig = sub.add_parser("figure", help="write the data behind one figure")
    common(fig, params=False)
    fig.add_argument("--id", dest="figure_id", help="figure number 1..11 or 'all'")
    fig.add_argument("--output-dir")
    fig.add_argument("--jobs", type=int)

    scan = sub.add_parser("scan", help="admissibility scan over one parameter")
    common(scan)
    scan.add_argument("--swept", help="name of the swept parameter")
    scan.add_argument("--start", type=float)
    scan.add_argument("--stop", type=float)
    scan.add_argument("--step", type=float)
    scan.add_argument("--beta-from-bound", type=float,
                      help="set beta to this multiple of the closed-form mixing bound at every point")
    scan.add_argument("--no-energy", action="store_true", default=None, help="skip the numeric ground energy")
    scan.add_argument("--output-dir")
    scan.add_argument("--jobs", type=int)

    ver = sub.add_parser("verify", help="compare the H- spectrum with the numerical oracle")
    common(ver)
    ver.add_argument("--levels", type=int)
    ver.add_argument("--tol", type=float)
    ver.add_argument("--points", type=_points, help="COARSE,FINE grid sizes")
    ver.add_argument("--output", help="also write the JSON report here")

    fam = sub.add_parser("families", help="list the seed families")
    fam.add_argument("--format", choices=("text", "json"))
    fam.add_argument("--config")
    return p


DEFAULTS = {
    "figure": {"figure_id": None, "output_dir": ".", "jobs": 1},
    "scan": {"family": None, "param": {}, "swept": None, "start": None, "stop": None, "step": None,
             "beta_from_bound": None, "no_energy": False, "output_dir": ".", "jobs": 1},
    "verify": {"family": None, "param": {}, "levels": 4, "tol": 1e-5, "points": (4000, 8000), "output": None},
    "families": {"format": "text"},
}


def resolve_options(args: argparse.Namespace) -> dict:
    """Defaults, then the config file, then explicit flags."""
    opts = dict(DEFAULTS[args.command])
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        for key, val in cfg.items():
            k = key.replace("-", "_")
            if k == "params":
                k = "param"
            if k not in opts:
                raise UsageError(f"unknown config key {key!r} for {args.command}")
            opts[k] = dict(val) if k == "param" else val
    for k in opts:
        val = getattr(args, k, None)
        if val is None:
            continue
        if k == "param":
            opts[k] = {**opts[k], **dict(val)}
        else:
            opts[k] = val
    if "points" in opts and isinstance(opts["points"], list):
        opts["points"] = tuple(int(v) for v in opts["points"])
    return opts


def _require(opts: dict, *names: str) -> None:
    missing = [n for n in names if opts.get(n) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: figure, scan, verify or families")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
        opts = resolve_options(args)
        return _dispatch(args.command, opts)
    except UsageError as exc:
        print(f"cespot: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError) as exc:
        print(f"cespot: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cespot: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(command: str, o: dict) -> int:
    if command == "families":
        table = families_table()
        if o["format"] == "json":
            print(json.dumps(table, indent=2))
        else:
            for row in table:
                names = ", ".join(row["parameters"]) or "-"
                print(f"{row['id']:<18} {row['domain']:<10} {row['susy_type']:<9} params: {names}")
        return EXIT_OK
    if command == "figure":
        if o.get("figure_id") is None:
            raise UsageError("missing required option: --id")
        ids = sorted(FIGURES) if str(o["figure_id"]) == "all" else [int(o["figure_id"])]
        for fid in ids:
            man = cmd_figure(fid, o["output_dir"], int(o["jobs"]))
            print(f"figure {fid}: {len(man.outputs)} file(s) in {o['output_dir']}")
        return EXIT_OK
    if command == "scan":
        _require(o, "family", "swept", "start", "stop", "step")
        man, rows = cmd_scan(o["family"], o["param"], o["swept"], float(o["start"]), float(o["stop"]),
                             float(o["step"]), o["output_dir"], o["beta_from_bound"],
                             not o["no_energy"], int(o["jobs"]))
        n_ok = sum(r.admissible for r in rows)
        print(f"scan: {n_ok}/{len(rows)} admissible, written {man.outputs[0]}")
        return EXIT_OK
    if command == "verify":
        _require(o, "family")
        code, result = cmd_verify(o["family"], o["param"], int(o["levels"]), float(o["tol"]), tuple(o["points"]))
        text = json.dumps(_json_safe(result), indent=2, allow_nan=False)
        print(text)
        if o["output"]:
            Path(o["output"]).write_text(text + "\n", encoding="utf-8")
        return code
    raise UsageError(f"unknown command {command}")


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
