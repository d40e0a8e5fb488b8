"""
Command-line interface.

``dtqw [global flags] COMMAND [flags]`` with the commands ``walk``, ``bands``,
``zak``, ``dirac``, ``slm``, ``hybrid`` and ``arch``.  Global flags:

--out DIR       output directory (default ``.``)
--config FILE   flat ``key = value`` defaults; explicit flags win
--threads N     worker threads for grid sweeps; results do not depend on it
--seed S        recorded in every output header, for reproducible runs

Exit codes: 0 success, 2 usage error, 3 domain error, 4 non-convergence.
Every CSV starts with a ``#`` comment holding the resolved parameters and a
header row.  For fixed flags the output files are byte-identical.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import architecture as arch_mod
from . import bands as bands_mod
from . import hybrid as hybrid_mod
from . import slm as slm_mod
from . import zak as zak_mod
from .core import probability_distribution
from .errors import ConvergenceError, DomainError, DTQWError, InvalidArgumentError, ScheduleIncompleteError
from .io import phase_to_gray, read_config, write_csv, write_json, write_pgm
from .walk import (
    HADAMARD,
    InitialCondition,
    NonCommuting,
    SplitStep,
    Standard,
    evolve,
)

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 2, 3, 4

AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument types

def _axis(text: str):
    if text in AXES:
        return AXES[text]
    try:
        vec = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"axis must be x, y, z or 'ax,ay,az', got {text!r}")
    if len(vec) != 3:
        raise argparse.ArgumentTypeError("axis needs three components")
    return vec


def _coin(text: str):
    try:
        parts = tuple(complex(x.strip().replace("i", "j")) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"coin must be 'a,b' with complex a, b, got {text!r}")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("coin needs two components")
    return parts


def _window(text: str):
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be 'lo,hi', got {text!r}")
    if not hi > lo:
        raise argparse.ArgumentTypeError("window needs hi > lo")
    return (lo, hi)


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError("expected a non-negative integer")
    return v


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not np.isfinite(v):
        raise argparse.ArgumentTypeError("expected a finite number")
    return v


def _flag(text: str) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


# ---------------------------------------------------------------------------
# parser

def _protocol_flags(p: argparse.ArgumentParser, default: str = "hadamard") -> None:
    p.add_argument("--protocol", choices=["hadamard", "standard", "splitstep", "noncommuting"],
                   default=default)
    p.add_argument("--axis", type=_axis, default=AXES["y"], help="standard walk rotation axis")
    p.add_argument("--theta", type=_finite, default=np.pi / 4)
    p.add_argument("--theta1", type=_finite, default=np.pi / 4)
    p.add_argument("--theta2", type=_finite, default=np.pi / 8)
    p.add_argument("--phi", type=_finite, default=0.0)


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--out", default=d("."), help="output directory")
    p.add_argument("--config", default=d(None), help="key = value defaults file")
    p.add_argument("--threads", type=_positive_int, default=d(1))
    p.add_argument("--seed", type=_nonneg_int, default=d(0))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dtqw", description="1D discrete-time quantum walk toolkit")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        _global_flags(p, suppress=True)
        return p

    p = command("walk", "position distribution after n steps")
    _protocol_flags(p)
    p.add_argument("--steps", type=_nonneg_int, default=4)
    p.add_argument("--coin", type=_coin, default=(1.0, 0.0))
    p.add_argument("--site", type=int, default=0)

    p = command("bands", "quasi-energies and Bloch vectors over the Brillouin zone")
    _protocol_flags(p, default="splitstep")
    p.add_argument("--k-samples", type=_positive_int, default=256)

    p = command("dirac", "gap map and Dirac points of a two-parameter family")
    p.add_argument("--family", choices=sorted(bands_mod.FAMILIES), default="noncommuting")
    p.add_argument("--resolution", type=_positive_int, default=256)
    p.add_argument("--k-samples", type=_positive_int, default=128)

    p = command("zak", "Zak-phase landscape with a gapless-cell mask")
    p.add_argument("--family", choices=sorted(bands_mod.FAMILIES), default="splitstep")
    p.add_argument("--resolution", type=_positive_int, default=64)
    p.add_argument("--band", choices=["+", "-"], default="+")
    p.add_argument("--method", choices=list(zak_mod.METHODS), default="wilson")
    p.add_argument("--samples", type=_positive_int, default=256)
    p.add_argument("--k-window", type=_window, default=None)

    p = command("slm", "simulated SLM preparation of the n-th step state")
    p.add_argument("--steps", type=_nonneg_int, default=4)
    p.add_argument("--rows", type=_positive_int, default=1920)
    p.add_argument("--cols", type=_positive_int, default=128)
    p.add_argument("--period", type=_positive_int, default=8)
    p.add_argument("--calibration", choices=("sampled", "ideal"), default="sampled")
    p.add_argument("--far-field", type=_flag, default=True, help="write the far-field CSV")

    p = command("hybrid", "two-photon non-local step and coincidence statistics")
    _protocol_flags(p)
    p.add_argument("--steps", type=_nonneg_int, default=4)
    p.add_argument("--coin", type=_coin, default=(1.0, 0.0))
    p.add_argument("--visibility", type=_finite, default=1.0)

    p = command("arch", "spatial vs temporal multiplexing feasibility table")
    p.add_argument("--eta", type=_finite, default=0.50)
    p.add_argument("--outcoupling", type=_finite, default=0.05)
    p.add_argument("--rep-rate", type=_finite, default=111e3)
    p.add_argument("--mean-photon", type=_finite, default=0.003)
    p.add_argument("--transmission", type=_finite, default=1.0, help="spatial per-step transmission")
    p.add_argument("--target-n", type=_positive_int, default=20)
    p.add_argument("--min-rate", type=_finite, default=1e-3)
    p.add_argument("--outcouple-first", type=_flag, default=False)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    """Parse twice: the first pass finds ``--config``, whose entries become defaults."""
    first = parser.parse_args(argv)
    if not first.config:
        return first
    try:
        cfg = read_config(first.config)
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}")
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    cmd_parser = sub.choices[first.command]
    actions = {a.dest: a for a in cmd_parser._actions if a.dest not in ("help", "config")}
    defaults = {}
    for key, text in cfg.items():
        if key not in actions:
            raise UsageError(f"unknown config key {key!r} for command {first.command!r}")
        act = actions[key]
        try:
            value = act.type(text) if act.type else text
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise UsageError(f"config key {key!r}: {exc}")
        if act.choices is not None and value not in act.choices:
            raise UsageError(f"config key {key!r}: {value!r} not in {list(act.choices)}")
        defaults[key] = value
    cmd_parser.set_defaults(**defaults)
    for key in ("out", "threads", "seed"):
        if key in defaults:
            parser.set_defaults(**{key: defaults[key]})
    return parser.parse_args(argv)


# ---------------------------------------------------------------------------
# commands

def _protocol(args):
    if args.protocol == "hadamard":
        return HADAMARD
    if args.protocol == "standard":
        return Standard(tuple(np.asarray(args.axis) / np.linalg.norm(args.axis)), args.theta)
    if args.protocol == "splitstep":
        return SplitStep(args.theta1, args.theta2)
    return NonCommuting(args.theta, args.phi)


def _describe(args) -> str:
    items = {k: v for k, v in vars(args).items() if k not in ("out", "config")}
    return "dtqw " + " ".join(f"{k}={_text(v)}" for k, v in sorted(items.items()))


def _text(v) -> str:
    if isinstance(v, tuple):
        return "(" + ";".join(_text(x) for x in v) + ")"
    if isinstance(v, complex):
        return repr(v)
    return repr(v) if isinstance(v, float) else str(v)


def cmd_walk(args, out: Path) -> dict:
    state = evolve(InitialCondition(args.site, args.coin), _protocol(args), args.steps)
    dist = probability_distribution(state)
    path = write_csv(out / "walk.csv", ["j", "P"], sorted(dist.items()), _describe(args))
    return {"files": [path.name]}


def cmd_bands(args, out: Path) -> dict:
    p = _protocol(args)
    ks = bands_mod.k_grid(bands_mod.brillouin_zone(p), args.k_samples)
    n, e = bands_mod.bloch_vectors(p, ks, check_gap=False)
    rows = []
    for k, vec, en in zip(ks, n, e):
        closed = np.sin(en) < bands_mod.GAPLESS_TOL
        nx, ny, nz = (np.nan, np.nan, np.nan) if closed else vec
        rows.append((k, en, -en, nx, ny, nz, en, np.pi - en))
    path = write_csv(out / "bands.csv", ["k", "E_plus", "E_minus", "nx", "ny", "nz", "gap0", "gapPi"],
                     rows, _describe(args))
    return {"files": [path.name]}


def cmd_dirac(args, out: Path) -> dict:
    gm = bands_mod.phase_diagram(args.family, args.resolution, args.k_samples)
    a, b = gm.axes
    files = [write_csv(out / "gap_map.csv", [a, b, "k", "gap0", "gapPi"], gm.rows(), _describe(args)).name]
    if args.family == "noncommuting":
        res = max(args.resolution, 64)
        raw = bands_mod.find_dirac_points(res, identify_boundary=False)
        ident = bands_mod.find_dirac_points(res, identify_boundary=True)
        cols = ["theta", "phi", "k", "label", "residual"]
        files.append(write_csv(out / "dirac_points.csv", cols,
                               [(d.theta, d.phi, d.k, d.label, d.residual) for d in raw],
                               _describe(args)).name)
        report = {
            "resolution": res,
            "count_without_identification": len(raw),
            "count_with_identification": len(ident),
            "points": [dict(zip(cols, (d.theta, d.phi, d.k, d.label, d.residual))) for d in raw],
            "labels": {lab: sum(d.label == lab for d in raw) for lab in sorted({d.label for d in raw})},
        }
        files.append(write_json(out / "dirac_points.json", report).name)
    return {"files": files}


def cmd_zak(args, out: Path) -> dict:
    land = zak_mod.zak_landscape(args.family, args.resolution, args.band, args.method,
                                 args.samples, args.k_window, threads=args.threads)
    files = [write_csv(out / "zak_landscape.csv", land.columns, land.rows(), _describe(args)).name]
    summary = {
        "family": land.family, "method": land.method, "resolution": args.resolution,
        "band": args.band, "cells": int(land.defined.size),
        "masked_cells": int(np.sum(~land.defined)),
        "unconverged_cells": int(np.sum(land.defined & ~land.converged)),
    }
    if land.analytic is not None:
        summary["analytic_masked_cells"] = int(np.sum(~land.analytic_defined))
    files.append(write_json(out / "zak_summary.json", summary).name)
    return {"files": files}


def cmd_slm(args, out: Path) -> dict:
    report = slm_mod.prepare_via_slm(args.steps, args.rows, args.cols, args.period,
                                     calibration=args.calibration)
    files = [write_pgm(out / "mask.pgm", phase_to_gray(report.mask.pixels)).name,
             write_json(out / "mask.json", report.mask.layout_dict()).name]
    summary = report.summary()
    summary["passed"] = bool(report.fidelity >= 0.99)
    files.append(write_json(out / "slm_report.json", summary).name)
    if args.far_field:
        mag = np.abs(slm_mod.far_field(report.mask))
        files.append(write_csv(out / "far_field.csv", [f"c{c}" for c in range(mag.shape[1])],
                               mag, _describe(args)).name)
    return {"files": files}


def cmd_hybrid(args, out: Path) -> dict:
    p = _protocol(args)
    cfg = hybrid_mod.SourceConfig(args.coin, args.steps, p, args.visibility)
    source = hybrid_mod.prepare_hybrid_source(cfg)
    stepped = hybrid_mod.nonlocal_step(source.state, p)
    marginal, cond = hybrid_mod.coincidence_distribution(stepped)
    check = hybrid_mod.equivalence_check(cfg)
    pure = isinstance(stepped, hybrid_mod.HybridState)
    entropy_n = hybrid_mod.entanglement_entropy(source.state) if pure else float("nan")
    entropy_n1 = hybrid_mod.entanglement_entropy(stepped) if pure else float("nan")
    desc = _describe(args)
    files = [
        write_csv(out / "coincidence.csv", ["pol", "j", "probability"],
                  [(pol, j, pr) for (pol, j), pr in cond.items()], desc).name,
        write_csv(out / "marginal.csv", ["j", "P"], sorted(marginal.items()), desc).name,
        write_csv(out / "hybrid_summary.csv",
                  ["n", "entropy_n", "entropy_n_plus_1", "max_abs_diff", "verdict"],
                  [(args.steps, entropy_n, entropy_n1, check.max_abs_diff,
                    "PASS" if check.passed else "FAIL")], desc).name,
    ]
    files.append(write_json(out / "hybrid_report.json", {
        "n": args.steps, "entropy_n": entropy_n, "entropy_n_plus_1": entropy_n1,
        "max_abs_diff": check.max_abs_diff, "fidelity_deficit": check.fidelity_deficit,
        "verdict": "PASS" if check.passed else "FAIL",
        "arm_transmissions": list(source.arm_transmissions),
        "polarizer_probability": source.polarizer_probability,
    }).name)
    return {"files": files}


def cmd_arch(args, out: Path) -> dict:
    t = arch_mod.TemporalLoopParams(args.eta, args.outcoupling, args.rep_rate, args.mean_photon,
                                    args.outcouple_first)
    s = arch_mod.SpatialCascadeParams(args.transmission, args.rep_rate, args.mean_photon)
    rows = arch_mod.feasibility_report(t, s, args.target_n, args.min_rate)
    desc = (f"{_describe(args)} | eta={t.eta!r} outcoupling={t.outcoupling!r} "
            f"rep_rate={t.rep_rate!r} mean_photon={t.mean_photon!r}")
    files = [write_csv(out / "feasibility.csv", arch_mod.FeasibilityRow.columns(),
                       (r.as_tuple() for r in rows), desc).name]
    files.append(write_json(out / "feasibility.json", {
        "params": {"eta": t.eta, "outcoupling": t.outcoupling, "rep_rate": t.rep_rate,
                   "mean_photon": t.mean_photon, "outcouple_first": t.outcouple_first,
                   "spatial_transmission": s.per_step_transmission, "min_rate": args.min_rate},
        "multiphoton_fraction": arch_mod.multiphoton_fraction(t.mean_photon),
        "rows": [dict(zip(arch_mod.FeasibilityRow.columns(), r.as_tuple())) for r in rows],
    }).name)
    return {"files": files}


COMMANDS = {"walk": cmd_walk, "bands": cmd_bands, "dirac": cmd_dirac, "zak": cmd_zak,
            "slm": cmd_slm, "hybrid": cmd_hybrid, "arch": cmd_arch}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:  # argparse reports usage errors itself
        return EXIT_USAGE if exc.code else EXIT_OK
    except (UsageError, InvalidArgumentError) as exc:
        print(f"dtqw: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        result = COMMANDS[args.command](args, out)
    except InvalidArgumentError as exc:
        print(f"dtqw: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ScheduleIncompleteError) as exc:
        print(f"dtqw: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        print(f"dtqw: not converged: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except DTQWError as exc:
        print(f"dtqw: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    for name in result["files"]:
        print(out / name)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
