"""Command-line front end: verify known machines, optimize over input sets,
scan the trio-phase plane, and study 1->n machines.

Every run is deterministic given --seed (or the CLONEBENCH_SEED environment
variable) and, when --out is given, writes a manifest alongside its outputs.
Exit codes: 0 ok, 2 usage error, 3 self-check failure, 4 runtime budget
exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict

import numpy as np

from . import __version__
from .cloners import (
    AncillaCloner,
    CloneIsometry,
    Cloner,
    EconomicCloner,
    ancilla_pqcm,
    constraint_check,
    economic_pqcm,
    machine_to_json,
    optimal_n_cloner,
    to_isometry,
    uqcm,
)
from .fidelity import (
    closed_form_bound,
    copy_fidelity,
    decompose_equatorial,
    n_clone_fidelity,
    n_clone_fidelity_bruteforce,
)
from .optimize import (
    OptimizationConfig,
    OptimizationResult,
    objective,
    optimize,
    optimize_n,
    scan_equator,
    trio_is_degenerate,
)
from .states import (
    TWO_PI,
    BlochPoint,
    InputSet,
    bb84,
    custom,
    equatorial_pair,
    equatorial_trio,
    six_state,
    tetrahedron,
)

VERIFY_TOL = 1e-9
SELF_CHECK_TOL = 1e-8
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SELF_CHECK = 3
EXIT_BUDGET = 4


class UsageError(Exception):
    pass


def _json_default(obj):
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def _dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, default=_json_default)


# ---------------------------------------------------------------------------
# argument parsing helpers


def _default_seed() -> int:
    raw = os.environ.get("CLONEBENCH_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"CLONEBENCH_SEED={raw!r} is not an integer")


def resolve_set(spec: str) -> InputSet:
    """Named set, `pair:<degrees>`, `equator:<count>`, inline JSON, or a path
    to an InputSet JSON file."""
    named = {
        "trio": equatorial_trio,
        "bb84": bb84,
        "six-state": six_state,
        "tetrahedron": tetrahedron,
    }
    if spec in named:
        return named[spec]()
    if spec.startswith("pair:"):
        try:
            delta = math.radians(float(spec.split(":", 1)[1]))
        except ValueError:
            raise UsageError(f"bad pair spec {spec!r}; expected pair:<degrees>")
        return equatorial_pair(delta)
    if spec.startswith("equator:"):
        try:
            count = int(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad equator spec {spec!r}; expected equator:<count>")
        if not 1 <= count <= 64:
            raise UsageError(f"equator count {count} outside 1..64")
        pts = [BlochPoint(math.pi / 2.0, k * TWO_PI / count) for k in range(count)]
        return custom(pts, label=spec)
    if spec.lstrip().startswith("{"):
        return InputSet.from_json(spec)
    if os.path.exists(spec):
        with open(spec) as fh:
            return InputSet.from_json(fh.read())
    raise UsageError(f"unknown input set {spec!r}")


def resolve_machine(name: str) -> Cloner:
    if name == "pqcm-economic":
        return economic_pqcm()
    if name == "pqcm-ancilla":
        return ancilla_pqcm(1.0 / math.sqrt(2.0))
    if name == "uqcm":
        return uqcm()
    if name.startswith("nclone:"):
        try:
            n = int(name.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad machine spec {name!r}; expected nclone:<n>")
        if not 1 <= n <= 10:
            raise UsageError(f"nclone n={n} outside 1..10")
        return optimal_n_cloner(n)
    raise UsageError(f"unknown machine {name!r}")


def _write_outputs(out: str | None, text: str, manifest: dict) -> None:
    """Print the primary artifact; if --out was given, also write it and the
    run manifest next to it."""
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    if out is None:
        return
    with open(out, "w") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")
    manifest = dict(manifest, outputs=[out])
    with open(out + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _manifest(args: argparse.Namespace, config: dict, seed: int, t0: float) -> dict:
    return {
        "command": " ".join(sys.argv),
        "config": config,
        "seed": seed,
        "wall_time_s": round(time.time() - t0, 3),
        "version": __version__,
        "outputs": [],
    }


def _isometry_doc(v: CloneIsometry) -> dict:
    return {
        "copies": v.copies,
        "ancilla_dim": v.ancilla_dim,
        "matrix": [[[z.real, z.imag] for z in row] for row in v.matrix],
    }


def _result_doc(res: OptimizationResult) -> dict:
    doc = {
        "objective": res.objective,
        "spread": res.spread,
        "restarts_hitting_best": res.restarts_hitting_best,
        "seed": res.seed,
        "per_state_fidelities": [
            {"state": s, "copy": k, "fidelity": f} for s, k, f in res.per_state_fidelities
        ],
        "best": _isometry_doc(res.best),
    }
    if res.machine is not None:
        doc["machine"] = json.loads(machine_to_json(res.machine))
    return doc


# ---------------------------------------------------------------------------
# verify


def _is_equatorial(input_set: InputSet) -> bool:
    return all(abs(p.theta - math.pi / 2.0) < 1e-12 for p in input_set.points)


def cmd_verify(args: argparse.Namespace) -> int:
    t0 = time.time()
    machine = resolve_machine(args.machine)
    input_set = resolve_set(args.set)
    v = to_isometry(machine)
    if v.copies != 2 and not _is_equatorial(input_set):
        raise UsageError(f"machine {args.machine!r} clones equatorial sets only")
    fidelities = [
        {"state": s, "copy": k, "fidelity": copy_fidelity(v, input_set.points[s], k)}
        for s in range(len(input_set))
        for k in range(min(v.copies, 2))
    ]
    report = constraint_check(machine)
    doc = {
        "machine": args.machine,
        "set": input_set.label,
        "constraint_residuals": report.as_dict(),
        "fidelities": fidelities,
    }
    if isinstance(machine, (EconomicCloner, AncillaCloner)):
        for copy in range(2):
            d = decompose_equatorial(machine, copy=copy)
            doc[f"decomposition_copy{copy}"] = asdict(d)
    # expected closed-form value, when one applies to this machine/set pair
    expected = None
    if args.machine == "uqcm":
        expected = closed_form_bound("universal_1to2")
    elif _is_equatorial(input_set):
        if args.machine.startswith("nclone:"):
            expected = closed_form_bound("phase_1ton", machine.n)
        else:
            expected = closed_form_bound("phase_1to2")
    ok = report.passed
    if expected is None:
        doc["bound_comparison"] = "not applicable"
    else:
        worst = max(abs(f["fidelity"] - expected) for f in fidelities)
        doc["bound_comparison"] = {"expected": expected, "max_deviation": worst}
        ok = ok and worst < VERIFY_TOL
    doc["passed"] = bool(ok)
    manifest = _manifest(args, {"machine": args.machine, "set": args.set}, 0, t0)
    _write_outputs(args.out, _dumps(doc), manifest)
    return EXIT_OK if ok else EXIT_SELF_CHECK


# ---------------------------------------------------------------------------
# optimize


def _config_from_args(args: argparse.Namespace) -> OptimizationConfig:
    mode = {"maxmin": "max_min", "equalfid": "equal_fidelity_penalty"}[args.mode]
    ancilla_dim = args.ancilla_dim
    if args.economic and ancilla_dim != 1:
        raise UsageError("--economic contradicts --ancilla-dim > 1")
    return OptimizationConfig(
        restarts=args.restarts,
        mode=mode,
        symmetric=args.symmetric,
        economic=(ancilla_dim == 1),
        ancilla_dim=ancilla_dim,
        seed=args.seed,
    )


def cmd_optimize(args: argparse.Namespace) -> int:
    t0 = time.time()
    input_set = resolve_set(args.set)
    cfg = _config_from_args(args)
    res = optimize(input_set, cfg)
    # self-check: the reported objective must match an independent
    # density-matrix evaluation of the winning machine
    slow = min(
        copy_fidelity(res.best, input_set.points[s], k)
        for s in range(len(input_set))
        for k in range(2)
    )
    fast = objective(res.best, input_set, mode="max_min")
    reported = min(f for _, _, f in res.per_state_fidelities)
    if abs(slow - fast) > SELF_CHECK_TOL or abs(fast - reported) > SELF_CHECK_TOL:
        print("self-check failed: fidelity paths disagree", file=sys.stderr)
        return EXIT_SELF_CHECK
    doc = _result_doc(res)
    doc["set"] = input_set.label
    if args.format == "csv":
        lines = ["state,copy,fidelity"] + [
            f"{s},{k},{f:.12f}" for s, k, f in res.per_state_fidelities
        ]
        text = "\n".join(lines) + "\n"
    else:
        text = _dumps(doc)
    manifest = _manifest(args, {**_public_config(cfg), "set": args.set}, cfg.seed, t0)
    _write_outputs(args.out, text, manifest)
    return EXIT_OK


def _public_config(cfg: OptimizationConfig) -> dict:
    return {
        "restarts": cfg.restarts,
        "mode": cfg.mode,
        "symmetric": cfg.symmetric,
        "economic": cfg.economic,
        "ancilla_dim": cfg.ancilla_dim,
        "copies": cfg.copies,
        "seed": cfg.seed,
    }


# ---------------------------------------------------------------------------
# scan


class _BudgetExceeded(Exception):
    pass


def cmd_scan(args: argparse.Namespace) -> int:
    t0 = time.time()
    if args.resolution < 8:
        raise UsageError(f"resolution {args.resolution} must be >= 8")
    cfg = OptimizationConfig(
        mode="equal_fidelity_penalty", symmetric=True, seed=args.seed
    )
    rows: list[tuple[float, float, float, bool]] = []
    phis = [k * 360.0 / args.resolution for k in range(args.resolution)]

    def progress(i: int, j: int, value: float) -> None:
        p2, p3 = math.radians(phis[i]), math.radians(phis[j])
        rows.append((phis[i], phis[j], value, trio_is_degenerate(p2, p3)))
        if args.budget and time.time() - t0 > args.budget:
            raise _BudgetExceeded

    def rows_to_csv() -> str:
        out = ["phi2_deg,phi3_deg,fidelity,degenerate"]
        for p2, p3, f, deg in rows:
            out.append(f"{p2:.6f},{p3:.6f},{f:.12f},{'true' if deg else 'false'}")
        return "\n".join(out) + "\n"

    try:
        grid = scan_equator(args.resolution, cfg, progress=progress)
    except _BudgetExceeded:
        manifest = _manifest(args, {"resolution": args.resolution}, cfg.seed, t0)
        manifest["note"] = f"budget of {args.budget}s exceeded; CSV is partial"
        _write_outputs(args.out, rows_to_csv(), manifest)
        return EXIT_BUDGET

    cells = grid.minimum_cells()
    step = 360.0 / args.resolution
    minima_deg = [[phis[i], phis[j]] for i, j in cells]
    vmin = float(grid.fidelity[~grid.degenerate_mask].min())
    # the exact minima sit on the grid only when the resolution divides 120
    on_grid = args.resolution % 3 == 0
    if on_grid:
        located = sorted(map(tuple, minima_deg)) == [(120.0, 240.0), (240.0, 120.0)]
    else:
        located = all(
            min(abs(p2 - a) + abs(p3 - b) for a, b in ((120.0, 240.0), (240.0, 120.0)))
            <= 2.0 * step
            for p2, p3 in minima_deg
        )
    summary = {
        "resolution": args.resolution,
        "minimum_cells_deg": minima_deg,
        "minimum_value": vmin,
        "grid_limited": not on_grid,
        "located": located,
    }
    manifest = _manifest(args, {"resolution": args.resolution}, cfg.seed, t0)
    _write_outputs(args.out, grid.to_csv(), manifest)
    summary_text = _dumps(summary)
    if args.out is not None:
        with open(args.out + ".summary.json", "w") as fh:
            fh.write(summary_text + "\n")
    else:
        sys.stdout.write(summary_text + "\n")
    return EXIT_OK if located else EXIT_SELF_CHECK


# ---------------------------------------------------------------------------
# nclone


def cmd_nclone(args: argparse.Namespace) -> int:
    t0 = time.time()
    if not 2 <= args.n <= 8:
        raise UsageError(f"--n {args.n} outside 2..8")
    cfg = OptimizationConfig(copies=args.n, restarts=args.restarts, seed=args.seed)
    res = optimize_n(cfg)
    bound = closed_form_bound("phase_1ton", args.n)
    doc = {
        "n": args.n,
        "parity": "even" if args.n % 2 == 0 else "odd",
        "objective": res.objective,
        "bound": bound,
        "machine": json.loads(machine_to_json(res.machine)),
    }
    ok = abs(res.objective - bound) < 1e-4
    if args.n <= 6:
        rng = np.random.default_rng(args.seed)
        delta = max(
            abs(
                n_clone_fidelity(res.machine, phi)
                - n_clone_fidelity_bruteforce(res.machine, phi)
            )
            for phi in rng.uniform(0.0, TWO_PI, 20)
        )
        doc["oracle_delta"] = delta
        ok = ok and delta < 1e-10
    doc["passed"] = bool(ok)
    manifest = _manifest(args, {"n": args.n, "restarts": args.restarts}, cfg.seed, t0)
    _write_outputs(args.out, _dumps(doc), manifest)
    return EXIT_OK if ok else EXIT_SELF_CHECK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clonebench",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None, help="RNG seed (default: CLONEBENCH_SEED or 0)")
        p.add_argument("--out", default=None, help="output path (manifest written alongside)")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("verify", help="check a known machine against its closed-form values")
    p.add_argument("--machine", required=True, help="pqcm-economic | pqcm-ancilla | uqcm | nclone:<n>")
    p.add_argument("--set", required=True, help="trio | bb84 | six-state | tetrahedron | equator:<count>")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("optimize", help="search for the best machine on an input set")
    p.add_argument("--set", required=True, help="named set, pair:<deg>, equator:<count>, JSON, or path")
    p.add_argument("--mode", choices=("maxmin", "equalfid"), default="maxmin")
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--economic", action="store_true")
    p.add_argument("--ancilla-dim", type=int, default=1)
    p.add_argument("--restarts", type=int, default=200)
    common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("scan", help="grid scan of the best fidelity over trio phases")
    p.add_argument("--resolution", type=int, default=24)
    p.add_argument("--budget", type=float, default=0.0, help="wall-time budget in seconds (0 = none)")
    common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("nclone", help="optimal 1->n machine for the 120-degree trio")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--restarts", type=int, default=60)
    common(p)
    p.set_defaults(func=cmd_nclone)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.seed is None:
            args.seed = _default_seed()
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
