"""Command-line interface: preset analysis, fiber sampling, symbols, checks.

All randomness is seeded (``--seed``, default 0) and reports are emitted as
deterministic JSON (sorted keys, no timing unless ``--timing`` is passed), so
identical invocations produce byte-identical output.  Exit codes: 0 all checks
pass, 1 a mathematical check failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .expr import ParseError, parse_operator, poly_to_string
from .foliation import (
    MissingStructureFunctions,
    default_strong_kernel_bound,
    isotropy_algebra,
    jacobi_flag,
    leaf_dimension_at,
    regular_data,
    solve_structure_functions,
    strong_kernel_at,
)
from .grassmann import Subspace
from .hncone import curve_family, hn_fiber, limit_subalgebra_check, nash_fiber, sandwich_check
from .poisson import cotangent_lift_check, hamiltonian_field, hamiltonian_identity_defect, hn_invariance_test
from .presets import BUILTIN_NAMES, Preset, PresetError, load_preset
from .symbols import (
    OddDegreeWarning,
    UEAElement,
    classical_principal_symbol,
    ellipticity_check,
    realize,
    symbol_top,
)

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# Serialization helpers
# ---------------------------------------------------------------------------


def _frac(x: Fraction) -> str:
    return str(x)


def _vec(v: Sequence[Fraction]) -> list[str]:
    return [_frac(x) for x in v]


def _subspace(s: Subspace) -> dict[str, Any]:
    return {
        "ambient_dim": s.ambient_dim,
        "dim": s.dim,
        "basis": [_vec(row) for row in s.basis],
        "plucker": _vec(s.plucker),
    }


def _point_arg(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(part.strip()) for part in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad point {text!r}: {exc}") from exc


def _points_arg(text: str) -> list[tuple[Fraction, ...]]:
    return [_point_arg(chunk) for chunk in text.split(";") if chunk.strip()]


def _emit(report: dict[str, Any], args) -> None:
    payload = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(payload)
    else:
        sys.stdout.write(payload)


def _csv_fibers(directory: str, stem: str, spaces: Sequence[Subspace]) -> None:
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    with open(path / f"{stem}.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["space_index", "vector_index", "components..."])
        for i, s in enumerate(spaces):
            for j, row in enumerate(s.basis):
                writer.writerow([i, j] + [float(x) for x in row])


def _csv_trajectory(directory: str, stem: str, presentation, field, scenario) -> None:
    from .poisson import DualPoint, flow_hamiltonian

    m = scenario["point"]
    eta = scenario.get("eta") or tuple(Fraction(1) for _ in presentation.vars)
    xi0 = _transpose_apply(presentation, m, eta)
    start = DualPoint(tuple(float(x) for x in m), tuple(float(x) for x in xi0))
    traj = flow_hamiltonian(field, start, scenario.get("T", 1.0), scenario.get("steps", 1000))
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    with open(path / f"{stem}.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["t"]
            + [f"x_{v}" for v in presentation.vars]
            + [f"xi_{k+1}" for k in range(presentation.num_generators)]
        )
        for t, state in zip(traj.times, traj.states):
            writer.writerow([t] + list(state))


def _transpose_apply(presentation, m, eta):
    from . import algebra

    return algebra.mat_vec(algebra.transpose(presentation.anchor_at(m)), [Fraction(x) for x in eta])


def _report_shell(args, command: str, params: dict[str, Any]) -> dict[str, Any]:
    report = {
        "schema": SCHEMA_VERSION,
        "version": __version__,
        "command": command,
        "parameters": params,
        "seed": getattr(args, "seed", 0),
    }
    return report


def _load(args) -> Preset:
    return load_preset(args.preset)


def _resolve_operator(preset: Preset, text: str) -> UEAElement:
    if text in preset.operators:
        words = preset.operators[text]
    else:
        words = parse_operator(text, preset.generator_names, preset.presentation.vars)
    return UEAElement.from_words(words, preset.presentation.vars)


def _curve_description(args) -> dict[str, Any]:
    return {
        "direction_count": args.curves,
        "arc_degree": args.arc_degree,
        "seed": args.seed,
    }


def _ensure_structure(preset: Preset, bound: int | None) -> int | None:
    p = preset.presentation
    if p.has_structure():
        return p.structure_bound_used
    solved = solve_structure_functions(p, bound)
    return p.structure_bound_used if solved is not None else None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_analyze(args) -> int:
    preset = _load(args)
    p = preset.presentation
    r, is_regular = regular_data(p)
    bound = args.degree_bound if args.degree_bound is not None else default_strong_kernel_bound(p)
    points = args.points or _default_points(p.dim)
    structure_bound = _ensure_structure(preset, None)
    results: dict[str, Any] = {
        "name": p.name,
        "vars": list(p.vars),
        "num_generators": p.num_generators,
        "generic_rank": r,
        "structure_functions": "given-or-solved" if p.has_structure() else "unavailable",
        "structure_bound_used": structure_bound,
        "jacobi_flag": jacobi_flag(p) if p.has_structure() else None,
        "points": [],
    }
    for m in points:
        entry: dict[str, Any] = {
            "point": _vec(m),
            "leaf_dimension": leaf_dimension_at(p, m),
            "regular": is_regular(m),
            "strong_kernel": _subspace(strong_kernel_at(p, m, bound)),
        }
        if p.has_structure():
            iso = isotropy_algebra(p, m, bound)
            entry["isotropy"] = {
                "dim": iso.dim,
                "kernel_dim": iso.ambient.dim,
                "strong_kernel_dim": iso.sker.dim,
                "bracket_table": [
                    [_vec(cell) for cell in row] for row in iso.bracket_table
                ],
            }
        results["points"].append(entry)
    report = _report_shell(
        args,
        "analyze",
        {"preset": args.preset, "points": [_vec(m) for m in points], "degree_bound": bound},
    )
    report["bounds"] = {"strong_kernel": bound, "structure": structure_bound}
    report["results"] = results
    _finish_timing(report, args)
    _emit(report, args)
    return 0


def _default_points(n: int) -> list[tuple[Fraction, ...]]:
    origin = tuple(Fraction(0) for _ in range(n))
    e1 = tuple(Fraction(int(i == 0)) for i in range(n))
    ones = tuple(Fraction(1) for _ in range(n))
    out = [origin, e1]
    if ones not in out:
        out.append(ones)
    return out


def _fiber_common(args, dual: bool) -> tuple[dict[str, Any], int]:
    preset = _load(args)
    p = preset.presentation
    m = args.point
    curves = curve_family(m, args.curves, args.arc_degree, args.seed)
    sample = nash_fiber(p, m, curves)
    exit_code = 0
    results: dict[str, Any] = {
        "point": _vec(m),
        "generic_rank": p.generic_rank(),
        "expected_limit_dim": p.num_generators - p.generic_rank(),
        "curve_family": [c.label for c in curves],
        "curves_used": [
            {
                "label": rec.label,
                "accepted": rec.accepted,
                "reason": rec.reason,
                "limit_index": rec.limit_index,
            }
            for rec in sample.curves_used
        ],
        "limits": [_subspace(v) for v in sample.limits],
    }
    spaces = sample.limits
    if dual:
        from .grassmann import annihilator

        covector_spaces = tuple(annihilator(v) for v in sample.limits)
        results["covector_spaces"] = [_subspace(s) for s in covector_spaces]
        spaces = covector_spaces
        bound = args.degree_bound
        sw = sandwich_check(p, sample, bound)
        results["sandwich"] = {
            "ok": sw.ok,
            "degree_bound": sw.degree_bound,
            "violations": list(sw.violations),
        }
        if not sw.ok:
            exit_code = 1
        structure_bound = _ensure_structure(preset, None)
        if preset.presentation.has_structure():
            iso = isotropy_algebra(p, m, bound)
            sub = limit_subalgebra_check(p, sample, iso)
            results["subalgebra"] = {
                "ok": sub.ok,
                "expected_codim": sub.expected_codim,
                "violations": list(sub.violations),
            }
            if not sub.ok:
                exit_code = 1
        else:
            results["subalgebra"] = {"ok": None, "note": "structure functions unavailable"}
        results["structure_bound_used"] = structure_bound
    if args.csv:
        _csv_fibers(args.csv, f"{'hn' if dual else 'nash'}_fiber", spaces)
    return results, exit_code


def cmd_nash_fiber(args) -> int:
    results, code = _fiber_common(args, dual=False)
    report = _report_shell(
        args,
        "nash-fiber",
        {
            "preset": args.preset,
            "point": results["point"],
            "curves": _curve_description(args),
            "degree_bound": args.degree_bound,
        },
    )
    report["results"] = results
    _finish_timing(report, args)
    _emit(report, args)
    return code


def cmd_hn_fiber(args) -> int:
    results, code = _fiber_common(args, dual=True)
    report = _report_shell(
        args,
        "hn-fiber",
        {
            "preset": args.preset,
            "point": results["point"],
            "curves": _curve_description(args),
            "degree_bound": args.degree_bound,
        },
    )
    report["results"] = results
    _finish_timing(report, args)
    _emit(report, args)
    return code


def cmd_symbol(args) -> int:
    preset = _load(args)
    p = preset.presentation
    element = _resolve_operator(preset, args.op)
    k = args.degree if args.degree is not None else element.degree
    sigma = symbol_top(element, k, fiber_dim=p.num_generators)
    d = realize(element, p)
    classical = classical_principal_symbol(d, k)
    report = _report_shell(
        args, "symbol", {"preset": args.preset, "op": args.op, "degree": k}
    )
    report["results"] = {
        "degree": k,
        "top_symbol": sigma.as_string(),
        "top_symbol_zero": sigma.is_zero(),
        "realized_order": d.order,
        "realized_zero": d.is_zero(),
        "realized_normal_form": {
            "|".join(str(e) for e in alpha): poly_to_string(f) for alpha, f in sorted(d.terms.items())
        },
        "classical_principal_symbol": classical.as_string(fiber_prefix="eta"),
    }
    _finish_timing(report, args)
    _emit(report, args)
    return 0


def cmd_elliptic(args) -> int:
    preset = _load(args)
    p = preset.presentation
    element = _resolve_operator(preset, args.op)
    try:
        rep = ellipticity_check(
            element,
            p,
            args.points,
            tolerance=args.tol,
            sphere_samples=args.sphere_samples,
            seed=args.seed,
            direction_count=args.curves,
            arc_degree=args.arc_degree,
            convention=args.convention,
            force_odd=args.force_odd,
        )
    except OddDegreeWarning as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = _report_shell(
        args,
        "elliptic",
        {
            "preset": args.preset,
            "op": args.op,
            "points": [_vec(m) for m in args.points],
            "tolerance": args.tol,
            "convention": args.convention,
            "curves": _curve_description(args),
        },
    )
    report["results"] = {
        "degree": rep.degree,
        "elliptic": rep.elliptic,
        "points": [
            {
                "point": _vec(pv.point),
                "elliptic": pv.elliptic,
                "witness": _subspace(pv.witness) if pv.witness is not None else None,
                "fibers": [
                    {
                        "space": _subspace(fv.space),
                        "min": fv.min_value,
                        "exact_min": _frac(fv.exact_min) if fv.exact_min is not None else None,
                        "restricted_symbol_zero": fv.restricted_zero,
                        "positive": fv.positive,
                    }
                    for fv in pv.fibers
                ],
            }
            for pv in rep.points
        ],
    }
    _finish_timing(report, args)
    _emit(report, args)
    return 0 if rep.elliptic else 1


def _parse_scenario(text: str, preset: Preset) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise argparse.ArgumentTypeError(f"bad scenario chunk {chunk!r}")
        key, value = (part.strip() for part in chunk.split("=", 1))
        if key == "point":
            out["point"] = _point_arg(value)
        elif key == "eta":
            out["eta"] = _point_arg(value)
        elif key == "gen":
            names = preset.generator_names
            if value not in names:
                raise argparse.ArgumentTypeError(f"unknown generator {value!r}")
            out["gen"] = names.index(value)
        elif key == "T":
            out["T"] = float(Fraction(value))
        elif key == "steps":
            out["steps"] = int(value)
        else:
            raise argparse.ArgumentTypeError(f"unknown scenario key {key!r}")
    return out


def _auto_scenarios(preset: Preset, seed: int) -> list[dict[str, Any]]:
    p = preset.presentation
    _, is_regular = regular_data(p)
    rng = random.Random(seed)
    candidates = [
        tuple(Fraction(1) if i == 0 else Fraction(0) for i in range(p.dim)),
        tuple(Fraction(1) for _ in range(p.dim)),
        tuple(Fraction(1 + i) for i in range(p.dim)),
    ]
    points = [m for m in candidates if is_regular(m)]
    while len(points) < 1:
        m = tuple(Fraction(rng.randint(-3, 3)) for _ in range(p.dim))
        if is_regular(m):
            points.append(m)
    out = []
    for i in range(min(2, p.num_generators)):
        out.append(
            {
                "point": points[i % len(points)],
                "gen": i,
                "eta": tuple(Fraction(1) for _ in range(p.dim)),
                "T": 1.0,
                "steps": 1000,
            }
        )
    return out


def cmd_poisson_check(args) -> int:
    preset = _load(args)
    p = preset.presentation
    if _ensure_structure(preset, None) is None and not p.has_structure():
        print("error: no structure functions available for this preset", file=sys.stderr)
        return 2
    scenarios = (
        [_parse_scenario(s, preset) for s in args.scenario]
        if args.scenario
        else _auto_scenarios(preset, args.seed)
    )
    results = []
    ok = True
    for idx, sc in enumerate(scenarios):
        gen = sc.get("gen", 0)
        h = hamiltonian_field(p, gen)
        defects = hamiltonian_identity_defect(p, h)
        inv = hn_invariance_test(
            p,
            sc["point"],
            gen,
            sc.get("T", 1.0),
            sc.get("steps", 1000),
            eta=sc.get("eta"),
            tol=args.tol,
        )
        lift = cotangent_lift_check(
            p,
            sc["point"],
            sc.get("eta", tuple(Fraction(1) for _ in range(p.dim))),
            gen,
            sc.get("T", 1.0),
            sc.get("steps", 1000),
            tol=args.tol,
        )
        passed = not defects and inv.passed and lift.passed
        ok = ok and passed
        results.append(
            {
                "scenario": idx,
                "point": _vec(sc["point"]),
                "generator": gen,
                "identity_defects": defects,
                "membership_drift": inv.max_drift,
                "snap_radius": inv.snap_radius,
                "lift_deviation": lift.max_deviation,
                "passed": passed,
            }
        )
        if args.csv:
            _csv_trajectory(args.csv, f"trajectory_{idx}", p, h, sc)
    report = _report_shell(
        args,
        "poisson-check",
        {"preset": args.preset, "scenarios": args.scenario or "auto", "tolerance": args.tol},
    )
    report["results"] = {
        "jacobi_flag": jacobi_flag(p),
        "scenarios": results,
        "ok": ok,
    }
    _finish_timing(report, args)
    _emit(report, args)
    return 0 if ok else 1


def cmd_selftest(args) -> int:
    from . import acceptance

    outcomes = acceptance.run_all(verbose=True)
    report = _report_shell(args, "selftest", {})
    report["results"] = [
        {"criterion": o.criterion, "title": o.title, "passed": o.passed, "detail": o.detail}
        for o in outcomes
    ]
    _finish_timing(report, args)
    _emit(report, args)
    return 0 if all(o.passed for o in outcomes) else 1


def _finish_timing(report: dict[str, Any], args) -> None:
    if getattr(args, "timing", False):
        report["timing_seconds"] = time.time() - getattr(args, "_start", time.time())
    else:
        report["timing_seconds"] = None


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_common(sp: argparse.ArgumentParser, with_curves: bool = True) -> None:
    sp.add_argument("--seed", type=int, default=0, help="seed for all sampled randomness")
    sp.add_argument("--out", help="write the JSON report to this file instead of stdout")
    sp.add_argument("--csv", help="directory for CSV emission of fibers/trajectories")
    sp.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identity)")
    sp.add_argument("--degree-bound", dest="degree_bound", type=int, default=None,
                    help="strong-kernel syzygy degree bound (default: max generator degree + dim)")
    if with_curves:
        sp.add_argument("--curves", type=int, default=None,
                        help="number of ray directions (default: 3n deterministic directions)")
        sp.add_argument("--arc-degree", dest="arc_degree", type=int, default=2,
                        help="maximum arc degree in the curve family")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="folcone",
        description="Exact invariants of polynomial singular foliations.",
    )
    parser.add_argument("--version", action="version", version=f"folcone {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("analyze", help="ranks, regularity, strong kernels, isotropy at points")
    sp.add_argument("preset", help=f"builtin name ({', '.join(BUILTIN_NAMES)}) or a preset file path")
    sp.add_argument("--points", type=_points_arg, default=None,
                    help="semicolon-separated points, e.g. '0,0,0;1,0,0'")
    _add_common(sp, with_curves=False)
    sp.set_defaults(fn=cmd_analyze)

    sp = sub.add_parser("nash-fiber", help="limit subspaces of the kernel family at a point")
    sp.add_argument("preset")
    sp.add_argument("--point", type=_point_arg, required=True)
    _add_common(sp)
    sp.set_defaults(fn=cmd_nash_fiber)

    sp = sub.add_parser("hn-fiber", help="cone fiber (annihilators) plus sandwich/subalgebra checks")
    sp.add_argument("preset")
    sp.add_argument("--point", type=_point_arg, required=True)
    _add_common(sp)
    sp.set_defaults(fn=cmd_hn_fiber)

    sp = sub.add_parser("symbol", help="top symbol and realized normal form of an operator")
    sp.add_argument("preset")
    sp.add_argument("--op", required=True, help="operator expression or a preset operator name")
    sp.add_argument("--degree", type=int, default=None)
    _add_common(sp, with_curves=False)
    sp.set_defaults(fn=cmd_symbol)

    sp = sub.add_parser("elliptic", help="longitudinal ellipticity verdict over sampled points")
    sp.add_argument("preset")
    sp.add_argument("--op", required=True)
    sp.add_argument("--points", type=_points_arg, required=True)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--sphere-samples", dest="sphere_samples", type=int, default=8)
    sp.add_argument("--convention", choices=("positive", "nonvanishing"), default="positive",
                    help="strict positivity (default) or nonvanishing |symbol|")
    sp.add_argument("--force-odd", dest="force_odd", action="store_true",
                    help="shorthand for --convention nonvanishing on odd degrees")
    _add_common(sp)
    sp.set_defaults(fn=cmd_elliptic)

    sp = sub.add_parser("poisson-check", help="Hamiltonian identities, cone invariance, lift check")
    sp.add_argument("preset")
    sp.add_argument("--scenario", action="append", default=None,
                    help="'point=1,0,0;gen=g3;eta=0,1,0;T=1;steps=1000' (repeatable)")
    sp.add_argument("--tol", type=float, default=1e-6)
    _add_common(sp, with_curves=False)
    sp.set_defaults(fn=cmd_poisson_check)

    sp = sub.add_parser("selftest", help="run the acceptance suite")
    _add_common(sp, with_curves=False)
    sp.set_defaults(fn=cmd_selftest)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args._start = time.time()
    try:
        return args.fn(args)
    except (ParseError, PresetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MissingStructureFunctions as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except argparse.ArgumentTypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
