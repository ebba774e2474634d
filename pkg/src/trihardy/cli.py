"""Command-line front end.

Subcommands cover the whole toolkit: ``behavior`` and ``verify`` for table
generation and checking, ``ontic-check`` for the model-exclusion LPs,
``concavity`` / ``cover`` / ``randomness`` for the parameter-space sweeps,
``npa`` for the moment-relaxation bounds, and ``pipeline`` to chain the
sweep stages into the figure data files with a manifest.

Configuration precedence is flags > environment (``TRIHARDY_OUT_DIR``,
``TRIHARDY_JOBS``) > JSON config file (``--config``) > built-in defaults.
Exit codes: 0 success, 1 a check or sub-stage failed, 2 usage or domain
error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from . import __version__
from .behavior import (
    Behavior,
    HardyParams,
    ParameterError,
    check_behavior,
    check_hardy_constraints,
    check_no_signalling,
    hardy_behavior,
)
from .concavity import GridSpec, classify_grid, find_optimum
from .cover import self_test_region
from .npa import hardy_moment_problem, randomness_curve, solve_sdp
from .ontic import (
    check_predictability_failure,
    enumerate_fully_local,
    enumerate_nsbl,
    max_hardy_over_model,
)
from .randomness import randomness_region
from . import plots

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Domain or plumbing problem that maps to exit code 2."""


# ---------------------------------------------------------------------------
# config resolution
# ---------------------------------------------------------------------------


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fp:
            doc = json.load(fp)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError("config file must hold a JSON object")
    return doc


def _resolve(args, config: dict, key: str, default, env: str | None = None):
    """flags > environment > config file > default."""
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    if env is not None and os.environ.get(env):
        return os.environ[env]
    if key in config:
        return config[key]
    return default


def _resolve_out_dir(args, config) -> str:
    out_dir = str(_resolve(args, config, "out_dir", ".", env="TRIHARDY_OUT_DIR"))
    os.makedirs(out_dir, exist_ok=True)
    return out_dir


def _resolve_jobs(args, config) -> int:
    try:
        jobs = int(_resolve(args, config, "jobs", 1, env="TRIHARDY_JOBS"))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"jobs must be an integer: {exc}") from exc
    if jobs < 1:
        raise UsageError("jobs must be >= 1")
    return jobs


def _parse_settings(text: str):
    if text == "all":
        return None
    try:
        triple = tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad settings {text!r}: {exc}") from exc
    if len(triple) != 3 or any(v not in (0, 1) for v in triple):
        raise UsageError(f"settings must be three 0/1 values, got {text!r}")
    return triple


def _parse_deltas(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad delta list {text!r}: {exc}") from exc


def _params_from(args, config) -> HardyParams:
    values = []
    for key in ("r", "s", "t"):
        value = _resolve(args, config, key, None)
        if value is None:
            raise UsageError(f"missing parameter --{key}")
        values.append(float(value))
    return HardyParams(*values)


def _grid_from(args, config, key: str, default_count: int) -> GridSpec:
    count = int(_resolve(args, config, key, default_count))
    margin = float(_resolve(args, config, "margin", 0.01))
    return GridSpec.cube(count, margin)


def _write_text(path: str, text: str) -> None:
    with open(path, "w") as fp:
        fp.write(text)


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as fp:
        plots.write_rows(fp, header, rows)


# ---------------------------------------------------------------------------
# behavior / verify
# ---------------------------------------------------------------------------


def _report_checks(behavior: Behavior, out=None) -> bool:
    out = out or sys.stdout
    rep = check_behavior(behavior)
    zeros = check_hardy_constraints(behavior)
    ns = check_no_signalling(behavior)
    print(f"valid-distribution: {'pass' if rep.ok else 'FAIL'}", file=out)
    print(f"hardy-zeros:        {'pass' if zeros.ok else 'FAIL'} "
          f"(residuals {', '.join(repr(v) for v in zeros.residuals)})", file=out)
    print(f"no-signalling:      {'pass' if ns.ok else 'FAIL'}", file=out)
    print(f"hardy-probability:  {behavior.hardy_probability!r}", file=out)
    return rep.ok and zeros.ok and ns.ok


def cmd_behavior(args, config) -> int:
    params = _params_from(args, config)
    behavior = hardy_behavior(params)
    fmt = _resolve(args, config, "format", "csv")
    out_path = _resolve(args, config, "out", None)
    if out_path:
        with open(out_path, "w", newline="") as fp:
            if fmt == "json":
                fp.write(behavior.to_json())
            else:
                behavior.to_csv(fp)
        print(f"wrote {out_path}")
    else:
        if fmt == "json":
            sys.stdout.write(behavior.to_json() + "\n")
        else:
            behavior.to_csv(sys.stdout)

    if args.settings:
        x, y, z = _parse_settings(args.settings)
        row = behavior.settings_row(x, y, z)
        print(f"settings ({x},{y},{z}) outcome probabilities:")
        for idx, p in enumerate(row):
            a, b, c = (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
            signs = ",".join("+" if v == 0 else "-" for v in (a, b, c))
            print(f"  ({signs}): {float(p)!r}")

    return EXIT_OK if _report_checks(behavior) else EXIT_CHECK


def cmd_verify(args, config) -> int:
    path = args.input
    fmt = _resolve(args, config, "format", None)
    if fmt is None:
        fmt = "json" if path.endswith(".json") else "csv"
    try:
        with open(path) as fp:
            behavior = Behavior.from_json(fp) if fmt == "json" else Behavior.from_csv(fp)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"malformed table in {path}: {exc}") from exc
    return EXIT_OK if _report_checks(behavior) else EXIT_CHECK


# ---------------------------------------------------------------------------
# ontic-check
# ---------------------------------------------------------------------------


def _model_entry(name: str, strategies, relax: bool) -> dict:
    optimum, weights = max_hardy_over_model(strategies)
    support = [
        {"index": int(i), "label": strategies.labels[i], "weight": float(w)}
        for i, w in enumerate(weights)
        if w > 1e-12
    ]
    entry = {
        "model": name,
        "strategies": len(strategies),
        "optimum_all_zeros": float(optimum),
        "certificate": support,
    }
    if relax:
        relaxed, _ = max_hardy_over_model(strategies, include_triple_zero=False)
        entry["optimum_pair_zeros_only"] = float(relaxed)
    return entry


def cmd_ontic_check(args, config) -> int:
    which = _resolve(args, config, "model", "both")
    if which not in ("fully-local", "nsbl", "both"):
        raise UsageError(f"unknown model class {which!r}")
    report: dict = {"models": []}
    ok = True
    if which in ("fully-local", "both"):
        entry = _model_entry("fully-local", enumerate_fully_local(), relax=False)
        ok &= abs(entry["optimum_all_zeros"]) <= 1e-9
        report["models"].append(entry)
    if which in ("nsbl", "both"):
        entry = _model_entry("nsbl", enumerate_nsbl(), relax=True)
        ok &= abs(entry["optimum_all_zeros"]) <= 1e-9
        ok &= entry["optimum_pair_zeros_only"] > 1e-3
        report["models"].append(entry)

    if getattr(args, "r", None) is not None:
        params = _params_from(args, config)
        behavior = hardy_behavior(params)
        pred = check_predictability_failure(behavior)
        report["behavior"] = {
            "params": list(params.as_tuple()),
            "hardy_probability": pred.target,
            "model_optimum": pred.model_optimum,
            "expressible": pred.expressible,
        }
        ok &= (not pred.expressible) == (pred.target > 1e-9)

    text = json.dumps(report, indent=2)
    out_path = _resolve(args, config, "out", None)
    if out_path:
        _write_text(out_path, text + "\n")
        print(f"wrote {out_path}")
    else:
        print(text)
    return EXIT_OK if ok else EXIT_CHECK


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


def cmd_concavity(args, config) -> int:
    grid = _grid_from(args, config, "grid", 60)
    out_dir = _resolve_out_dir(args, config)
    results = classify_grid(grid, zero_threshold=float(_resolve(args, config, "zero_threshold", 1e-9)))
    csv_path = os.path.join(out_dir, "fig1.csv")
    _write_csv(csv_path, plots.FIG1_HEADER, plots.concavity_rows(results))
    written = [csv_path]
    if args.gnuplot:
        gp = os.path.join(out_dir, "fig1.gp")
        _write_text(gp, plots.gnuplot_fig1())
        written.append(gp)
    if args.render:
        written.append(plots.render_fig1(csv_path, os.path.join(out_dir, "fig1.png")))

    counts: dict[str, int] = {}
    for item in results:
        counts[item.label] = counts.get(item.label, 0) + 1
    params, value = find_optimum()
    for label in sorted(counts):
        print(f"{label}: {counts[label]}")
    print(f"optimum: r={params.r!r} s={params.s!r} t={params.t!r} value={value!r}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _cover_shard(grid: GridSpec, tol: float, indices) -> list:
    return self_test_region(grid, tol=tol, indices=indices)


def _cover_scan(grid: GridSpec, tol: float, jobs: int) -> list:
    if jobs <= 1:
        return self_test_region(grid, tol=tol)
    total = len(grid)
    chunk = max(1, -(-total // (jobs * 4)))
    shards = [range(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]
    results = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for part in pool.map(partial(_cover_shard, grid, tol), shards):
            results.extend(part)
    return results


def cmd_cover(args, config) -> int:
    grid = _grid_from(args, config, "grid", 40)
    out_dir = _resolve_out_dir(args, config)
    jobs = _resolve_jobs(args, config)
    tol = float(_resolve(args, config, "tol", 1e-8))
    results = _cover_scan(grid, tol, jobs)
    csv_path = os.path.join(out_dir, "fig2.csv")
    _write_csv(csv_path, plots.FIG2_HEADER, plots.cover_rows(results))
    written = [csv_path]
    if args.gnuplot:
        gp = os.path.join(out_dir, "fig2.gp")
        _write_text(gp, plots.gnuplot_fig2())
        written.append(gp)
    if args.render:
        written.append(plots.render_fig2(csv_path, os.path.join(out_dir, "fig2.png")))

    positive = [res for res in results if res.omega > 0.0]
    on_cover = sum(1 for res in positive if res.on_cover)
    print(f"grid points: {len(results)}")
    print(f"positive omega: {len(positive)}")
    print(f"on the cover: {on_cover}")
    if positive:
        print(f"filtered fraction: {1.0 - on_cover / len(positive):.3f}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_randomness(args, config) -> int:
    deltas = _parse_deltas(str(_resolve(args, config, "deltas", "0.0179")))
    grid = _grid_from(args, config, "grid", 40)
    settings = _parse_settings(str(_resolve(args, config, "settings", "1,1,1")))
    if settings is None:
        raise UsageError("randomness reports need one settings triple, not 'all'")
    tolerance = float(_resolve(args, config, "tolerance", 1e-4))
    out_dir = _resolve_out_dir(args, config)

    regions = [
        randomness_region(delta, grid, settings, tolerance=tolerance) for delta in deltas
    ]
    members_path = os.path.join(out_dir, "fig3.csv")
    bounds_path = os.path.join(out_dir, "fig3_region.csv")
    _write_csv(members_path, plots.FIG3_HEADER, plots.randomness_rows(regions))
    _write_csv(bounds_path, plots.REGION_HEADER, plots.region_bound_rows(regions))
    written = [members_path, bounds_path]
    if args.gnuplot:
        gp = os.path.join(out_dir, "fig3.gp")
        _write_text(gp, plots.gnuplot_fig3())
        written.append(gp)
    if args.render:
        written.append(
            plots.render_fig3(
                bounds_path,
                members_path,
                os.path.join(out_dir, "npa_curve.csv"),
                os.path.join(out_dir, "fig3.png"),
            )
        )

    for region in regions:
        if region.empty:
            print(f"delta={region.delta!r}: empty slice")
        else:
            print(
                f"delta={region.delta!r}: {len(region.members)} certified points, "
                f"bits in [{region.min_bits!r}, {region.max_bits!r}]"
            )
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# npa
# ---------------------------------------------------------------------------


def cmd_npa(args, config) -> int:
    level = str(_resolve(args, config, "level", "local1"))
    out_dir = _resolve_out_dir(args, config)
    did_something = False
    ok = True

    if args.export_problem:
        delta = float(args.delta) if args.delta is not None else None
        target = tuple(int(v) for v in str(args.target).split(",")) if args.target else (0,) * 6
        problem = hardy_moment_problem(delta, target, level)
        _write_text(args.export_problem, problem.to_json() + "\n")
        print(f"wrote {args.export_problem}")
        did_something = True

    if args.delta is not None and args.target and not args.export_problem:
        target = tuple(int(v) for v in str(args.target).split(","))
        sol = solve_sdp(hardy_moment_problem(float(args.delta), target, level))
        print(json.dumps({
            "status": sol.status,
            "optimum": sol.optimum,
            "duality_gap": sol.duality_gap,
            "min_eigenvalue": sol.min_eigenvalue,
            "max_residual": sol.max_residual,
            "iterations": sol.iterations,
        }, indent=2))
        ok &= sol.ok
        did_something = True

    deltas_text = _resolve(args, config, "deltas", None)
    if deltas_text is not None:
        deltas = _parse_deltas(str(deltas_text))
        settings = _parse_settings(str(_resolve(args, config, "settings", "0,0,0")))
        points = randomness_curve(deltas, level, settings)
        curve_path = os.path.join(out_dir, "npa_curve.csv")
        _write_csv(curve_path, plots.CURVE_HEADER, plots.npa_curve_rows(points))
        for pt in points:
            print(f"delta={pt.delta!r}: bits={pt.bits!r} status={pt.status}")
        print(f"wrote {curve_path}")
        ok &= all(pt.status == "optimal" for pt in points)
        did_something = True

    if not did_something:
        raise UsageError("npa needs --deltas, --delta with --target, or --export-problem")
    return EXIT_OK if ok else EXIT_CHECK


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


def cmd_pipeline(args, config) -> int:
    out_dir = _resolve_out_dir(args, config)
    jobs = _resolve_jobs(args, config)
    grid = _grid_from(args, config, "grid", 60)
    cover_grid = _grid_from(args, config, "cover_grid", 40)
    deltas = _parse_deltas(str(_resolve(args, config, "deltas", "0.005,0.0179,0.0181")))
    level = str(_resolve(args, config, "level", "local1"))
    settings = _parse_settings(str(_resolve(args, config, "settings", "1,1,1")))
    curve_settings = _parse_settings(str(_resolve(args, config, "curve_settings", "0,0,0")))
    tolerance = float(_resolve(args, config, "tolerance", 1e-4))
    resolved = {
        "grid": grid.r_axis[2],
        "cover_grid": cover_grid.r_axis[2],
        "margin": grid.r_axis[0],
        "deltas": deltas,
        "level": level,
        "settings": settings,
        "curve_settings": curve_settings,
        "tolerance": tolerance,
        "jobs": jobs,
    }
    config_hash = hashlib.sha256(
        json.dumps(resolved, sort_keys=True).encode()
    ).hexdigest()

    started = time.perf_counter()
    stages: list[dict] = []
    state: dict = {}

    def run_stage(name, fn):
        t0 = time.perf_counter()
        entry: dict = {"name": name}
        try:
            entry["outputs"] = fn()
            entry["status"] = "ok"
        except Exception as exc:  # noqa: BLE001 - manifest carries the failure
            entry["status"] = "failed"
            entry["error"] = f"{type(exc).__name__}: {exc}"
            entry["outputs"] = []
        entry["seconds"] = round(time.perf_counter() - t0, 3)
        stages.append(entry)

    def stage_concavity():
        results = classify_grid(grid)
        path = os.path.join(out_dir, "fig1.csv")
        _write_csv(path, plots.FIG1_HEADER, plots.concavity_rows(results))
        gp = os.path.join(out_dir, "fig1.gp")
        _write_text(gp, plots.gnuplot_fig1())
        png = plots.render_fig1(path, os.path.join(out_dir, "fig1.png"))
        return [path, gp, png]

    def stage_cover():
        results = _cover_scan(cover_grid, 1e-8, jobs)
        state["cover"] = results
        path = os.path.join(out_dir, "fig2.csv")
        _write_csv(path, plots.FIG2_HEADER, plots.cover_rows(results))
        gp = os.path.join(out_dir, "fig2.gp")
        _write_text(gp, plots.gnuplot_fig2())
        png = plots.render_fig2(path, os.path.join(out_dir, "fig2.png"))
        return [path, gp, png]

    def stage_randomness():
        regions = [
            randomness_region(
                delta,
                cover_grid,
                settings,
                tolerance=tolerance,
                cover_results=state.get("cover"),
            )
            for delta in deltas
        ]
        members = os.path.join(out_dir, "fig3.csv")
        bounds = os.path.join(out_dir, "fig3_region.csv")
        _write_csv(members, plots.FIG3_HEADER, plots.randomness_rows(regions))
        _write_csv(bounds, plots.REGION_HEADER, plots.region_bound_rows(regions))
        return [members, bounds]

    def stage_npa():
        points = randomness_curve(deltas, level, curve_settings)
        path = os.path.join(out_dir, "npa_curve.csv")
        _write_csv(path, plots.CURVE_HEADER, plots.npa_curve_rows(points))
        return [path]

    def stage_figure3():
        gp = os.path.join(out_dir, "fig3.gp")
        _write_text(gp, plots.gnuplot_fig3())
        png = plots.render_fig3(
            os.path.join(out_dir, "fig3_region.csv"),
            os.path.join(out_dir, "fig3.csv"),
            os.path.join(out_dir, "npa_curve.csv"),
            os.path.join(out_dir, "fig3.png"),
        )
        return [gp, png]

    run_stage("concavity", stage_concavity)
    run_stage("cover", stage_cover)
    run_stage("randomness", stage_randomness)
    run_stage("npa", stage_npa)
    run_stage("figure3", stage_figure3)

    all_ok = all(entry["status"] == "ok" for entry in stages)
    manifest = {
        "tool": "trihardy",
        "version": __version__,
        "config": resolved,
        "config_sha256": config_hash,
        "wall_time_s": round(time.perf_counter() - started, 3),
        "ok": all_ok,
        "stages": stages,
    }
    manifest_path = os.path.join(out_dir, "manifest.json")
    _write_text(manifest_path, json.dumps(manifest, indent=2) + "\n")

    for entry in stages:
        marker = "ok " if entry["status"] == "ok" else "FAIL"
        print(f"[{marker}] {entry['name']} ({entry['seconds']}s)")
        if entry["status"] != "ok":
            print(f"       {entry['error']}")
    print(f"wrote {manifest_path}")
    return EXIT_OK if all_ok else EXIT_CHECK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trihardy",
        description="Three-party Hardy nonlocality toolkit",
    )
    parser.add_argument("--version", action="version", version=f"trihardy {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file (flags take precedence)")
        p.add_argument("--out-dir", dest="out_dir", help="output directory")
        p.add_argument("--jobs", type=int, help="worker processes for sweeps")

    p = sub.add_parser("behavior", help="generate and check one behaviour table")
    common(p)
    p.add_argument("--r", type=float)
    p.add_argument("--s", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", help="table file (default: stdout)")
    p.add_argument("--settings", help="also print one settings row, e.g. 1,1,1")
    p.set_defaults(func=cmd_behavior)

    p = sub.add_parser("verify", help="check a serialized behaviour table")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("csv", "json"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ontic-check", help="model-exclusion linear programs")
    common(p)
    p.add_argument("--model", choices=("fully-local", "nsbl", "both"))
    p.add_argument("--r", type=float)
    p.add_argument("--s", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--out", help="report file (default: stdout)")
    p.set_defaults(func=cmd_ontic_check)

    p = sub.add_parser("concavity", help="curvature classification sweep")
    common(p)
    p.add_argument("--grid", type=int)
    p.add_argument("--margin", type=float)
    p.add_argument("--zero-threshold", dest="zero_threshold", type=float)
    p.add_argument("--gnuplot", action="store_true")
    p.add_argument("--render", action="store_true")
    p.set_defaults(func=cmd_concavity)

    p = sub.add_parser("cover", help="concave-cover membership sweep")
    common(p)
    p.add_argument("--grid", type=int)
    p.add_argument("--margin", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--gnuplot", action="store_true")
    p.add_argument("--render", action="store_true")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("randomness", help="certified bits over iso-value slices")
    common(p)
    p.add_argument("--deltas", help="comma-separated list")
    p.add_argument("--grid", type=int)
    p.add_argument("--margin", type=float)
    p.add_argument("--settings")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--gnuplot", action="store_true")
    p.add_argument("--render", action="store_true")
    p.set_defaults(func=cmd_randomness)

    p = sub.add_parser("npa", help="moment-relaxation bounds")
    common(p)
    p.add_argument("--deltas", help="comma-separated list for the curve")
    p.add_argument("--level", choices=("level1", "local1", "level2"))
    p.add_argument("--settings", help="x,y,z or 'all'")
    p.add_argument("--delta", type=float, help="single pinned value")
    p.add_argument("--target", help="a,b,c,x,y,z for a single solve")
    p.add_argument("--export-problem", dest="export_problem", help="problem JSON path")
    p.set_defaults(func=cmd_npa)

    p = sub.add_parser("pipeline", help="chain the sweeps into figure data + manifest")
    common(p)
    p.add_argument("--grid", type=int)
    p.add_argument("--cover-grid", dest="cover_grid", type=int)
    p.add_argument("--margin", type=float)
    p.add_argument("--deltas")
    p.add_argument("--level", choices=("level1", "local1", "level2"))
    p.add_argument("--settings")
    p.add_argument("--curve-settings", dest="curve_settings")
    p.add_argument("--tolerance", type=float)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(getattr(args, "config", None))
        return args.func(args, config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
