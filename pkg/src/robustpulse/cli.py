"""Command-line front end: train, test, scan and list preset problems.

All outputs are plain UTF-8 CSV/JSON with full round-trip float precision,
and every run writes a ``manifest.json`` recording the resolved parameters,
tool version and RNG algorithm; re-running a manifest reproduces every
output file byte for byte.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import Diverged, NotHermitian, NotUnitary, ShapeMismatch, UnknownPreset
from .model import ControlField, ControlProblem, robustness_scan
from .optimize import TrainConfig, amplitude_stats, test, train
from .presets import NOTES, preset, preset_names
from .sampling import (
    RNG_ALGORITHM,
    Distribution,
    UncertaintyParam,
    UncertaintySpec,
    mc_samples,
    training_grid,
)

_DIST_NAMES = {"uniform": Distribution.UNIFORM, "tgauss": Distribution.TRUNCATED_GAUSSIAN}


@dataclass
class RunManifest:
    """Resolved inputs of one run; serializing and re-running it is a no-op."""

    problem: str
    bounds: list[float]
    grid_counts: list[int]
    test_count: int
    seed: int
    distribution: str
    step_size: float
    max_iters: int
    log_stride: int
    out_dir: str
    scan_grid: list[list[float]] | None = None
    tool_version: str = __version__
    rng_algorithm: str = RNG_ALGORITHM

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"


def _fmt(x: float) -> str:
    """Shortest decimal that parses back to exactly the same float."""
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def _resolve(args) -> tuple[ControlProblem, UncertaintySpec, TrainConfig, RunManifest]:
    """Merge preset defaults, config-file values and CLI flags."""
    cfg_values = {}
    if args.config:
        cfg_values = json.loads(Path(args.config).read_text(encoding="utf-8"))
    name = args.preset or cfg_values.get("problem")
    if not name:
        raise ValueError("no problem selected: pass --preset or a config with a 'problem' key")
    problem, spec, tcfg = preset(name)

    def pick(flag, key, default):
        if flag is not None:
            return flag
        if key in cfg_values and cfg_values[key] is not None:
            return cfg_values[key]
        return default

    bounds = pick(None, "bounds", [p.bound for p in spec.params])
    if args.bound is not None:
        bounds = [args.bound] * spec.n_params
    counts = pick(None, "grid_counts", [p.grid_count for p in spec.params])
    if args.grid_counts is not None:
        counts = args.grid_counts
        if len(counts) == 1:
            counts = counts * spec.n_params
    if len(bounds) != spec.n_params or len(counts) != spec.n_params:
        raise ValueError(f"problem has {spec.n_params} uncertainty parameters; "
                         f"got {len(bounds)} bounds / {len(counts)} grid counts")
    dist = pick(args.distribution, "distribution", spec.test_distribution.value)
    manifest = RunManifest(
        problem=name,
        bounds=[float(b) for b in bounds],
        grid_counts=[int(c) for c in counts],
        test_count=int(pick(args.samples, "test_count", spec.test_count)),
        seed=int(pick(args.seed, "seed", spec.seed)),
        distribution=dist,
        step_size=float(pick(args.step_size, "step_size", tcfg.step_size)),
        max_iters=int(pick(args.max_iters, "max_iters", tcfg.max_iters)),
        log_stride=int(pick(args.log_stride, "log_stride", tcfg.log_stride)),
        out_dir=args.out,
        scan_grid=cfg_values.get("scan_grid"),
    )
    spec = UncertaintySpec(
        params=tuple(UncertaintyParam(b, c) for b, c in zip(manifest.bounds, manifest.grid_counts)),
        test_distribution=_DIST_NAMES[manifest.distribution],
        test_count=manifest.test_count,
        seed=manifest.seed,
    )
    tcfg = TrainConfig(
        step_size=manifest.step_size,
        max_iters=manifest.max_iters,
        log_stride=manifest.log_stride,
        plateau_tol=tcfg.plateau_tol,
        plateau_window=tcfg.plateau_window,
    )
    return problem, spec, tcfg, manifest


def _write_controls(path: Path, problem: ControlProblem, amps: np.ndarray) -> None:
    dt = problem.dt
    rows = [(m + 1, j + 1, _fmt(j * dt), _fmt(amps[m, j]))
            for m in range(amps.shape[0]) for j in range(amps.shape[1])]
    _write_csv(path, ["m", "j", "t_start", "amplitude"], rows)


def _read_controls(path: Path, problem: ControlProblem) -> ControlField:
    table = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            table[(int(row["m"]) - 1, int(row["j"]) - 1)] = float(row["amplitude"])
    m, n = problem.n_controls, problem.slices
    if len(table) != m * n or any((i, j) not in table for i in range(m) for j in range(n)):
        raise ShapeMismatch(f"controls file does not cover an {m} x {n} table")
    amps = np.empty((m, n))
    for (i, j), v in table.items():
        amps[i, j] = v
    return ControlField(amps, problem)


def cmd_train(args) -> int:
    problem, spec, tcfg, manifest = _resolve(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    samples = training_grid(spec)
    result = train(problem, samples, tcfg)
    amps = result.learned.amplitudes

    _write_controls(out / "controls.csv", problem, amps)
    _write_csv(out / "trace.csv", ["iteration", "avg_fidelity", "avg_infidelity"],
               [(k, _fmt(f), _fmt(1.0 - f)) for k, f in result.fidelity_trace])
    max_abs, mean_abs = amplitude_stats(result.learned)
    final = result.fidelity_trace[-1][1]
    summary = {
        "problem": manifest.problem,
        "dim": problem.dim,
        "scheme": problem.scheme.value,
        "train_samples": len(samples),
        "iterations_run": result.iterations_run,
        "stopped_by": result.stopped_by,
        "final_avg_fidelity": final,
        "final_avg_infidelity": 1.0 - final,
        "per_sample_min": min(result.per_sample_final),
        "per_sample_max": max(result.per_sample_final),
        "amplitude_max_abs": max_abs,
        "amplitude_mean_abs": mean_abs,
        "tool_version": __version__,
        "rng_algorithm": RNG_ALGORITHM,
    }
    _write_json(out / "result.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _write_json(out / "manifest.json", manifest.to_json())
    print(f"trained {manifest.problem}: avg fidelity {final:.6f} "
          f"after {result.iterations_run} iterations ({result.wall_time:.1f}s) -> {out}")
    return 0


def cmd_test(args) -> int:
    problem, spec, _, manifest = _resolve(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    field = _read_controls(Path(args.controls), problem)
    samples = mc_samples(spec)
    report = test(problem, field, samples)

    _write_csv(out / "fidelities.csv", ["index", "fidelity"],
               [(i, _fmt(f)) for i, f in enumerate(report.fidelities)])
    _write_csv(out / "samples.csv",
               ["index"] + [f"eps_{k}" for k in range(spec.n_params)],
               [(i, *map(_fmt, s.eps)) for i, s in enumerate(samples)])
    _write_csv(out / "histogram.csv", ["bin_lo", "bin_hi", "count"],
               [(_fmt(lo), _fmt(hi), c) for lo, hi, c in
                zip(report.histogram_edges[:-1], report.histogram_edges[1:], report.histogram_counts)])
    summary = {
        "problem": manifest.problem,
        "samples": len(samples),
        "distribution": manifest.distribution,
        "mean": report.mean,
        "min": report.min,
        "max": report.max,
        "std": report.std,
        "tool_version": __version__,
        "rng_algorithm": RNG_ALGORITHM,
    }
    _write_json(out / "test_report.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _write_json(out / "manifest.json", manifest.to_json())
    print(f"tested {manifest.problem} on {len(samples)} samples: "
          f"mean fidelity {report.mean:.6f} (min {report.min:.6f}) -> {out}")
    return 0


def _parse_grid(text: str, n_params: int) -> list[tuple[float, float, int]]:
    parts = text.split(",")
    if len(parts) == 1:
        parts = parts * n_params
    if len(parts) != n_params:
        raise ValueError(f"scan grid needs {n_params} lo:hi:count triplets, got {len(parts)}")
    triplets = []
    for part in parts:
        lo, hi, count = part.split(":")
        triplets.append((float(lo), float(hi), int(count)))
    return triplets


def cmd_scan(args) -> int:
    problem, spec, _, manifest = _resolve(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    field = _read_controls(Path(args.controls), problem)
    if args.grid:
        triplets = _parse_grid(args.grid, spec.n_params)
    elif manifest.scan_grid:
        triplets = [(float(lo), float(hi), int(c)) for lo, hi, c in manifest.scan_grid]
    else:
        triplets = [(1.0 - p.bound, 1.0 + p.bound, 21) for p in spec.params]
    manifest.scan_grid = [[lo, hi, count] for lo, hi, count in triplets]

    axes = [np.linspace(lo, hi, count) for lo, hi, count in triplets]
    mesh = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=-1)
    results = robustness_scan(problem, field, mesh)
    _write_csv(out / "scan.csv",
               [f"eps_{k}" for k in range(spec.n_params)] + ["fidelity"],
               [(*map(_fmt, s.eps), _fmt(f)) for s, f in results])
    _write_json(out / "manifest.json", manifest.to_json())
    print(f"scanned {manifest.problem} over {len(results)} grid points -> {out}")
    return 0


def cmd_presets(args) -> int:
    for name in preset_names():
        problem, spec, tcfg = preset(name)
        dist = spec.test_distribution.value
        print(f"{name}: dim={problem.dim}, controls={problem.n_controls}, "
              f"T={problem.horizon}, N={problem.slices}, scheme={problem.scheme.value}, "
              f"E={[p.bound for p in spec.params]}, grid={[p.grid_count for p in spec.params]}, "
              f"testing={dist}, step_size={tcfg.step_size}")
        print(f"    {NOTES[name]}")
    return 0


def _add_common(sub, with_train=False, with_controls=False):
    sub.add_argument("--preset", help="preset problem name (see 'presets')")
    sub.add_argument("--config", help="JSON config/manifest file")
    sub.add_argument("--out", default="out", help="output directory")
    sub.add_argument("--seed", type=int, help="RNG seed for testing ensembles")
    sub.add_argument("--bound", type=float, help="override every uncertainty bound E")
    sub.add_argument("--grid-counts", type=lambda s: [int(v) for v in s.split(",")],
                     help="training grid counts, comma-separated (one value applies to all)")
    sub.add_argument("--samples", type=int, help="number of testing samples")
    sub.add_argument("--distribution", choices=sorted(_DIST_NAMES),
                     help="testing distribution")
    sub.add_argument("--max-iters", type=int, help="training iteration budget")
    sub.add_argument("--step-size", type=float, help="gradient-ascent step size")
    sub.add_argument("--log-stride", type=int, help="iterations between trace rows")
    if with_controls:
        sub.add_argument("--controls", required=True, help="controls.csv from a training run")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robustpulse",
                                     description="Robust pulse synthesis for quantum gates")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p_train = subs.add_parser("train", help="train a pulse on the uncertainty grid")
    _add_common(p_train)
    p_train.set_defaults(func=cmd_train)

    p_test = subs.add_parser("test", help="Monte Carlo test of a learned pulse")
    _add_common(p_test, with_controls=True)
    p_test.set_defaults(func=cmd_test)

    p_scan = subs.add_parser("scan", help="fidelity over an uncertainty grid")
    _add_common(p_scan, with_controls=True)
    p_scan.add_argument("--grid", help="per-parameter lo:hi:count triplets, comma-separated")
    p_scan.set_defaults(func=cmd_scan)

    p_list = subs.add_parser("presets", help="list available preset problems")
    p_list.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Diverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (UnknownPreset, ShapeMismatch, NotHermitian, NotUnitary, ValueError,
            OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
