"""Command-line interface: manifest-driven sweeps, HOM scans, curve fits.

Run manifests are strict JSON: every key is checked against the schema and
anything unrecognized is an error naming the offending key, so a typo in a
config never silently falls back to a default.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .elements import WiringConfig
from .errors import (
    ConfigurationError,
    FitError,
    LoqecError,
    ManifestError,
    UsageError,
    ValidationError,
)
from .experiment import (
    CurveResult,
    ExperimentConfig,
    HomScanResult,
    SweepResult,
    fit_malus,
    hom_scan,
    run_experiment,
    visibility,
)

#: Manifest format accepted by this build.
MANIFEST_VERSION = 1
#: Format of emitted JSON result documents.
SCHEMA_VERSION = 1

_TOP_KEYS = {"config_version", "experiment", "runs", "hom_scan", "outputs"}
_EXPERIMENT_KEYS = {
    "qubit_hwp_angle",
    "wiring",
    "overlap_v",
    "imperfection_eps",
    "pc_enabled",
    "thetas",
    "pair_rate",
    "duration",
    "seed",
}
_RUN_KEYS = {"name", "experiment"}
_HOM_KEYS = {"delays", "coherence_time"}
_OUTPUT_KEYS = {"directory", "format"}
_THETA_RANGE_KEYS = {"start", "stop", "step"}
_DELAY_RANGE_KEYS = {"start", "stop", "num"}
_FORMATS = ("csv", "json")
_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


def _fail(where: str, message: str) -> None:
    raise ManifestError(f"{where}: {message}")


def _mapping(value: Any, where: str) -> dict:
    if not isinstance(value, dict):
        _fail(where, f"expected an object, got {type(value).__name__}")
    return value


def _check_keys(section: Mapping[str, Any], allowed: set[str], where: str) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        _fail(where, f"unknown key {unknown[0]!r} (allowed: {', '.join(sorted(allowed))})")


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(where, f"expected a number, got {value!r}")
    if not math.isfinite(float(value)):
        _fail(where, f"expected a finite number, got {value!r}")
    return float(value)


def _integer(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(where, f"expected an integer, got {value!r}")
    return int(value)


def _boolean(value: Any, where: str) -> bool:
    if not isinstance(value, bool):
        _fail(where, f"expected true or false, got {value!r}")
    return value


def _angle_grid(value: Any, where: str) -> tuple[float, ...]:
    if isinstance(value, list):
        if not value:
            _fail(where, "angle list must not be empty")
        return tuple(_number(v, f"{where}[{i}]") for i, v in enumerate(value))
    if isinstance(value, dict):
        _check_keys(value, _THETA_RANGE_KEYS, where)
        for key in _THETA_RANGE_KEYS:
            if key not in value:
                _fail(where, f"range needs {key!r}")
        start = _number(value["start"], f"{where}.start")
        stop = _number(value["stop"], f"{where}.stop")
        step = _number(value["step"], f"{where}.step")
        if step == 0.0:
            _fail(f"{where}.step", "must be nonzero")
        span = (stop - start) / step
        count = math.floor(span + 1e-9) + 1
        if count < 1:
            _fail(where, "range produces no angles")
        return tuple(start + i * step for i in range(count))
    _fail(where, f"expected a list of angles or a start/stop/step object, got {value!r}")
    raise AssertionError("unreachable")


def _delay_grid(value: Any, where: str) -> tuple[float, ...]:
    if isinstance(value, list):
        if not value:
            _fail(where, "delay list must not be empty")
        return tuple(_number(v, f"{where}[{i}]") for i, v in enumerate(value))
    if isinstance(value, dict):
        _check_keys(value, _DELAY_RANGE_KEYS, where)
        for key in _DELAY_RANGE_KEYS:
            if key not in value:
                _fail(where, f"range needs {key!r}")
        start = _number(value["start"], f"{where}.start")
        stop = _number(value["stop"], f"{where}.stop")
        num = _integer(value["num"], f"{where}.num")
        if num < 1:
            _fail(f"{where}.num", "must be at least 1")
        return tuple(float(t) for t in np.linspace(start, stop, num))
    _fail(where, f"expected a list of delays or a start/stop/num object, got {value!r}")
    raise AssertionError("unreachable")


def _experiment_config(
    section: Any, where: str, seed_override: int | None
) -> ExperimentConfig:
    section = _mapping(section, where)
    _check_keys(section, _EXPERIMENT_KEYS, where)
    kwargs: dict[str, Any] = {}
    if "qubit_hwp_angle" in section:
        kwargs["qubit_hwp_angle"] = _number(section["qubit_hwp_angle"], f"{where}.qubit_hwp_angle")
    if "wiring" in section:
        raw = section["wiring"]
        if not isinstance(raw, str):
            _fail(f"{where}.wiring", f"expected a string, got {raw!r}")
        try:
            kwargs["wiring"] = WiringConfig.parse(raw)
        except ConfigurationError as exc:
            _fail(f"{where}.wiring", str(exc))
    for key in ("overlap_v", "imperfection_eps", "pair_rate", "duration"):
        if key in section:
            kwargs[key] = _number(section[key], f"{where}.{key}")
    if "pc_enabled" in section:
        kwargs["pc_enabled"] = _boolean(section["pc_enabled"], f"{where}.pc_enabled")
    if "thetas" in section:
        kwargs["thetas"] = _angle_grid(section["thetas"], f"{where}.thetas")
    if "seed" in section:
        kwargs["seed"] = _integer(section["seed"], f"{where}.seed")
    if seed_override is not None:
        kwargs["seed"] = seed_override
    try:
        return ExperimentConfig(**kwargs)
    except (ValidationError, ConfigurationError) as exc:
        _fail(where, str(exc))
    raise AssertionError("unreachable")


def load_manifest(path: Path) -> dict:
    """Read and structurally validate a JSON run manifest."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from exc
    data = _mapping(data, "manifest")
    _check_keys(data, _TOP_KEYS, "manifest")
    if "config_version" not in data:
        _fail("manifest", "missing required key 'config_version'")
    version = data["config_version"]
    if version != MANIFEST_VERSION:
        _fail("manifest.config_version", f"expected {MANIFEST_VERSION}, got {version!r}")
    return data


def _sweep_jobs(
    manifest: Mapping[str, Any], seed_override: int | None
) -> list[tuple[str, ExperimentConfig]]:
    has_single = "experiment" in manifest
    has_runs = "runs" in manifest
    if has_single and has_runs:
        _fail("manifest", "give either 'experiment' or 'runs', not both")
    if has_single:
        return [("sweep", _experiment_config(manifest["experiment"], "experiment", seed_override))]
    if not has_runs:
        _fail("manifest", "run-sweep needs an 'experiment' or 'runs' section")
    runs = manifest["runs"]
    if not isinstance(runs, list) or not runs:
        _fail("manifest.runs", "expected a non-empty list of runs")
    jobs: list[tuple[str, ExperimentConfig]] = []
    seen: set[str] = set()
    for i, entry in enumerate(runs):
        where = f"runs[{i}]"
        entry = _mapping(entry, where)
        _check_keys(entry, _RUN_KEYS, where)
        if "name" not in entry:
            _fail(where, "missing required key 'name'")
        name = entry["name"]
        if not isinstance(name, str) or not _NAME_RE.match(name):
            _fail(f"{where}.name", f"expected a plain filename stem, got {name!r}")
        if name in seen:
            _fail(f"{where}.name", f"duplicate run name {name!r}")
        seen.add(name)
        if "experiment" not in entry:
            _fail(where, "missing required key 'experiment'")
        jobs.append((name, _experiment_config(entry["experiment"], f"{where}.experiment", seed_override)))
    return jobs


def _output_settings(
    manifest: Mapping[str, Any], directory_override: str | None, format_override: str | None
) -> tuple[Path, str]:
    section = _mapping(manifest.get("outputs", {}), "outputs")
    _check_keys(section, _OUTPUT_KEYS, "outputs")
    directory = section.get("directory", ".")
    if not isinstance(directory, str) or not directory:
        _fail("outputs.directory", f"expected a non-empty string, got {directory!r}")
    fmt = section.get("format", "csv")
    if fmt not in _FORMATS:
        _fail("outputs.format", f"expected one of {', '.join(_FORMATS)}, got {fmt!r}")
    if directory_override is not None:
        directory = directory_override
    if format_override is not None:
        fmt = format_override
    return Path(directory), fmt


def _float_str(value: float) -> str:
    """Shortest decimal string that round-trips the float."""
    return repr(float(value))


def _sweep_csv(result: SweepResult) -> str:
    lines = ["theta_deg,p_d1_d2,p_d1_d3,counts_d1_d2,counts_d1_d3"]
    counts_d2 = result.d1_d2.counts or ()
    counts_d3 = result.d1_d3.counts or ()
    for i, theta in enumerate(result.thetas):
        lines.append(
            ",".join(
                (
                    _float_str(theta),
                    _float_str(result.d1_d2.probabilities[i]),
                    _float_str(result.d1_d3.probabilities[i]),
                    str(int(counts_d2[i])),
                    str(int(counts_d3[i])),
                )
            )
        )
    return "\n".join(lines) + "\n"


def _curve_summary(curve: CurveResult) -> dict:
    return {
        "offset": curve.fit.offset,
        "amplitude": curve.fit.amplitude,
        "phase_deg": curve.fit.phase_deg,
        "visibility": curve.visibility,
    }


def _sweep_summary(name: str, result: SweepResult) -> dict:
    return {
        "name": name,
        "seed": result.config.seed,
        "success_probability": result.success_probability,
        "discarded_probability": result.discarded_probability,
        "expected_state": result.expected_state,
        "fidelity_45": result.fidelity_45,
        "fidelity_fit": result.fidelity_fit,
        "curves": {
            "d1_d2": _curve_summary(result.d1_d2),
            "d1_d3": _curve_summary(result.d1_d3),
        },
    }


def _config_dict(config: ExperimentConfig) -> dict:
    return {
        "qubit_hwp_angle": config.qubit_hwp_angle,
        "wiring": config.wiring.value,
        "overlap_v": config.overlap_v,
        "imperfection_eps": config.imperfection_eps,
        "pc_enabled": config.pc_enabled,
        "thetas": list(config.thetas),
        "pair_rate": config.pair_rate,
        "duration": config.duration,
        "seed": config.seed,
    }


def _sweep_rows(result: SweepResult) -> list[dict]:
    counts_d2 = result.d1_d2.counts or ()
    counts_d3 = result.d1_d3.counts or ()
    return [
        {
            "theta_deg": theta,
            "p_d1_d2": result.d1_d2.probabilities[i],
            "p_d1_d3": result.d1_d3.probabilities[i],
            "counts_d1_d2": int(counts_d2[i]),
            "counts_d1_d3": int(counts_d3[i]),
        }
        for i, theta in enumerate(result.thetas)
    ]


def _dump_json(document: Any) -> str:
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def _cmd_run_sweep(args: argparse.Namespace) -> int:
    manifest = load_manifest(Path(args.config))
    jobs = _sweep_jobs(manifest, args.seed)
    directory, fmt = _output_settings(manifest, args.output, args.format)
    directory.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for name, config in jobs:
        result = run_experiment(config)
        if fmt == "csv":
            data_path = directory / f"{name}.csv"
            data_path.write_text(_sweep_csv(result), encoding="utf-8")
            summary_path = directory / f"{name}_summary.json"
            summary_path.write_text(_dump_json(_sweep_summary(name, result)), encoding="utf-8")
            written.extend((data_path, summary_path))
        else:
            document = {
                "schema_version": SCHEMA_VERSION,
                "config": _config_dict(config),
                "rows": _sweep_rows(result),
                "summary": _sweep_summary(name, result),
            }
            path = directory / f"{name}.json"
            path.write_text(_dump_json(document), encoding="utf-8")
            written.append(path)
    if not args.quiet:
        for path in written:
            print(f"wrote {path}")
    return 0


def _hom_csv(result: HomScanResult) -> str:
    lines = ["delay_s,overlap_v,p_coincidence"]
    for point in result.points:
        lines.append(
            ",".join((_float_str(point.delay), _float_str(point.overlap), _float_str(point.p_coincidence)))
        )
    return "\n".join(lines) + "\n"


def _cmd_hom_scan(args: argparse.Namespace) -> int:
    manifest = load_manifest(Path(args.config))
    if "hom_scan" not in manifest:
        _fail("manifest", "hom-scan needs a 'hom_scan' section")
    section = _mapping(manifest["hom_scan"], "hom_scan")
    _check_keys(section, _HOM_KEYS, "hom_scan")
    if "delays" not in section:
        _fail("hom_scan", "missing required key 'delays'")
    if "coherence_time" not in section:
        _fail("hom_scan", "missing required key 'coherence_time'")
    delays = _delay_grid(section["delays"], "hom_scan.delays")
    coherence_time = _number(section["coherence_time"], "hom_scan.coherence_time")
    directory, fmt = _output_settings(manifest, args.output, args.format)
    try:
        result = hom_scan(delays, coherence_time)
    except ValidationError as exc:
        _fail("hom_scan", str(exc))
    directory.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path = directory / "hom_scan.csv"
        path.write_text(_hom_csv(result), encoding="utf-8")
    else:
        probabilities = [point.p_coincidence for point in result.points]
        document = {
            "schema_version": SCHEMA_VERSION,
            "config": {
                "delays": [point.delay for point in result.points],
                "coherence_time": result.coherence_time,
            },
            "rows": [
                {
                    "delay_s": point.delay,
                    "overlap_v": point.overlap,
                    "p_coincidence": point.p_coincidence,
                }
                for point in result.points
            ],
            "summary": {
                "min_p_coincidence": min(probabilities),
                "max_p_coincidence": max(probabilities),
            },
        }
        path = directory / "hom_scan.json"
        path.write_text(_dump_json(document), encoding="utf-8")
    if not args.quiet:
        print(f"wrote {path}")
    return 0


def _cmd_fit(args: argparse.Namespace) -> int:
    path = Path(args.input)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    reader = csv.DictReader(io.StringIO(text))
    fields = reader.fieldnames or []
    if "theta_deg" not in fields:
        raise FitError(f"{path.name} has no 'theta_deg' column (found: {', '.join(fields) or 'none'})")
    if args.column not in fields:
        raise FitError(f"{path.name} has no {args.column!r} column (found: {', '.join(fields)})")
    thetas: list[float] = []
    values: list[float] = []
    for line, row in enumerate(reader, start=2):
        try:
            thetas.append(float(row["theta_deg"]))
            values.append(float(row[args.column]))
        except (TypeError, ValueError) as exc:
            raise FitError(f"{path.name}:{line}: non-numeric value ({exc})") from exc
    if len(thetas) < 3:
        raise FitError(f"need at least 3 data rows to fit, got {len(thetas)}")
    fit = fit_malus(thetas, values)
    record = {
        "column": args.column,
        "offset": fit.offset,
        "amplitude": fit.amplitude,
        "phase_deg": fit.phase_deg,
        "visibility": visibility(fit),
    }
    if args.output:
        Path(args.output).write_text(_dump_json(record), encoding="utf-8")
    if not args.quiet:
        print(json.dumps(record, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loqec",
        description="Two-photon encoding sweeps, interference scans, and curve fits.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    sweep = sub.add_parser("run-sweep", help="run analyzer sweeps from a JSON manifest")
    sweep.add_argument("--config", required=True, help="path to the run manifest")
    sweep.add_argument("--seed", type=int, default=None, help="override every run's RNG seed")
    sweep.add_argument("--output", default=None, help="output directory (overrides the manifest)")
    sweep.add_argument("--format", choices=_FORMATS, default=None, help="output format (overrides the manifest)")
    sweep.add_argument("--quiet", action="store_true", help="do not list written files")
    sweep.set_defaults(func=_cmd_run_sweep)

    hom = sub.add_parser("hom-scan", help="run a two-photon interference scan from a JSON manifest")
    hom.add_argument("--config", required=True, help="path to the run manifest")
    hom.add_argument("--output", default=None, help="output directory (overrides the manifest)")
    hom.add_argument("--format", choices=_FORMATS, default=None, help="output format (overrides the manifest)")
    hom.add_argument("--quiet", action="store_true", help="do not list written files")
    hom.set_defaults(func=_cmd_hom_scan)

    fit = sub.add_parser("fit", help="fit one column of a sweep CSV")
    fit.add_argument("input", help="CSV file produced by run-sweep")
    fit.add_argument("--column", default="p_d1_d2", help="value column to fit (default: p_d1_d2)")
    fit.add_argument("--output", default=None, help="also write the fit record to this JSON file")
    fit.add_argument("--quiet", action="store_true", help="do not print the fit record")
    fit.set_defaults(func=_cmd_fit)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LoqecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
