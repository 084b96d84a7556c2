"""Manifest-driven command line: ``flowlab simulate|verify|presets``.

Exit codes: 0 success, 1 a check failed, 2 invalid manifest, 3 a family was
queried outside its validity predicate, 4 input/output failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np

from . import expr as ex
from .errors import (
    FlowlabError,
    ManifestError,
    MismatchedInitialPair,
    NonFinite,
    OutsideValidity,
    SensePreservationViolated,
    UnknownPreset,
)
from .families import family_from_json
from .kinematics import CSV_COLUMNS, LabeledFlow, LabelGrid, label_series
from .presets import PRESETS, preset
from .verification import CORRUPTIONS, ToleranceConfig, corrupt, report_json, run_suite, suite_passed

EXIT_OK, EXIT_CHECK, EXIT_MANIFEST, EXIT_VALIDITY, EXIT_IO = 0, 1, 2, 3, 4

PRESET_SOURCES = {
    "kirchhoff": "Kirchhoff elliptical vortex",
    "gerstner": "Gerstner trochoidal wave",
    "example-4-1": "worked example: scaled linearly dependent family",
    "example-4-2": "worked example: linearly independent case 1",
    "example-4-3": "worked example: linearly independent case 2",
    "example-4-4": "worked example: linearly independent case 3",
    "example-4-5": "worked example: linearly independent case 4",
    "example-5-1": "worked example: general linearly dependent family",
    "example-5-2": "worked example: general family, flat branch",
    "example-5-3": "worked example: general family with |C4| = |sin t|",
}

TOLERANCE_FIELDS = ("analytic_tol", "fd_tol", "fd_step_t", "fd_step_z", "samples_t", "conservation_tol")


@dataclass
class RunManifest:
    flow_json: Any
    flow: LabeledFlow
    grid: LabelGrid
    times: np.ndarray
    labels: np.ndarray
    outputs: dict[str, Path]
    tolerances: ToleranceConfig
    seed: int = 0


# ---------------------------------------------------------------------------
# manifest parsing
# ---------------------------------------------------------------------------

def _num(v, where) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ManifestError(where, f"expected a finite number, got {v!r}")
    return float(v)


def _int(v, where, minimum) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ManifestError(where, f"expected an integer >= {minimum}, got {v!r}")
    return v


def _pair(v, where) -> tuple[float, float]:
    if not isinstance(v, list) or len(v) != 2:
        raise ManifestError(where, "expected [low, high]")
    lo, hi = _num(v[0], f"{where}[0]"), _num(v[1], f"{where}[1]")
    if not lo < hi:
        raise ManifestError(where, "need low < high")
    return lo, hi


def parse_grid(obj) -> LabelGrid:
    if not isinstance(obj, dict):
        raise ManifestError("grid", "a label rectangle {a: [lo, hi], b: [lo, hi], na, nb} is required")
    a = _pair(obj.get("a"), "grid.a")
    b = _pair(obj.get("b"), "grid.b")
    na = _int(obj.get("na", 16), "grid.na", 2)
    nb = _int(obj.get("nb", 16), "grid.nb", 2)
    return LabelGrid(*a, *b, na, nb)


def parse_times(obj) -> np.ndarray:
    if isinstance(obj, list):
        if not obj:
            raise ManifestError("times", "list must not be empty")
        t = np.array([_num(v, f"times[{i}]") for i, v in enumerate(obj)])
    elif isinstance(obj, dict):
        t0, t1 = _num(obj.get("t0"), "times.t0"), _num(obj.get("t1"), "times.t1")
        n = _int(obj.get("n"), "times.n", 1)
        t = np.linspace(t0, t1, n)
    else:
        raise ManifestError("times", "expected a list of times or {t0, t1, n}")
    if t.size > 1 and not np.all(np.diff(t) > 0):
        raise ManifestError("times", "times must be strictly increasing")
    return t


def parse_flow(obj, grid: LabelGrid) -> LabeledFlow:
    if not isinstance(obj, dict):
        raise ManifestError("flow", "expected an object with 'preset' or 'family'")
    if "preset" in obj:
        params = {k: v for k, v in obj.items() if k not in ("preset", "corruption")}
        for k, v in params.items():
            _num(v, f"flow.{k}")
        try:
            p = preset(obj["preset"], **params)
        except UnknownPreset as exc:
            raise ManifestError("flow.preset", str(exc)) from None
        except (TypeError, ValueError) as exc:
            raise ManifestError("flow", str(exc)) from None
        spec, f0, g0 = p.spec, p.f0, p.g0
    elif "family" in obj:
        spec = family_from_json(obj["family"], obj.get("params", {}))
        if "f0" not in obj or "g0" not in obj:
            raise ManifestError("flow.f0" if "f0" not in obj else "flow.g0", "missing field")
        f0 = ex.expr_from_json(obj["f0"], "flow.f0")
        g0 = ex.expr_from_json(obj["g0"], "flow.g0")
    else:
        raise ManifestError("flow", "expected 'preset' or 'family'")
    try:
        flow = LabeledFlow(spec, f0, g0, domain=grid)
    except MismatchedInitialPair as exc:
        raise ManifestError("flow.g0", str(exc)) from None
    if "corruption" in obj:
        if obj["corruption"] not in CORRUPTIONS:
            raise ManifestError("flow.corruption", f"expected one of {list(CORRUPTIONS)}")
        flow = corrupt(flow, obj["corruption"])
    return flow


def parse_tolerances(obj, grid: LabelGrid, times: np.ndarray, seed: int) -> ToleranceConfig:
    obj = obj or {}
    if not isinstance(obj, dict):
        raise ManifestError("tolerances", "expected an object")
    unknown = set(obj) - set(TOLERANCE_FIELDS)
    if unknown:
        raise ManifestError(f"tolerances.{sorted(unknown)[0]}", f"unknown field; expected one of {TOLERANCE_FIELDS}")
    kw = {}
    for k, v in obj.items():
        kw[k] = _int(v, f"tolerances.{k}", 1) if k == "samples_t" else _num(v, f"tolerances.{k}")
    try:
        return ToleranceConfig(grid=grid, t_range=(float(times[0]), float(times[-1])), span_seed=seed, **kw)
    except ValueError as exc:
        raise ManifestError("tolerances", str(exc)) from None


def load_manifest(path: str | os.PathLike, needs: tuple[str, ...]) -> RunManifest:
    """Read and fully validate a manifest before any computation.

    ``needs`` lists the output keys of which at least one must be present.
    """
    path = Path(path)
    text = path.read_text()  # OSError propagates as an I/O failure
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError("<file>", f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ManifestError("<root>", "manifest must be a JSON object")
    for key in ("flow", "grid", "times", "outputs"):
        if key not in raw:
            raise ManifestError(key, "missing field")
    grid = parse_grid(raw["grid"])
    times = parse_times(raw["times"])
    seed = _int(raw.get("seed", raw.get("seeds", 0)), "seed", 0)
    outputs_raw = raw["outputs"]
    if not isinstance(outputs_raw, dict):
        raise ManifestError("outputs", "expected an object")
    outputs = {}
    for k, v in outputs_raw.items():
        if k not in ("trajectories", "fields", "report"):
            raise ManifestError(f"outputs.{k}", "unknown output")
        if v is None:
            continue
        if not isinstance(v, str) or not v:
            raise ManifestError(f"outputs.{k}", "expected a file path")
        outputs[k] = (path.parent / v)
    if not any(k in outputs for k in needs):
        raise ManifestError("outputs", f"at least one of {list(needs)} must be given")
    labels = grid.labels()
    if "labels" in raw:
        lab = raw["labels"]
        if not isinstance(lab, list) or not lab:
            raise ManifestError("labels", "expected a non-empty list of [a, b] pairs")
        pts = []
        for i, item in enumerate(lab):
            if not isinstance(item, list) or len(item) != 2:
                raise ManifestError(f"labels[{i}]", "expected [a, b]")
            pts.append(complex(_num(item[0], f"labels[{i}][0]"), _num(item[1], f"labels[{i}][1]")))
        labels = np.array(pts)
    flow = parse_flow(raw["flow"], grid)
    tol = parse_tolerances(raw.get("tolerances"), grid, times, seed)
    flow = _with_window(flow, times)
    return RunManifest(raw["flow"], flow, grid, times, labels, outputs, tol, seed)


def _with_window(flow: LabeledFlow, times: np.ndarray) -> LabeledFlow:
    return replace(flow, t_range=(float(times[0]), float(times[-1])))


def validate_times(m: RunManifest, margin: float = 0.0) -> None:
    """Raise :class:`OutsideValidity` unless every requested time is admissible."""
    t0, t1 = float(m.times[0]) - margin, float(m.times[-1]) + margin
    try:
        m.flow.spec.check_paths(t0, t1)
    except NonFinite as exc:
        raise OutsideValidity(str(exc)) from None
    m.flow.spec.check_validity(m.times)
    if margin:
        m.flow.spec.check_validity(np.array([t0, t1]))


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def atomic_write(path: Path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def samples_csv(samples) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for s in samples:
        w.writerow([repr(float(v)) for v in s])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_simulate(manifest_path) -> int:
    m = load_manifest(manifest_path, ("trajectories", "fields"))
    validate_times(m)
    outputs = {}
    if "trajectories" in m.outputs:
        outputs["trajectories"] = samples_csv(label_series(m.flow, m.labels, m.times))
    if "fields" in m.outputs:
        grid_labels = m.grid.labels()
        outputs["fields"] = samples_csv(_field_rows(m.flow, grid_labels, m.times))
    for key, text in outputs.items():
        atomic_write(m.outputs[key], text)
    return EXIT_OK


def _field_rows(flow, labels, times):
    """Time-major rows: every grid label at the first time, then the next."""
    rows = label_series(flow, labels, times)
    n_t = len(times)
    return [rows[i * n_t + j] for j in range(n_t) for i in range(len(labels))]


def cmd_verify(manifest_path) -> int:
    m = load_manifest(manifest_path, ("report",))
    if "report" not in m.outputs:
        raise ManifestError("outputs.report", "verify needs a report path")
    validate_times(m)
    reports = run_suite(m.flow, m.tolerances)
    doc = report_json(m.flow_json, reports)
    atomic_write(m.outputs["report"], json.dumps(doc, indent=2) + "\n")
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.max_residual:.3e} (tol {r.tolerance:g})")
    return EXIT_OK if suite_passed(reports) else EXIT_CHECK


def cmd_presets(as_json: bool = False) -> int:
    rows = []
    for name in PRESETS:
        rows.append({"name": name, "family": preset(name).spec.kind, "example": PRESET_SOURCES[name]})
    if as_json:
        print(json.dumps(rows, indent=2))
    else:
        width = max(len(r["name"]) for r in rows)
        for r in rows:
            print(f"{r['name']:<{width}}  {r['family']:<18}  {r['example']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flowlab", description="Explicit Lagrangian flows from harmonic maps")
    sub = parser.add_subparsers(dest="command", required=True)
    p_sim = sub.add_parser("simulate", help="write trajectory and field CSV files")
    p_sim.add_argument("manifest")
    p_ver = sub.add_parser("verify", help="run the verification suite and write a JSON report")
    p_ver.add_argument("manifest")
    p_pre = sub.add_parser("presets", help="list the named presets")
    p_pre.add_argument("--json", action="store_true", help="machine-readable output")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args.manifest)
        if args.command == "verify":
            return cmd_verify(args.manifest)
        return cmd_presets(args.json)
    except ManifestError as exc:
        print(f"flowlab: manifest error: {exc}", file=sys.stderr)
        return EXIT_MANIFEST
    except OutsideValidity as exc:
        print(f"flowlab: outside validity: {exc}", file=sys.stderr)
        return EXIT_VALIDITY
    except SensePreservationViolated as exc:
        print(f"flowlab: sense preservation violated: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except OSError as exc:
        print(f"flowlab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FlowlabError as exc:
        print(f"flowlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDITY
