"""Run and sweep orchestration.

A cell = (detector variant, drop pattern) evaluated over every sequence of
the dataset: schedule → per-frame detect/track loop → pooled metrics →
modeled draw. A sweep is the cross-product of configured variants and
patterns, with yield computed against the same variant's full-rate row.

Reports are byte-deterministic: fixed float formatting, sorted JSON keys,
no timestamps. Two runs with the same config and seed produce identical
files.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .detectors import (DEFAULT_CLASS_SET, NoiseProfile, gt_detect,
                        noisy_detect, scene_context)
from .energy import (ENERGY_PRESETS, EnergyParams, UndefinedYieldError,
                     estimate_draw_multi, yield_metric)
from .kitti_io import DatasetError, SequenceData, load_label_dir, load_manifest, \
    write_frame_outputs
from .metrics import clear_pooled, hota_pooled
from .schedule import (DropPattern, Schedule, TARGET_PATTERNS, build_schedule,
                       parse_pattern, processed_count)
from .scenario import reference_scenario
from .tracker import FrameOutput, Tracker, TrackerConfig


class ConfigError(Exception):
    """Invalid run configuration."""


class ComputationError(Exception):
    """A sweep cell failed; the message names the offending cell."""


_PATTERN_TO_TARGET = {pattern: target for target, pattern in TARGET_PATTERNS.items()}


def target_label(pattern: DropPattern) -> str:
    """Named percentage when the pattern is one of the standard six."""
    target = _PATTERN_TO_TARGET.get((pattern.n, pattern.m))
    return str(target) if target is not None else str(pattern)


@dataclass(frozen=True)
class RunConfig:
    dataset: dict
    variants: tuple[str, ...]
    patterns: tuple[DropPattern, ...]
    profiles: dict[str, NoiseProfile]
    tracker: TrackerConfig
    tracker_overrides: dict[str, dict]
    energy: dict[str, EnergyParams]
    class_set: frozenset[str] = DEFAULT_CLASS_SET
    similarity: str = "3d-iou"
    clear_threshold: float = 0.5
    rng_seed: int = 0
    jobs: int = 1


def _parse_energy_entry(entry, where: str) -> EnergyParams:
    if isinstance(entry, dict) and "preset" in entry:
        name = entry["preset"]
        if name not in ENERGY_PRESETS:
            raise ConfigError(f"{where}: unknown energy preset {name!r}; "
                              f"known: {sorted(ENERGY_PRESETS)}")
        return ENERGY_PRESETS[name]
    if isinstance(entry, dict):
        try:
            return EnergyParams(**entry)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where}: expected an object")


_TRACKER_FIELDS = {f.name for f in fields(TrackerConfig)}


def _parse_tracker(data: dict, where: str) -> TrackerConfig:
    unknown = set(data) - _TRACKER_FIELDS
    if unknown:
        raise ConfigError(f"{where}: unknown tracker fields {sorted(unknown)}")
    try:
        return TrackerConfig(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")

    dataset = data.get("dataset", {"kind": "reference"})
    if not isinstance(dataset, dict) or "kind" not in dataset:
        raise ConfigError("dataset must be an object with a 'kind' field")
    if dataset["kind"] not in ("reference", "kitti"):
        raise ConfigError(f"unknown dataset kind {dataset['kind']!r}")
    if dataset["kind"] == "kitti" and "path" not in dataset:
        raise ConfigError("kitti dataset requires a 'path' field")

    raw_patterns = data.get("patterns")
    if not raw_patterns:
        raise ConfigError("config requires at least one pattern")
    try:
        patterns = tuple(parse_pattern(str(p)) for p in raw_patterns)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    variants = tuple(data.get("variants", ("gt",)))
    if not variants:
        raise ConfigError("config requires at least one variant")

    profiles = {}
    for name, body in data.get("profiles", {}).items():
        try:
            profiles[name] = NoiseProfile(**body)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"profile {name!r}: {exc}") from None
    for variant in variants:
        if variant == "gt":
            continue
        if not variant.startswith("noisy:"):
            raise ConfigError(f"variant {variant!r} must be 'gt' or 'noisy:<profile>'")
        profile = variant.split(":", 1)[1]
        if profile not in profiles:
            raise ConfigError(f"variant {variant!r} references undefined "
                              f"profile {profile!r}")

    tracker = _parse_tracker(data.get("tracker", {}), "tracker")
    overrides = {}
    for key, body in data.get("tracker_overrides", {}).items():
        pattern = parse_pattern(str(key))
        unknown = set(body) - _TRACKER_FIELDS
        if unknown:
            raise ConfigError(f"tracker_overrides[{key!r}]: unknown fields "
                              f"{sorted(unknown)}")
        overrides[str(pattern)] = dict(body)

    energy = {}
    for key, body in data.get("energy", {}).items():
        energy[key] = _parse_energy_entry(body, f"energy[{key!r}]")

    return RunConfig(
        dataset=dataset,
        variants=variants,
        patterns=patterns,
        profiles=profiles,
        tracker=tracker,
        tracker_overrides=overrides,
        energy=energy,
        class_set=frozenset(data.get("class_set", ["Car"])),
        similarity=data.get("similarity", "3d-iou"),
        clear_threshold=float(data.get("clear_threshold", 0.5)),
        rng_seed=int(data.get("rng_seed", 0)),
        jobs=int(data.get("jobs", 1)),
    )


def config_from_json(path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return config_from_dict(data)


def load_sequences(config: RunConfig) -> list[SequenceData]:
    dataset = config.dataset
    if dataset["kind"] == "reference":
        return [reference_scenario()]
    manifest = None
    if dataset.get("manifest"):
        manifest = load_manifest(dataset["manifest"])
    return load_label_dir(dataset["path"], manifest=manifest,
                          class_set=config.class_set)


def tracker_config_for(config: RunConfig, pattern: DropPattern) -> TrackerConfig:
    override = config.tracker_overrides.get(str(pattern))
    if not override:
        return config.tracker
    return replace(config.tracker, **override)


@dataclass(frozen=True)
class MetricsRow:
    variant: str
    target: str
    effective_target: float
    hota: float
    det_a: float
    ass_a: float
    mota: float
    motp: float
    processed_frames: int
    draw_watts: float | None
    yield_w_per_pt: float | None = None


@dataclass(frozen=True)
class CellResult:
    row: MetricsRow
    outputs_per_sequence: dict[str, list[FrameOutput]]
    schedules: dict[str, Schedule]


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[MetricsRow, ...]


def _profile_rng_seed(profile: NoiseProfile, config: RunConfig) -> NoiseProfile:
    # The run-level seed shifts every profile stream so sweeps with a new
    # seed redraw noise without editing each profile.
    return replace(profile, rng_seed=(profile.rng_seed + config.rng_seed) % 2**64)


def run_once(config: RunConfig, variant: str, pattern: DropPattern,
             sequences: list[SequenceData] | None = None) -> CellResult:
    if sequences is None:
        sequences = load_sequences(config)
    tracker_cfg = tracker_config_for(config, pattern)

    profile = None
    if variant.startswith("noisy:"):
        profile = _profile_rng_seed(config.profiles[variant.split(":", 1)[1]],
                                    config)
    elif variant != "gt":
        raise ConfigError(f"unknown variant {variant!r}")

    per_seq_pairs = []
    outputs_per_sequence: dict[str, list[FrameOutput]] = {}
    schedules: dict[str, Schedule] = {}
    for seq in sequences:
        schedule = build_schedule(pattern, seq.frame_count)
        schedules[seq.sequence_id] = schedule
        frames = seq.labels_by_frame()
        scene = scene_context(list(seq.labels))
        tracker = Tracker(tracker_cfg)
        outputs: list[FrameOutput] = []
        for frame_index in range(seq.frame_count):
            detections = None
            if schedule.is_processed(frame_index):
                if profile is None:
                    detections = gt_detect(frames[frame_index], config.class_set)
                else:
                    detections = noisy_detect(frames[frame_index], profile,
                                              frame_index, seq.sequence_id,
                                              scene, config.class_set)
            outputs.append(tracker.step(frame_index, detections))
        outputs_per_sequence[seq.sequence_id] = outputs
        per_seq_pairs.append((list(seq.labels), outputs))

    hota_res = hota_pooled(per_seq_pairs, config.similarity)
    clear_res = clear_pooled(per_seq_pairs, config.clear_threshold,
                             config.similarity)

    total_frames = sum(s.sequence_length for s in schedules.values())
    total_processed = sum(processed_count(s) for s in schedules.values())

    params = config.energy.get(variant, config.energy.get("default"))
    draw = estimate_draw_multi(params, list(schedules.values())) \
        if params is not None else None

    row = MetricsRow(
        variant=variant,
        target=target_label(pattern),
        effective_target=100.0 * total_processed / total_frames,
        hota=hota_res.hota,
        det_a=hota_res.det_a,
        ass_a=hota_res.ass_a,
        mota=clear_res.mota,
        motp=clear_res.motp,
        processed_frames=total_processed,
        draw_watts=draw,
    )
    return CellResult(row=row, outputs_per_sequence=outputs_per_sequence,
                      schedules=schedules)


def run_sweep(config: RunConfig,
              sequences: list[SequenceData] | None = None) -> SweepReport:
    if sequences is None:
        sequences = load_sequences(config)
    cells = [(variant, pattern) for variant in config.variants
             for pattern in config.patterns]

    def compute(cell):
        variant, pattern = cell
        try:
            return run_once(config, variant, pattern, sequences)
        except (ConfigError, DatasetError):
            raise
        except Exception as exc:
            raise ComputationError(
                f"sweep cell variant={variant} pattern={pattern} failed: {exc}"
            ) from exc

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(compute, cells))
    else:
        results = [compute(cell) for cell in cells]

    by_cell = {cell: result for cell, result in zip(cells, results)}
    rows = []
    for variant in config.variants:
        baseline = by_cell.get((variant, DropPattern(1, 1)))
        for pattern in config.patterns:
            row = by_cell[(variant, pattern)].row
            if (pattern != DropPattern(1, 1) and baseline is not None
                    and row.draw_watts is not None
                    and baseline.row.draw_watts is not None):
                try:
                    record = yield_metric(
                        (baseline.row.draw_watts, baseline.row.hota),
                        (row.draw_watts, row.hota))
                    row = replace(row, yield_w_per_pt=record.yield_value)
                except UndefinedYieldError:
                    pass
            rows.append(row)
    return SweepReport(rows=tuple(rows))


# --- report persistence ---------------------------------------------------

_CSV_COLUMNS = ("variant", "target", "effective_target", "hota", "det_a",
                "ass_a", "mota", "motp", "processed_frames", "draw_watts",
                "yield_w_per_pt")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def render_sweep_csv(report: SweepReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for row in report.rows:
        writer.writerow([_fmt(getattr(row, col)) for col in _CSV_COLUMNS])
    return buf.getvalue()


def render_tradeoff_csv(report: SweepReport) -> str:
    """Long-format performance-vs-draw table for plotting."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("variant", "target", "draw_watts", "hota"))
    for row in report.rows:
        writer.writerow((row.variant, row.target, _fmt(row.draw_watts),
                         _fmt(row.hota)))
    return buf.getvalue()


def render_sweep_json(report: SweepReport) -> str:
    payload = {"rows": [
        {col: (None if getattr(row, col) is None
               else (float(_fmt(getattr(row, col)))
                     if isinstance(getattr(row, col), float)
                     else getattr(row, col)))
         for col in _CSV_COLUMNS}
        for row in report.rows
    ]}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_report(report: SweepReport, out_dir) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "sweep_csv": out_dir / "sweep.csv",
        "sweep_json": out_dir / "sweep.json",
        "tradeoff_csv": out_dir / "tradeoff.csv",
    }
    paths["sweep_csv"].write_text(render_sweep_csv(report))
    paths["sweep_json"].write_text(render_sweep_json(report))
    paths["tradeoff_csv"].write_text(render_tradeoff_csv(report))
    return paths


def write_cell_outputs(result: CellResult, out_dir) -> None:
    """Persist one cell's per-sequence tracker outputs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for seq_id, outputs in sorted(result.outputs_per_sequence.items()):
        write_frame_outputs(outputs, out_dir / f"{seq_id}.txt")
