"""Measurement ingestion, synthetic data, accuracy evaluation, surface export.

The evaluation harness compares the inference system's rounded output with
the region oracle point by point, the same protocol as comparing an
approximation function against expert-labeled data.  Points the oracle does
not label are excluded from the accuracy denominator and reported separately,
as are points the system flags as anomalous.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from datetime import datetime, timedelta

from .engine import OutOfDomainError, SugenoFis, infer
from .regions import Classification, LosRegionModel, classify, oracle_label

CSV_HEADER = ("timestamp", "speed_kmh", "flow_vph")
LABELED_CSV_HEADER = CSV_HEADER + ("los",)


class IngestError(ValueError):
    """The input CSV cannot be accepted (bad header, or strict-mode row errors)."""


@dataclass(frozen=True)
class Measurement:
    """One traffic observation; the timestamp is carried through opaquely."""

    timestamp: str
    speed: float
    flow: float
    los: int | None = None


def _parse_csv_line(raw: str, line: int) -> list[str]:
    """One-line CSV parse that degrades to a ValueError instead of crashing
    (the csv module refuses NUL bytes and stray newlines)."""
    try:
        return next(csv.reader([raw]))
    except (csv.Error, StopIteration) as exc:
        raise ValueError(f"line {line}: unparseable CSV ({exc})") from None


def _parse_quantity(text: str, column: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"line {line}: {column} {text!r} is not a number") from None
    if not math.isfinite(value):
        raise ValueError(f"line {line}: {column} must be finite, got {text!r}")
    if value < 0:
        raise ValueError(f"line {line}: {column} must be non-negative, got {text!r}")
    return value


def ingest(text: str, strict: bool = False) -> tuple[list[Measurement], list[str]]:
    """Parse measurement CSV, validating every row.

    The header must be ``timestamp,speed_kmh,flow_vph`` with an optional
    trailing ``los`` column of expert labels 1..6.  By default invalid rows
    are collected into the returned error list (with line numbers) and the
    valid rows are kept; with ``strict=True`` any invalid row raises
    IngestError instead.  A missing or wrong header always raises.
    """
    lines = text.splitlines()
    if not lines:
        raise IngestError("empty input: missing CSV header")
    try:
        header = tuple(h.strip() for h in _parse_csv_line(lines[0], 1))
    except ValueError as exc:
        raise IngestError(str(exc)) from None
    if header == CSV_HEADER:
        labeled = False
    elif header == LABELED_CSV_HEADER:
        labeled = True
    else:
        raise IngestError(
            f"bad CSV header {','.join(header)!r}; expected "
            f"{','.join(CSV_HEADER)!r} (optionally with a trailing 'los' column)"
        )

    rows: list[Measurement] = []
    errors: list[str] = []
    expected = len(header)
    for line, raw_line in enumerate(lines[1:], start=2):
        if not raw_line.strip():
            continue
        try:
            record = _parse_csv_line(raw_line, line)
            if len(record) != expected:
                raise ValueError(
                    f"line {line}: expected {expected} fields, got {len(record)}"
                )
            speed = _parse_quantity(record[1].strip(), "speed_kmh", line)
            flow = _parse_quantity(record[2].strip(), "flow_vph", line)
            los: int | None = None
            if labeled:
                los_text = record[3].strip()
                if los_text in {"1", "2", "3", "4", "5", "6"}:
                    los = int(los_text)
                elif los_text not in {"-", ""}:
                    raise ValueError(f"line {line}: los must be 1..6 or '-', got {los_text!r}")
            rows.append(Measurement(record[0].strip(), speed, flow, los))
        except ValueError as exc:
            if strict:
                raise IngestError(str(exc)) from None
            errors.append(str(exc))
    return rows, errors


def generate_synthetic(
    model: LosRegionModel,
    n: int,
    seed: int,
    boundary_fraction: float = 0.02,
    jitter: float = 20.0,
    start: str = "2023-01-02T00:00:00",
) -> list[Measurement]:
    """Manufacture measurements with the region model's labeled structure.

    Points fall uniformly inside the rectangles, proportionally to area.  A
    ``boundary_fraction`` share of them is then pushed just across a randomly
    chosen internal rectangle edge (by up to ``jitter`` units, capped at the
    model envelope) to exercise boundary behavior.  Timestamps run at a
    15-minute cadence from ``start``.  Deterministic for a given seed.
    """
    if n <= 0:
        raise ValueError(f"need a positive sample count, got {n}")
    rng = random.Random(seed)
    rects = [rect for _, rect in model.regions]
    areas = [
        (rect.flow_hi - rect.flow_lo) * (rect.speed_hi - rect.speed_lo) for rect in rects
    ]
    flow_env = model.flow_domain
    speed_env = model.speed_domain

    points: list[tuple[float, float]] = []
    chosen: list[int] = []
    for _ in range(n):
        index = rng.choices(range(len(rects)), weights=areas)[0]
        rect = rects[index]
        points.append(
            (rng.uniform(rect.flow_lo, rect.flow_hi), rng.uniform(rect.speed_lo, rect.speed_hi))
        )
        chosen.append(index)

    jitter_count = round(n * boundary_fraction)
    for i in rng.sample(range(n), min(jitter_count, n)):
        rect = rects[chosen[i]]
        flow, speed = points[i]
        # internal edges only: never push a point out of the envelope
        edges = []
        if rect.flow_lo > flow_env[0]:
            edges.append(("flow", rect.flow_lo, -1.0, rect.flow_lo - flow_env[0]))
        if rect.flow_hi < flow_env[1]:
            edges.append(("flow", rect.flow_hi, +1.0, flow_env[1] - rect.flow_hi))
        if rect.speed_lo > speed_env[0]:
            edges.append(("speed", rect.speed_lo, -1.0, rect.speed_lo - speed_env[0]))
        if rect.speed_hi < speed_env[1]:
            edges.append(("speed", rect.speed_hi, +1.0, speed_env[1] - rect.speed_hi))
        if not edges:
            continue
        axis, edge, direction, room = rng.choice(edges)
        offset = direction * rng.uniform(0.0, min(jitter, room))
        if axis == "flow":
            flow = edge + offset
        else:
            speed = edge + offset
        points[i] = (flow, speed)

    t0 = datetime.fromisoformat(start)
    return [
        Measurement(
            timestamp=(t0 + timedelta(minutes=15 * i)).isoformat(),
            speed=speed,
            flow=flow,
        )
        for i, (flow, speed) in enumerate(points)
    ]


@dataclass
class EvaluationReport:
    """Point-by-point comparison of predictions against ground truth.

    ``total`` counts the points that enter the accuracy denominator:
    ground-truth-labeled and not predicted anomalous.  ``boundary_cases``
    counts every classified point whose output sat between levels, labeled
    or not.  ``confusion`` is indexed [truth - 1][predicted - 1].
    """

    points: int = 0
    total: int = 0
    mismatches: int = 0
    unlabeled: int = 0
    anomalies: int = 0
    boundary_cases: int = 0
    errors: list[str] = field(default_factory=list)
    confusion: list[list[int]] = field(
        default_factory=lambda: [[0] * 6 for _ in range(6)]
    )

    @property
    def accuracy(self) -> float:
        if self.total == 0:
            return 0.0
        return (self.total - self.mismatches) / self.total

    def to_dict(self) -> dict:
        return {
            "points": self.points,
            "total": self.total,
            "mismatches": self.mismatches,
            "unlabeled": self.unlabeled,
            "anomalies": self.anomalies,
            "boundary_cases": self.boundary_cases,
            "accuracy": self.accuracy,
            "errors": list(self.errors),
            "confusion": [row[:] for row in self.confusion],
        }

    def render(self) -> str:
        lines = [
            f"points:         {self.points}",
            f"evaluated:      {self.total}",
            f"mismatches:     {self.mismatches}",
            f"unlabeled:      {self.unlabeled}",
            f"anomalies:      {self.anomalies}",
            f"boundary cases: {self.boundary_cases}",
            f"errors:         {len(self.errors)}",
            f"accuracy:       {self.accuracy:.4%}",
            "",
            "confusion (rows = ground truth LoS, columns = predicted LoS):",
            "      " + "".join(f"{k:>7}" for k in range(1, 7)),
        ]
        for truth in range(6):
            row = "".join(f"{self.confusion[truth][p]:>7}" for p in range(6))
            lines.append(f"  {truth + 1:>2}  {row}")
        for message in self.errors:
            lines.append(f"error: {message}")
        return "\n".join(lines) + "\n"


def evaluate(
    fis: SugenoFis,
    model: LosRegionModel | None,
    data: list[Measurement],
    epsilon: float = 0.05,
) -> EvaluationReport:
    """Score the system against ground truth, point by point.

    Ground truth is each measurement's ``los`` label when present, otherwise
    the region oracle (``model`` may be None only if every row is labeled).
    Unlabeled points and anomalous predictions are excluded from the accuracy
    denominator; per-point domain errors go into the report, they never abort
    the run.
    """
    if not data:
        raise ValueError("no data to evaluate")
    report = EvaluationReport(points=len(data))
    for index, m in enumerate(data):
        try:
            truth = m.los
            if truth is None and model is not None:
                truth = oracle_label(model, m.flow, m.speed)
            prediction = classify(fis, m.flow, m.speed, epsilon)
        except (OutOfDomainError, ValueError) as exc:
            report.errors.append(f"point {index} ({m.timestamp}): {exc}")
            continue
        if prediction.boundary:
            report.boundary_cases += 1
        if truth is None:
            report.unlabeled += 1
            continue
        if prediction.is_anomaly:
            report.anomalies += 1
            continue
        report.total += 1
        assert prediction.level is not None
        report.confusion[truth - 1][prediction.level - 1] += 1
        if prediction.level != truth:
            report.mismatches += 1
    return report


def surface_grid(fis: SugenoFis, flow_steps: int, speed_steps: int):
    """Yield (flow, speed, InferenceResult) over an inclusive even grid,
    flow-major."""
    if flow_steps < 2 or speed_steps < 2:
        raise ValueError("surface export needs at least 2 steps per axis")
    flow_var, speed_var = fis.inputs[0], fis.inputs[1]
    flo, fhi = flow_var.domain
    slo, shi = speed_var.domain
    for i in range(flow_steps):
        flow = flo + (fhi - flo) * i / (flow_steps - 1)
        for j in range(speed_steps):
            speed = slo + (shi - slo) * j / (speed_steps - 1)
            result = infer(fis, {flow_var.name: flow, speed_var.name: speed})
            yield flow, speed, result


def export_surface(fis: SugenoFis, flow_steps: int, speed_steps: int) -> str:
    """Render the raw inference surface as CSV ``flow_vph,speed_kmh,raw_los``.

    Values are raw, not rounded, so anomaly zones show up as the zero
    plateau.  Numbers use repr, the shortest round-trip form.
    """
    lines = ["flow_vph,speed_kmh,raw_los"]
    for flow, speed, result in surface_grid(fis, flow_steps, speed_steps):
        lines.append(f"{flow!r},{speed!r},{result.raw!r}")
    return "\n".join(lines) + "\n"


def label_csv(model: LosRegionModel, text: str) -> str:
    """Append an oracle ``los`` column to measurement CSV (all-or-nothing).

    Original field text is preserved; unlabeled rows get ``-``.  Any invalid
    row rejects the whole input.
    """
    lines = text.splitlines()
    if not lines:
        raise IngestError("empty input: missing CSV header")
    try:
        header = tuple(h.strip() for h in _parse_csv_line(lines[0], 1))
    except ValueError as exc:
        raise IngestError(str(exc)) from None
    if header != CSV_HEADER:
        raise IngestError(
            f"bad CSV header {','.join(header)!r}; expected {','.join(CSV_HEADER)!r}"
        )
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(LABELED_CSV_HEADER)
    for line, raw_line in enumerate(lines[1:], start=2):
        if not raw_line.strip():
            continue
        record = _parse_csv_line(raw_line, line)
        if len(record) != 3:
            raise IngestError(f"line {line}: expected 3 fields, got {len(record)}")
        speed = _parse_quantity(record[1].strip(), "speed_kmh", line)
        flow = _parse_quantity(record[2].strip(), "flow_vph", line)
        level = oracle_label(model, flow, speed)
        writer.writerow(record + ["-" if level is None else level])
    return out.getvalue()


def classify_measurement(
    fis: SugenoFis, m: Measurement, epsilon: float = 0.05
) -> Classification:
    return classify(fis, m.flow, m.speed, epsilon)
