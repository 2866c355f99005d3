"""Score a manifest of images against subjective ratings and summarise the fit."""
from __future__ import annotations

import csv
import io
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .image import load_image
from .logistic import LogisticParams, fit_logistic5
from .sharpness import SharpnessConfig, sharpness_score
from .stats import DegenerateInputError, krocc, plcc, rmse, srocc

log = logging.getLogger(__name__)

MANIFEST_HEADER = ("path", "subjective", "group")
REPORT_HEADER = ("n", "srocc", "krocc", "plcc", "rmse", "b1", "b2", "b3", "b4", "b5")
PER_IMAGE_HEADER = ("path", "objective", "subjective", "fitted")
SUMMARY_HEADER = ("summary", "srocc", "krocc", "plcc", "rmse")
MIN_ROWS = 5
THREADS_ENV = "SHARPMARK_THREADS"


class ManifestError(ValueError):
    """The manifest is malformed or has too few usable rows."""


def fmt(value: float) -> str:
    """Six significant digits, trailing zeros kept."""
    return f"{value:#.6g}"


@dataclass(frozen=True)
class ManifestEntry:
    path: str       # as written in the manifest
    resolved: Path
    subjective: float
    group: str | None = None


@dataclass(frozen=True)
class EvalRecord:
    image_path: str
    subjective: float
    objective: float
    group: str | None = None

    def __post_init__(self):
        if not (math.isfinite(self.subjective) and math.isfinite(self.objective)):
            raise ValueError(f"{self.image_path}: scores must be finite")


@dataclass(frozen=True)
class CorrelationReport:
    srocc: float
    krocc: float
    plcc: float
    rmse: float
    n: int
    logistic: LogisticParams
    records: tuple[EvalRecord, ...] = ()
    skipped: tuple[str, ...] = field(default=())

    def row(self) -> list[str]:
        return [str(self.n), *(fmt(v) for v in (self.srocc, self.krocc, self.plcc, self.rmse)),
                *(fmt(v) for v in self.logistic.as_tuple())]


@dataclass(frozen=True)
class SummaryRow:
    label: str
    srocc: float
    krocc: float
    plcc: float
    rmse: float

    def row(self) -> list[str]:
        return [self.label, *(fmt(v) for v in (self.srocc, self.krocc, self.plcc, self.rmse))]


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    try:
        n = int(raw) if raw else 0
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def ordered_map(fn, items: Sequence, workers: int | None = None) -> list:
    """``map`` that may run in threads; results keep input order."""
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def read_manifest(path: str | os.PathLike) -> list[ManifestEntry]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise ManifestError(f"{path}: manifest is empty")
    header = [h.strip() for h in header]
    if header[:2] != ["path", "subjective"] or len(header) > 3 or (len(header) == 3 and header[2] != "group"):
        raise ManifestError(f"{path}: header must be 'path,subjective,group', got {','.join(header)!r}")
    entries = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < 2 or len(row) > 3:
            raise ManifestError(f"{path}:{lineno}: expected 2 or 3 fields, got {len(row)}")
        rel = row[0].strip()
        try:
            subjective = float(row[1])
        except ValueError:
            raise ManifestError(f"{path}:{lineno}: bad subjective score {row[1]!r}") from None
        if not math.isfinite(subjective):
            raise ManifestError(f"{path}:{lineno}: subjective score must be finite")
        group = row[2].strip() if len(row) == 3 and row[2].strip() else None
        entries.append(ManifestEntry(rel, path.parent / rel, subjective, group))
    if not entries:
        raise ManifestError(f"{path}: manifest has no rows")
    return entries


def _or_nan(stat, x, y) -> float:
    try:
        return stat(x, y)
    except DegenerateInputError:
        return math.nan


def correlation_report(objective, subjective, records: Iterable[EvalRecord] = (),
                       skipped: Iterable[str] = ()) -> CorrelationReport:
    """Rank statistics on raw scores; PLCC and RMSE after the logistic mapping.

    Statistics that are undefined for the data (constant scores) are NaN.
    If every objective score is identical, the mapping falls back to the
    best constant, which is the subjective mean.
    """
    x = np.asarray(objective, dtype=np.float64)
    y = np.asarray(subjective, dtype=np.float64)
    degenerate = np.ptp(x) == 0.0
    if degenerate:
        log.warning("all %d objective scores equal %s; correlations are undefined", x.size, x[0])
        params = LogisticParams(0.0, 0.0, float(x[0]), 0.0, float(y.mean()), converged=False)
    else:
        params = fit_logistic5(x, y)
    fitted = params(x)
    return CorrelationReport(
        srocc=_or_nan(srocc, x, y),
        krocc=_or_nan(krocc, x, y),
        plcc=math.nan if degenerate else _or_nan(plcc, fitted, y),
        rmse=rmse(fitted, y),
        n=int(x.size),
        logistic=params,
        records=tuple(records),
        skipped=tuple(skipped),
    )


def evaluate_manifest(manifest: str | os.PathLike, cfg: SharpnessConfig | None = None,
                      per_image_csv: str | os.PathLike | None = None,
                      workers: int | None = None) -> CorrelationReport:
    """Score every manifest image and correlate with its subjective rating.

    Unreadable images are logged and listed in ``report.skipped``.  Fewer
    than five usable rows raise :class:`ManifestError`.
    """
    cfg = cfg or SharpnessConfig()
    entries = read_manifest(manifest)

    def score(entry: ManifestEntry):
        try:
            return sharpness_score(load_image(entry.resolved), cfg)
        except ValueError as exc:  # unreadable, undecodable or too small
            log.warning("skipping %s: %s", entry.path, exc)
            return None

    scores = ordered_map(score, entries, workers)
    records = [EvalRecord(e.path, e.subjective, q, e.group)
               for e, q in zip(entries, scores) if q is not None]
    skipped = [e.path for e, q in zip(entries, scores) if q is None]
    if len(records) < MIN_ROWS:
        raise ManifestError(f"{manifest}: {len(records)} usable rows, need at least {MIN_ROWS}")

    report = correlation_report([r.objective for r in records],
                                [r.subjective for r in records], records, skipped)
    if per_image_csv is not None:
        write_per_image_csv(per_image_csv, report)
    return report


def _write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_per_image_csv(path, report: CorrelationReport) -> None:
    fitted = report.logistic(np.array([r.objective for r in report.records]))
    rows = [[r.image_path, fmt(r.objective), fmt(r.subjective), fmt(f)]
            for r, f in zip(report.records, fitted)]
    _write_csv(path, PER_IMAGE_HEADER, rows)


def write_report_csv(path, reports: Sequence[CorrelationReport],
                     alphas: Sequence[float] | None = None) -> None:
    """One row per report; an ``alpha`` column leads when ``alphas`` is given."""
    if alphas is None:
        _write_csv(path, REPORT_HEADER, [r.row() for r in reports])
    else:
        _write_csv(path, ("alpha", *REPORT_HEADER),
                   [[fmt(a), *r.row()] for a, r in zip(alphas, reports)])


@dataclass(frozen=True)
class ReportRow:
    n: int
    srocc: float
    krocc: float
    plcc: float
    rmse: float
    alpha: float | None = None


def read_report_csv(path) -> list[ReportRow]:
    """Parse report rows written by :func:`write_report_csv`."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"n", "srocc", "krocc", "plcc", "rmse"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: not a report CSV (missing {', '.join(sorted(missing))})")
        rows = []
        for row in reader:
            try:
                rows.append(ReportRow(
                    n=int(row["n"]),
                    srocc=float(row["srocc"]),
                    krocc=float(row["krocc"]),
                    plcc=float(row["plcc"]),
                    rmse=float(row["rmse"]),
                    alpha=float(row["alpha"]) if row.get("alpha") else None,
                ))
            except (TypeError, ValueError):
                raise ValueError(f"{path}: malformed report row {row!r}") from None
        if not rows:
            raise ValueError(f"{path}: report CSV has no rows")
        return rows


def aggregate_reports(reports: Sequence[tuple[CorrelationReport | ReportRow, int]]
                      ) -> tuple[SummaryRow, SummaryRow]:
    """Direct and weighted averages of the four statistics.

    Weights are typically the number of relevant images in each database.
    """
    if not reports:
        raise ValueError("need at least one report to aggregate")
    weights = np.array([w for _, w in reports], dtype=np.float64)
    if np.any(weights <= 0):
        raise ValueError("weights must be positive")
    names = ("srocc", "krocc", "plcc", "rmse")
    table = np.array([[getattr(r, k) for k in names] for r, _ in reports], dtype=np.float64)
    direct = table.mean(axis=0)
    weighted = weights @ table / weights.sum()
    return SummaryRow("direct", *direct.tolist()), SummaryRow("weighted", *weighted.tolist())


def write_summary_csv(path, rows: Sequence[SummaryRow]) -> None:
    _write_csv(path, SUMMARY_HEADER, [r.row() for r in rows])
