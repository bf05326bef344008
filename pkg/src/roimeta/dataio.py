"""Reading and writing part-level experiment data.

Two interchangeable formats carry the same six fields per part:

* ``delimited-text`` -- UTF-8 CSV with the exact header
  ``campaign_id,arm,part_id,impressions,spend,value``; arm is ``A`` or ``B``,
  spend and value are decimal strings, one row per part.
* ``record-lines`` -- one JSON object per line with the same keys.

Rows are grouped into campaigns in first-seen order; part ROI is derived as
value/spend wherever spend is positive. All writes go through a temp file and
an atomic rename.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Iterator

from .campaigns import Arm, CampaignExperiment, ExperimentDataset, PartMeasurement
from .errors import IngestError

CSV_FIELDS = ("campaign_id", "arm", "part_id", "impressions", "spend", "value")
INPUT_FORMATS = ("delimited-text", "record-lines")

_ARM_BY_TAG = {"A": Arm.CONTROL, "B": Arm.TREATMENT}


def write_text_atomic(path: str | Path, text: str) -> None:
    """Write a file via temp-then-rename so readers never see partial content."""
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def _parse_int(raw: object, field: str, line: int) -> int:
    try:
        value = int(str(raw).strip())
    except (TypeError, ValueError):
        raise IngestError(f"{field} must be an integer, got {raw!r}", line) from None
    if value < 0:
        raise IngestError(f"{field} must be >= 0, got {value}", line)
    return value


def _parse_money(raw: object, field: str, line: int) -> float:
    try:
        value = float(str(raw).strip())
    except (TypeError, ValueError):
        raise IngestError(f"{field} must be a decimal number, got {raw!r}", line) from None
    if not math.isfinite(value) or value < 0:
        raise IngestError(f"{field} must be finite and >= 0, got {value}", line)
    return value


def _part_from_record(record: dict, line: int) -> PartMeasurement:
    missing = [f for f in CSV_FIELDS if f not in record or record[f] in (None, "")]
    if missing:
        raise IngestError(f"missing field(s): {', '.join(missing)}", line)
    campaign_id = str(record["campaign_id"]).strip()
    if not campaign_id:
        raise IngestError("campaign_id must be non-empty", line)
    arm_tag = str(record["arm"]).strip()
    if arm_tag not in _ARM_BY_TAG:
        raise IngestError(f"arm must be 'A' or 'B', got {arm_tag!r}", line)
    try:
        return PartMeasurement(
            campaign_id=campaign_id,
            arm=_ARM_BY_TAG[arm_tag],
            part_id=_parse_int(record["part_id"], "part_id", line),
            impressions=_parse_int(record["impressions"], "impressions", line),
            spend=_parse_money(record["spend"], "spend", line),
            value=_parse_money(record["value"], "value", line),
        )
    except ValueError as exc:
        raise IngestError(str(exc), line) from None


def _records_from_csv(path: Path) -> Iterator[tuple[int, dict]]:
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError("empty file, expected a header row", 1) from None
        if tuple(h.strip() for h in header) != CSV_FIELDS:
            raise IngestError(
                f"header must be {','.join(CSV_FIELDS)}, got {','.join(header)}", 1
            )
        for line, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(CSV_FIELDS):
                raise IngestError(
                    f"expected {len(CSV_FIELDS)} columns, got {len(row)}", line
                )
            yield line, dict(zip(CSV_FIELDS, row))


def _records_from_jsonl(path: Path) -> Iterator[tuple[int, dict]]:
    with path.open(encoding="utf-8") as handle:
        for line, raw in enumerate(handle, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise IngestError(f"invalid JSON: {exc.msg}", line) from None
            if not isinstance(record, dict):
                raise IngestError("each line must be a JSON object", line)
            yield line, record


def dataset_from_records(records: Iterable[tuple[int, dict]]) -> ExperimentDataset:
    """Group parsed part records into a dataset, rejecting duplicate part keys."""
    parts_by_campaign: dict[str, dict[Arm, list[PartMeasurement]]] = {}
    seen: set[tuple[str, Arm, int]] = set()
    for line, record in records:
        part = _part_from_record(record, line)
        key = (part.campaign_id, part.arm, part.part_id)
        if key in seen:
            raise IngestError(
                f"duplicate part: campaign {part.campaign_id!r} arm {part.arm.value} "
                f"part_id {part.part_id}", line,
            )
        seen.add(key)
        arms = parts_by_campaign.setdefault(
            part.campaign_id, {Arm.CONTROL: [], Arm.TREATMENT: []}
        )
        arms[part.arm].append(part)
    campaigns = tuple(
        CampaignExperiment(campaign_id, arms[Arm.CONTROL], arms[Arm.TREATMENT])
        for campaign_id, arms in parts_by_campaign.items()
    )
    return ExperimentDataset(campaigns)


def ingest(path: str | Path, input_format: str = "delimited-text") -> ExperimentDataset:
    """Load an experiment dataset from a part-level file."""
    if input_format not in INPUT_FORMATS:
        raise IngestError(
            f"input_format must be one of {INPUT_FORMATS}, got {input_format!r}"
        )
    path = Path(path)
    if not path.is_file():
        raise IngestError(f"no such file: {path}")
    if input_format == "record-lines":
        return dataset_from_records(_records_from_jsonl(path))
    return dataset_from_records(_records_from_csv(path))


def render_dataset_csv(dataset: ExperimentDataset) -> str:
    """Serialize a dataset to the delimited-text format, 6-decimal money."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for campaign in dataset.campaigns:
        for part in campaign.parts_a + campaign.parts_b:
            writer.writerow((
                part.campaign_id, part.arm.value, part.part_id,
                part.impressions, f"{part.spend:.6f}", f"{part.value:.6f}",
            ))
    return out.getvalue()


def write_dataset(dataset: ExperimentDataset, path: str | Path) -> None:
    write_text_atomic(path, render_dataset_csv(dataset))
