"""Durable persistence for runs, elicitation records and fit results.

Records are CSV with a fixed header; manifests and fits are JSON. Every write
goes to a temporary file in the target directory and is renamed into place, so
a failed write never leaves a partial file at the target path.
"""
import csv
import hashlib
import io
import json
import logging
import math
import os
import tempfile
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from prior_lens import __version__
from prior_lens.elicitation.models import ClientConfig, ElicitationRecord, ScenarioDef
from prior_lens.fitting import FitResult, aggregate_replicates
from prior_lens.fitting.models import Aggregation
from prior_lens.priors import PredictionPair
from prior_lens.utils.errors import (
    DataFormatError,
    EmptyDataError,
    PreconditionError,
    StoreError,
)

logger = logging.getLogger("prior_lens.store")

PathLike = Union[str, Path]

RECORD_HEADER = (
    "scenario",
    "t",
    "replicate",
    "raw_response",
    "parsed_value",
    "valid",
    "model_id",
    "timestamp",
)
FIT_DIGITS = 9


class RunManifest(BaseModel):
    """Provenance of one elicitation run."""

    model_config = ConfigDict(frozen=True)

    run_id: uuid.UUID = Field(default_factory=uuid.uuid4)
    created_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    scenario_id: str
    model_id: str
    temperature: float
    t_grid: str
    replicates: int = Field(ge=1)
    tool_version: str = __version__
    config_hash: str


class PairDataset(BaseModel):
    """Valid (t, t*) pairs loaded from a records file, with the reject tally."""

    pairs: List[PredictionPair]
    rejected: int = 0
    scenario_ids: List[str] = Field(default_factory=list)


def config_hash(config: Mapping[str, Any]) -> str:
    """SHA-256 of the canonical JSON rendering of a configuration mapping."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def build_manifest(
    scenario: ScenarioDef,
    client: ClientConfig,
    replicates: int,
    effective_config: Optional[Mapping[str, Any]] = None,
) -> RunManifest:
    """Manifest for an elicitation run of ``scenario`` under ``client``."""
    config = {
        "scenario": scenario.model_dump(),
        "client": client.model_dump(),
        "replicates": replicates,
        **(effective_config or {}),
    }
    return RunManifest(
        scenario_id=scenario.id,
        model_id=client.model_id,
        temperature=client.temperature,
        t_grid=scenario.describe_grid(),
        replicates=replicates,
        config_hash=config_hash(config),
    )


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Write text to path via a temporary sibling file and an atomic rename.

    Raises:
        StoreError: If any step fails; the temporary file is removed
    """
    path = Path(path)
    tmp_name = None
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(
            mode="w",
            encoding="utf-8",
            newline="",
            dir=path.parent,
            prefix=f".{path.name}.",
            suffix=".tmp",
            delete=False,
        ) as tmp:
            tmp_name = tmp.name
            tmp.write(text)
            tmp.flush()
            os.fsync(tmp.fileno())
        os.replace(tmp_name, path)
    except OSError as e:
        if tmp_name is not None and os.path.exists(tmp_name):
            os.remove(tmp_name)
        raise StoreError(f"could not write {path}: {e}") from e
    return path


def _format_float(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def records_to_csv(records: Sequence[ElicitationRecord]) -> str:
    """Render records in the store CSV layout."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(RECORD_HEADER)
    for record in records:
        writer.writerow(
            [
                record.scenario_id,
                record.t,
                record.replicate,
                record.raw_response,
                _format_float(record.parsed_value),
                "true" if record.valid else "false",
                record.model_id,
                record.timestamp.isoformat(),
            ]
        )
    return buffer.getvalue()


def write_records_csv(records: Sequence[ElicitationRecord], path: PathLike) -> Path:
    """Write records to a CSV file without a manifest."""
    if not records:
        raise PreconditionError("no records to write")
    path = atomic_write_text(path, records_to_csv(records))
    logger.info(f"Wrote {len(records)} records to {path}")
    return path


def write_records(
    manifest: RunManifest, records: Sequence[ElicitationRecord], directory: PathLike
) -> Tuple[Path, Path]:
    """Write ``<run_id>.manifest.json`` and ``<run_id>.records.csv`` into directory.

    Returns:
        Paths of the manifest and the records file
    """
    if not records:
        raise PreconditionError("no records to write")
    directory = Path(directory)
    records_path = write_records_csv(records, directory / f"{manifest.run_id}.records.csv")
    try:
        manifest_path = atomic_write_text(
            directory / f"{manifest.run_id}.manifest.json",
            manifest.model_dump_json(indent=2) + "\n",
        )
    except StoreError:
        # records are only visible together with their manifest
        records_path.unlink(missing_ok=True)
        raise
    return manifest_path, records_path


def read_manifest(path: PathLike) -> RunManifest:
    return RunManifest.model_validate_json(Path(path).read_text(encoding="utf-8"))


def _rows(path: PathLike):
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise DataFormatError(f"{path}: file is empty", column=RECORD_HEADER[0])
        for expected, found in zip(RECORD_HEADER, header + [""] * len(RECORD_HEADER)):
            if expected != found:
                raise DataFormatError(
                    f"{path}: bad header column '{found}', expected '{expected}'",
                    column=found,
                )
        if len(header) > len(RECORD_HEADER):
            extra = header[len(RECORD_HEADER)]
            raise DataFormatError(f"{path}: unexpected column '{extra}'", column=extra)
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(RECORD_HEADER):
                raise DataFormatError(
                    f"{path}:{line}: expected {len(RECORD_HEADER)} fields, got {len(row)}"
                )
            yield line, dict(zip(RECORD_HEADER, row))


def read_records(path: PathLike) -> List[ElicitationRecord]:
    """Read every record back, with all fields.

    Raises:
        DataFormatError: On a bad header or a row that does not parse
    """
    records = []
    for line, row in _rows(path):
        try:
            records.append(
                ElicitationRecord(
                    scenario_id=row["scenario"],
                    t=int(row["t"]),
                    replicate=int(row["replicate"]),
                    raw_response=row["raw_response"],
                    parsed_value=float(row["parsed_value"]) if row["parsed_value"] else None,
                    valid=row["valid"] == "true",
                    model_id=row["model_id"],
                    timestamp=datetime.fromisoformat(row["timestamp"]),
                )
            )
        except ValueError as e:
            raise DataFormatError(f"{path}:{line}: {e}") from e
    return records


def _pair_from_row(row: Dict[str, str]) -> Optional[PredictionPair]:
    if row["valid"].strip().lower() != "true":
        return None
    try:
        t = float(row["t"])
        t_star = float(row["parsed_value"])
    except ValueError:
        return None
    if not (math.isfinite(t) and t > 0 and math.isfinite(t_star) and t_star > 0):
        return None
    return PredictionPair(t=t, t_star=t_star)


def read_pairs(
    path: PathLike,
    aggregation: Aggregation = "median",
    scenario: Optional[str] = None,
) -> PairDataset:
    """Load valid (t, t*) pairs from a records file, sorted by t.

    Works for any file in the record layout, whether elicited from a model or
    transcribed from a human study.

    Args:
        path: Records CSV
        aggregation: How replicates sharing t are collapsed
        scenario: Keep only rows of this scenario id

    Raises:
        DataFormatError: On a malformed header
        EmptyDataError: If no valid row remains
    """
    pairs, rejected, scenario_ids = [], 0, []
    for _, row in _rows(path):
        if scenario is not None and row["scenario"] != scenario:
            continue
        pair = _pair_from_row(row)
        if pair is None:
            rejected += 1
            continue
        if row["scenario"] not in scenario_ids:
            scenario_ids.append(row["scenario"])
        pairs.append(pair)
    if rejected:
        logger.info(f"Skipped {rejected} invalid rows in {path}")
    if not pairs:
        raise EmptyDataError(f"{path}: no valid observations")
    return PairDataset(
        pairs=aggregate_replicates(pairs, aggregation),
        rejected=rejected,
        scenario_ids=scenario_ids,
    )


def _round(value: float) -> float:
    return float(f"{value:.{FIT_DIGITS}g}")


def fits_to_json(results: Sequence[FitResult]) -> str:
    """JSON array of fit results, numbers to nine significant digits."""
    payload = [
        {
            "family": result.family,
            "params": {name: _round(value) for name, value in result.params.items()},
            "mse": _round(result.mse),
            "n": result.n,
            "boundary_flag": result.boundary_flag,
        }
        for result in results
    ]
    return json.dumps(payload, indent=2) + "\n"


def write_fit(results: Sequence[FitResult], path: PathLike) -> Path:
    """Write fit results as JSON.

    Raises:
        PreconditionError: If results is empty
        StoreError: On I/O failure
    """
    if not results:
        raise PreconditionError("no fit results to write")
    path = atomic_write_text(path, fits_to_json(results))
    logger.info(f"Wrote {len(results)} fit results to {path}")
    return path


def read_fit(path: PathLike) -> List[FitResult]:
    with open(path, encoding="utf-8") as f:
        payload = json.load(f)
    if not isinstance(payload, list):
        raise DataFormatError(f"{path}: expected a JSON array of fit results")
    return [FitResult.model_validate(item) for item in payload]
