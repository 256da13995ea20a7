"""Reading observation CSVs and reading/writing model and run artifacts."""

import csv
import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from .core import ArchetypalModel, DataMatrix, RestartDiagnostics
from .errors import InputError
from .scaling import ScalingParams

__all__ = [
    "MODEL_SCHEMA_VERSION",
    "RunManifest",
    "file_digest",
    "ingest_csv",
    "load_model",
    "model_to_dict",
    "model_from_dict",
    "read_model_document",
    "save_model",
    "write_csv",
]

MODEL_SCHEMA_VERSION = 1


def file_digest(path):
    """SHA-256 hex digest of the file's bytes."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _parse_number(cell, line, column):
    text = cell.strip()
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"line {line}, column {column!r}: cannot parse {cell!r} as a number") from None
    if not math.isfinite(value):
        raise InputError(f"line {line}, column {column!r}: non-finite value {cell!r}")
    return value


def _looks_numeric(cells):
    try:
        return all(math.isfinite(float(c)) for c in cells)
    except ValueError:
        return False


def ingest_csv(path, columns=None, label_column=None, delimiter=","):
    """Read a header-first CSV into a :class:`DataMatrix`.

    Parameters
    ----------
    path : str or Path
    columns : sequence of str, optional
        Numeric columns to analyze. By default every non-label column whose
        cells all parse as finite numbers.
    label_column : str, optional
        Column used for row labels (e.g. player names).
    delimiter : str

    Every column that is neither selected nor the label is kept as
    string metadata, for joining onto reports.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8-sig") as fh:
            rows = list(csv.reader(fh, delimiter=delimiter))
    except FileNotFoundError:
        raise InputError(f"input file not found: {path}") from None
    except UnicodeDecodeError as err:
        raise InputError(f"{path} is not valid UTF-8: {err}") from None
    if not rows:
        raise InputError(f"{path} is empty; a header row is required")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if any(c.strip() for c in r)]
    if not body:
        raise InputError(f"{path} has a header but no data rows")
    for line, row in enumerate(rows[1:], start=2):
        if any(c.strip() for c in row) and len(row) != len(header):
            raise InputError(f"line {line}: expected {len(header)} fields, found {len(row)}")
    if len(set(header)) != len(header):
        raise InputError(f"duplicate column names in header: {header}")

    index = {name: j for j, name in enumerate(header)}
    if label_column is not None and label_column not in index:
        raise InputError(f"label column {label_column!r} not found; available: {header}")

    if columns is None:
        columns = [
            h for h in header
            if h != label_column and _looks_numeric([r[index[h]] for r in body])
        ]
    else:
        columns = list(columns)
        missing = [c for c in columns if c not in index]
        if missing:
            raise InputError(f"column(s) {missing} not found; available: {header}")
    if not columns:
        raise InputError("no columns selected for analysis")

    line_numbers = [line for line, r in enumerate(rows[1:], start=2) if any(c.strip() for c in r)]
    values = np.array(
        [
            [_parse_number(row[index[c]], line, c) for c in columns]
            for line, row in zip(line_numbers, body)
        ]
    )
    labels = tuple(r[index[label_column]] for r in body) if label_column else None
    metadata = {
        h: tuple(r[index[h]] for r in body)
        for h in header
        if h not in columns and h != label_column
    }
    return DataMatrix(values, columns, labels, metadata)


def write_csv(path, header, rows):
    """Write a CSV with minimal RFC 4180 quoting and CRLF line ends."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def _finite_or_none(x):
    x = float(x)
    return x if math.isfinite(x) else None


def model_to_dict(model, **extra):
    """JSON-ready document for ``model``; ``extra`` keys are stored alongside."""
    doc = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "k": model.k,
        "column_names": list(model.column_names) if model.column_names is not None else None,
        "archetypes": model.archetypes.tolist(),
        "archetypes_original": model.archetypes_original().tolist(),
        "alpha": model.alpha.tolist(),
        "beta": model.beta.tolist(),
        "rss": model.rss,
        "rss_rel": model.rss_rel,
        "iterations": model.iterations,
        "converged": model.converged,
        "seed": model.seed,
        "scaling": model.scaling.to_dict() if model.scaling is not None else None,
        "rss_history": list(model.rss_history),
        "duplicate_archetypes": [list(p) for p in model.duplicate_archetypes],
        "restarts": [
            {
                "seed": d.seed,
                "start": d.start,
                "rss": _finite_or_none(d.rss),
                "iterations": d.iterations,
                "converged": d.converged,
                "error": d.error,
            }
            for d in model.restarts
        ],
    }
    doc.update(extra)
    return doc


def model_from_dict(doc):
    version = doc.get("schema_version")
    if version != MODEL_SCHEMA_VERSION:
        raise InputError(f"unsupported model schema_version {version!r}")
    scaling = ScalingParams.from_dict(doc["scaling"]) if doc.get("scaling") else None
    restarts = tuple(
        RestartDiagnostics(
            r["seed"], r["start"],
            float("nan") if r["rss"] is None else r["rss"],
            r["iterations"], r["converged"], error=r.get("error"),
        )
        for r in doc.get("restarts", [])
    )
    return ArchetypalModel(
        k=doc["k"],
        archetypes=np.array(doc["archetypes"], dtype=float),
        alpha=np.array(doc["alpha"], dtype=float),
        beta=np.array(doc["beta"], dtype=float),
        rss=doc["rss"],
        rss_rel=doc["rss_rel"],
        iterations=doc["iterations"],
        converged=doc["converged"],
        seed=doc["seed"],
        scaling=scaling,
        column_names=tuple(doc["column_names"]) if doc.get("column_names") else None,
        rss_history=tuple(doc.get("rss_history", ())),
        restarts=restarts,
        duplicate_archetypes=tuple(tuple(p) for p in doc.get("duplicate_archetypes", ())),
    )


def save_model(path, model, **extra):
    Path(path).write_text(json.dumps(model_to_dict(model, **extra), indent=2) + "\n", encoding="utf-8")


def read_model_document(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"model file not found: {path}") from None
    except json.JSONDecodeError as err:
        raise InputError(f"{path} is not valid JSON: {err}") from None


def load_model(path):
    return model_from_dict(read_model_document(path))


def _reproducible_timestamp():
    # Wall-clock time would break byte-identical reruns; honour the
    # reproducible-builds convention instead.
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is None:
        return None
    return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()


@dataclass
class RunManifest:
    """What went into a CLI run, enough to reproduce it."""

    command: str
    input_path: Optional[str]
    input_digest: Optional[str]
    selected_columns: list
    label_column: Optional[str] = None
    delimiter: str = ","
    scaling_method: Optional[str] = None
    fit_config: dict = field(default_factory=dict)
    tool_version: str = ""
    created: Optional[str] = field(default_factory=_reproducible_timestamp)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
