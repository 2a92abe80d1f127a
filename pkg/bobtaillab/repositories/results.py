"""Result files.

CSV layout::

    # config: {"command": "doublespend", ...}
    # kind: attack
    experiment,q,z,k,trials,seed,metric,value,ci_low,ci_high
    doublespend,0.4,8,1,10000,7,success,0.3012,...

Columns follow the row model's field order. Reals are written with ``repr``
so they read back exactly; a missing optional value is an empty cell. The
JSON alternative holds the same config, kind and rows under identical field
names.
"""

import csv
import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from bobtaillab.core import SerializationError, require
from bobtaillab.schemas.experiments import OutputFormat
from bobtaillab.schemas.results import ROW_TYPES, ResultRow

logger = logging.getLogger(__name__)

CONFIG_PREFIX = "# config: "
KIND_PREFIX = "# kind: "


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row_type(rows: Sequence[ResultRow], row_type: type[ResultRow] | None) -> type[ResultRow]:
    if row_type is None:
        require(len(rows) > 0, "row_type is required to write an empty result file")
        row_type = type(rows[0])
    require(all(type(r) is row_type for r in rows), f"all rows must be {row_type.__name__}")
    return row_type


def write_results(
    rows: Sequence[ResultRow],
    path: Path | str,
    *,
    fmt: OutputFormat = OutputFormat.CSV,
    config: dict[str, Any] | None = None,
    row_type: type[ResultRow] | None = None,
) -> Path:
    """Write ``rows`` with the resolved run config in the header; returns the path written"""
    path = Path(path)
    row_type = _row_type(rows, row_type)
    config = config or {}
    path.parent.mkdir(parents=True, exist_ok=True)

    if fmt is OutputFormat.JSON:
        document = {
            "config": config,
            "kind": row_type.kind,
            "rows": [row.model_dump(mode="json") for row in rows],
        }
        path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    else:
        with path.open("w", encoding="utf-8", newline="") as fh:
            fh.write(CONFIG_PREFIX + json.dumps(config, sort_keys=True) + "\n")
            fh.write(KIND_PREFIX + row_type.kind + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            columns = row_type.columns()
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_cell(getattr(row, c)) for c in columns])

    logger.info(f"Wrote {len(rows)} {row_type.kind} rows to {path}")
    return path


def _parse_rows(kind: str, records: Sequence[dict[str, Any]]) -> list[ResultRow]:
    if kind not in ROW_TYPES:
        raise SerializationError(f"unknown result kind {kind!r}")
    row_type = ROW_TYPES[kind]
    try:
        return [row_type.model_validate(record) for record in records]
    except ValidationError as e:
        raise SerializationError(f"malformed {kind} row: {e}") from e


def _read_csv(text: str) -> tuple[dict[str, Any], list[ResultRow]]:
    lines = text.splitlines()
    if len(lines) < 3 or not lines[0].startswith(CONFIG_PREFIX) or not lines[1].startswith(KIND_PREFIX):
        raise SerializationError("result CSV must start with config and kind header lines")
    config = json.loads(lines[0].removeprefix(CONFIG_PREFIX))
    kind = lines[1].removeprefix(KIND_PREFIX).strip()
    reader = csv.DictReader(lines[2:])
    records = [{key: (None if value == "" else value) for key, value in record.items()} for record in reader]
    return config, _parse_rows(kind, records)


def read_results(path: Path | str) -> tuple[dict[str, Any], list[ResultRow]]:
    """Read a file written by ``write_results`` back into its config and typed rows"""
    text = Path(path).read_text(encoding="utf-8")
    try:
        if text.lstrip().startswith("{"):
            document = json.loads(text)
            return document["config"], _parse_rows(document["kind"], document["rows"])
        return _read_csv(text)
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise SerializationError(f"malformed result file {path}: {e}") from e
