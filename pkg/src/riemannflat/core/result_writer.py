"""
Result Writer - Serializes result envelopes to CSV or JSON and reads them back
"""

import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


SIGNIFICANT_DIGITS = 15
STDOUT = "-"


@dataclass
class ResultEnvelope:
    """Config echo, provenance and the table payload of one run"""
    command: str
    config: Dict[str, Any]
    provenance: Dict[str, Any]
    columns: List[str]
    rows: List[Tuple[Any, ...]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"Row {row!r} does not match columns {self.columns}")

    def records(self) -> List[Dict[str, Any]]:
        return [dict(zip(self.columns, row)) for row in self.rows]

    def column(self, name: str) -> List[Any]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]


def format_value(value: Any) -> str:
    """Text form of a cell: 15 significant digits for reals, lowercase booleans"""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, f".{SIGNIFICANT_DIGITS}g")
    return str(value)


def parse_value(text: str) -> Union[bool, int, float, str]:
    """Inverse of format_value for the cell types the toolkit writes"""
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _round_json(value: Any) -> Any:
    """Round reals to the CSV precision; NaN and infinities become null"""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        return float(format(value, f".{SIGNIFICANT_DIGITS}g")) if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _round_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_json(v) for v in value]
    return value


class ResultWriter:
    """
    Writes envelopes as CSV (header plus rows) or JSON ({config, provenance, rows})

    Files are UTF-8 with LF line endings; the path "-" streams to stdout.
    """

    def __init__(self, output_dir: Optional[Path] = None):
        """
        Initialize the result writer

        Args:
            output_dir: Directory for relative output paths (optional)
        """
        self.output_dir = output_dir
        self.logger = logging.getLogger(self.__class__.__name__)

    def render(self, envelope: ResultEnvelope, fmt: OutputFormat) -> str:
        """Serialize an envelope to text"""
        fmt = OutputFormat(fmt)
        if fmt is OutputFormat.CSV:
            buffer = io.StringIO(newline="")
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(envelope.columns)
            for row in envelope.rows:
                writer.writerow([format_value(v) for v in row])
            return buffer.getvalue()

        document = {
            "config": _round_json(envelope.config),
            "provenance": _round_json(envelope.provenance),
            "rows": _round_json(envelope.records()),
        }
        return json.dumps(document, indent=2, allow_nan=False) + "\n"

    def resolve(self, path: Union[str, Path]) -> Union[str, Path]:
        if str(path) == STDOUT:
            return STDOUT
        path = Path(path)
        if not path.is_absolute() and self.output_dir is not None:
            path = self.output_dir / path
        return path

    def write(self, envelope: ResultEnvelope, fmt: OutputFormat, path: Union[str, Path]) -> Union[str, Path]:
        """
        Emit an envelope

        Args:
            envelope: Result to write
            fmt: csv or json
            path: Target file, or "-" for stdout

        Returns:
            The resolved target

        Raises:
            OSError: the target cannot be written
        """
        content = self.render(envelope, fmt)
        target = self.resolve(path)
        if target == STDOUT:
            sys.stdout.write(content)
            sys.stdout.flush()
            self.logger.debug(f"Wrote {len(envelope.rows)} rows to stdout")
            return target

        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            with open(target, "w", encoding="utf-8", newline="") as handle:
                handle.write(content)
        except OSError as e:
            self.logger.error(f"Failed to write results to {target}: {e}")
            raise

        self.logger.info(f"Wrote {len(envelope.rows)} rows to {target}")
        return target

    def read_csv(self, path: Union[str, Path]) -> Tuple[List[str], List[Dict[str, Any]]]:
        """Read a CSV payload back as column names and typed records"""
        with open(self.resolve(path), "r", encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, [])
            records = [{k: parse_value(v) for k, v in zip(header, row)} for row in reader]
        self.logger.debug(f"Read {len(records)} rows from {path}")
        return header, records

    def read_json(self, path: Union[str, Path]) -> Dict[str, Any]:
        """Read a JSON envelope back"""
        with open(self.resolve(path), "r", encoding="utf-8") as handle:
            return json.load(handle)

    def parse(self, text: str, fmt: OutputFormat) -> Tuple[List[str], List[Dict[str, Any]]]:
        """Parse rendered text back into column names and records"""
        if OutputFormat(fmt) is OutputFormat.JSON:
            document = json.loads(text)
            rows = document["rows"]
            return (list(rows[0].keys()) if rows else []), rows
        reader = csv.reader(io.StringIO(text, newline=""))
        header = next(reader, [])
        return header, [{k: parse_value(v) for k, v in zip(header, row)} for row in reader]


def default_output_name(command: str, fmt: OutputFormat) -> str:
    return f"{command}.{OutputFormat(fmt).value}"
