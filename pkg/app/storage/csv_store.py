import csv
import logging
from collections.abc import Iterable
from pathlib import Path
from typing import TextIO

from app.sim.diagnostics.models_diagnostics import (
    DiagnosticsRecord,
    SpectrumRecord,
    record_columns,
)

log = logging.getLogger(__name__)

SPECTRUM_HEADER = ("k", "E_k")


def format_value(value) -> str:
    """17 significant digits for floats, empty for missing values"""
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def record_row(record: DiagnosticsRecord) -> list[str]:
    dim = len(record.mean)
    row = []
    for column in record_columns(dim):
        if column.startswith("mean_"):
            row.append(format_value(record.mean[int(column[5:]) - 1]))
        else:
            row.append(format_value(getattr(record, column)))
    return row


def write_records(
    stream: TextIO, records: Iterable[DiagnosticsRecord], dim: int
) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(record_columns(dim))
    for record in records:
        writer.writerow(record_row(record))


def write_diagnostics(
    path: str | Path, records: list[DiagnosticsRecord], dim: int
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as stream:
        write_records(stream, records, dim)
    log.debug(f"Wrote {len(records)} diagnostics rows to {path}")
    return path


def read_diagnostics(path: str | Path) -> list[DiagnosticsRecord]:
    with Path(path).open(newline="") as stream:
        reader = csv.DictReader(stream)
        records = []
        for row in reader:
            means = sorted(
                (c for c in row if c.startswith("mean_")), key=lambda c: int(c[5:])
            )
            fields = {
                key: (None if value == "" else value)
                for key, value in row.items()
                if not key.startswith("mean_")
            }
            fields["step"] = int(fields["step"])
            records.append(
                DiagnosticsRecord(
                    **fields, mean=tuple(float(row[c]) for c in means)
                )
            )
    return records


def write_spectrum_rows(stream: TextIO, spectrum: SpectrumRecord) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SPECTRUM_HEADER)
    for k, energy in zip(spectrum.shells, spectrum.energy):
        writer.writerow([int(k), format_value(energy)])


def write_spectrum(path: str | Path, spectrum: SpectrumRecord) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as stream:
        write_spectrum_rows(stream, spectrum)
    return path


def read_spectrum(path: str | Path) -> list[tuple[int, float]]:
    with Path(path).open(newline="") as stream:
        reader = csv.reader(stream)
        header = next(reader)
        if tuple(header) != SPECTRUM_HEADER:
            raise ValueError(f"{path}: unexpected spectrum header {header}")
        return [(int(k), float(e)) for k, e in reader]
