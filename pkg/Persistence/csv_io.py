"""CSV writers with shortest round-trip float formatting."""
import csv
import io

import Utils
from Coupling import CouplingRecord
from Diagnostics import DiagnosticsRecord


def _cell(value):
    if isinstance(value, float):
        return Utils.format_float(value)
    return str(value)


def format_rows(header, rows):
    """Return CSV text for a header and rows of numbers.

    Args:
        header (list): column names
        rows (iterable): sequences of values in column order

    Returns:
        str: CSV text with '\\n' line endings
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def write_rows(path, header, rows):
    """Write a CSV file (see format_rows)."""
    with open(path, 'w', newline='') as f:
        f.write(format_rows(header, rows))


def read_rows(path):
    """Read a CSV file written by write_rows.

    Returns:
        (list, list): header and rows of floats
    """
    with open(path, 'r', newline='') as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    return header, rows


def records_csv(records):
    """Return the diagnostics CSV text of a list of DiagnosticsRecord."""
    return format_rows(DiagnosticsRecord.columns(), (r.as_row() for r in records))


def coupling_csv(records):
    """Return the coupling CSV text of a list of CouplingRecord."""
    return format_rows(CouplingRecord.CSV_COLUMNS, (r.as_row() for r in records))
