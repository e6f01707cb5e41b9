"""Aggregate configuration parsing, snapshots and CSV output into one module."""

from .run_config import RunConfig, parse_config, parse_config_text
from .snapshot import Snapshot, SnapshotCodec
from .csv_io import format_rows, write_rows, read_rows, records_csv, coupling_csv
