"""Aggregate the invariant suite into one module."""

from .suite import CHECKS, CheckResult, run_suite
