"""Aggregate the diagnostics functionals and the event-set probe into one module."""

from .functionals import (DiagnosticsRecord, compute_record, energy_budget_residual,
                          chain_rule_identity_check, ENTROPY_FLOOR)
from .event_set import EventSetProbe
