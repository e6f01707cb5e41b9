"""Aggregate the coupled-run harness into one module."""

from .coupled_run import (CouplingRecord, CouplingReport, CouplingSeries, coupled_run,
                          difference_functionals, gronwall_coefficient, gronwall_terms,
                          envelope_report, perturb_velocity_mode, ENVELOPE_SKIP_STEPS)
