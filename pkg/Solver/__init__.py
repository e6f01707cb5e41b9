"""Aggregate the time integrator and refinement studies into one module."""

from .integrator import (SolverConfig, Trajectory, ExponentialStepper, SCHEMES, step, run,
                         advance_to_end, divergence_residual)
from .refinement import RefinementTable, refine_study, mean_table, AXES
