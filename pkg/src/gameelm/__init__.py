"""Inertial self-adaptive extragradient solvers and L1-regularised ELM training."""
import logging

from .vi_core import (SolveResult, SolverConfig, Termination, VARIANTS, game_iteration,
                      solve, update_stepsize, variant_preset)

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = ["SolveResult", "SolverConfig", "Termination", "VARIANTS", "game_iteration",
           "solve", "update_stepsize", "variant_preset"]
__version__ = "0.1.0"
