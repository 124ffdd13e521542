"""Density-matrix solvers for classical, quantum and entangled-strategy games."""

from .errors import DegeneracyError, NumericError, QGSError, StructuralError, ValidationError
from .game import (
    EquilibriumReport,
    GameDefinition,
    Joint,
    Product,
    build_artificial_game,
    check_equilibrium,
    classical_restriction,
    marginal,
    payoff,
    payoffs,
    reduced_payoff,
)
from .entangled import decoherence_gap, entanglement_report, ges_solve, is_ges
from .files import load_game, load_state, save_game, save_state

__version__ = "0.1.0"
