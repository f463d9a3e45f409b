"""Large (boundary blow-up) solutions of -Δu + g(u) = 0 on balls and annuli.

Solvers for radial and polar-grid problems, the Keller-Osserman test, and
numerical checks of radial symmetry and boundary gradient asymptotics.
"""
from .errors import ConfigError, DivergenceError, DomainError, LargeSolError, SolverError
from .keller_osserman import check_bu_condition, check_keller_osserman
from .nonlinearity import Nonlinearity, split_asymptotic

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DivergenceError",
    "DomainError",
    "LargeSolError",
    "Nonlinearity",
    "SolverError",
    "check_bu_condition",
    "check_keller_osserman",
    "split_asymptotic",
]
