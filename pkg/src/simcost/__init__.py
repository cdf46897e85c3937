"""simcost: Lindblad semigroups, simulation schemes, diamond-norm error, and
Lipschitz-complexity lower bounds on circuit depth, at desk scale."""

from . import complexity, lindblad, models, norms, qmat, schemes, sdp

__all__ = ["complexity", "lindblad", "models", "norms", "qmat", "schemes", "sdp"]
__version__ = "0.1.0"
