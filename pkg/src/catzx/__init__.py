"""Strong simulation of Clifford+T circuits by ZX-diagram simplification and cat-state decompositions."""

from .scalar import ExactScalar
from .graph import Diagram, EdgeType, VertexType
from .simplify import full_simplify
from .decompose import StrategyKind
from .driver import amplitude, run_simulation

__all__ = [
    "Diagram",
    "EdgeType",
    "ExactScalar",
    "StrategyKind",
    "VertexType",
    "amplitude",
    "full_simplify",
    "run_simulation",
]

__version__ = "0.1.0"
