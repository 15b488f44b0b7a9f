import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .circuit import Circuit, circuit_to_diagram
from .decompose import StrategyKind, decompose, effective_alpha
from .graph import Diagram, PreconditionError, is_graph_like, to_graph_like
from .scalar import ExactScalar
from .simplify import full_simplify

logger = logging.getLogger(__name__)

Branch = Tuple[ExactScalar, Diagram, int]


class RunStats(BaseModel):
    initial_t: int = 0
    leaf_terms: int = 0
    pruned: int = 0
    decompositions_by_kind: Dict[str, int] = Field(default_factory=dict)
    max_depth: int = 0
    wall_time: float = Field(0.0, description="Seconds spent in the amplitude loop")
    effective_alpha: Optional[float] = None

    def merge(self, other: "RunStats") -> None:
        self.leaf_terms += other.leaf_terms
        self.pruned += other.pruned
        self.max_depth = max(self.max_depth, other.max_depth)
        for kind, n in other.decompositions_by_kind.items():
            self.decompositions_by_kind[kind] = self.decompositions_by_kind.get(kind, 0) + n


class SimResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    amplitude: ExactScalar
    stats: RunStats
    seed: Optional[int] = None

    def amplitude_complex(self) -> complex:
        return self.amplitude.to_complex()


def reduce_clifford_scalar(d: Diagram, gadget_fusion: bool = False) -> ExactScalar:
    """Value of a closed Clifford diagram; d is consumed."""
    if not d.is_closed():
        raise PreconditionError("reduce_clifford_scalar needs a closed diagram")
    if d.tcount():
        raise PreconditionError(f"Diagram still has {d.tcount()} non-Clifford spiders")
    full_simplify(d, gadget_fusion=gadget_fusion)
    if d.scalar.is_zero:
        return d.scalar
    if d.num_vertices():
        raise RuntimeError(f"Clifford diagram did not reduce to a scalar: {d.num_vertices()} vertices left")
    return d.scalar


def _expand(
    branch: Branch,
    strategy: StrategyKind,
    gadget_fusion: bool,
    trace: bool,
    stats: RunStats,
) -> Tuple[ExactScalar, List[Branch]]:
    """Simplify one node; return its value if it is a leaf, else its children."""
    weight, d, depth = branch
    stats.max_depth = max(stats.max_depth, depth)
    full_simplify(d, gadget_fusion=gadget_fusion)
    if d.scalar.is_zero:
        stats.pruned += 1
        stats.leaf_terms += 1
        return ExactScalar.zero(), []
    if d.tcount() == 0:
        stats.leaf_terms += 1
        return weight * reduce_clifford_scalar(d, gadget_fusion), []
    kind, terms = decompose(d, strategy)
    stats.decompositions_by_kind[kind] = stats.decompositions_by_kind.get(kind, 0) + 1
    message = f"decomp {kind} depth={depth} t={d.tcount()} branches={len(terms)}"
    if trace:
        logger.info(message)
    else:
        logger.debug(message)
    return ExactScalar.zero(), [(weight * term.weight, term.diagram, depth + 1) for term in terms]


def explore(
    root: Branch,
    strategy: StrategyKind,
    gadget_fusion: bool = False,
    trace: bool = False,
) -> Tuple[ExactScalar, RunStats]:
    """Depth-first sum over the decomposition tree below root."""
    stats = RunStats()
    total = ExactScalar.zero()
    stack: List[Branch] = [root]
    while stack:
        value, children = _expand(stack.pop(), strategy, gadget_fusion, trace, stats)
        total = total + value
        stack.extend(reversed(children))
    return total, stats


def _explore_task(args: Tuple[Branch, StrategyKind, bool, bool]) -> Tuple[ExactScalar, RunStats]:
    return explore(*args)


def amplitude(
    d: Diagram,
    strategy: StrategyKind = StrategyKind.CATS,
    workers: int = 1,
    split_depth: int = 3,
    gadget_fusion: bool = False,
    trace: bool = False,
) -> SimResult:
    """Exact value of a closed diagram by recursive simplify-and-decompose."""
    if not d.is_closed():
        raise PreconditionError(
            f"amplitude needs a closed diagram, got {len(d.inputs)} inputs and {len(d.outputs)} outputs"
        )
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")
    start = time.perf_counter()
    initial_t = d.tcount()
    g = d.copy() if is_graph_like(d) else to_graph_like(d)
    root: Branch = (ExactScalar.one(), g, 0)

    if workers == 1:
        total, stats = explore(root, strategy, gadget_fusion, trace)
    else:
        stats = RunStats()
        total = ExactScalar.zero()
        frontier = [root]
        for _ in range(split_depth):
            next_frontier: List[Branch] = []
            for branch in frontier:
                value, children = _expand(branch, strategy, gadget_fusion, trace, stats)
                total = total + value
                next_frontier.extend(children)
            frontier = next_frontier
        logger.debug(f"handing {len(frontier)} subtrees to {workers} workers")
        with ProcessPoolExecutor(max_workers=workers) as pool:
            jobs = [(branch, strategy, gadget_fusion, trace) for branch in frontier]
            for value, sub in pool.map(_explore_task, jobs):
                total = total + value
                stats.merge(sub)

    stats.initial_t = initial_t
    stats.wall_time = time.perf_counter() - start
    if initial_t >= 1 and stats.leaf_terms >= 1:
        stats.effective_alpha = effective_alpha(initial_t, stats.leaf_terms)
    return SimResult(amplitude=total, stats=stats)


def run_simulation(
    circuit: Circuit,
    input_spec: str,
    output_spec: str,
    strategy: StrategyKind = StrategyKind.CATS,
    workers: int = 1,
    seed: Optional[int] = None,
    split_depth: int = 3,
    gadget_fusion: bool = False,
    trace: bool = False,
) -> SimResult:
    """<output_spec| circuit |input_spec> for product states over {0, 1, +, -}."""
    d = circuit_to_diagram(circuit, input_spec, output_spec)
    logger.debug(f"circuit on {circuit.qubits} qubits with T-count {d.tcount()}")
    result = amplitude(d, strategy, workers, split_depth, gadget_fusion, trace)
    result.seed = seed
    return result
