"""Rewrite engine for graph-like diagrams.

Every rule removes at least one spider, so ``full_simplify`` terminates.  Its
fixpoint is a *reduced* diagram:

* no two interior Clifford spiders are neighbours,
* no interior Clifford spider has arity 0, 1 or 2,
* no interior spider has phase +-pi/2.

Spiders next to a boundary are never consumed; the arity-1 copy rule skips a
target that touches a boundary and the pi-identity rule skips a pair whose two
ends both touch one.  ``check_reduced`` reports violations of the three
properties on interior spiders.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .graph import (
    Diagram,
    EdgeType,
    PreconditionError,
    VertexType,
    combine_edges,
    is_graph_like,
    is_pauli,
    is_t_like,
)
from .scalar import ExactScalar

logger = logging.getLogger(__name__)

Match = Tuple[int, ...]


@dataclass(frozen=True)
class RewriteStep:
    rule: str
    vertices: Tuple[int, ...]
    scalar_delta: ExactScalar

    def __str__(self) -> str:
        return f"{self.rule} {' '.join(map(str, self.vertices))} [{self.scalar_delta}]"


class Stats:
    def __init__(self) -> None:
        self.num_rewrites: Dict[str, int] = {}

    def count_rewrites(self, rule: str, n: int) -> None:
        self.num_rewrites[rule] = self.num_rewrites.get(rule, 0) + n

    def total(self) -> int:
        return sum(self.num_rewrites.values())

    def __str__(self) -> str:
        s = "REWRITES\n"
        for r, n in self.num_rewrites.items():
            s += f"{str(n).rjust(6)} {r}\n"
        s += f"{str(self.total()).rjust(6)} TOTAL"
        return s


# ----- rules -----


def _require_spider(d: Diagram, v: int) -> None:
    if not d.has_vertex(v) or d.type(v) != VertexType.Z:
        raise PreconditionError(f"Vertex {v} is not a Z-spider")


def fuse_spiders(d: Diagram, v: int, w: int) -> Diagram:
    """Fuse w into v along a plain edge."""
    _require_spider(d, v)
    _require_spider(d, w)
    plain = [e for e in d.edges_between(v, w) if d.edge(e)[2] == EdgeType.PLAIN]
    if not plain:
        raise PreconditionError(f"Spiders {v} and {w} are not joined by a plain edge")
    for e in plain:
        d.remove_edge(e)
    d.identify(v, w)
    return d


def remove_identity(d: Diagram, v: int) -> Diagram:
    _require_spider(d, v)
    edges = d.incident_edges(v)
    if d.phase(v) != 0 or len(edges) != 2 or any(d.edge(e)[0] == d.edge(e)[1] for e in edges):
        raise PreconditionError(f"Spider {v} is not a phase-0 spider of arity 2")
    ends = []
    for e in edges:
        a, b, kind = d.edge(e)
        ends.append((b if a == v else a, kind))
    d.remove_vertex(v)
    (n1, k1), (n2, k2) = ends
    d.add_edge_smart(n1, n2, combine_edges(k1, k2))
    return d


def local_complement(d: Diagram, v: int) -> Diagram:
    """Remove an interior +-pi/2 spider by complementing its neighbourhood."""
    _require_spider(d, v)
    theta = d.phase(v)
    if theta not in (2, 6) or d.is_boundary_adjacent(v):
        raise PreconditionError(f"Spider {v} is not an interior +-pi/2 spider")
    neighbours = sorted(d.remove_spider(v))
    d.scale_sqrt2(1)
    d.mul_scalar(ExactScalar.from_phase(1 if theta == 2 else 7))
    for n in neighbours:
        d.add_to_phase(n, -theta)
    for i, a in enumerate(neighbours):
        for b in neighbours[i + 1:]:
            d.toggle_hadamard(a, b)
    return d


def pivot(d: Diagram, u: int, v: int) -> Diagram:
    """Remove two adjacent interior 0/pi spiders."""
    _require_spider(d, u)
    _require_spider(d, v)
    if d.edge_type(u, v) != EdgeType.HADAMARD:
        raise PreconditionError(f"Spiders {u} and {v} are not joined by a Hadamard edge")
    for w in (u, v):
        if not is_pauli(d.phase(w)) or d.is_boundary_adjacent(w):
            raise PreconditionError(f"Spider {w} is not an interior 0/pi spider")
    nu = set(d.neighbors(u)) - {v}
    nv = set(d.neighbors(v)) - {u}
    common = nu & nv
    a, b = d.phase(u) // 4, d.phase(v) // 4
    edges = d.degree(u) + d.degree(v) - 1
    d.remove_vertex(u)
    d.remove_vertex(v)
    d.scale_sqrt2(2 - edges)
    if a and b:
        d.mul_scalar(ExactScalar.from_int(-1))
    for k in nv:
        d.add_to_phase(k, 4 * a)
    for j in nu:
        d.add_to_phase(j, 4 * b)
    for j in sorted(nu):
        for k in sorted(nv):
            if j == k:
                d.add_to_phase(j, 4)
            elif not (j in common and k in common):
                d.toggle_hadamard(j, k)
    return d


def remove_isolated(d: Diagram, v: int) -> Diagram:
    _require_spider(d, v)
    if d.incident_edges(v):
        raise PreconditionError(f"Spider {v} is not isolated")
    theta = d.phase(v)
    d.remove_vertex(v)
    d.mul_scalar(ExactScalar.one() + ExactScalar.from_phase(theta))
    return d


def copy_pauli(d: Diagram, v: int) -> Diagram:
    """An arity-1 0/pi spider fixes the value of its neighbour."""
    _require_spider(d, v)
    if not is_pauli(d.phase(v)) or d.degree(v) != 1 or d.is_boundary_adjacent(v):
        raise PreconditionError(f"Spider {v} is not an interior arity-1 0/pi spider")
    (n,) = d.neighbors(v)
    value = d.phase(v) // 4
    d.remove_spider(v)
    d.scale_sqrt2(2)
    d.fix_value(n, value)
    return d


def pi_identity(d: Diagram, v: int, keep: int, gone: int) -> Diagram:
    """An arity-2 pi spider forces its neighbours to opposite values."""
    _require_spider(d, v)
    if d.phase(v) != 4 or sorted(d.neighbors(v)) != sorted((keep, gone)) or d.degree(v) != 2:
        raise PreconditionError(f"Spider {v} is not an arity-2 pi spider between {keep} and {gone}")
    d.remove_spider(v)
    d.scale_sqrt2(2)
    d.identify(keep, gone, negate=True)
    return d


def _gadget(d: Diagram, hub: int) -> Optional[Tuple[int, frozenset]]:
    """(leaf, legs) when hub is the 0/pi centre of a phase gadget with a single non-Clifford leaf."""
    if d.type(hub) != VertexType.Z or not is_pauli(d.phase(hub)) or d.is_boundary_adjacent(hub):
        return None
    neighbours = d.neighbors(hub)
    leaves = [n for n in neighbours if d.degree(n) == 1 and is_t_like(d.phase(n))]
    if len(leaves) != 1 or len(neighbours) < 3:
        return None
    leaf = leaves[0]
    return leaf, frozenset(n for n in neighbours if n != leaf)


def normalise_gadget(d: Diagram, leaf: int) -> Diagram:
    (hub,) = d.neighbors(leaf)
    if d.phase(hub) != 4:
        raise PreconditionError(f"Gadget hub {hub} does not carry a pi phase")
    d.flip_variable(leaf)
    return d


def fuse_gadgets(d: Diagram, hub: int, leaf: int, other_hub: int, other_leaf: int) -> Diagram:
    """Merge two phase-0 gadgets acting on the same legs."""
    first, second = _gadget(d, hub), _gadget(d, other_hub)
    if first is None or second is None or first[1] != second[1] or d.phase(hub) or d.phase(other_hub):
        raise PreconditionError(f"Hubs {hub} and {other_hub} are not matching phase-0 gadgets")
    d.add_to_phase(leaf, d.phase(other_leaf))
    d.remove_vertex(other_hub)
    d.remove_vertex(other_leaf)
    d.scale_sqrt2(1 - len(first[1]))
    return d


# ----- matchers -----


def _interior(d: Diagram, v: int) -> bool:
    return d.has_vertex(v) and d.is_interior(v)


def match_isolated(d: Diagram, v: int) -> Optional[Match]:
    if d.type(v) == VertexType.Z and not d.incident_edges(v):
        return (v,)
    return None


def match_copy(d: Diagram, v: int) -> Optional[Match]:
    if not _interior(d, v) or not is_pauli(d.phase(v)) or d.degree(v) != 1:
        return None
    (n,) = d.neighbors(v)
    if d.type(n) != VertexType.Z or d.is_boundary_adjacent(n):
        return None
    return (v,)


def match_identity(d: Diagram, v: int) -> Optional[Match]:
    if _interior(d, v) and d.phase(v) == 0 and d.degree(v) == 2 and len(d.neighbors(v)) == 2:
        return (v,)
    return None


def match_pi_identity(d: Diagram, v: int) -> Optional[Match]:
    if not _interior(d, v) or d.phase(v) != 4 or d.degree(v) != 2 or len(d.neighbors(v)) != 2:
        return None
    n1, n2 = sorted(d.neighbors(v))
    if not d.is_boundary_adjacent(n2):
        return (v, n1, n2)
    if not d.is_boundary_adjacent(n1):
        return (v, n2, n1)
    return None


def match_lcomp(d: Diagram, v: int) -> Optional[Match]:
    if _interior(d, v) and d.phase(v) in (2, 6):
        return (v,)
    return None


def match_pivot(d: Diagram, v: int) -> Optional[Match]:
    if not _interior(d, v) or not is_pauli(d.phase(v)):
        return None
    for w in sorted(d.neighbors(v)):
        if _interior(d, w) and is_pauli(d.phase(w)):
            return (v, w)
    return None


def match_gadget_normalise(d: Diagram, v: int) -> Optional[Match]:
    if d.type(v) != VertexType.Z or d.phase(v) != 4:
        return None
    gadget = _gadget(d, v)
    return (gadget[0],) if gadget else None


def match_gadget_fuse(d: Diagram, v: int) -> Optional[Match]:
    if d.type(v) != VertexType.Z or d.phase(v) != 0:
        return None
    gadget = _gadget(d, v)
    if gadget is None:
        return None
    leaf, legs = gadget
    for w in sorted(d.neighbors(min(legs))):
        if w in (v, leaf) or w < v or d.phase(w) != 0:
            continue
        other = _gadget(d, w)
        if other is not None and other[1] == legs:
            return (v, leaf, w, other[0])
    return None


@dataclass(frozen=True)
class Rule:
    name: str
    match: Callable[[Diagram, int], Optional[Match]]
    apply: Callable[..., Diagram]
    removes: bool = True


ISOLATED = Rule("isolated", match_isolated, remove_isolated)
COPY = Rule("copy", match_copy, copy_pauli)
IDENTITY = Rule("id", match_identity, remove_identity)
PI_IDENTITY = Rule("pi_id", match_pi_identity, pi_identity)
LCOMP = Rule("lcomp", match_lcomp, local_complement)
PIVOT = Rule("pivot", match_pivot, pivot)
GADGET_NORMALISE = Rule("gadget_norm", match_gadget_normalise, normalise_gadget, removes=False)
GADGET_FUSE = Rule("gadget_fuse", match_gadget_fuse, fuse_gadgets)

RULES: Dict[str, Rule] = {
    r.name: r for r in (ISOLATED, COPY, IDENTITY, PI_IDENTITY, LCOMP, PIVOT, GADGET_NORMALISE, GADGET_FUSE)
}


def apply_rule(d: Diagram, rule: Rule, match: Match, log: Optional[List[RewriteStep]] = None) -> RewriteStep:
    """Apply one rewrite, measuring its scalar contribution."""
    before_scalar = d.scalar
    before_count = d.num_vertices()
    d.scalar = ExactScalar.one()
    try:
        rule.apply(d, *match)
    finally:
        delta = d.scalar
        d.scalar = before_scalar * delta
    if rule.removes and d.num_vertices() >= before_count:
        raise RuntimeError(f"Rule {rule.name} at {match} did not shrink the diagram")
    step = RewriteStep(rule.name, tuple(match), delta)
    logger.debug(f"rewrite {step}")
    if log is not None:
        log.append(step)
    return step


def simp(d: Diagram, rule: Rule, stats: Optional[Stats] = None, log: Optional[List[RewriteStep]] = None) -> int:
    """Sweep the vertices once, applying ``rule`` wherever it still matches."""
    count = 0
    for v in sorted(d.vertices()):
        if not d.has_vertex(v) or d.type(v) != VertexType.Z:
            continue
        match = rule.match(d, v)
        if match is None:
            continue
        apply_rule(d, rule, match, log)
        count += 1
    if count and stats is not None:
        stats.count_rewrites(rule.name, count)
    return count


def full_simplify(
    d: Diagram,
    gadget_fusion: bool = False,
    stats: Optional[Stats] = None,
    log: Optional[List[RewriteStep]] = None,
) -> Diagram:
    """Rewrite d in place to its reduced form and return it."""
    if not is_graph_like(d):
        raise PreconditionError("full_simplify needs a graph-like diagram")
    tcount = d.tcount()
    while True:
        if d.scalar.is_zero:
            break
        i1 = sum(simp(d, r, stats, log) for r in (ISOLATED, COPY, IDENTITY, PI_IDENTITY))
        if i1:
            continue
        i2 = simp(d, LCOMP, stats, log) + simp(d, PIVOT, stats, log)
        if i2:
            continue
        if gadget_fusion:
            i3 = simp(d, GADGET_NORMALISE, stats, log) + simp(d, GADGET_FUSE, stats, log)
            if i3:
                continue
        break
    if d.tcount() > tcount:
        raise RuntimeError(f"Simplification raised the T-count from {tcount} to {d.tcount()}")
    return d


def replay(d: Diagram, steps: Sequence[RewriteStep]) -> Diagram:
    for step in steps:
        RULES[step.rule].apply(d, *step.vertices)
    return d


def check_reduced(d: Diagram) -> List[str]:
    """Violations of the reduced-form properties among interior spiders."""
    problems: List[str] = []
    for v in sorted(d.spiders()):
        if not d.is_interior(v):
            continue
        theta = d.phase(v)
        if theta in (2, 6):
            problems.append(f"interior spider {v} has phase {theta}/4 pi")
        if theta % 2 == 0:
            for w in d.neighbors(v):
                if w > v and d.is_interior(w) and d.phase(w) % 2 == 0:
                    problems.append(f"interior Clifford spiders {v} and {w} are neighbours")
            arity = d.degree(v)
            if arity <= 2 and not _arity_exempt(d, v, arity):
                problems.append(f"interior Clifford spider {v} has arity {arity}")
    return problems


def _arity_exempt(d: Diagram, v: int, arity: int) -> bool:
    if d.phase(v) != 4 and arity == 2:
        return False
    neighbours = d.neighbors(v)
    if arity == 1:
        return d.is_boundary_adjacent(neighbours[0])
    if arity == 2 and len(neighbours) == 2:
        return all(d.is_boundary_adjacent(n) for n in neighbours)
    return False
