"""Stabiliser decompositions of reduced diagrams.

Every decomposition first lowers each participating T-spider's phase by pi/4.
The removed factor w^(x_1 + ... + x_n) over the leg variables is then written as
a short weighted sum of Clifford constraints on those variables.  The central
identity, on six bits with even parity, is

    [even] * w^|x| = a*[even] + b*[even]*(-1)^(sum_{i<j} x_i x_j) + 2*([x = 0] - i*[x = 1])

with a = (-1+i)/2 and b = (-1-i)/2.  Fixing one bit to 0 gives the five-leg cat,
and summing out a sixth leg with phase -pi/4 gives the partial decomposition
of five unrelated T-spiders.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

from .graph import Diagram, EdgeType, PreconditionError, VertexType, is_pauli, is_t_like
from .scalar import ExactScalar

logger = logging.getLogger(__name__)

ALPHA = ExactScalar((-1, 0, 1, 0), -2)
BETA = ExactScalar((-1, 0, -1, 0), -2)
TWO = ExactScalar.from_int(2)
FOUR = ExactScalar.from_int(4)
TWO_I = ExactScalar((0, 0, 2, 0), 0)
OMEGA = ExactScalar.from_phase(1)
OMEGA3 = ExactScalar.from_phase(3)

# arity -> preference; lower is better (2^(alpha t) growth of 0.25, 0.264, 0.317, 0.333)
CAT_PRIORITY = {4: 0, 6: 1, 5: 2, 3: 3}


class StrategyKind(Enum):
    CATS = "cats"
    BSS = "bss"
    NAIVE = "naive"


@dataclass(frozen=True)
class CatCandidate:
    center: int
    legs: Tuple[int, ...]

    @property
    def arity(self) -> int:
        return len(self.legs)


@dataclass
class DecompTerm:
    weight: ExactScalar
    diagram: Diagram


@dataclass(frozen=True)
class Selection:
    """What ``find_best_candidate`` picked: a cat, five legs for the partial split, or the fallback."""

    kind: str
    cat: Optional[CatCandidate] = None
    legs: Tuple[int, ...] = ()


def t_spiders(d: Diagram) -> List[int]:
    return sorted(v for v in d.spiders() if is_t_like(d.phase(v)))


def cat_candidates(d: Diagram) -> List[CatCandidate]:
    found = []
    for v in sorted(d.spiders()):
        if d.type(v) != VertexType.Z or not is_pauli(d.phase(v)) or not d.is_interior(v):
            continue
        legs = tuple(sorted(d.neighbors(v)))
        if not 3 <= len(legs) <= 6 or d.degree(v) != len(legs):
            continue
        if all(is_t_like(d.phase(w)) and d.edge_type(v, w) == EdgeType.HADAMARD for w in legs):
            found.append(CatCandidate(v, legs))
    return found


def _partial_legs(d: Diagram, ts: Sequence[int]) -> Tuple[int, ...]:
    """Five T-spiders grown greedily from the lowest id by shared neighbourhood."""
    chosen = [ts[0]]
    reach = set(d.neighbors(ts[0]))
    rest = list(ts[1:])
    while len(chosen) < 5:
        best = max(rest, key=lambda w: (len(reach & set(d.neighbors(w))), -w))
        rest.remove(best)
        chosen.append(best)
        reach |= set(d.neighbors(best))
    return tuple(chosen)


def find_best_candidate(d: Diagram) -> Optional[Selection]:
    """Cat4, cat6, cat5, cat3, then five T-spiders, then the fallback; None when Clifford."""
    ts = t_spiders(d)
    if not ts:
        return None
    cats = cat_candidates(d)
    if cats:
        best = min(cats, key=lambda c: (CAT_PRIORITY[c.arity], c.center))
        return Selection("cat", cat=best)
    if len(ts) >= 5:
        return Selection("partial", legs=_partial_legs(d, ts))
    return Selection("fallback")


# ----- term construction -----


def _require_t(d: Diagram, legs: Sequence[int]) -> None:
    if len(set(legs)) != len(legs):
        raise PreconditionError(f"Legs {list(legs)} are not distinct")
    for v in legs:
        if not d.has_vertex(v) or d.type(v) != VertexType.Z or not is_t_like(d.phase(v)):
            raise PreconditionError(f"Vertex {v} is not a T-like spider")


def _lowered(d: Diagram, legs: Sequence[int]) -> Diagram:
    """Copy of d with pi/4 taken off every leg, leaving the even residual in place."""
    base = d.copy()
    for v in legs:
        base.add_to_phase(v, -1)
    return base


def _term(base: Diagram, weight: ExactScalar, edit: Callable[[Diagram], object]) -> DecompTerm:
    g = base.copy()
    edit(g)
    return DecompTerm(weight, g)


def _equal(g: Diagram, a: int, b: int) -> None:
    """x_b := x_a, absorbing w^(x_a + x_b) = w^(2 x_a)."""
    g.identify(a, b)
    g.add_to_phase(a, 2)


def _opposite(g: Diagram, a: int, b: int) -> None:
    g.identify(a, b, negate=True)


def _toggle_all(g: Diagram, vs: Sequence[int]) -> None:
    for i, a in enumerate(vs):
        for b in vs[i + 1:]:
            g.toggle_hadamard(a, b)


def _add_hub(g: Diagram, vs: Sequence[int]) -> int:
    """Phase-0 spider on vs: contributes 2^(1 - n/2) * [x_vs has even parity]."""
    hub = g.add_vertex(VertexType.Z, 0)
    for v in vs:
        g.add_edge(hub, v, EdgeType.HADAMARD)
    return hub


def _merge_into(g: Diagram, keep: int, others: Sequence[int], phase: int) -> None:
    for v in others:
        g.identify(keep, v)
    g.add_to_phase(keep, phase)


def _fix_all(g: Diagram, vs: Sequence[int], value: int) -> None:
    for v in vs:
        g.fix_value(v, value)


def normalize_cat_pi(d: Diagram, c: CatCandidate) -> Diagram:
    """Move a pi centre phase onto the lowest leg by flipping that leg's variable."""
    if d.phase(c.center) != 4:
        raise PreconditionError(f"Cat centre {c.center} does not carry a pi phase")
    d.flip_variable(min(c.legs))
    return d


def unfuse_t(d: Diagram, v: int) -> Diagram:
    """Split pi/4 off an odd spider as a graph-like magic leg v -H- Z(0) -H- Z(pi/4).

    Standalone diagrammatic form of what the decompositions do algebraically: `_lowered` takes the
    same pi/4 off each leg and the term weights account for it, so no extra spiders are created.
    """
    if d.type(v) != VertexType.Z or not is_t_like(d.phase(v)):
        raise PreconditionError(f"Spider {v} has no odd phase to unfuse")
    d.add_to_phase(v, -1)
    m = d.add_vertex(VertexType.Z, 0)
    leaf = d.add_vertex(VertexType.Z, 1)
    d.add_edge(v, m, EdgeType.HADAMARD)
    d.add_edge(m, leaf, EdgeType.HADAMARD)
    return d


def apply_cat_decomp(d: Diagram, c: CatCandidate) -> List[DecompTerm]:
    if not 3 <= c.arity <= 6:
        raise PreconditionError(f"Cat arity {c.arity} is outside 3..6")
    if d.phase(c.center) != 0:
        raise PreconditionError(f"Cat centre {c.center} has phase {d.phase(c.center)}; normalise it first")
    if sorted(d.neighbors(c.center)) != sorted(c.legs) or d.is_boundary_adjacent(c.center):
        raise PreconditionError(f"Spider {c.center} is not the interior centre of legs {list(c.legs)}")
    _require_t(d, c.legs)
    base = _lowered(d, c.legs)
    legs = list(c.legs)
    if c.arity in (3, 4):
        base.remove_spider(c.center)
        if c.arity == 4:
            l1, l2, l3, l4 = legs
            return [
                _term(base, TWO, lambda g: (_equal(g, l1, l2), _equal(g, l3, l4))),
                _term(base, TWO_I, lambda g: (_opposite(g, l1, l2), _opposite(g, l3, l4))),
            ]
        l1, l2, l3 = legs
        return [
            _term(base, TWO, lambda g: (_equal(g, l1, l2), g.fix_value(l3, 0))),
            _term(base, TWO_I, lambda g: (_opposite(g, l1, l2), g.fix_value(l3, 1))),
        ]
    terms = [
        _term(base, ALPHA, lambda g: None),
        _term(base, BETA, lambda g: _toggle_all(g, legs)),
    ]
    collapsed = base.copy()
    collapsed.remove_spider(c.center)
    if c.arity == 6:
        terms.append(_term(collapsed, FOUR, lambda g: _merge_into(g, legs[0], legs[1:], 6)))
    else:
        terms.append(_term(collapsed, FOUR, lambda g: _fix_all(g, legs, 0)))
    return terms


def apply_t5_partial(d: Diagram, legs: Sequence[int]) -> List[DecompTerm]:
    """Three terms, each keeping a single T-spider in place of five."""
    if len(legs) != 5:
        raise PreconditionError(f"Partial decomposition needs 5 legs, got {len(legs)}")
    _require_t(d, legs)
    base = _lowered(d, legs)
    legs = list(legs)

    def with_hub(g: Diagram, entangle: bool) -> None:
        extra = g.add_vertex(VertexType.Z, 7)
        _add_hub(g, legs + [extra])
        if entangle:
            _toggle_all(g, legs + [extra])

    return [
        _term(base, FOUR * ALPHA, lambda g: with_hub(g, False)),
        _term(base, FOUR * BETA, lambda g: with_hub(g, True)),
        _term(base, TWO, lambda g: _merge_into(g, legs[0], legs[1:], 5)),
    ]


def decompose_single(d: Diagram, v: int) -> List[DecompTerm]:
    _require_t(d, [v])
    base = _lowered(d, [v])
    return [
        _term(base, ExactScalar.one(), lambda g: g.fix_value(v, 0)),
        _term(base, OMEGA, lambda g: g.fix_value(v, 1)),
    ]


def decompose_pair(d: Diagram, v: int, w: int) -> List[DecompTerm]:
    _require_t(d, [v, w])
    base = _lowered(d, [v, w])
    return [
        _term(base, ExactScalar.one(), lambda g: _equal(g, v, w)),
        _term(base, OMEGA, lambda g: _opposite(g, v, w)),
    ]


def decompose_bss(d: Diagram, legs: Sequence[int]) -> List[DecompTerm]:
    """Seven Clifford terms for six T-spiders: three even-parity and four odd-parity."""
    if len(legs) != 6:
        raise PreconditionError(f"Six-T decomposition needs 6 legs, got {len(legs)}")
    _require_t(d, legs)
    base = _lowered(d, legs)
    legs = list(legs)
    pairs = [(legs[0], legs[1]), (legs[2], legs[3]), (legs[4], legs[5])]

    def one_odd_pair(g: Diagram, k: int) -> None:
        for i, (a, b) in enumerate(pairs):
            if i == k:
                _opposite(g, a, b)
            else:
                _equal(g, a, b)

    def all_odd(g: Diagram) -> None:
        for a, b in pairs:
            _opposite(g, a, b)

    def even_hub(g: Diagram, entangle: bool) -> None:
        _add_hub(g, legs)
        if entangle:
            _toggle_all(g, legs)

    terms = [
        _term(base, FOUR * ALPHA, lambda g: even_hub(g, False)),
        _term(base, FOUR * BETA, lambda g: even_hub(g, True)),
        _term(base, TWO, lambda g: _merge_into(g, legs[0], legs[1:], 6)),
    ]
    for k in range(3):
        terms.append(_term(base, OMEGA, lambda g, k=k: one_odd_pair(g, k)))
    terms.append(_term(base, OMEGA3, all_odd))
    return terms


def apply_fallback(d: Diagram, strategy: StrategyKind) -> Tuple[str, List[DecompTerm]]:
    ts = t_spiders(d)
    if not ts:
        raise PreconditionError("No T-spider left to decompose")
    if strategy == StrategyKind.BSS and len(ts) >= 6:
        return "bss6", decompose_bss(d, ts[:6])
    if strategy != StrategyKind.NAIVE and len(ts) >= 2:
        return "t2", decompose_pair(d, ts[0], ts[1])
    return "t1", decompose_single(d, ts[0])


def decompose(d: Diagram, strategy: StrategyKind) -> Tuple[str, List[DecompTerm]]:
    """Pick and apply one decomposition; returns its trace name and the terms."""
    if strategy != StrategyKind.CATS:
        return apply_fallback(d, strategy)
    selection = find_best_candidate(d)
    if selection is None:
        raise PreconditionError("No T-spider left to decompose")
    if selection.kind == "cat" and selection.cat is not None:
        cat = selection.cat
        if d.phase(cat.center) == 4:
            d = normalize_cat_pi(d.copy(), cat)
        return f"cat{cat.arity}", apply_cat_decomp(d, cat)
    if selection.kind == "partial":
        return "partial5", apply_t5_partial(d, selection.legs)
    return apply_fallback(d, strategy)


def effective_alpha(initial_t: int, leaf_terms: int) -> float:
    if initial_t < 1:
        raise ValueError("effective_alpha needs a positive T-count")
    if leaf_terms < 1:
        raise ValueError("effective_alpha needs at least one leaf")
    return math.log2(leaf_terms) / initial_t
