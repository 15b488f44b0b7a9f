"""ZX-diagrams with phases in eighths of a turn and an exact global scalar.

A diagram is an open multigraph of Z/X spiders, arity-2 H-boxes and boundary
vertices.  Edges are plain wires or Hadamard edges (normalised Hadamard gates).

Most of the engine works on *graph-like* diagrams: only Z-spiders, Hadamard
edges between spiders, plain edges from spiders to boundaries, no self-loops and
no parallel edges.  For such a diagram the linear map is

    scalar * sum_x  prod_v w^(phase_v * x_v) * prod_(u,v) (-1)^(x_u x_v) / sqrt(2)

with one bit per spider, boundary indices pinned to the bit of their spider.
The variable-level primitives below (``toggle_hadamard``, ``fix_value``,
``identify``, ``flip_variable``) edit that sum directly and keep the scalar exact.
"""

import logging
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from .scalar import ExactScalar

logger = logging.getLogger(__name__)


class VertexType(Enum):
    Z = "Z"
    X = "X"
    H_BOX = "H"
    BOUNDARY = "B"


class EdgeType(Enum):
    PLAIN = "P"
    HADAMARD = "H"


class PreconditionError(ValueError):
    """A rewrite was asked to act on a shape it does not apply to."""


class TensorSizeError(ValueError):
    """The dense oracle refuses diagrams beyond its size guard."""


def is_clifford(phase: int) -> bool:
    return phase % 2 == 0


def is_pauli(phase: int) -> bool:
    """Phase 0 or pi."""
    return phase % 4 == 0


def is_t_like(phase: int) -> bool:
    return phase % 2 == 1


def combine_edges(a: EdgeType, b: EdgeType) -> EdgeType:
    """Edge type of two wire segments joined through an identity."""
    return EdgeType.PLAIN if a == b else EdgeType.HADAMARD


def toggle_edge(kind: EdgeType) -> EdgeType:
    return EdgeType.PLAIN if kind == EdgeType.HADAMARD else EdgeType.HADAMARD


class Diagram:
    """Mutable ZX-diagram.  Vertex and edge ids are never reused."""

    def __init__(self) -> None:
        self._types: Dict[int, VertexType] = {}
        self._phases: Dict[int, int] = {}
        self._edges: Dict[int, Tuple[int, int, EdgeType]] = {}
        self._inc: Dict[int, Dict[int, List[int]]] = {}
        self.inputs: List[int] = []
        self.outputs: List[int] = []
        self.scalar: ExactScalar = ExactScalar.one()
        self._next_vertex = 0
        self._next_edge = 0
        self._tcount = 0

    # ----- construction -----

    def add_vertex(self, kind: VertexType, phase: int = 0) -> int:
        v = self._next_vertex
        self._next_vertex += 1
        self._insert_vertex(v, kind, phase)
        return v

    def _insert_vertex(self, v: int, kind: VertexType, phase: int) -> None:
        self._types[v] = kind
        self._phases[v] = phase % 8 if kind in (VertexType.Z, VertexType.X) else 0
        self._inc[v] = {}
        if is_t_like(self._phases[v]):
            self._tcount += 1
        self._next_vertex = max(self._next_vertex, v + 1)

    def add_edge(self, u: int, v: int, kind: EdgeType = EdgeType.PLAIN) -> int:
        """Raw multigraph insertion; no rewriting and no scalar change."""
        e = self._next_edge
        self._next_edge += 1
        self._edges[e] = (u, v, kind)
        self._inc[u].setdefault(v, []).append(e)
        if u != v:
            self._inc[v].setdefault(u, []).append(e)
        return e

    def remove_edge(self, e: int) -> None:
        u, v, _ = self._edges.pop(e)
        for a, b in ((u, v), (v, u)):
            bucket = self._inc[a].get(b)
            if bucket is not None and e in bucket:
                bucket.remove(e)
                if not bucket:
                    del self._inc[a][b]

    def remove_vertex(self, v: int) -> None:
        """Raw removal of a vertex and all its edges; no scalar change."""
        for e in self.incident_edges(v):
            self.remove_edge(e)
        if is_t_like(self._phases[v]):
            self._tcount -= 1
        for boundary in (self.inputs, self.outputs):
            if v in boundary:
                boundary.remove(v)
        del self._types[v]
        del self._phases[v]
        del self._inc[v]

    def set_edge_type(self, e: int, kind: EdgeType) -> None:
        u, v, _ = self._edges[e]
        self._edges[e] = (u, v, kind)

    def copy(self) -> "Diagram":
        d = Diagram()
        d._types = dict(self._types)
        d._phases = dict(self._phases)
        d._edges = dict(self._edges)
        d._inc = {v: {w: list(es) for w, es in nbrs.items()} for v, nbrs in self._inc.items()}
        d.inputs = list(self.inputs)
        d.outputs = list(self.outputs)
        d.scalar = self.scalar
        d._next_vertex = self._next_vertex
        d._next_edge = self._next_edge
        d._tcount = self._tcount
        return d

    # ----- queries -----

    def vertices(self) -> List[int]:
        return list(self._types)

    def num_vertices(self) -> int:
        return len(self._types)

    def spiders(self) -> List[int]:
        return [v for v, t in self._types.items() if t in (VertexType.Z, VertexType.X)]

    def edges(self) -> List[Tuple[int, int, int, EdgeType]]:
        return [(e, u, v, k) for e, (u, v, k) in self._edges.items()]

    def num_edges(self) -> int:
        return len(self._edges)

    def edge(self, e: int) -> Tuple[int, int, EdgeType]:
        return self._edges[e]

    def has_vertex(self, v: int) -> bool:
        return v in self._types

    def type(self, v: int) -> VertexType:
        return self._types[v]

    def phase(self, v: int) -> int:
        return self._phases[v]

    def set_phase(self, v: int, phase: int) -> None:
        phase %= 8
        self._tcount += int(is_t_like(phase)) - int(is_t_like(self._phases[v]))
        self._phases[v] = phase

    def add_to_phase(self, v: int, delta: int) -> None:
        self.set_phase(v, self._phases[v] + delta)

    def tcount(self) -> int:
        return self._tcount

    def incident_edges(self, v: int) -> List[int]:
        seen: List[int] = []
        for es in self._inc[v].values():
            seen.extend(es)
        return seen

    def edges_between(self, u: int, v: int) -> List[int]:
        return list(self._inc[u].get(v, ()))

    def connected(self, u: int, v: int) -> bool:
        return v in self._inc[u]

    def edge_type(self, u: int, v: int) -> Optional[EdgeType]:
        es = self._inc[u].get(v)
        if not es:
            return None
        return self._edges[es[0]][2]

    def neighbors(self, v: int) -> List[int]:
        return [w for w in self._inc[v] if w != v]

    def degree(self, v: int) -> int:
        """Number of wire endpoints at v; a self-loop counts twice."""
        return sum(len(es) * (2 if w == v else 1) for w, es in self._inc[v].items())

    def boundary_neighbors(self, v: int) -> List[int]:
        return [w for w in self._inc[v] if self._types[w] == VertexType.BOUNDARY]

    def is_boundary_adjacent(self, v: int) -> bool:
        return any(self._types[w] == VertexType.BOUNDARY for w in self._inc[v])

    def is_interior(self, v: int) -> bool:
        """A spider none of whose neighbours is a boundary."""
        return self._types[v] == VertexType.Z and not self.is_boundary_adjacent(v)

    def is_closed(self) -> bool:
        return not self.inputs and not self.outputs

    def scale_sqrt2(self, n: int) -> None:
        self.scalar = self.scalar.scale_sqrt2(n)

    def mul_scalar(self, s: ExactScalar) -> None:
        self.scalar = self.scalar * s

    # ----- graph-like editing -----

    def add_edge_smart(self, u: int, v: int, kind: EdgeType) -> None:
        """Insert an edge and immediately restore graph-like form.

        Hadamard self-loops become a pi phase, parallel Hadamard edges cancel in
        pairs and a plain edge between two Z-spiders fuses them.
        """
        tu, tv = self._types[u], self._types[v]
        if u == v:
            if tu == VertexType.Z:
                if kind == EdgeType.HADAMARD:
                    self.add_to_phase(u, 4)
                    self.scale_sqrt2(-1)
                return
            self.add_edge(u, v, kind)
            return
        if tu == VertexType.Z and tv == VertexType.Z:
            if kind == EdgeType.PLAIN:
                self.identify(u, v)
                return
            existing = self.edges_between(u, v)
            if existing:
                if self._edges[existing[0]][2] != EdgeType.HADAMARD:
                    raise PreconditionError(f"Plain edge between spiders {u} and {v}: diagram is not graph-like")
                self.remove_edge(existing[0])
                self.scale_sqrt2(-2)
                return
        self.add_edge(u, v, kind)

    def toggle_hadamard(self, u: int, v: int) -> None:
        """Multiply the summand by (-1)^(x_u x_v); for u == v this is a pi phase."""
        self.scale_sqrt2(1)
        self.add_edge_smart(u, v, EdgeType.HADAMARD)

    def _spider_neighbors(self, v: int) -> Tuple[List[int], List[int]]:
        """Split the neighbourhood of a graph-like spider into spiders and boundaries."""
        spiders: List[int] = []
        boundaries: List[int] = []
        for w, es in self._inc[v].items():
            if w == v:
                raise PreconditionError(f"Spider {v} carries a self-loop")
            if self._types[w] == VertexType.BOUNDARY:
                boundaries.extend([w] * len(es))
                continue
            if len(es) > 1 or self._edges[es[0]][2] != EdgeType.HADAMARD:
                raise PreconditionError(f"Edge {v}-{w} is not a single Hadamard edge")
            spiders.append(w)
        return spiders, boundaries

    def remove_spider(self, v: int) -> List[int]:
        """Delete an interior spider, moving the normalisation of its edges into the scalar.

        Returns the former neighbours.  The caller accounts for the sum over v.
        """
        spiders, boundaries = self._spider_neighbors(v)
        if boundaries:
            raise PreconditionError(f"Spider {v} is connected to a boundary")
        self.remove_vertex(v)
        self.scale_sqrt2(-len(spiders))
        return spiders

    def _attach_basis_state(self, b: int, value: int) -> None:
        """Pin boundary b to the basis value: b -- Z(0) -H- Z(value*pi)."""
        m = self.add_vertex(VertexType.Z)
        self.add_edge(b, m, EdgeType.PLAIN)
        y = self.add_vertex(VertexType.Z, 4 * value)
        self.add_edge(m, y, EdgeType.HADAMARD)
        self.scale_sqrt2(-1)

    def _attach_not(self, b: int, target: int) -> None:
        """Wire boundary b to the negation of target's bit."""
        m = self.add_vertex(VertexType.Z)
        self.add_edge(b, m, EdgeType.PLAIN)
        y = self.add_vertex(VertexType.Z, 4)
        self.add_edge(m, y, EdgeType.HADAMARD)
        self.add_edge(y, target, EdgeType.HADAMARD)

    def fix_value(self, v: int, value: int) -> None:
        """Restrict the sum to x_v = value and remove v."""
        value &= 1
        spiders, boundaries = self._spider_neighbors(v)
        theta = self._phases[v]
        self.remove_vertex(v)
        self.scale_sqrt2(-len(spiders))
        if value:
            self.mul_scalar(ExactScalar.from_phase(theta))
            for w in spiders:
                self.add_to_phase(w, 4)
        for b in boundaries:
            self._attach_basis_state(b, value)

    def identify(self, keep: int, gone: int, negate: bool = False) -> None:
        """Restrict the sum to x_gone = x_keep (or 1 - x_keep) and remove gone."""
        if keep == gone:
            raise PreconditionError(f"Cannot identify spider {keep} with itself")
        spiders, boundaries = self._spider_neighbors(gone)
        theta = self._phases[gone]
        self.remove_vertex(gone)
        self.scale_sqrt2(-len(spiders))
        if negate:
            self.add_to_phase(keep, -theta)
            self.mul_scalar(ExactScalar.from_phase(theta))
        else:
            self.add_to_phase(keep, theta)
        for w in spiders:
            if negate:
                if w == keep:
                    continue
                self.add_to_phase(w, 4)
            self.toggle_hadamard(keep, w)
        for b in boundaries:
            if negate:
                self._attach_not(b, keep)
            else:
                self.add_edge(b, keep, EdgeType.PLAIN)

    def flip_variable(self, v: int) -> None:
        """Substitute x_v -> 1 - x_v; negates v's phase and pushes pi onto its neighbours."""
        spiders, boundaries = self._spider_neighbors(v)
        theta = self._phases[v]
        self.set_phase(v, -theta)
        self.mul_scalar(ExactScalar.from_phase(theta))
        for w in spiders:
            self.add_to_phase(w, 4)
        for b in boundaries:
            for e in self.edges_between(v, b):
                self.remove_edge(e)
            self._attach_not(b, v)

    # ----- composition -----

    def _import(self, other: "Diagram") -> Dict[int, int]:
        mapping: Dict[int, int] = {}
        for v in other.vertices():
            mapping[v] = self.add_vertex(other.type(v), other.phase(v))
        for _, u, v, kind in other.edges():
            self.add_edge(mapping[u], mapping[v], kind)
        return mapping

    def _repoint(self, old: int, new: int) -> None:
        for e in self.incident_edges(old):
            u, v, kind = self._edges[e]
            self.remove_edge(e)
            self.add_edge(new if u == old else u, new if v == old else v, kind)

    def to_text(self) -> str:
        lines = [f"v {v} {t.value} {self._phases[v]}" for v, t in sorted(self._types.items())]
        lines += [f"e {u} {v} {k.value}" for _, (u, v, k) in sorted(self._edges.items())]
        lines.append("i " + " ".join(str(v) for v in self.inputs))
        lines.append("o " + " ".join(str(v) for v in self.outputs))
        lines.append(f"s {self.scalar}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Diagram":
        d = cls()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tag, _, rest = line.partition(" ")
            parts = rest.split()
            try:
                if tag == "v":
                    d._insert_vertex(int(parts[0]), VertexType(parts[1]), int(parts[2]))
                elif tag == "e":
                    d.add_edge(int(parts[0]), int(parts[1]), EdgeType(parts[2]))
                elif tag == "i":
                    d.inputs = [int(p) for p in parts]
                elif tag == "o":
                    d.outputs = [int(p) for p in parts]
                elif tag == "s":
                    d.scalar = ExactScalar.parse(rest)
                else:
                    raise ValueError(f"unknown record '{tag}'")
            except (IndexError, KeyError, ValueError) as e:
                raise ValueError(f"Malformed diagram line {lineno}: '{line}' ({e})") from e
        return d


# ----- whole-diagram operations -----


def compose(d1: Diagram, d2: Diagram) -> Diagram:
    """Plug the outputs of d1 into the inputs of d2."""
    if len(d1.outputs) != len(d2.inputs):
        raise ValueError(f"Cannot compose: {len(d1.outputs)} outputs against {len(d2.inputs)} inputs")
    d = d1.copy()
    mapping = d._import(d2)
    joins = list(zip(d1.outputs, [mapping[i] for i in d2.inputs]))
    for o, i in joins:
        z = d.add_vertex(VertexType.Z)
        d._repoint(o, z)
        d._repoint(i, z)
    for o, i in joins:
        d.remove_vertex(o)
        d.remove_vertex(i)
    d.inputs = list(d1.inputs)
    d.outputs = [mapping[o] for o in d2.outputs]
    d.scalar = d1.scalar * d2.scalar
    return d


def tensor(d1: Diagram, d2: Diagram) -> Diagram:
    """Side-by-side product; boundary lists are concatenated."""
    d = d1.copy()
    mapping = d._import(d2)
    d.inputs = list(d1.inputs) + [mapping[v] for v in d2.inputs]
    d.outputs = list(d1.outputs) + [mapping[v] for v in d2.outputs]
    d.scalar = d1.scalar * d2.scalar
    return d


def is_graph_like(d: Diagram) -> bool:
    for _, u, v, kind in d.edges():
        if u == v:
            return False
        tu, tv = d.type(u), d.type(v)
        if VertexType.X in (tu, tv) or VertexType.H_BOX in (tu, tv):
            return False
        if tu == VertexType.Z and tv == VertexType.Z:
            if kind != EdgeType.HADAMARD or len(d.edges_between(u, v)) > 1:
                return False
        elif kind != EdgeType.PLAIN:
            return False
    return all(d.type(v) != VertexType.X for v in d.vertices())


def to_graph_like(d: Diagram) -> Diagram:
    """Return a graph-like diagram with the same linear map and boundary order."""
    g = d.copy()
    for h in [v for v in g.vertices() if g.type(v) == VertexType.H_BOX]:
        _internalise_hbox(g, h)
    for v in g.vertices():
        if g.type(v) == VertexType.X:
            g._types[v] = VertexType.Z
            for e in g.incident_edges(v):
                a, b, kind = g.edge(e)
                if a != b:
                    g.set_edge_type(e, toggle_edge(kind))
    for e, u, v, kind in g.edges():
        if kind == EdgeType.HADAMARD and VertexType.BOUNDARY in (g.type(u), g.type(v)):
            g.remove_edge(e)
            ends = []
            for end in (u, v):
                if g.type(end) == VertexType.BOUNDARY:
                    z = g.add_vertex(VertexType.Z)
                    g.add_edge(end, z, EdgeType.PLAIN)
                    ends.append(z)
                else:
                    ends.append(end)
            g.add_edge(ends[0], ends[1], EdgeType.HADAMARD)
    return _rebuild_fused(g)


def _internalise_hbox(g: Diagram, h: int) -> None:
    ends: List[Tuple[int, EdgeType]] = []
    loop_kinds: List[EdgeType] = []
    for e in g.incident_edges(h):
        u, v, kind = g.edge(e)
        if u == v:
            loop_kinds.append(kind)
            continue
        ends.append((v if u == h else u, kind))
    g.remove_vertex(h)
    if loop_kinds:
        # tr(H) = 0 and tr(H.H) = 2
        if loop_kinds[0] == EdgeType.PLAIN:
            g.scalar = ExactScalar.zero()
        else:
            g.scale_sqrt2(2)
        return
    if len(ends) != 2:
        raise PreconditionError(f"H-box {h} has arity {len(ends)}")
    (a, ka), (b, kb) = ends
    g.add_edge(a, b, combine_edges(combine_edges(ka, kb), EdgeType.HADAMARD))


def _rebuild_fused(g: Diagram) -> Diagram:
    """Fuse plain-connected Z-spiders and reduce self-loops and parallel Hadamard edges."""
    parent = {v: v for v in g.spiders()}

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for _, u, v, kind in g.edges():
        if kind == EdgeType.PLAIN and u in parent and v in parent:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)

    out = Diagram()
    out._next_vertex = g._next_vertex
    out._next_edge = g._next_edge
    out.scalar = g.scalar
    phases: Dict[int, int] = {}
    for v in parent:
        r = find(v)
        phases[r] = phases.get(r, 0) + g.phase(v)
    for v in sorted(g.vertices()):
        if g.type(v) == VertexType.BOUNDARY:
            out._insert_vertex(v, VertexType.BOUNDARY, 0)
        elif find(v) == v:
            out._insert_vertex(v, VertexType.Z, phases[v])
    out._next_vertex = g._next_vertex

    hadamards: Dict[Tuple[int, int], int] = {}
    for _, u, v, kind in sorted(g.edges()):
        a = find(u) if u in parent else u
        b = find(v) if v in parent else v
        if a in parent and b in parent:
            if kind == EdgeType.PLAIN:
                continue
            if a == b:
                out.add_to_phase(a, 4)
                out.scale_sqrt2(-1)
                continue
            key = (min(a, b), max(a, b))
            hadamards[key] = hadamards.get(key, 0) + 1
        else:
            out.add_edge(a, b, kind)
    for (a, b), n in sorted(hadamards.items()):
        out.scale_sqrt2(-(n - n % 2))
        if n % 2:
            out.add_edge(a, b, EdgeType.HADAMARD)
    out.inputs = list(g.inputs)
    out.outputs = list(g.outputs)
    return out


# ----- dense oracle -----

_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)


def _omega(k: int) -> complex:
    return complex(np.exp(1j * np.pi * (k % 8) / 4))


def _spider_tensor(kind: VertexType, phase: int, arity: int) -> np.ndarray:
    if arity == 0:
        return np.array(1.0 + _omega(phase), dtype=complex)
    t = np.zeros((2,) * arity, dtype=complex)
    t[(0,) * arity] = 1.0
    t[(1,) * arity] += _omega(phase)
    if kind == VertexType.X:
        for axis in range(arity):
            t = np.moveaxis(np.tensordot(_H, t, axes=([1], [axis])), 0, axis)
    return t


def _contract(t: np.ndarray, tl: List, v: np.ndarray, vl: List) -> Tuple[np.ndarray, List]:
    shared = [label for label in vl if label in tl]
    ia = [tl.index(label) for label in shared]
    ib = [vl.index(label) for label in shared]
    out = np.tensordot(t, v, axes=(ia, ib))
    labels = [label for label in tl if label not in shared] + [label for label in vl if label not in shared]
    return out, labels


def _trace_repeated(v: np.ndarray, labels: List) -> Tuple[np.ndarray, List]:
    while True:
        for i, label in enumerate(labels):
            if label in labels[i + 1:]:
                j = labels.index(label, i + 1)
                v = np.trace(v, axis1=i, axis2=j)
                labels = [lab for k, lab in enumerate(labels) if k not in (i, j)]
                break
        else:
            return v, labels


def _endpoint_labels(d: Diagram, v: int) -> Tuple[List, List[int]]:
    """One label per edge end at v, and the axes that carry a folded Hadamard.

    A wire to a boundary is labelled by the boundary itself. A Hadamard edge is folded into its
    first stored endpoint, or into the spider end of a boundary wire, so every label is a plain index.
    """
    labels: List = []
    hadamard_axes: List[int] = []
    for e in sorted(d.incident_edges(v)):
        a, b, kind = d.edge(e)
        other = b if v == a else a
        if d.type(other) == VertexType.BOUNDARY and other != v:
            if kind == EdgeType.HADAMARD:
                hadamard_axes.append(len(labels))
            labels.append(("open", other))
            continue
        if kind == EdgeType.HADAMARD and v == a:
            hadamard_axes.append(len(labels))
        labels += [("e", e)] * (2 if a == b else 1)
    return labels, hadamard_axes


def _vertex_tensor(d: Diagram, v: int, max_rank: int) -> Tuple[np.ndarray, List]:
    labels, hadamard_axes = _endpoint_labels(d, v)
    if len(labels) > max_rank:
        raise TensorSizeError(f"Vertex {v} has arity {len(labels)}, over the rank limit {max_rank}")
    if d.type(v) == VertexType.H_BOX:
        if len(labels) != 2:
            raise PreconditionError(f"H-box {v} has arity {len(labels)}")
        vt = _H.copy()
    else:
        vt = _spider_tensor(d.type(v), d.phase(v), len(labels))
    for axis in hadamard_axes:
        vt = np.moveaxis(np.tensordot(_H, vt, axes=([1], [axis])), 0, axis)
    return _trace_repeated(vt, labels)


def _open_wire_tensors(d: Diagram) -> Dict[int, Tuple[np.ndarray, List]]:
    """Bare wires joining two boundaries; every other boundary is absorbed by its spider."""
    wires: Dict[int, Tuple[np.ndarray, List]] = {}
    for v in d.vertices():
        if d.type(v) != VertexType.BOUNDARY:
            continue
        es = d.incident_edges(v)
        if len(es) != 1:
            raise PreconditionError(f"Boundary {v} has arity {len(es)}")
        a, b, kind = d.edge(es[0])
        other = b if v == a else a
        if d.type(other) == VertexType.BOUNDARY and v < other:
            vt = _H.copy() if kind == EdgeType.HADAMARD else np.eye(2, dtype=complex)
            wires[v] = (vt, [("open", v), ("open", other)])
    return wires


def _rank_after(tl: List, vl: List) -> int:
    shared = sum(1 for label in vl if label in tl)
    return len(tl) + len(vl) - 2 * shared


def to_tensor(d: Diagram, max_open: int = 16, max_spiders: int = 24, max_rank: int = 22) -> np.ndarray:
    """Dense tensor of the diagram with one axis per boundary, inputs then outputs.

    Vertices are contracted greedily, always taking the one that leaves the smallest intermediate rank.
    """
    open_wires = len(d.inputs) + len(d.outputs)
    if open_wires > max_open:
        raise TensorSizeError(f"{open_wires} open wires exceed the oracle limit of {max_open}")
    if len(d.spiders()) > max_spiders:
        raise TensorSizeError(f"{len(d.spiders())} spiders exceed the oracle limit of {max_spiders}")

    pending = _open_wire_tensors(d)
    for v in sorted(d.vertices()):
        if d.type(v) != VertexType.BOUNDARY:
            pending[v] = _vertex_tensor(d, v, max_rank)
    t = np.array(1.0 + 0j)
    tl: List = []
    while pending:
        v = min(pending, key=lambda w: (_rank_after(tl, pending[w][1]), w))
        rank = _rank_after(tl, pending[v][1])
        if rank > max_rank:
            raise TensorSizeError(f"Intermediate tensor rank {rank} exceeds {max_rank}")
        vt, vl = pending.pop(v)
        t, tl = _contract(t, tl, vt, vl)
    boundary_order = [("open", v) for v in list(d.inputs) + list(d.outputs)]
    if sorted(map(str, tl)) != sorted(map(str, boundary_order)):
        raise PreconditionError("Dangling edges left after contraction")
    if tl:
        t = np.transpose(t, [tl.index(label) for label in boundary_order])
    return t * d.scalar.to_complex()


def tensors_close(a: np.ndarray, b: np.ndarray, atol: float = 1e-10) -> bool:
    return a.shape == b.shape and bool(np.allclose(a, b, atol=atol, rtol=0.0))
