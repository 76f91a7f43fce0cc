"""Labelled multihypergraphs, connected edge subsets and causal cones.

Edge subsets are passed around as ``frozenset`` of edge labels at the public
surface.  Internally the enumeration routines work on integer bitmasks over
edge positions, which keeps the exponential parts cheap.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Sequence

Vertex = Hashable
EdgeSubset = frozenset  # frozenset[int] of edge labels


class GraphValidationError(ValueError):
    """Raised when a graph (or a query against it) violates an invariant."""


@dataclass(frozen=True)
class GraphStats:
    order: int
    size: int
    max_degree: int
    rank: int


@dataclass(frozen=True)
class MultiHypergraph:
    """Multihypergraph with uniquely labelled edges and per-vertex local dimensions.

    ``vertices`` is a sequence of ``(vertex_id, dim)`` pairs and ``edges`` a
    sequence of ``(label, vertex_ids)`` pairs stored in strictly increasing
    label order.  The vertex tuple of an edge keeps its declared order, which
    is the tensor-factor order of any operator attached to the edge.
    """

    vertices: tuple[tuple[Vertex, int], ...]
    edges: tuple[tuple[int, tuple[Vertex, ...]], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple((v, int(d)) for v, d in self.vertices))
        object.__setattr__(self, "edges", tuple((int(lab), tuple(vs)) for lab, vs in self.edges))
        seen = set()
        for v, d in self.vertices:
            if v in seen:
                raise GraphValidationError(f"duplicate vertex {v!r}")
            if d < 1:
                raise GraphValidationError(f"vertex {v!r} has local dimension {d} < 1")
            seen.add(v)
        prev = None
        for lab, vs in self.edges:
            if lab < 1:
                raise GraphValidationError(f"edge label {lab} is not a positive integer")
            if prev is not None and lab <= prev:
                kind = "duplicate" if lab == prev else "non-increasing"
                raise GraphValidationError(f"{kind} edge label {lab}")
            prev = lab
            if not vs:
                raise GraphValidationError(f"edge {lab} has an empty vertex set")
            if len(set(vs)) != len(vs):
                raise GraphValidationError(f"edge {lab} repeats a vertex")
            for v in vs:
                if v not in seen:
                    raise GraphValidationError(f"edge {lab} references unknown vertex {v!r}")

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence[Vertex]], dims: int | dict = 2,
                   vertices: Sequence[Vertex] | None = None) -> "MultiHypergraph":
        """Convenience constructor: labels 1, 2, ... in the given edge order."""
        edges = [tuple(e) for e in edges]
        if vertices is None:
            vertices = []
            for e in edges:
                for v in e:
                    if v not in vertices:
                        vertices.append(v)
        dim_of = (lambda v: dims[v]) if isinstance(dims, dict) else (lambda v: dims)
        return cls(tuple((v, dim_of(v)) for v in vertices),
                   tuple((i + 1, e) for i, e in enumerate(edges)))

    # -- basic accessors -------------------------------------------------
    @cached_property
    def vertex_ids(self) -> tuple[Vertex, ...]:
        return tuple(v for v, _ in self.vertices)

    @cached_property
    def vertex_index(self) -> dict:
        return {v: i for i, (v, _) in enumerate(self.vertices)}

    @cached_property
    def dims(self) -> dict:
        return dict(self.vertices)

    @cached_property
    def labels(self) -> tuple[int, ...]:
        return tuple(lab for lab, _ in self.edges)

    @cached_property
    def edge_index(self) -> dict[int, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def edge_vertices(self) -> dict[int, tuple]:
        return dict(self.edges)

    @cached_property
    def _edge_vmask(self) -> tuple[int, ...]:
        idx = self.vertex_index
        return tuple(sum(1 << idx[v] for v in vs) for _, vs in self.edges)

    @cached_property
    def _edge_adjacency(self) -> tuple[int, ...]:
        # bitmask over edge positions of edges sharing a vertex (excluding self)
        vm = self._edge_vmask
        n = len(vm)
        return tuple(sum(1 << j for j in range(n) if j != i and vm[i] & vm[j]) for i in range(n))

    def degree(self, v: Vertex) -> int:
        return sum(1 for _, vs in self.edges if v in vs)

    @property
    def order(self) -> int:
        return len(self.vertices)

    @property
    def size(self) -> int:
        return len(self.edges)

    @cached_property
    def max_degree(self) -> int:
        return max((self.degree(v) for v in self.vertex_ids), default=0)

    @cached_property
    def rank(self) -> int:
        return max((len(vs) for _, vs in self.edges), default=0)

    def sort_vertices(self, vs: Iterable[Vertex]) -> tuple:
        """Vertices in declaration order."""
        idx = self.vertex_index
        return tuple(sorted(set(vs), key=idx.__getitem__))

    # -- bitmask helpers (internal) --------------------------------------
    def mask_of(self, labels: Iterable[int]) -> int:
        idx = self.edge_index
        try:
            return sum(1 << idx[lab] for lab in set(labels))
        except KeyError as exc:
            raise GraphValidationError(f"unknown edge label {exc.args[0]}") from None

    def labels_of(self, mask: int) -> frozenset:
        labs = self.labels
        out = []
        i = 0
        while mask:
            if mask & 1:
                out.append(labs[i])
            mask >>= 1
            i += 1
        return frozenset(out)

    def vertex_mask_of(self, mask: int) -> int:
        vm = self._edge_vmask
        out = 0
        i = 0
        while mask:
            if mask & 1:
                out |= vm[i]
            mask >>= 1
            i += 1
        return out

    def induced_vertices(self, labels: Iterable[int]) -> tuple:
        """V(S) for an edge subset, in declaration order."""
        ev = self.edge_vertices
        return self.sort_vertices(v for lab in labels for v in ev[lab])


def validate(g: MultiHypergraph) -> GraphStats:
    """Order, size, maximum degree and rank; invariants are enforced at construction."""
    return GraphStats(g.order, g.size, g.max_degree, g.rank)


def mask_components(adj: Sequence[int], mask: int) -> list[int]:
    """Connected components (bitmasks) of the node set ``mask`` under adjacency ``adj``."""
    comps = []
    rest = mask
    while rest:
        low = rest & -rest
        comp = low
        frontier = low
        while frontier:
            b = frontier & -frontier
            frontier ^= b
            new = adj[b.bit_length() - 1] & rest & ~comp
            comp |= new
            frontier |= new
        comps.append(comp)
        rest &= ~comp
    return comps


def _components_mask(g: MultiHypergraph, mask: int) -> list[int]:
    return mask_components(g._edge_adjacency, mask)


def _is_connected_mask(g: MultiHypergraph, mask: int) -> bool:
    return mask != 0 and len(_components_mask(g, mask)) == 1


def is_connected(g: MultiHypergraph, labels: Iterable[int]) -> bool:
    """True iff the edge subset is non-empty and its edge-intersection graph is connected."""
    return _is_connected_mask(g, g.mask_of(labels))


def connected_components(g: MultiHypergraph, labels: Iterable[int]) -> list[frozenset]:
    """Maximal connected pieces of an edge subset, ordered by smallest label."""
    comps = [g.labels_of(c) for c in _components_mask(g, g.mask_of(labels))]
    return sorted(comps, key=min)


def connected_sets(adj: Sequence[int], max_size: int, allowed: int | None = None,
                   sizes: Sequence[int] | None = None) -> Iterator[int]:
    """Connected node sets (bitmasks) of total size <= ``max_size``, each exactly once.

    ``adj[i]`` is the neighbour bitmask of node ``i``; node sizes default to 1.
    Wernicke's ESU scheme: a set is grown only from its lowest node, and
    candidates enter the extension set only through the exclusive
    neighbourhood of the newest node.
    """
    n = len(adj)
    if allowed is None:
        allowed = (1 << n) - 1
    if sizes is None:
        sizes = [1] * n

    def extend(sub: int, ext: int, nbhd: int, above: int, k: int):
        yield sub
        while ext:
            b = ext & -ext
            ext ^= b
            w = b.bit_length() - 1
            if k + sizes[w] > max_size:
                continue
            excl = adj[w] & ~nbhd & above
            yield from extend(sub | b, ext | excl, nbhd | adj[w], above, k + sizes[w])

    for start in range(n):
        b = 1 << start
        if not allowed & b or sizes[start] > max_size:
            continue
        above = allowed & ~((b << 1) - 1)
        yield from extend(b, adj[start] & above, adj[start] | b, above, sizes[start])


def _connected_masks(g: MultiHypergraph, max_size: int) -> Iterator[int]:
    return connected_sets(g._edge_adjacency, max_size)


def connected_edge_subsets(g: MultiHypergraph, max_size: int) -> list[frozenset]:
    """Every connected edge subset with at most ``max_size`` edges, lexicographically ordered."""
    subs = [g.labels_of(m) for m in _connected_masks(g, max_size)]
    return sorted(subs, key=lambda s: sorted(s))


def enumerate_connected_subgraphs(g: MultiHypergraph, pivot: Vertex, max_size: int) -> Iterator[frozenset]:
    """Connected edge subsets with at most ``max_size`` edges whose vertex set contains ``pivot``.

    Emission order is lexicographic in the sorted label lists.
    """
    if pivot not in g.vertex_index:
        raise GraphValidationError(f"unknown pivot vertex {pivot!r}")
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    pbit = 1 << g.vertex_index[pivot]
    found = [m for m in _connected_masks(g, max_size) if g.vertex_mask_of(m) & pbit]
    yield from sorted((g.labels_of(m) for m in found), key=lambda s: sorted(s))


# -- causal cones -----------------------------------------------------------

@dataclass(frozen=True)
class CausalCone:
    root: Vertex
    edges: frozenset
    vertices: tuple = field(default=())


def causal_cone(g: MultiHypergraph, v: Vertex) -> CausalCone:
    """Gates able to influence an observable on ``v``.

    Scan edges from the largest label down; an edge joins the cone when it
    touches the current support, and then enlarges the support.
    """
    if v not in g.vertex_index:
        raise GraphValidationError(f"unknown vertex {v!r}")
    support = {v}
    picked = []
    for lab, vs in reversed(g.edges):
        if support.intersection(vs):
            picked.append(lab)
            support.update(vs)
    return CausalCone(v, frozenset(picked), g.sort_vertices(support))


def causal_subgraph(g: MultiHypergraph, ws: Iterable[Vertex]) -> tuple[frozenset, tuple]:
    """Union of the causal cones of a vertex set: (edge labels, vertices)."""
    edges: set = set()
    verts: set = set()
    for w in ws:
        c = causal_cone(g, w)
        edges |= c.edges
        verts.update(c.vertices)
    return frozenset(edges), g.sort_vertices(verts)


def causal_intersection_hypergraph(g: MultiHypergraph) -> MultiHypergraph:
    """Hypergraph on V(g) with one edge V(C_v) per vertex v.

    The edge for the i-th declared vertex carries label ``i + 1``; use
    :func:`cone_root` to map a label back to its vertex.
    """
    edges = [(i + 1, causal_cone(g, v).vertices) for i, v in enumerate(g.vertex_ids)]
    return MultiHypergraph(g.vertices, tuple(edges))


def cone_root(g: MultiHypergraph, label: int) -> Vertex:
    """Vertex of ``g`` identified with edge ``label`` of its causal intersection hypergraph."""
    return g.vertex_ids[label - 1]


def k_thicken(g: MultiHypergraph, k: int) -> MultiHypergraph:
    """Replace every edge by ``k`` parallel copies; copy j of label l gets label l*k + j."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if g.rank > 2:
        raise GraphValidationError("k-thickening needs a multigraph (rank <= 2)")
    edges = [(lab * k + j, vs) for lab, vs in g.edges for j in range(k)]
    return MultiHypergraph(g.vertices, tuple(edges))
