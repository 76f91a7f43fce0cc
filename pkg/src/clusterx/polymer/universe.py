"""Abstract polymer models and the connected-subgraph instantiation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable

from ..hypergraph import (
    MultiHypergraph,
    _components_mask,
    _connected_masks,
    connected_sets,
)


@dataclass(frozen=True)
class Cluster:
    """Multiset of polymers, as ``(polymer, multiplicity)`` pairs in canonical order."""

    polymers: tuple[tuple[Hashable, int], ...]
    total_size: int

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(m for _, m in self.polymers)

    @property
    def instances(self) -> int:
        return sum(self.multiplicities)


class PolymerUniverse:
    """Polymers, sizes, a compatibility relation and a complex weight oracle.

    Subclasses implement :meth:`_enumerate`, :meth:`size`,
    :meth:`incompatible` and :meth:`_weight`.  Weights are memoised.

    A universe may also expose *patches*: atom sets (bitmasks) that carry every
    possible union of a cluster's polymer footprints.  When available the
    expansion engine groups clusters by patch instead of listing them one by
    one; see :mod:`clusterx.polymer.expansion`.
    """

    def __init__(self):
        self._weights: dict = {}
        self._polymer_cache: dict[int, list] = {}

    # -- required -----------------------------------------------------------
    def _enumerate(self, max_size: int) -> list:
        raise NotImplementedError

    def size(self, p) -> int:
        raise NotImplementedError

    def incompatible(self, p, q) -> bool:
        raise NotImplementedError

    def _weight(self, p) -> complex:
        raise NotImplementedError

    # -- provided -----------------------------------------------------------
    def polymers(self, max_size: int) -> list:
        """All polymers with size <= max_size, in canonical order."""
        if max_size not in self._polymer_cache:
            self._polymer_cache[max_size] = list(self._enumerate(max_size))
        return self._polymer_cache[max_size]

    def incompatible_with(self, p, max_size: int) -> list:
        return [q for q in self.polymers(max_size) if self.incompatible(p, q)]

    def weight(self, p) -> complex:
        try:
            return self._weights[p]
        except KeyError:
            w = complex(self._weight(p))
            self._weights[p] = w
            return w

    def prefetch(self, polymers: Iterable, workers: int = 1) -> None:
        """Evaluate weights, possibly concurrently; results land in the memo."""
        todo = [p for p in polymers if p not in self._weights]
        if workers <= 1 or len(todo) < 2:
            for p in todo:
                self.weight(p)
            return
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for p, w in zip(todo, pool.map(self._weight, todo)):
                self._weights[p] = complex(w)

    # -- optional patch protocol ------------------------------------------
    def patches(self, max_size: int) -> list[int] | None:
        """Candidate cluster footprints with at most ``max_size`` atoms, or None."""
        return None

    def patch_polymers(self, patch: int, max_size: int) -> list:
        raise NotImplementedError

    def patch_polynomial(self, patch: int, degree: int) -> list[complex]:
        """Coefficients of Z_patch(t) = sum over admissible sets inside the patch of
        t^(total size) * prod of weights, up to ``degree``."""
        polys = [p for p in self.patch_polymers(patch, degree)]
        sizes = [self.size(p) for p in polys]
        ws = [self.weight(p) for p in polys]
        coef = [0j] * (degree + 1)
        coef[0] = 1 + 0j
        n = len(polys)

        def grow(chosen: list[int], start: int, tot: int, prod_w: complex):
            for j in range(start, n):
                s = tot + sizes[j]
                if s > degree or any(self.incompatible(polys[j], polys[c]) for c in chosen):
                    continue
                pw = prod_w * ws[j]
                coef[s] += pw
                chosen.append(j)
                grow(chosen, j + 1, s, pw)
                chosen.pop()

        grow([], 0, 0, 1 + 0j)
        return coef


class SubgraphPolymerUniverse(PolymerUniverse):
    """Polymers are the connected edge subsets of a host multihypergraph.

    Size is the edge count, two polymers are incompatible iff their vertex
    sets meet, and ``weight_fn`` maps a ``frozenset`` of edge labels to a
    complex weight.
    """

    def __init__(self, host: MultiHypergraph, weight_fn: Callable[[frozenset], complex]):
        super().__init__()
        self.host = host
        self.weight_fn = weight_fn
        self._prod_cache: dict[int, complex] = {0: 1 + 0j}

    def _enumerate(self, max_size: int) -> list:
        g = self.host
        return sorted((g.labels_of(m) for m in _connected_masks(g, max_size)),
                      key=lambda s: sorted(s))

    def size(self, p) -> int:
        return len(p)

    def vertices(self, p) -> tuple:
        return self.host.induced_vertices(p)

    def incompatible(self, p, q) -> bool:
        g = self.host
        return bool(g.vertex_mask_of(g.mask_of(p)) & g.vertex_mask_of(g.mask_of(q)))

    def _weight(self, p) -> complex:
        return self.weight_fn(frozenset(p))

    # patches are connected edge subsets; atoms are edge positions
    def patches(self, max_size: int) -> list[int]:
        return sorted(_connected_masks(self.host, max_size), key=lambda m: (bin(m).count("1"), m))

    def patch_polymers(self, patch: int, max_size: int) -> list:
        return [self.host.labels_of(m)
                for m in connected_sets(self.host._edge_adjacency, max_size, patch)]

    def _component_product(self, mask: int) -> complex:
        try:
            return self._prod_cache[mask]
        except KeyError:
            pass
        out = 1 + 0j
        for comp in _components_mask(self.host, mask):
            out *= self.weight(self.host.labels_of(comp))
        self._prod_cache[mask] = out
        return out

    def patch_polynomial(self, patch: int, degree: int) -> list[complex]:
        # admissible sets inside a patch <-> edge subsets, split into components
        coef = [0j] * (degree + 1)
        sub = patch
        while True:
            k = bin(sub).count("1")
            if k <= degree:
                coef[k] += self._component_product(sub)
            if sub == 0:
                break
            sub = (sub - 1) & patch
        return coef


def polymers_by_size(u: PolymerUniverse, max_size: int) -> dict[int, int]:
    counts: dict[int, int] = {}
    for p in u.polymers(max_size):
        counts[u.size(p)] = counts.get(u.size(p), 0) + 1
    return dict(sorted(counts.items()))
