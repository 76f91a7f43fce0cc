"""Ursell functions of incompatibility graphs, in exact integer/rational arithmetic.

``phi_hat(H)`` is the signed count of spanning connected edge subsets of H
and ``ursell(H) = phi_hat(H) / |H|!``.  Three routes are provided:

* :func:`phi_hat_subsets` -- direct enumeration of edge subsets (reference);
* :func:`phi_hat_tutte` -- deletion-contraction on the Tutte polynomial, via
  ``phi_hat(H) = (-1)^(|H|-1) T_H(1, 0)``;
* :func:`multiset_phi_hat` -- a recursion over sub-multisets used by the
  cluster engine, where H is a blown-up graph of polymer instances.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial, prod
from typing import Sequence


@dataclass(frozen=True)
class IncompatibilityGraph:
    """Simple undirected graph on nodes ``0..n-1``."""

    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            e = (min(u, v), max(u, v))
            if e in norm:
                raise ValueError(f"parallel edge {e}")
            norm.add(e)
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @classmethod
    def complete(cls, n: int) -> "IncompatibilityGraph":
        return cls(n, tuple(combinations(range(n), 2)))

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        return _count_components(self.n, self.edges) == 1


def _count_components(n: int, edges) -> int:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    k = n
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            k -= 1
    return k


def _require_connected(h: IncompatibilityGraph):
    if not h.is_connected():
        raise ValueError("Ursell function needs a connected graph with at least one node")


def phi_hat_subsets(h: IncompatibilityGraph) -> int:
    """Sum of (-1)^|S| over spanning connected edge subsets S, by enumeration."""
    _require_connected(h)
    total = 0
    m = len(h.edges)
    for mask in range(1 << m):
        sub = [h.edges[i] for i in range(m) if mask >> i & 1]
        if _count_components(h.n, sub) == 1:
            total += -1 if len(sub) % 2 else 1
    return total


def _canon(n: int, edges: tuple) -> tuple:
    # cheap relabelling by first appearance; not a full isomorphism canon
    relabel: dict = {}
    out = []
    for u, v in sorted(tuple(sorted(e)) for e in edges):
        for a in (u, v):
            if a not in relabel:
                relabel[a] = len(relabel)
        out.append(tuple(sorted((relabel[u], relabel[v]))))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _tutte(edges: tuple, x, y):
    if not edges:
        return 1
    (u, v), rest = edges[0], edges[1:]
    if u == v:
        return y * _tutte(_canon(0, rest), x, y)
    contracted = _canon(0, tuple((u if a == v else a, u if b == v else b) for a, b in rest))
    # bridge iff u and v are disconnected without this edge
    if not _linked(rest, u, v):
        return x * _tutte(contracted, x, y)
    return _tutte(_canon(0, rest), x, y) + _tutte(contracted, x, y)


def _linked(edges, s, t) -> bool:
    seen = {s}
    stack = [s]
    while stack:
        a = stack.pop()
        for u, v in edges:
            for p, q in ((u, v), (v, u)):
                if p == a and q not in seen:
                    if q == t:
                        return True
                    seen.add(q)
                    stack.append(q)
    return False


def tutte_evaluate(n: int, edges: Sequence[tuple[int, int]], x, y):
    """Evaluate the Tutte polynomial T_G(x, y) of a multigraph by deletion-contraction."""
    return _tutte(_canon(n, tuple(edges)), x, y)


def phi_hat_tutte(h: IncompatibilityGraph) -> int:
    _require_connected(h)
    sign = 1 if (h.n - 1) % 2 == 0 else -1
    return sign * tutte_evaluate(h.n, h.edges, 1, 0)


def ursell(h: IncompatibilityGraph, method: str = "tutte") -> Fraction:
    """Ursell function phi(H) = phi_hat(H) / |H|! as an exact rational."""
    if method == "tutte":
        ph = phi_hat_tutte(h)
    elif method == "subsets":
        ph = phi_hat_subsets(h)
    else:
        raise ValueError(f"unknown method {method!r}")
    return Fraction(ph, factorial(h.n))


def multiset_phi_hat(mult: Sequence[int], incompatible) -> int:
    """phi_hat of the blow-up graph of a multiset of polymer types.

    ``mult[i]`` copies of type ``i``; copies of one type are pairwise
    adjacent and copies of types ``i != j`` are adjacent iff
    ``incompatible(i, j)``.  Splitting off the block that contains a
    distinguished node of the first occupied type gives

        C(a) = F(a) - sum_{b < a} N(a, b) C(b) F(a - b),

    where F(a) = 1 iff the sub-multiset ``a`` is an independent set.  The
    recursion runs over sub-multisets only, so large multiplicities are cheap.
    """
    k = len(mult)
    if k == 0 or any(m < 1 for m in mult):
        raise ValueError("multiplicities must be positive")
    inc = [[i != j and bool(incompatible(i, j)) for j in range(k)] for i in range(k)]
    # independent sets of types, as sorted tuples
    indep: list[tuple[int, ...]] = []

    def grow(cur: list[int], start: int):
        for j in range(start, k):
            if not any(inc[j][c] for c in cur):
                cur.append(j)
                indep.append(tuple(cur))
                grow(cur, j + 1)
                cur.pop()

    grow([], 0)

    @lru_cache(maxsize=None)
    def connected_sum(a: tuple) -> int:
        occupied = [i for i in range(k) if a[i]]
        i0 = occupied[0]
        total = 1 if all(a[i] == 1 for i in occupied) and _is_indep(occupied) else 0
        for rset in indep:
            if any(a[i] == 0 for i in rset):
                continue
            if i0 in rset and a[i0] == 1:
                continue
            count = prod(a[i] - 1 if i == i0 else a[i] for i in rset)
            b = list(a)
            for i in rset:
                b[i] -= 1
            total -= count * connected_sum(tuple(b))
        return total

    def _is_indep(types) -> bool:
        return all(not inc[p][q] for p, q in combinations(types, 2))

    return connected_sum(tuple(int(m) for m in mult))


def multiset_graph(mult: Sequence[int], incompatible) -> IncompatibilityGraph:
    """Expanded incompatibility graph: one node per polymer instance."""
    owner = [i for i, m in enumerate(mult) for _ in range(m)]
    edges = [(p, q) for p, q in combinations(range(len(owner)), 2)
             if owner[p] == owner[q] or incompatible(owner[p], owner[q])]
    return IncompatibilityGraph(len(owner), tuple(edges))


def multinomial(mult: Sequence[int]) -> int:
    """Number of ordered tuples realising a multiset with these multiplicities."""
    out = factorial(sum(mult))
    for m in mult:
        out //= factorial(m)
    return out


__all__ = [
    "IncompatibilityGraph", "phi_hat_subsets", "phi_hat_tutte", "tutte_evaluate",
    "ursell", "multiset_phi_hat", "multiset_graph", "multinomial",
]
