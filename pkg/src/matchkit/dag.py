"""Finite partial orders given by a generating edge relation.

Nodes are arbitrary hashable labels.  On construction the nodes are put in a
topological order (stable with respect to the given order) and ancestor and
descendant sets are stored as Python-int bitsets over that order, so every
precedence query is a transitive-closure query, whatever edges were supplied.
"""

from __future__ import annotations

import heapq
from typing import Hashable, Iterable, Iterator, Sequence

import networkx as nx

from .errors import InputError


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Poset:
    """Partial order over ``labels`` generated by ``edges`` (a, b) = a before b."""

    def __init__(self, labels: Iterable[Hashable], edges: Iterable[tuple[Hashable, Hashable]] = ()):
        given = list(labels)
        if len(set(given)) != len(given):
            raise InputError("duplicate poset labels")
        position = {x: i for i, x in enumerate(given)}
        out = [[] for _ in given]
        indeg = [0] * len(given)
        edge_set = set()
        for a, b in edges:
            if a not in position or b not in position:
                raise InputError(f"edge ({a!r}, {b!r}) mentions an unknown node")
            if a == b:
                raise InputError(f"self-loop on {a!r}")
            if (a, b) in edge_set:
                continue
            edge_set.add((a, b))
            out[position[a]].append(position[b])
            indeg[position[b]] += 1
        # Kahn's algorithm, always taking the earliest available given index
        heap = [i for i in range(len(given)) if indeg[i] == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            i = heapq.heappop(heap)
            order.append(i)
            for j in out[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    heapq.heappush(heap, j)
        if len(order) != len(given):
            raise InputError("precedence relation has a cycle")
        self.labels: tuple = tuple(given[i] for i in order)
        self.index = {x: i for i, x in enumerate(self.labels)}
        self.edges: frozenset = frozenset(edge_set)
        k = len(self.labels)
        succ = [0] * k
        for a, b in edge_set:
            succ[self.index[a]] |= 1 << self.index[b]
        desc = [0] * k
        for i in range(k - 1, -1, -1):
            acc = succ[i]
            for j in _bits(succ[i]):
                acc |= desc[j]
            desc[i] = acc
        anc = [0] * k
        for i in range(k):
            for j in _bits(desc[i]):
                anc[j] |= 1 << i
        self._desc = desc
        self._anc = anc

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, x) -> bool:
        return x in self.index

    def __repr__(self) -> str:
        return f"Poset({len(self)} nodes, {len(self.cover_edges())} covers)"

    def _mask(self, items: Iterable[Hashable]) -> int:
        m = 0
        for x in items:
            m |= 1 << self.index[x]
        return m

    def _labels(self, mask: int) -> frozenset:
        return frozenset(self.labels[i] for i in _bits(mask))

    def precedes(self, a, b) -> bool:
        """Strict order: ``a`` must come before ``b``."""
        return bool(self._desc[self.index[a]] >> self.index[b] & 1)

    def successors(self, a) -> frozenset:
        return self._labels(self._desc[self.index[a]])

    def predecessors(self, a) -> frozenset:
        return self._labels(self._anc[self.index[a]])

    def down_closure(self, items: Iterable[Hashable]) -> frozenset:
        mask = self._mask(items)
        acc = mask
        for i in _bits(mask):
            acc |= self._anc[i]
        return self._labels(acc)

    def up_closure(self, items: Iterable[Hashable]) -> frozenset:
        mask = self._mask(items)
        acc = mask
        for i in _bits(mask):
            acc |= self._desc[i]
        return self._labels(acc)

    def maximal(self) -> tuple:
        """Nodes with no predecessor (the "top" rotations)."""
        return tuple(x for i, x in enumerate(self.labels) if not self._anc[i])

    def sinks(self) -> tuple:
        return tuple(x for i, x in enumerate(self.labels) if not self._desc[i])

    def is_closed(self, items: Iterable[Hashable]) -> bool:
        mask = self._mask(items)
        for i in _bits(mask):
            if self._anc[i] & ~mask:
                return False
        return True

    def linear_extension(self, items: Iterable[Hashable] | None = None) -> list:
        if items is None:
            return list(self.labels)
        return sorted(items, key=self.index.__getitem__)

    def closed_subsets(self) -> Iterator[frozenset]:
        """Every closed (downward-closed) subset once, lazily.

        Subsets are produced in lexicographic order of their sorted
        topological indices, starting with the empty set.
        """
        k = len(self.labels)
        anc = self._anc

        def rec(mask: int, start: int):
            yield mask
            for i in range(start, k):
                if anc[i] & ~mask == 0:
                    yield from rec(mask | (1 << i), i + 1)

        for mask in rec(0, 0):
            yield self._labels(mask)

    def count_closed_subsets(self) -> int:
        return sum(1 for _ in self.closed_subsets())

    def restrict(self, keep: Iterable[Hashable]) -> Poset:
        """Induced sub-order on ``keep`` (order inherited through the closure)."""
        keep_set = set(keep)
        labels = [x for x in self.labels if x in keep_set]
        if len(labels) != len(keep_set):
            raise InputError("restrict() got labels outside the poset")
        mask = self._mask(labels)
        edges = []
        for x in labels:
            i = self.index[x]
            for j in _bits(self._desc[i] & mask):
                edges.append((x, self.labels[j]))
        return Poset(labels, edges)._reduced()

    def _reduced(self) -> Poset:
        return Poset(self.labels, self.cover_edges())

    def cover_edges(self) -> list[tuple]:
        """Transitive reduction (Hasse diagram) of the order."""
        covers = []
        for i, x in enumerate(self.labels):
            below = self._desc[i]
            indirect = 0
            for j in _bits(below):
                indirect |= self._desc[j]
            for j in _bits(below & ~indirect):
                covers.append((x, self.labels[j]))
        return covers

    def relabel(self, mapping) -> Poset:
        return Poset([mapping[x] for x in self.labels], [(mapping[a], mapping[b]) for a, b in self.edges])

    def hasse_graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.labels)
        g.add_edges_from(self.cover_edges())
        return g

    def isomorphism(self, other: Poset) -> dict | None:
        """An order isomorphism ``self -> other``, or None."""
        if len(self) != len(other):
            return None
        a, b = self.hasse_graph(), other.hasse_graph()
        if a.number_of_edges() != b.number_of_edges():
            return None
        matcher = nx.algorithms.isomorphism.DiGraphMatcher(a, b)
        for iso in matcher.isomorphisms_iter():
            return dict(iso)
        return None

    def is_isomorphic(self, other: Poset) -> bool:
        return self.isomorphism(other) is not None


def linear_extensions_sample(poset: Poset, items: Sequence, rng) -> list:
    """A random linear extension of the sub-order on ``items``."""
    remaining = set(items)
    result = []
    while remaining:
        ready = [x for x in remaining if not (poset.predecessors(x) & remaining)]
        pick = ready[rng.randrange(len(ready))]
        result.append(pick)
        remaining.discard(pick)
    return result
