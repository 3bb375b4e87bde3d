"""Exhaustive enumeration of small 3-graphs up to isomorphism.

Breadth-first over edge count: every class is reached by adding one edge
to a smaller class, so a hereditary predicate (closed under deleting an
edge — sparsity and codegree caps both are) can prune during the walk and
still see every class that satisfies it. Canonical form is the
lexicographically least permuted edge-index vector, computed against a
cached (n! x C(n,3)) permutation table; practical for n <= 7.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations
from typing import Callable, Iterator

import numpy as np

from .core import ThreeGraph
from .errors import CapExceeded

ENUMERATION_VERTEX_CAP = 7


@lru_cache(maxsize=8)
def _all_triples(n: int) -> tuple[tuple[int, int, int], ...]:
    return tuple(combinations(range(n), 3))


@lru_cache(maxsize=8)
def _perm_table(n: int) -> np.ndarray:
    """row p, column e: index of triple e pushed through permutation p."""
    triples = _all_triples(n)
    index = {t: i for i, t in enumerate(triples)}
    table = np.empty((len(tuple(permutations(range(n)))), len(triples)),
                     dtype=np.int32)
    for p_idx, perm in enumerate(permutations(range(n))):
        for e_idx, (a, b, c) in enumerate(triples):
            table[p_idx, e_idx] = index[tuple(sorted((perm[a], perm[b], perm[c])))]
    return table


def canonical_key(n: int, edge_indices: tuple[int, ...]) -> tuple[int, ...]:
    """Least sorted edge-index vector over all vertex permutations."""
    if not edge_indices:
        return ()
    table = _perm_table(n)
    images = np.sort(table[:, list(edge_indices)], axis=1)
    best = np.lexsort(images.T[::-1])[0]
    return tuple(int(v) for v in images[best])


def enumerate_graphs(
    n: int,
    predicate: Callable[[ThreeGraph], bool] | None = None,
    spanning: bool = True,
    max_edges: int | None = None,
) -> Iterator[ThreeGraph]:
    """One representative per isomorphism class on exactly n vertices.

    predicate must be hereditary (true for a graph implies true after
    deleting any edge); it prunes the walk and filters the yield. With
    spanning=True only classes without isolated vertices are yielded
    (graphs with isolated vertices are the same classes at smaller n),
    though non-spanning intermediates are still walked through.
    """
    if n < 3:
        if n >= 0 and not spanning:
            yield ThreeGraph(n, ())
        return
    if n > ENUMERATION_VERTEX_CAP:
        raise CapExceeded(f"n = {n} > enumeration cap {ENUMERATION_VERTEX_CAP}")
    triples = _all_triples(n)
    cap = len(triples) if max_edges is None else min(max_edges, len(triples))
    empty = ThreeGraph(n, ())
    if not spanning and (predicate is None or predicate(empty)):
        yield empty
    seen: set[tuple[int, ...]] = {()}
    frontier: list[tuple[int, ...]] = [()]
    while frontier:
        next_frontier: list[tuple[int, ...]] = []
        for edge_set in frontier:
            if len(edge_set) >= cap:
                continue
            present = set(edge_set)
            for e_idx in range(len(triples)):
                if e_idx in present:
                    continue
                candidate = tuple(sorted(edge_set + (e_idx,)))
                graph = ThreeGraph(n, tuple(triples[i] for i in candidate))
                if predicate is not None and not predicate(graph):
                    continue
                key = canonical_key(n, candidate)
                if key in seen:
                    continue
                seen.add(key)
                rep = ThreeGraph(n, tuple(triples[i] for i in key))
                covered = {v for e in rep.edges for v in e}
                if not spanning or len(covered) == n:
                    yield rep
                next_frontier.append(key)
        frontier = next_frontier


def enumerate_up_to(
    max_vertices: int,
    predicate: Callable[[ThreeGraph], bool] | None = None,
    include_edgeless: bool = False,
) -> Iterator[ThreeGraph]:
    """All classes on at most max_vertices vertices, one natural size each
    (spanning representatives; an n-vertex class with isolated vertices is
    listed once, at the size it spans)."""
    if include_edgeless:
        edgeless = ThreeGraph(1, ())
        if predicate is None or predicate(edgeless):
            yield edgeless
    for n in range(3, max_vertices + 1):
        yield from enumerate_graphs(n, predicate, spanning=True)
