"""3-uniform hypergraphs: canonical form, codegree, sparsity, configurations.

A ThreeGraph is deliberately dumb data: a vertex count plus a sorted tuple of
sorted triples. Construction goes through canonicalize() and nothing mutates
afterwards, so every downstream consumer (optimizers, certificates, file
formats) can rely on one canonical representation.

Sparsity here means: every vertex subset S with |S| >= 2 induces at most
|S| - 2 edges. The exact decision procedure reduces the universal quantifier
over subsets to maximum-weight closure / min-cut (see check_sparse), which
stays polynomial while the brute enumerator is capped at 12 vertices.
"""

from __future__ import annotations

import hashlib
from collections import Counter

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .errors import (
    CapExceeded,
    DuplicateEdge,
    FormatError,
    IndexOutOfRange,
    RepeatedVertexInTriple,
)

Triple = tuple[int, int, int]

BRUTE_VERTEX_CAP = 12  # default cap for brute-mode subset enumeration


class ThreeGraph:
    """Immutable 3-graph in canonical form (use canonicalize() to build)."""

    __slots__ = ("vertex_count", "edges")

    def __init__(self, vertex_count: int, edges: tuple[Triple, ...]):
        self.vertex_count = vertex_count
        self.edges = edges

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge_set(self) -> frozenset[Triple]:
        return frozenset(self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ThreeGraph):
            return NotImplemented
        return self.vertex_count == other.vertex_count and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.vertex_count, self.edges))

    def __repr__(self) -> str:
        return f"ThreeGraph(n={self.vertex_count}, m={len(self.edges)})"


class CodegreeProfile:
    """Pair codegrees m_jk (only covered pairs are stored) and their max."""

    __slots__ = ("pair_degrees", "max_codegree")

    def __init__(self, pair_degrees: dict[tuple[int, int], int]):
        self.pair_degrees = pair_degrees
        self.max_codegree = max(pair_degrees.values(), default=0)

    def codegree(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        return self.pair_degrees.get((u, v), 0)


class SparsityVerdict:
    """Outcome of a sparsity check.

    excess = max over checked subsets S (|S| >= 2) of |Q[S]| - |S| + 2;
    the graph is sparse iff no subset pushes this above 0. A violating
    subset (excess >= 1 witness) is reported when one exists.
    """

    __slots__ = ("is_sparse", "violating_set", "excess")

    def __init__(self, is_sparse: bool, violating_set: tuple[int, ...] | None, excess: int):
        self.is_sparse = is_sparse
        self.violating_set = violating_set
        self.excess = excess

    def __repr__(self) -> str:
        return (
            f"SparsityVerdict(is_sparse={self.is_sparse}, "
            f"violating_set={self.violating_set}, excess={self.excess})"
        )


class LabelledTripleSystem:
    """A multiset of (label, triple) entries on a common vertex set.

    Labels keep the two sides of a disjoint union apart: the same 3-set may
    appear once per label (so a shared triple really contributes two
    entries), but never twice under one label.
    """

    __slots__ = ("vertex_count", "entries")

    def __init__(self, vertex_count: int, entries: tuple[tuple[int, Triple], ...]):
        per_label: dict[int, set[Triple]] = {}
        for label, triple in entries:
            tri = _validated_triple(triple, vertex_count)
            seen = per_label.setdefault(label, set())
            if tri in seen:
                raise DuplicateEdge(f"triple {tri} repeated under label {label}")
            seen.add(tri)
        self.vertex_count = vertex_count
        self.entries = tuple(
            (label, _validated_triple(t, vertex_count)) for label, t in entries
        )

    @classmethod
    def from_graphs(cls, graphs: list[ThreeGraph]) -> "LabelledTripleSystem":
        if not graphs:
            raise ValueError("need at least one graph")
        n = graphs[0].vertex_count
        if any(g.vertex_count != n for g in graphs):
            raise IndexOutOfRange("all graphs must share one vertex set")
        entries = tuple(
            (label + 1, triple) for label, g in enumerate(graphs) for triple in g.edges
        )
        return cls(n, entries)


def _validated_triple(triple, vertex_count: int) -> Triple:
    if len(triple) != 3:
        raise RepeatedVertexInTriple(f"not a triple: {triple!r}")
    a, b, c = sorted(int(v) for v in triple)
    if a == b or b == c:
        raise RepeatedVertexInTriple(f"repeated vertex in triple {triple!r}")
    if a < 0 or c >= vertex_count:
        raise IndexOutOfRange(f"triple {triple!r} outside [0, {vertex_count})")
    return (a, b, c)


def canonicalize(raw_edges, vertex_count: int) -> ThreeGraph:
    """Validate raw triples and return the canonical ThreeGraph.

    Triples are sorted internally, the edge list lexicographically; duplicate
    3-sets, repeated vertices and out-of-range indices are rejected.
    """
    if vertex_count < 0:
        raise IndexOutOfRange("vertex_count must be nonnegative")
    seen: set[Triple] = set()
    edges = []
    for triple in raw_edges:
        tri = _validated_triple(triple, vertex_count)
        if tri in seen:
            raise DuplicateEdge(f"duplicate edge {tri}")
        seen.add(tri)
        edges.append(tri)
    edges.sort()
    return ThreeGraph(vertex_count, tuple(edges))


def induced_subgraph(graph: ThreeGraph, subset) -> ThreeGraph:
    """Induced subgraph on `subset`, reindexed by the order-preserving map."""
    verts = sorted(set(int(v) for v in subset))
    if verts and (verts[0] < 0 or verts[-1] >= graph.vertex_count):
        raise IndexOutOfRange(f"subset not within [0, {graph.vertex_count})")
    keep = set(verts)
    index = {v: i for i, v in enumerate(verts)}
    edges = tuple(
        (index[a], index[b], index[c])
        for (a, b, c) in graph.edges
        if a in keep and b in keep and c in keep
    )
    # order-preserving reindexing keeps lexicographic order intact
    return ThreeGraph(len(verts), edges)


def codegree_profile(graph: ThreeGraph) -> CodegreeProfile:
    """Codegree of every covered pair; max is Delta_2."""
    pairs: Counter[tuple[int, int]] = Counter()
    for a, b, c in graph.edges:
        pairs[(a, b)] += 1
        pairs[(a, c)] += 1
        pairs[(b, c)] += 1
    return CodegreeProfile(dict(pairs))


# ---------------------------------------------------------------------------
# sparsity
# ---------------------------------------------------------------------------

def _edge_bitmasks(graph: ThreeGraph) -> np.ndarray:
    masks = np.zeros(len(graph.edges), dtype=np.int64)
    for i, (a, b, c) in enumerate(graph.edges):
        masks[i] = (1 << a) | (1 << b) | (1 << c)
    return masks


def _check_sparse_brute(graph: ThreeGraph, size_cap: int | None) -> SparsityVerdict:
    n = graph.vertex_count
    if n < 2 or not graph.edges:
        return SparsityVerdict(True, None, 0)
    cap = n if size_cap is None else min(size_cap, n)
    if cap < 2:
        return SparsityVerdict(True, None, 0)
    masks = np.arange(1 << n, dtype=np.int64)
    sizes = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        sizes += (masks >> i) & 1
    emasks = _edge_bitmasks(graph)
    inside = (emasks[:, None] & ~masks[None, :]) == 0
    counts = inside.sum(axis=0)
    checked = (sizes >= 2) & (sizes <= cap)
    slack = np.where(checked, counts - sizes + 2, np.int64(-(n + 3)))
    excess = int(slack.max())
    worst = int(np.argmax(slack))
    if excess >= 1:
        vset = tuple(v for v in range(n) if (worst >> v) & 1)
        return SparsityVerdict(False, vset, excess)
    return SparsityVerdict(True, None, excess)


_FLOW_INF = None  # big-enough arc capacity, set per network


def _closure_max(graph: ThreeGraph, anchor: Triple | None) -> tuple[int, tuple[int, ...]]:
    """Max over vertex sets S (anchor-contained if given) of |Q[S]| - |S'|,
    where S' omits the anchor's three free vertices; returns (value, S).

    Standard max-weight closure: edge nodes gain +1 and require their three
    vertex nodes, vertex nodes cost -1 (0 when anchored). Value = m - mincut.
    """
    m = len(graph.edges)
    n = graph.vertex_count
    anchored = set(anchor) if anchor is not None else set()
    # nodes: 0 = source, 1 = sink, 2..2+m edge nodes, 2+m..2+m+n vertex nodes
    src, snk = 0, 1
    inf = m + 1
    rows, cols, caps = [], [], []
    for i, (a, b, c) in enumerate(graph.edges):
        e = 2 + i
        rows.append(src), cols.append(e), caps.append(1)
        for v in (a, b, c):
            rows.append(e), cols.append(2 + m + v), caps.append(inf)
    for v in range(n):
        if v not in anchored:
            rows.append(2 + m + v), cols.append(snk), caps.append(1)
    size = 2 + m + n
    mat = csr_matrix((caps, (rows, cols)), shape=(size, size), dtype=np.int32)
    res = maximum_flow(mat, src, snk)
    value = m - int(res.flow_value)
    # residual reachability from the source gives the optimal closure
    cap_d = mat.toarray()
    flow_d = res.flow.toarray()
    residual = cap_d - flow_d
    reach = np.zeros(size, dtype=bool)
    stack = [src]
    reach[src] = True
    while stack:
        u = stack.pop()
        for w in np.nonzero(residual[u] > 0)[0]:
            if not reach[w]:
                reach[w] = True
                stack.append(int(w))
    chosen = sorted(set(v for v in range(n) if reach[2 + m + v]) | anchored)
    return value, tuple(chosen)


def check_sparse(
    graph: ThreeGraph, mode: str = "exact", size_cap: int | None = None
) -> SparsityVerdict:
    """Decide whether every S with |S| >= 2 induces at most |S| - 2 edges.

    mode="brute" enumerates subsets (vertex_count capped at 12, optional
    size_cap truncates the subset sizes actually checked). mode="exact"
    decides the full quantifier by min-cut closure: one free run first --
    a closure of value >= 1 is already a violating set -- then, since any
    remaining violation sits at |Q[S]| - |S| = -1 and must contain an edge,
    one anchored run per edge pins max_{S containing e} (|Q[S]| - |S|).
    """
    if mode == "brute":
        if graph.vertex_count > BRUTE_VERTEX_CAP:
            raise CapExceeded(
                f"brute mode capped at {BRUTE_VERTEX_CAP} vertices "
                f"(got {graph.vertex_count})"
            )
        return _check_sparse_brute(graph, size_cap)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    n = graph.vertex_count
    if n < 2 or not graph.edges:
        return SparsityVerdict(True, None, 0)
    free_value, free_set = _closure_max(graph, None)
    if free_value >= 1:
        return SparsityVerdict(False, free_set, free_value + 2)
    # every deficit is <= 0 now; remaining violations sit at -1 or 0, both
    # invisible to the free run (the empty set already scores 0), and any
    # violating set contains an edge, so anchored runs cover them all
    best = None  # (value - 3, set)
    for edge in graph.edges:
        value, chosen = _closure_max(graph, edge)
        deficit = value - 3  # max over S containing this edge of |Q[S]| - |S|
        if best is None or deficit > best[0]:
            best = (deficit, chosen)
    deficit, chosen = best
    if deficit >= -1:
        return SparsityVerdict(False, chosen, max(0, deficit + 2))
    return SparsityVerdict(True, None, 0)


# ---------------------------------------------------------------------------
# dense configurations
# ---------------------------------------------------------------------------

def find_dense_configuration(
    system: LabelledTripleSystem, g: int
) -> tuple[tuple[tuple[int, Triple], ...], tuple[int, ...]] | None:
    """Find i labelled triples (2 <= i < g) spanning at most i+1 vertices.

    Returns (entries, spanned vertices) or None. Search grows connected
    entry sets only: a minimum violating configuration is connected, since
    splitting one into components leaves some component with at least as
    bad a vertex deficit.
    """
    if g < 2:
        raise ValueError("g must be at least 2")
    entries = system.entries
    if g <= 2 or len(entries) < 2:
        return None
    # i = 2: two entries span <= 3 vertices iff they are the same 3-set
    first_at: dict[Triple, int] = {}
    for idx, (_, tri) in enumerate(entries):
        if tri in first_at:
            pair = (entries[first_at[tri]], entries[idx])
            return pair, tri
        first_at[tri] = idx
    if g == 3:
        return None
    # i >= 3: DFS over connected sets, pruned by span <= g (each further
    # entry adds >= 0 vertices while the allowance grows by one, so any
    # partial set spanning more than g vertices can never recover)
    incident: dict[int, list[int]] = {}
    for idx, (_, tri) in enumerate(entries):
        for v in tri:
            incident.setdefault(v, []).append(idx)
    seen: set[frozenset[int]] = set()
    for start in range(len(entries)):
        base = frozenset([start])
        if base in seen:
            continue
        stack = [(base, set(entries[start][1]))]
        seen.add(base)
        while stack:
            chosen, span = stack.pop()
            if len(chosen) >= g - 1:
                continue
            candidates: set[int] = set()
            for v in span:
                candidates.update(incident.get(v, ()))
            candidates -= chosen
            for nxt in candidates:
                new_span = span | set(entries[nxt][1])
                if len(new_span) > g:
                    continue
                new_chosen = chosen | {nxt}
                if new_chosen in seen:
                    continue
                seen.add(new_chosen)
                if len(new_chosen) >= 2 and len(new_span) <= len(new_chosen) + 1:
                    picked = tuple(entries[i] for i in sorted(new_chosen))
                    return picked, tuple(sorted(new_span))
                stack.append((new_chosen, new_span))
    return None


# ---------------------------------------------------------------------------
# .3g text format
# ---------------------------------------------------------------------------

def to_3g_text(graph: ThreeGraph, comments: tuple[str, ...] = ()) -> str:
    """Serialize: comment lines, then `t m`, then one sorted triple per line."""
    lines = [f"# {c}" for c in comments]
    lines.append(f"{graph.vertex_count} {len(graph.edges)}")
    lines.extend(f"{a} {b} {c}" for a, b, c in graph.edges)
    return "\n".join(lines) + "\n"


def from_3g_text(text: str) -> tuple[ThreeGraph, tuple[str, ...]]:
    """Parse the .3g format; returns (graph, comment lines sans '#')."""
    comments = []
    body = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        body.append(line)
    if not body:
        raise FormatError("no header line")
    head = body[0].split()
    if len(head) != 2:
        raise FormatError(f"bad header {body[0]!r}")
    try:
        t, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise FormatError(f"bad header {body[0]!r}") from exc
    if len(body) - 1 != m:
        raise FormatError(f"expected {m} edge lines, found {len(body) - 1}")
    triples = []
    for line in body[1:]:
        parts = line.split()
        if len(parts) != 3:
            raise FormatError(f"bad edge line {line!r}")
        try:
            tri = tuple(int(p) for p in parts)
        except ValueError as exc:
            raise FormatError(f"bad edge line {line!r}") from exc
        if not (tri[0] < tri[1] < tri[2]):
            raise FormatError(f"edge line not sorted: {line!r}")
        triples.append(tri)
    for prev, cur in zip(triples, triples[1:]):
        if not prev < cur:
            raise FormatError("edge lines not in strict lexicographic order")
    graph = canonicalize(triples, t)
    return graph, tuple(comments)


def graph_hash(graph: ThreeGraph) -> str:
    """sha256 of the canonical .3g serialization (no comments)."""
    return hashlib.sha256(to_3g_text(graph).encode("ascii")).hexdigest()


def save_3g(graph: ThreeGraph, path, comments: tuple[str, ...] = ()) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(to_3g_text(graph, comments))


def load_3g(path) -> tuple[ThreeGraph, tuple[str, ...]]:
    with open(path, "r", encoding="ascii") as fh:
        return from_3g_text(fh.read())
