"""Steiner triple systems and edge-disjoint pair search.

An order-t system (t = 1, 3 mod 6) covers every vertex pair exactly once
with t(t-1)/6 triples. Two systems S1, S2 on the same points give the
labelled union S1 | S2 (a multiset: shared triples count twice) and the
plain union S = S1 u S2. The quantity scored here is the cogirth of the
pair: the largest g, up to a cap, such that no i labelled triples span
i + 1 or fewer vertices for any 2 <= i < g. Cogirth >= 3 is the same as
edge-disjointness, and for edge-disjoint pairs cogirth >= 4 is automatic
(two triples of one system share at most one vertex, so three triples on
four vertices would need three distinct labels).

Constructions are the textbook ones: Bose over the idempotent commutative
quasigroup on Z_{2k+1} for t = 6k+3, Skolem over the half-idempotent one
on Z_{2k} for t = 6k+1, and cyclic development of difference triples found
by backtracking (order 9 has no cyclic system, which the backtracking
detects by exhaustion).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np

from .core import (
    LabelledTripleSystem,
    ThreeGraph,
    canonicalize,
    check_sparse,
    codegree_profile,
    find_dense_configuration,
    from_3g_text,
    induced_subgraph,
    to_3g_text,
)
from .errors import (
    DomainError,
    FormatError,
    NotABijection,
    UnsupportedOrder,
    WrongResidue,
)

SUPPORTED_ORDERS = (7, 9, 13, 15, 19, 21, 25, 27, 31, 33)
COGIRTH_CAP = 8

#: exhaustive induced-subgraph sweep switches to sampling past this count
SUBSET_EXHAUST_CAP = 50_000
SUBSET_SAMPLE_COUNT = 20_000


@dataclass(frozen=True)
class SteinerTripleSystem:
    """A validated order-t system; construction never trusted, always checked."""

    t: int
    triples: tuple[tuple[int, int, int], ...]
    construction_tag: str

    def __post_init__(self):
        g = canonicalize(self.triples, self.t)
        object.__setattr__(self, "triples", g.edges)
        if len(g.edges) != self.t * (self.t - 1) // 6:
            raise DomainError(
                f"{len(g.edges)} triples, expected {self.t * (self.t - 1) // 6}"
            )
        covered = set()
        for a, b, c in g.edges:
            for pair in ((a, b), (a, c), (b, c)):
                if pair in covered:
                    raise DomainError(f"pair {pair} covered twice")
                covered.add(pair)
        # count forces totality: t(t-1)/6 triples * 3 distinct pairs each
        # equals all t(t-1)/2 pairs exactly when none repeats

    def graph(self) -> ThreeGraph:
        return ThreeGraph(self.t, self.triples)


@dataclass(frozen=True)
class StsPair:
    """Two systems on the same points, scored by cogirth up to a cap."""

    first: SteinerTripleSystem
    second: SteinerTripleSystem
    achieved_cogirth: int
    edge_disjoint: bool

    def __post_init__(self):
        if self.first.t != self.second.t:
            raise DomainError("orders differ")
        disjoint = not (set(self.first.triples) & set(self.second.triples))
        if disjoint != self.edge_disjoint:
            raise DomainError("edge_disjoint flag contradicts the triples")
        if self.edge_disjoint != (self.achieved_cogirth >= 3):
            raise DomainError("cogirth >= 3 must match edge-disjointness")
        if self.achieved_cogirth < 2:
            raise DomainError("cogirth is always at least 2")

    @property
    def t(self) -> int:
        return self.first.t

    def labelled_union(self) -> LabelledTripleSystem:
        return LabelledTripleSystem.from_graphs([self.first.graph(), self.second.graph()])

    def union_graph(self) -> ThreeGraph:
        merged = sorted(set(self.first.triples) | set(self.second.triples))
        return ThreeGraph(self.t, tuple(merged))

    def common_triples(self) -> tuple[tuple[int, int, int], ...]:
        return tuple(sorted(set(self.first.triples) & set(self.second.triples)))


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def default_method(t: int) -> str:
    return "bose" if t % 6 == 3 else "skolem"


def _bose_triples(t: int) -> list[tuple[int, int, int]]:
    # points (x, r) -> 3x + r over the idempotent quasigroup on Z_n, n = 2k+1
    k = (t - 3) // 6
    n = 2 * k + 1
    half = k + 1  # multiplicative inverse of 2 mod n
    tri = [(3 * i, 3 * i + 1, 3 * i + 2) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            h = ((i + j) * half) % n
            for r in range(3):
                tri.append((3 * i + r, 3 * j + r, 3 * h + (r + 1) % 3))
    return tri


def _skolem_triples(t: int) -> list[tuple[int, int, int]]:
    # points (x, r) -> 3x + r on Z_{2k} plus one extra point t-1
    k = (t - 1) // 6
    n = 2 * k
    extra = t - 1

    def mul(i: int, j: int) -> int:
        r = (i + j) % n
        return r // 2 if r % 2 == 0 else k + (r - 1) // 2

    tri = [(3 * i, 3 * i + 1, 3 * i + 2) for i in range(k)]
    for i in range(k):
        for r in range(3):
            tri.append((extra, 3 * (k + i) + r, 3 * i + (r + 1) % 3))
    for i in range(n):
        for j in range(i + 1, n):
            h = mul(i, j)
            for r in range(3):
                tri.append((3 * i + r, 3 * j + r, 3 * h + (r + 1) % 3))
    return tri


def _difference_triples(t: int) -> list[tuple[int, int]] | None:
    """Partition {1..(t-1)/2} (minus t/3 when present) into triples
    {a, b, a+b or t-a-b}; each yields the base block {0, a, a+b}."""
    half = (t - 1) // 2
    avail = set(range(1, half + 1))
    if t % 3 == 0:
        avail.discard(t // 3)
    out: list[tuple[int, int]] = []

    def rec() -> bool:
        if not avail:
            return True
        a = min(avail)
        avail.discard(a)
        for b in sorted(avail):
            s = a + b
            c = s if s <= half else t - s
            if c != a and c != b and c in avail:
                avail.discard(b)
                avail.discard(c)
                out.append((a, b))
                if rec():
                    return True
                out.pop()
                avail.add(b)
                avail.add(c)
        avail.add(a)
        return False

    return out if rec() else None


def _cyclic_triples(t: int) -> list[tuple[int, int, int]]:
    dts = _difference_triples(t)
    if dts is None:
        raise UnsupportedOrder(f"no cyclic system of order {t} exists")
    tri: list[tuple[int, int, int]] = []
    for a, b in dts:
        for s in range(t):
            tri.append((s, (s + a) % t, (s + a + b) % t))
    if t % 3 == 0:
        d = t // 3
        for s in range(d):
            tri.append((s, s + d, s + 2 * d))
    return tri


_BUILDERS = {"bose": _bose_triples, "skolem": _skolem_triples, "cyclic": _cyclic_triples}
_RESIDUES = {"bose": (3,), "skolem": (1,), "cyclic": (1, 3)}


def build_sts(t: int, method: str | None = None, seed: int | None = None) -> SteinerTripleSystem:
    """Construct an order-t system. Deterministic; seed is accepted for
    interface symmetry with the search ops and ignored.

    t = 9 with method "cyclic" is refused: no cyclic system of that order
    exists (the difference-triple search exhausts).
    """
    if method is None:
        if t % 6 not in (1, 3):
            raise WrongResidue(f"t = {t} is not 1 or 3 mod 6")
        method = default_method(t)
    if method not in _BUILDERS:
        raise DomainError(f"unknown method {method!r}")
    if t % 6 not in _RESIDUES[method]:
        raise WrongResidue(f"t = {t} is not {' or '.join(str(r) for r in _RESIDUES[method])} mod 6"
                           f" as {method} requires")
    if t not in SUPPORTED_ORDERS:
        raise UnsupportedOrder(f"t = {t} outside supported orders {SUPPORTED_ORDERS}")
    return SteinerTripleSystem(t, tuple(_BUILDERS[method](t)), method)


def relabel(system: SteinerTripleSystem, permutation) -> SteinerTripleSystem:
    """Apply a bijection on [0, t) to every triple."""
    perm = tuple(int(p) for p in permutation)
    if sorted(perm) != list(range(system.t)):
        raise NotABijection(f"not a bijection on [0, {system.t})")
    mapped = tuple((perm[a], perm[b], perm[c]) for a, b, c in system.triples)
    return SteinerTripleSystem(system.t, mapped, system.construction_tag)


# ---------------------------------------------------------------------------
# scoring and search
# ---------------------------------------------------------------------------

def cogirth_of(pair: StsPair, cap: int = COGIRTH_CAP) -> int:
    """Largest g <= cap with no i labelled triples on <= i+1 vertices, i < g."""
    if cap < 3:
        raise DomainError(f"cap = {cap} < 3")
    system = pair.labelled_union()
    for g in range(3, cap + 1):
        if find_dense_configuration(system, g) is not None:
            return g - 1
    return cap


def _score(first: SteinerTripleSystem, second: SteinerTripleSystem, cap: int) -> StsPair:
    if set(first.triples) & set(second.triples):
        return StsPair(first, second, 2, False)
    system = LabelledTripleSystem.from_graphs([first.graph(), second.graph()])
    achieved = cap
    for g in range(4, cap + 1):  # g = 3 already settled by disjointness
        if find_dense_configuration(system, g) is not None:
            achieved = g - 1
            break
    return StsPair(first, second, achieved, True)


def search_pair(
    t: int, target_cogirth: int = 3, max_attempts: int = 10_000, seed: int = 0
) -> StsPair | None:
    """Random-relabel search for a pair with cogirth >= target_cogirth.

    The first system is the residue-default construction; the second is a
    fresh random relabeling per attempt of an independently built system
    (cyclic when it exists, so the two sides do not share fine structure).
    Returns the first pair meeting the target, else the best seen; None
    only when max_attempts < 1. Deterministic for a given seed: attempt k
    draws its permutation from a generator keyed by (seed, k).
    """
    if t not in SUPPORTED_ORDERS:
        raise UnsupportedOrder(f"t = {t} outside supported orders {SUPPORTED_ORDERS}")
    if target_cogirth < 3:
        raise DomainError(f"target_cogirth = {target_cogirth} < 3")
    cap = min(max(target_cogirth, 3), COGIRTH_CAP)
    first = build_sts(t)
    base = build_sts(t, "cyclic") if t != 9 else build_sts(9, "bose")
    best: StsPair | None = None
    for attempt in range(max_attempts):
        rng = np.random.default_rng([seed, attempt])
        second = relabel(base, rng.permutation(t))
        second = replace(second, construction_tag="search")
        pair = _score(first, second, cap)
        if best is None or pair.achieved_cogirth > best.achieved_cogirth:
            best = pair
        if pair.achieved_cogirth >= target_cogirth:
            return pair
    return best


@dataclass
class InternalSystemReport:
    """What the union graph of a searched pair actually satisfies."""

    t: int
    m: int
    seed: int
    edge_disjoint: bool
    union_edge_count: int
    expected_edge_count: int
    max_codegree: int
    required_cogirth: int
    achieved_cogirth: int
    exceeds_quarter_bound: bool  # |S| > t^2 / 4, the size the bound needs
    subset_policy: str  # exhaustive | sampled
    subsets_checked: int
    failures: list

    @property
    def sparsity_ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "op": "build_internal_system",
            "inputs": {"t": self.t, "m": self.m},
            "worst_margin": None,
            "violations": [list(f) for f in self.failures],
            "seed": self.seed,
            "grid_resolution": None,
            "edge_disjoint": self.edge_disjoint,
            "union_edge_count": self.union_edge_count,
            "max_codegree": self.max_codegree,
            "required_cogirth": self.required_cogirth,
            "achieved_cogirth": self.achieved_cogirth,
            "subset_policy": self.subset_policy,
            "subsets_checked": self.subsets_checked,
        }


def build_internal_system(
    t: int, m: int, max_attempts: int = 2_000, seed: int = 0
) -> tuple[ThreeGraph, InternalSystemReport]:
    """Union of a searched pair, plus the direct verification that counts.

    The cogirth route wants g = C(m,3) + 1; the search reports what it
    achieved but a shortfall is not a failure. What the verification rests
    on is the direct pass: every induced subgraph on <= m vertices must be
    sparse, checked by brute force over all (or, past the exhaustion cap, a
    seeded sample of) size-m vertex subsets.
    """
    if m < 3:
        raise DomainError(f"m = {m} < 3")
    required = math.comb(m, 3) + 1
    pair = search_pair(t, min(required, COGIRTH_CAP), max_attempts, seed)
    if pair is None:
        raise DomainError("max_attempts must be >= 1")
    union = pair.union_graph()
    profile = codegree_profile(union)
    total = math.comb(t, m) if m <= t else 0
    failures: list[tuple[int, ...]] = []
    if total <= SUBSET_EXHAUST_CAP:
        policy, checked = "exhaustive", total
        subsets = combinations(range(t), m)
    else:
        policy, checked = "sampled", SUBSET_SAMPLE_COUNT
        rng = np.random.default_rng([seed, 1 << 20])
        subsets = (
            tuple(sorted(int(v) for v in rng.choice(t, size=m, replace=False)))
            for _ in range(SUBSET_SAMPLE_COUNT)
        )
    for subset in subsets:
        if not check_sparse(induced_subgraph(union, subset), "brute").is_sparse:
            failures.append(tuple(subset))
    report = InternalSystemReport(
        t=t,
        m=m,
        seed=seed,
        edge_disjoint=pair.edge_disjoint,
        union_edge_count=union.edge_count,
        expected_edge_count=t * (t - 1) // 3,
        max_codegree=profile.max_codegree,
        required_cogirth=required,
        achieved_cogirth=pair.achieved_cogirth,
        exceeds_quarter_bound=4 * union.edge_count > t * t,
        subset_policy=policy,
        subsets_checked=checked,
        failures=failures,
    )
    return union, report


# ---------------------------------------------------------------------------
# pair files: two .3g blocks separated by a "%" line
# ---------------------------------------------------------------------------

_STS_HEADER = re.compile(r"sts t=(\d+) method=(\w+)")


def _system_to_text(system: SteinerTripleSystem) -> str:
    header = f"sts t={system.t} method={system.construction_tag}"
    return to_3g_text(system.graph(), comments=(header,))


def _system_from_text(text: str) -> SteinerTripleSystem:
    graph, comments = from_3g_text(text)
    for line in comments:
        match = _STS_HEADER.search(line)
        if match:
            t, tag = int(match.group(1)), match.group(2)
            if t != graph.vertex_count:
                raise FormatError(f"header order {t} != vertex count {graph.vertex_count}")
            return SteinerTripleSystem(t, graph.edges, tag)
    raise FormatError("missing '# sts t=<t> method=<tag>' header")


def save_pair(pair: StsPair, path) -> None:
    with open(path, "w") as fh:
        fh.write(_system_to_text(pair.first))
        fh.write("%\n")
        fh.write(_system_to_text(pair.second))


def load_pair(path, cap: int = COGIRTH_CAP) -> StsPair:
    """Read a pair file and re-score it (cogirth is never trusted from disk)."""
    with open(path) as fh:
        text = fh.read()
    blocks = re.split(r"(?m)^%\s*$", text)
    if len(blocks) != 2:
        raise FormatError(f"expected two blocks separated by a '%' line, got {len(blocks)}")
    return _score(_system_from_text(blocks[0]), _system_from_text(blocks[1]), cap)
