"""Witness assembly: build G = cone(S) and certify both legs of the bound.

The witness graph for order t is the cone over the union S of an
edge-disjoint pair of order-t Steiner systems. Two independent facts get
certified:

  * lower bound — at the designated weighting (apex 1/3, every base vertex
    2/(3t)) the normalized Lagrangian of G evaluates, exactly, to
    4/9 + 4/(27t) - 16/(27t^2), which beats 4/9 whenever t > 4. When the
    union is not the full t(t-1)/3 (a non-disjoint pair slipped through)
    the closed form is off the table and only exact positivity of the
    evaluation minus 4/9 is asserted, which is equivalent to |S| > t^2/4.

  * small subgraphs — every subgraph of G on at most m vertices has
    Lagrangian at most 4/9. Each such subgraph sits inside cone(S[U]) for
    some U of size <= m (whether or not it uses the apex), so it suffices
    that every S[U] is sparse with maximum codegree <= 2; both predicates
    are hereditary, so checking the size-m sets covers everything below.

The two legs land in a WitnessCertificate that serializes to canonical
JSON with an embedded content hash and can be re-verified offline, either
shallowly (hash + exact arithmetic) or deeply (re-run from recorded seeds).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from itertools import combinations

import numpy as np

from .cone import ConeGraph, build_cone
from .core import ThreeGraph, check_sparse, codegree_profile, graph_hash, induced_subgraph
from .designs import InternalSystemReport, build_internal_system
from .errors import (
    DimensionMismatch,
    DomainError,
    FormatError,
    IoError,
    UnsupportedOrder,
    WeightMismatch,
)
from .lagrangian import WeightVector, evaluate_p, maximize_lagrangian

TARGET = Fraction(4, 9)
CERTIFICATE_VERSION = "1"

#: exhaustive small-subgraph sweeps up to this many subsets, sampling past it
EXHAUST_LIMIT = 10**6
SAMPLE_COUNT = 10**5


@dataclass(frozen=True)
class LowerBoundResult:
    """Outcome of the lower-bound leg."""

    value: Fraction          # exact p_G at the designated weighting
    closed_form: bool        # True when |S| = t(t-1)/3 made the identity apply
    apex_weight: Fraction
    part_weight: Fraction
    ascent_value: Fraction   # best exact value restarted ascent found
    ascent_witness: WeightVector

    @property
    def best(self) -> Fraction:
        return max(self.value, self.ascent_value)


@dataclass
class SubgraphCertification:
    """Outcome of the small-subgraph leg."""

    policy: str              # "exhaustive" or "sampled(count=..., seed=...)"
    checked: int
    failures: list
    spot_checked: int
    worst_spot_value: float | None
    seed: int

    @property
    def all_certified(self) -> bool:
        return not self.failures


@dataclass
class WitnessCertificate:
    t: int
    m: int
    graph_hash: str | None = None
    weighting: dict = field(default_factory=dict)
    lower_bound: Fraction | None = None
    lower_bound_exceeds: Fraction = TARGET
    subgraph_policy: str | None = None
    subgraphs_checked: int = 0
    all_certified: bool = False
    failures: list = field(default_factory=list)
    seeds: dict = field(default_factory=dict)
    status: str = "DRAFT"
    version: str = CERTIFICATE_VERSION
    internal_report: InternalSystemReport | None = field(
        default=None, compare=False, repr=False
    )

    def apply_lower_bound(self, result: LowerBoundResult) -> None:
        self.lower_bound = result.value
        self.weighting = {
            "apex": str(result.apex_weight),
            "part": str(result.part_weight),
        }

    def apply_subgraphs(self, certification: SubgraphCertification) -> None:
        self.subgraph_policy = certification.policy
        self.subgraphs_checked = certification.checked
        self.failures = list(certification.failures)
        self.all_certified = certification.all_certified
        self.seeds["subgraphs"] = certification.seed

    def finalize(self) -> str:
        complete = self.lower_bound is not None and self.subgraph_policy is not None
        valid = complete and self.lower_bound > TARGET and self.all_certified
        self.status = "VALID" if valid else "INVALID"
        return self.status

    def to_content(self) -> dict:
        if self.lower_bound is None:
            raise DomainError("certificate draft is incomplete")
        return {
            "version": self.version,
            "t": self.t,
            "m": self.m,
            "graph_hash": self.graph_hash,
            "weighting": dict(self.weighting),
            "lower_bound": str(self.lower_bound),
            "target": str(self.lower_bound_exceeds),
            "policy": self.subgraph_policy,
            "subsets_checked": self.subgraphs_checked,
            "failures": [dict(f) for f in self.failures],
            "seeds": dict(self.seeds),
            "status": self.status,
            "all_certified": self.all_certified,
        }

    @classmethod
    def from_content(cls, content: dict) -> "WitnessCertificate":
        required = ("version", "t", "m", "graph_hash", "weighting", "lower_bound",
                    "target", "policy", "subsets_checked", "failures", "seeds")
        missing = [key for key in required if key not in content]
        if missing:
            raise FormatError(f"certificate missing fields: {missing}")
        return cls(
            t=int(content["t"]),
            m=int(content["m"]),
            graph_hash=content["graph_hash"],
            weighting=dict(content["weighting"]),
            lower_bound=Fraction(content["lower_bound"]),
            lower_bound_exceeds=Fraction(content["target"]),
            subgraph_policy=content["policy"],
            subgraphs_checked=int(content["subsets_checked"]),
            all_certified=bool(content.get("all_certified", False)),
            failures=[dict(f) for f in content["failures"]],
            seeds=dict(content["seeds"]),
            status=content.get("status", "DRAFT"),
            version=str(content["version"]),
        )


# ---------------------------------------------------------------------------
# the two certification legs
# ---------------------------------------------------------------------------

def build_witness(
    t: int, m: int = 4, seed: int = 0, max_attempts: int = 2_000
) -> tuple[ConeGraph, WitnessCertificate]:
    """Cone over a searched internal system, plus a draft certificate."""
    if t <= 4:
        raise UnsupportedOrder(f"t = {t}: the lower bound needs t > 4")
    union, report = build_internal_system(t, m, max_attempts, seed)
    cg = build_cone(union)
    draft = WitnessCertificate(
        t=t,
        m=m,
        graph_hash=graph_hash(cg.graph),
        seeds={"search": seed},
        internal_report=report,
    )
    return cg, draft


def certify_lower_bound(
    cg: ConeGraph, t: int, restarts: int = 48, seed: int = 0, max_iter: int = 20_000
) -> LowerBoundResult:
    """Evaluate p_G exactly at apex 1/3, parts 2/(3t); assert it beats 4/9.

    With the full union (|S| = t(t-1)/3) the value must equal
    4/9 + 4/(27t) - 16/(27t^2) exactly; otherwise only exact positivity
    over 4/9 is asserted, which amounts to 4|S| > t^2. A restarted ascent
    runs alongside and its best exact rational is reported (it can only be
    larger; the certificate keeps the designated-weighting value).
    """
    if cg.graph.vertex_count != t + 1 or cg.apex != t:
        raise DimensionMismatch(
            f"cone on {cg.graph.vertex_count} vertices with apex {cg.apex} "
            f"does not match order {t}"
        )
    apex_w = Fraction(1, 3)
    part_w = Fraction(2, 3 * t)
    weights = WeightVector(tuple([part_w] * t + [apex_w]))
    value = evaluate_p(cg.graph, weights)
    size = cg.base.edge_count
    if 4 * size <= t * t:
        raise WeightMismatch(
            f"|S| = {size} <= t^2/4: the weighting cannot beat the target"
        )
    if 3 * size == t * (t - 1):
        closed = Fraction(4, 9) + Fraction(4, 27 * t) - Fraction(16, 27 * t * t)
        if value != closed:
            raise WeightMismatch(f"evaluation {value} != closed form {closed}")
        closed_form = True
    else:
        if value <= TARGET:
            raise WeightMismatch(f"evaluation {value} does not exceed {TARGET}")
        closed_form = False
    estimate = maximize_lagrangian(cg.graph, restarts=restarts, seed=seed,
                                   max_iter=max_iter)
    return LowerBoundResult(value, closed_form, apex_w, part_w,
                            estimate.lower_bound, estimate.witness)


def certify_small_subgraphs(
    cg: ConeGraph,
    base: ThreeGraph,
    m: int,
    policy: str = "auto",
    sample_count: int = SAMPLE_COUNT,
    seed: int = 0,
    spot_checks: int = 0,
    spot_restarts: int = 24,
) -> SubgraphCertification:
    """Check sparsity and codegree <= 2 of S[U] over size-m vertex sets U.

    Both predicates are hereditary, so passing every size-m set certifies
    every subgraph of cone(S) on at most m vertices (any such subgraph,
    apex or not, embeds in cone(S[U]) for the U carrying its base part).
    Failures are recorded, never raised. An optional numeric spot check
    ascends on a few cone(S[U]) directly.
    """
    if m < 3:
        raise DomainError(f"m = {m} < 3")
    t = base.vertex_count
    size = min(m, t)
    total = math.comb(t, size)
    if policy == "auto":
        policy = "exhaustive" if total <= EXHAUST_LIMIT else "sampled"
    if policy == "exhaustive":
        if total > EXHAUST_LIMIT:
            raise DomainError(
                f"{total} subsets exceed the exhaustive limit {EXHAUST_LIMIT}"
            )
        subsets = list(combinations(range(t), size))
        policy_tag = "exhaustive"
    elif policy == "sampled":
        rng = np.random.default_rng([seed, 2])
        subsets = [
            tuple(sorted(int(v) for v in rng.choice(t, size=size, replace=False)))
            for _ in range(sample_count)
        ]
        policy_tag = f"sampled(count={sample_count}, seed={seed})"
    else:
        raise DomainError(f"unknown policy {policy!r}")
    failures = []
    for subset in subsets:
        sub = induced_subgraph(base, subset)
        verdict = check_sparse(sub, "brute")
        if not verdict.is_sparse:
            failures.append({"subset": list(subset), "reason": "not sparse"})
            continue
        codeg = codegree_profile(sub).max_codegree
        if codeg > 2:
            failures.append({"subset": list(subset), "reason": f"codegree {codeg}"})
    worst = None
    done = 0
    if spot_checks > 0:
        rng = np.random.default_rng([seed, 3])
        for _ in range(spot_checks):
            pick = subsets[int(rng.integers(len(subsets)))]
            spot_cone = build_cone(induced_subgraph(base, pick))
            est = maximize_lagrangian(spot_cone.graph, restarts=spot_restarts,
                                      seed=seed)
            worst = est.numeric_max if worst is None else max(worst, est.numeric_max)
            done += 1
        assert worst <= 4.0 / 9.0 + 1e-6, f"spot check exceeded target: {worst}"
    return SubgraphCertification(policy_tag, len(subsets), failures, done, worst, seed)


def assemble_witness(
    t: int,
    m: int = 4,
    seed: int = 0,
    policy: str = "auto",
    max_attempts: int = 2_000,
    restarts: int = 48,
    spot_checks: int = 2,
) -> tuple[ConeGraph, WitnessCertificate]:
    """Full pipeline: build, certify both legs, finalize."""
    cg, cert = build_witness(t, m, seed, max_attempts)
    lower = certify_lower_bound(cg, t, restarts=restarts, seed=seed)
    cert.apply_lower_bound(lower)
    subg = certify_small_subgraphs(cg, cg.base, m, policy, seed=seed,
                                   spot_checks=spot_checks)
    cert.apply_subgraphs(subg)
    cert.finalize()
    return cg, cert


# ---------------------------------------------------------------------------
# certificate files
# ---------------------------------------------------------------------------

def _canonical(content: dict) -> str:
    return json.dumps(content, sort_keys=True, separators=(",", ":"))


def _content_hash(content: dict) -> str:
    import hashlib

    return hashlib.sha256(_canonical(content).encode()).hexdigest()


def emit_certificate(cert: WitnessCertificate, path) -> dict:
    """Write {content, content_hash, generated_at}; returns the envelope.

    Reruns are byte-identical except for generated_at (the hash covers
    content only).
    """
    content = cert.to_content()
    envelope = {
        "content": content,
        "content_hash": _content_hash(content),
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    try:
        with open(path, "w") as fh:
            json.dump(envelope, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write certificate to {path}: {exc}") from exc
    return envelope


def load_certificate(path) -> tuple[WitnessCertificate, dict]:
    try:
        with open(path) as fh:
            envelope = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read certificate from {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"certificate is not valid JSON: {exc}") from exc
    for key in ("content", "content_hash"):
        if key not in envelope:
            raise FormatError(f"certificate envelope missing {key!r}")
    return WitnessCertificate.from_content(envelope["content"]), envelope


@dataclass(frozen=True)
class ReverifyReport:
    hash_ok: bool
    arithmetic_ok: bool      # lower_bound > target, status consistent
    deep_ok: bool | None     # None when deep re-run was not requested

    @property
    def ok(self) -> bool:
        return self.hash_ok and self.arithmetic_ok and self.deep_ok in (None, True)


def reverify_certificate(path, deep: bool = False) -> ReverifyReport:
    """Shallow: recompute the content hash and redo the exact comparisons.
    Deep: re-run the whole pipeline from the recorded seeds and require the
    same graph hash, lower bound, and certification outcome."""
    cert, envelope = load_certificate(path)
    hash_ok = _content_hash(envelope["content"]) == envelope["content_hash"]
    valid_claim = cert.status == "VALID"
    arithmetic_ok = (
        (cert.lower_bound > cert.lower_bound_exceeds and cert.all_certified)
        == valid_claim
    )
    deep_ok = None
    if deep:
        seed = cert.seeds.get("search", 0)
        _, fresh = assemble_witness(cert.t, cert.m, seed=seed, spot_checks=0)
        deep_ok = (
            fresh.graph_hash == cert.graph_hash
            and fresh.lower_bound == cert.lower_bound
            and fresh.all_certified == cert.all_certified
            and fresh.status == cert.status
        )
    return ReverifyReport(hash_ok, arithmetic_ok, deep_ok)
