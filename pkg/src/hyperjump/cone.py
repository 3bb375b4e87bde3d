"""Cone construction and the apex-weight analysis that bounds its Lagrangian.

For a 3-graph Q, cone(Q) adds one apex vertex v0 joined to every pair of
V(Q). Splitting a simplex weighting of cone(Q) as (1-b) on the apex and
b * z on the base (z a simplex point over V(Q)) turns p_{cone(Q)} into a
one-variable polynomial in the apex complement mass b:

    Phi(b, z) = 3 (1-b) b^2 (1 - rho) + 6 b^3 q,

with q = sum_{ijk in Q} z_i z_j z_k and rho = sum z_i^2. Everything the
4/9 bound needs about Phi is elementary calculus with closed forms:

    tau(rho) = (1 - rho)(1 - sqrt(1 - rho)) / 2   for rho <= 5/9,
             = 2/27                                for rho >= 5/9,

and max_b Phi <= 4/9 whenever q <= tau(rho). The interior optimum sits at
b0 = 2c / (3(c - 2q)) with value 4 c^3 / (9 (c - 2q)^2), c = 1 - rho.

The stationarity (KKT) side: at a full-support stationary z of q - tau(rho)
there is a multiplier mu with d_i - 2 B z_i = mu for every i, where
d_i = sum_{jk: ijk in Q} z_j z_k, B = (3s - 2)/4, s = sqrt(1 - rho), and
mu = 3q - 2 B rho. With A = (1 - s)(2 - s)/2 the exact polynomial identity

    8 A (A + B) - 3 rho^2 = (1 - s)(s^3 + 10 s^2 - 11 s + 1)

controls the sign analysis: g(s) = s^3 + 10 s^2 - 11 s + 1 is positive and
increasing for s >= (1 + sqrt(3))/3, which is what makes the inequality
N A + 2 B < rho sqrt(3N - 6) impossible there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import ThreeGraph, check_sparse, codegree_profile, graph_hash
from .errors import DimensionMismatch, DomainError, HypothesisViolated, SupportError
from .lagrangian import (
    LagrangianEstimate,
    WeightVector,
    _PolyObjective,
    _dirichlet_starts,
    _round_to_witness,
    ascend_on_simplex,
    evaluate_p,
    maximize_lagrangian,
)

#: branch point of tau: the left branch meets the constant 2/27 here
RHO_BRANCH = Fraction(5, 9)

#: rho_0 = (5 - 2*sqrt(3))/9, the unique solution of tau(rho) = 1/27 on the
#: rising branch; kept symbolically as (5 - 2 sqrt 3)/9 with a float mirror
RHO0_SYMBOLIC = (5, -2, 9)  # (a + b*sqrt(3)) / den
RHO0 = (5.0 - 2.0 * math.sqrt(3.0)) / 9.0

#: s-threshold (1 + sqrt(3))/3 = sqrt(1 - rho_0): above it g(s) > 0
S_THRESHOLD = (1.0 + math.sqrt(3.0)) / 3.0

TARGET = Fraction(4, 9)


@dataclass(frozen=True)
class ConeGraph:
    """A ThreeGraph together with its designated apex (indexed last)."""

    base: ThreeGraph
    graph: ThreeGraph
    apex: int


@dataclass(frozen=True)
class ConeProfile:
    """Base weighting statistics: q, rho (exact), s = sqrt(1-rho), and the
    base mass b of the cone weighting it came from."""

    q: Fraction
    rho: Fraction
    s: float
    b: float


@dataclass(frozen=True)
class StationarityReport:
    """Residuals of d_i - 2 B z_i = mu at a full-support point."""

    mu: float
    residuals: tuple[float, ...]
    A: float
    B: float
    holds: bool
    rho: float
    q: float


def build_cone(base: ThreeGraph) -> ConeGraph:
    """cone(Q): append apex v0 = v(Q) and all triples {v0, u, v}."""
    n = base.vertex_count
    edges = list(base.edges)
    for u in range(n):
        for v in range(u + 1, n):
            edges.append((u, v, n))
    edges.sort()
    return ConeGraph(base, ThreeGraph(n + 1, tuple(edges)), n)


def cone_profile(base: ThreeGraph, z: WeightVector, b: float = 1.0) -> ConeProfile:
    """q and rho of a base weighting (exact), with its cone mass b."""
    q, rho = q_of(base, z)
    if not 0.0 <= b <= 1.0:
        raise DomainError("b must lie in [0, 1]")
    return ConeProfile(q, rho, math.sqrt(max(1.0 - float(rho), 0.0)), b)


def q_of(base: ThreeGraph, z: WeightVector) -> tuple[Fraction, Fraction]:
    """(q, rho) of a base weighting, exactly."""
    if z.dimension != base.vertex_count:
        raise DimensionMismatch(
            f"weight dimension {z.dimension} != vertex count {base.vertex_count}"
        )
    w = z.weights
    q = sum((w[a] * w[b] * w[c] for a, b, c in base.edges), Fraction(0))
    rho = sum((wi * wi for wi in w), Fraction(0))
    return q, rho


# ---------------------------------------------------------------------------
# tau, Phi and the apex optimum
# ---------------------------------------------------------------------------

def _exact_sqrt(x: Fraction) -> Fraction | None:
    p, q = x.numerator, x.denominator
    rp, rq = math.isqrt(p), math.isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return None


def tau(rho):
    """Piecewise threshold tau(rho); exact when the input is exact and
    sqrt(1 - rho) is rational, float otherwise.

    At rho = 5/9 both branches give 2/27; the constant branch is used there
    so the value is bit-exact.
    """
    exact = isinstance(rho, (Fraction, int))
    r = Fraction(rho) if exact else float(rho)
    if r < 0 or r > 1:
        raise DomainError(f"rho = {rho} outside [0, 1]")
    if exact:
        if r >= RHO_BRANCH:
            return Fraction(2, 27)
        c = 1 - r
        s = _exact_sqrt(c)
        if s is not None:
            return c * (1 - s) / 2
        cf = float(c)
        return cf * (1.0 - math.sqrt(cf)) / 2.0
    if r >= 5.0 / 9.0:
        return 2.0 / 27.0
    c = 1.0 - r
    return c * (1.0 - math.sqrt(c)) / 2.0


def tau_prime(rho: float) -> float:
    """d tau / d rho = (3s - 2)/4 on the rising branch, 0 on the flat one
    (the kink at 5/9 takes the flat-side choice)."""
    if rho < 0 or rho > 1:
        raise DomainError(f"rho = {rho} outside [0, 1]")
    if rho >= 5.0 / 9.0:
        return 0.0
    s = math.sqrt(1.0 - rho)
    return (3.0 * s - 2.0) / 4.0


def _tau_np(rho: np.ndarray) -> np.ndarray:
    c = 1.0 - rho
    return np.where(rho >= 5.0 / 9.0, 2.0 / 27.0, c * (1.0 - np.sqrt(np.maximum(c, 0.0))) / 2.0)


def phi(b: float, q: float, rho: float) -> float:
    """Phi(b) = 3(1-b) b^2 (1-rho) + 6 b^3 q."""
    if not 0.0 <= b <= 1.0:
        raise DomainError(f"b = {b} outside [0, 1]")
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho = {rho} outside [0, 1]")
    if q < 0.0:
        raise DomainError(f"q = {q} negative")
    return 3.0 * (1.0 - b) * b * b * (1.0 - rho) + 6.0 * b**3 * q


def apex_optimum(q: float, rho: float) -> tuple[float, float]:
    """(argmax, max) of Phi(., q, rho) over [0, 1].

    Phi'(b) = 3b (2c - 3(c - 2q) b) with c = 1 - rho. When c - 2q > 0 and
    b0 = 2c/(3(c - 2q)) <= 1 the maximum is interior with the closed-form
    value 4 c^3 / (9 (c - 2q)^2); otherwise Phi is nondecreasing on [0, 1]
    and the endpoint b = 1 wins with value 6q.
    """
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho = {rho} outside [0, 1]")
    if q < 0.0:
        raise DomainError(f"q = {q} negative")
    c = 1.0 - rho
    denom = c - 2.0 * q
    if denom > 0.0:
        b0 = 2.0 * c / (3.0 * denom)
        if b0 <= 1.0:
            return b0, 4.0 * c**3 / (9.0 * denom * denom)
    return 1.0, 6.0 * q


@dataclass
class TauThresholdReport:
    samples: int
    seed: int
    grid_resolution: int
    worst_phi_margin: float  # min over samples of (4/9 + 1e-10) - max Phi
    worst_apex_gap: float    # max over samples of |apex value - grid max|
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "op": "check_tau_threshold",
            "inputs": {"samples": self.samples},
            "worst_margin": self.worst_phi_margin,
            "worst_apex_gap": self.worst_apex_gap,
            "violations": self.violations,
            "seed": self.seed,
            "grid_resolution": self.grid_resolution,
        }


def check_tau_threshold(samples: int, seed: int, grid: int = 10_000) -> TauThresholdReport:
    """Sample (rho, q <= tau(rho)) pairs; verify max_b Phi <= 4/9 + 1e-10 on
    a dense b-grid and that apex_optimum matches the grid max to 1e-8."""
    if samples < 1:
        raise DomainError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    bgrid = np.linspace(0.0, 1.0, grid)
    bsq = bgrid * bgrid
    per_c = 3.0 * (1.0 - bgrid) * bsq   # coefficient of c
    per_q = 6.0 * bsq * bgrid           # coefficient of q
    bound = 4.0 / 9.0 + 1e-10
    worst_margin = math.inf
    worst_gap = 0.0
    violations: list = []
    chunk = 256
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        rho = rng.uniform(0.0, 1.0, size=k)
        q = rng.uniform(0.0, 1.0, size=k) * _tau_np(rho)
        c = 1.0 - rho
        grid_max = (per_c[None, :] * c[:, None] + per_q[None, :] * q[:, None]).max(axis=1)
        denom = c - 2.0 * q
        interior = (denom > 0.0) & (2.0 * c <= 3.0 * denom)
        apex_val = np.where(interior, 4.0 * c**3 / (9.0 * denom * denom), 6.0 * q)
        margin = bound - grid_max
        gap = np.abs(apex_val - grid_max)
        worst_margin = min(worst_margin, float(margin.min()))
        worst_gap = max(worst_gap, float(gap.max()))
        bad = np.flatnonzero((margin < 0.0) | (gap > 1e-8))
        for i in bad:
            violations.append(
                {"rho": float(rho[i]), "q": float(q[i]),
                 "grid_max": float(grid_max[i]), "apex_value": float(apex_val[i])}
            )
        done += k
    return TauThresholdReport(samples, seed, grid, worst_margin, worst_gap, violations)


# ---------------------------------------------------------------------------
# ascent-based falsification
# ---------------------------------------------------------------------------

class _QTauObjective:
    """F(z) = q(z) - tau(rho(z)) and its (sub)gradient."""

    def __init__(self, graph: ThreeGraph):
        self.poly = _PolyObjective(graph, factor=1.0)

    def value(self, X: np.ndarray) -> np.ndarray:
        rho = (X * X).sum(axis=1)
        return self.poly.value(X) - _tau_np(rho)

    def value_grad(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        q, gq = self.poly.value_grad(X)
        rho = (X * X).sum(axis=1)
        s = np.sqrt(np.maximum(1.0 - rho, 0.0))
        dtau = np.where(rho < 5.0 / 9.0, (3.0 * s - 2.0) / 4.0, 0.0)
        return q - _tau_np(rho), gq - (2.0 * dtau)[:, None] * X


@dataclass
class FalsificationReport:
    found: bool
    hypotheses_violated: bool
    best_value: float  # max of q - tau(rho) seen
    counterexample: dict | None
    restarts: int
    seed: int

    def to_json(self) -> dict:
        return {
            "op": "falsify_q_tau",
            "inputs": {"restarts": self.restarts},
            "worst_margin": self.best_value,
            "violations": [self.counterexample] if self.counterexample else [],
            "hypotheses_violated": self.hypotheses_violated,
            "seed": self.seed,
            "grid_resolution": None,
        }


def falsify_q_tau(
    graph: ThreeGraph, restarts: int = 200, seed: int = 0, max_iter: int = 20_000
) -> FalsificationReport:
    """Hunt for z with q(z) > tau(rho(z)) + 1e-9 by restarted ascent.

    For Q satisfying the structural hypotheses (sparse, max codegree <= 2)
    no such z should exist; the hypotheses are checked and flagged, not
    enforced, so the op doubles as a sanity probe on graphs that break them
    (K4 on three triples... on four, rather, where uniform quarters give
    q = 1/16 > tau(1/4)).
    """
    hyp_ok = (
        check_sparse(graph, "exact").is_sparse
        and codegree_profile(graph).max_codegree <= 2
    )
    n = graph.vertex_count
    if n < 1:
        return FalsificationReport(False, not hyp_ok, 0.0, None, restarts, seed)
    objective = _QTauObjective(graph)
    starts = _dirichlet_starts(n, restarts, seed)
    X, vals, _, _ = ascend_on_simplex(objective, starts, 1e-10, max_iter)
    best = int(np.argmax(vals))
    best_val = float(vals[best])
    counter = None
    if best_val > 1e-9:
        w = WeightVector.from_floats(X[best])
        q, rho = q_of(graph, w)
        counter = {
            "weights": [str(x) for x in w.weights],
            "q": str(q),
            "rho": str(rho),
            "margin": float(q) - float(tau(float(rho))),
        }
    return FalsificationReport(counter is not None, not hyp_ok, best_val,
                               counter, restarts, seed)


@dataclass
class OneOver27Report:
    max_q: float
    witness: WeightVector
    exact_value: Fraction
    restarts: int
    seed: int

    @property
    def within_bound(self) -> bool:
        return self.max_q <= 1.0 / 27.0 + 1e-9


def check_one_over_27(
    graph: ThreeGraph, restarts: int = 200, seed: int = 0, max_iter: int = 20_000
) -> OneOver27Report:
    """Maximize q over the simplex for a sparse Q; the max must be <= 1/27.

    Raises HypothesisViolated if Q is not sparse (the bound is simply false
    for dense graphs: K4-minus-nothing already beats it).
    """
    verdict = check_sparse(graph, "exact")
    if not verdict.is_sparse:
        raise HypothesisViolated(
            f"graph is not sparse (violating set {verdict.violating_set})"
        )
    n = graph.vertex_count
    if n < 1 or not graph.edges:
        return OneOver27Report(0.0, WeightVector.uniform(max(n, 1)), Fraction(0),
                               restarts, seed)
    objective = _PolyObjective(graph, factor=1.0)
    starts = _dirichlet_starts(n, restarts, seed)
    X, vals, _, _ = ascend_on_simplex(objective, starts, 1e-10, max_iter)
    best = int(np.argmax(vals))
    witness, exact_val = _round_to_witness_q(graph, X[best])
    report = OneOver27Report(max(float(vals[best]), float(exact_val)), witness,
                             exact_val, restarts, seed)
    assert report.max_q <= 1.0 / 27.0 + 1e-9, f"q bound broken: {report.max_q}"
    return report


def _round_to_witness_q(graph: ThreeGraph, x: np.ndarray) -> tuple[WeightVector, Fraction]:
    w, p6 = _round_to_witness(graph, x)
    return w, p6 / 6


# ---------------------------------------------------------------------------
# stationarity and the algebraic identities
# ---------------------------------------------------------------------------

def stationarity_report(
    base: ThreeGraph, z: WeightVector, tol: float = 1e-6
) -> StationarityReport:
    """Residuals of the first-order conditions d_i - 2 B z_i = mu.

    Requires full support (every z_i > 0) and rho < 5/9, the regime where
    B = (3s - 2)/4 is the right multiplier scaling.
    """
    if z.dimension != base.vertex_count:
        raise DimensionMismatch("weight dimension does not match the base graph")
    if any(w == 0 for w in z.weights):
        raise SupportError("stationarity requires full support")
    q, rho = q_of(base, z)
    rho_f = float(rho)
    if rho_f >= 5.0 / 9.0:
        raise DomainError(f"rho = {rho_f} >= 5/9: outside the analysis range")
    s = math.sqrt(1.0 - rho_f)
    B = (3.0 * s - 2.0) / 4.0
    A = (1.0 - s) * (2.0 - s) / 2.0
    mu = 3.0 * float(q) - 2.0 * B * rho_f
    zf = np.array(z.floats)
    d = np.zeros(base.vertex_count)
    for a, b, c in base.edges:
        d[a] += zf[b] * zf[c]
        d[b] += zf[a] * zf[c]
        d[c] += zf[a] * zf[b]
    residuals = tuple(float(abs(d[i] - 2.0 * B * zf[i] - mu)) for i in range(len(zf)))
    return StationarityReport(mu, residuals, A, B, max(residuals) <= tol, rho_f, float(q))


def mu_identity_gap(base: ThreeGraph, z: WeightVector, B: Fraction) -> Fraction:
    """Exact check that sum_i z_i (d_i - 2 B z_i) = 3q - 2 B rho: returns the
    difference, which is identically zero (weighted stationarity average)."""
    q, rho = q_of(base, z)
    w = z.weights
    d = [Fraction(0)] * base.vertex_count
    for a, b, c in base.edges:
        d[a] += w[b] * w[c]
        d[b] += w[a] * w[c]
        d[c] += w[a] * w[b]
    lhs = sum((w[i] * (d[i] - 2 * B * w[i]) for i in range(len(w))), Fraction(0))
    return lhs - (3 * q - 2 * B * rho)


def necessary_counterexample_inequality(N: int, s: float) -> tuple[float, float, bool]:
    """Both sides of N*A + 2*B < rho * sqrt(3N - 6) and whether it holds.

    Any interior counterexample to the q <= tau bound would have to satisfy
    this, yet in the valid range s > (1 + sqrt(3))/3 it never does: the
    returned flag must always be False there.
    """
    if N < 3:
        raise DomainError(f"N = {N} < 3")
    if not (S_THRESHOLD < s < 1.0):
        raise DomainError(f"s = {s} outside ((1 + sqrt 3)/3, 1)")
    rho = 1.0 - s * s
    A = (1.0 - s) * (2.0 - s) / 2.0
    B = (3.0 * s - 2.0) / 4.0
    lhs = N * A + 2.0 * B
    rhs = rho * math.sqrt(3.0 * N - 6.0)
    return lhs, rhs, lhs < rhs


@dataclass(frozen=True)
class InequalitySweepReport:
    max_n: int
    s_samples: int
    violations: int
    worst_margin: float  # min over the grid of lhs - rhs (stays positive)

    def to_json(self) -> dict:
        return {
            "op": "inequality-sweep",
            "inputs": {"max_n": self.max_n, "s_samples": self.s_samples},
            "worst_margin": self.worst_margin,
            "violations": self.violations,
            "seed": None,
            "grid_resolution": self.s_samples,
        }


def inequality_sweep(max_n: int, s_samples: int = 1_000) -> InequalitySweepReport:
    """Evaluate N*A + 2*B - rho*sqrt(3N - 6) for every N in [3, max_n] on a
    uniform s-grid strictly inside ((1 + sqrt 3)/3, 1); counts sign failures
    (there must be none)."""
    if max_n < 3:
        raise DomainError(f"max_n = {max_n} < 3")
    if s_samples < 1:
        raise DomainError("s_samples must be >= 1")
    steps = np.arange(1, s_samples + 1, dtype=np.float64) / (s_samples + 1)
    s = S_THRESHOLD + (1.0 - S_THRESHOLD) * steps
    rho = 1.0 - s * s
    A = (1.0 - s) * (2.0 - s) / 2.0
    B = (3.0 * s - 2.0) / 4.0
    worst = math.inf
    violations = 0
    chunk = max(1, 10_000_000 // max(s_samples, 1))
    n_lo = 3
    while n_lo <= max_n:
        n_hi = min(n_lo + chunk - 1, max_n)
        N = np.arange(n_lo, n_hi + 1, dtype=np.float64)[:, None]
        margin = N * A[None, :] + 2.0 * B[None, :] - np.sqrt(3.0 * N - 6.0) * rho[None, :]
        worst = min(worst, float(margin.min()))
        violations += int(np.count_nonzero(margin < 0.0))
        n_lo = n_hi + 1
    return InequalitySweepReport(max_n, s_samples, violations, worst)


def g_poly(s):
    """g(s) = s^3 + 10 s^2 - 11 s + 1 (exact on Fractions, float on floats)."""
    return s**3 + 10 * s**2 - 11 * s + 1


def g_poly_prime(s):
    """g'(s) = 3 s^2 + 20 s - 11."""
    return 3 * s**2 + 20 * s - 11


def s_at_least_threshold(s: Fraction) -> bool:
    """Exact rational test for s >= (1 + sqrt(3))/3: 3s - 1 >= sqrt(3)."""
    u = 3 * Fraction(s) - 1
    return u > 0 and u * u >= 3


@dataclass(frozen=True)
class AlgebraIdentityReport:
    s: Fraction
    lhs: Fraction
    rhs: Fraction
    identity_holds: bool
    g_value: Fraction
    g_prime_value: Fraction
    above_threshold: bool
    signs_ok: bool | None  # None below threshold (no claim there)


def algebra_identities(s) -> AlgebraIdentityReport:
    """Exact check of 8A(A+B) - 3 rho^2 = (1-s) g(s), plus the sign claims
    g > 0 and g' > 0 which only apply for s >= (1 + sqrt 3)/3."""
    s = Fraction(s)
    if not 0 < s < 1:
        raise DomainError(f"s = {s} outside (0, 1)")
    rho = 1 - s * s
    A = (1 - s) * (2 - s) / 2
    B = (3 * s - 2) / 4
    lhs = 8 * A * (A + B) - 3 * rho * rho
    g = g_poly(s)
    rhs = (1 - s) * g
    gp = g_poly_prime(s)
    above = s_at_least_threshold(s)
    signs = (g > 0 and gp > 0) if above else None
    return AlgebraIdentityReport(s, lhs, rhs, lhs == rhs, g, gp, above, signs)


# ---------------------------------------------------------------------------
# the structural certificate
# ---------------------------------------------------------------------------

@dataclass
class ConeBoundCertificate:
    status: str  # CERTIFIED | NOT_APPLICABLE
    is_sparse: bool
    max_codegree: int
    cone: ConeGraph
    estimate: LagrangianEstimate | None

    @property
    def certified(self) -> bool:
        return self.status == "CERTIFIED"

    def to_json(self) -> dict:
        return {
            "op": "certify_cone_bound",
            "status": self.status,
            "base_hash": graph_hash(self.cone.base),
            "cone_hash": graph_hash(self.cone.graph),
            "is_sparse": self.is_sparse,
            "max_codegree": self.max_codegree,
            "numeric_max": None if self.estimate is None else self.estimate.numeric_max,
        }


def certify_cone_bound(
    base: ThreeGraph, restarts: int = 200, seed: int = 0, max_iter: int = 20_000
) -> ConeBoundCertificate:
    """CERTIFIED iff the base is sparse with max codegree <= 2.

    The certificate is the hypothesis check (those two predicates are what
    force lambda(cone(Q)) <= 4/9); the numeric ascent on the cone is run as
    a cross-check and must stay below 4/9 + 1e-6, but it is corroboration,
    never the certificate itself.
    """
    verdict = check_sparse(base, "exact")
    delta2 = codegree_profile(base).max_codegree
    cg = build_cone(base)
    if not (verdict.is_sparse and delta2 <= 2):
        return ConeBoundCertificate("NOT_APPLICABLE", verdict.is_sparse, delta2, cg, None)
    est = maximize_lagrangian(cg.graph, restarts=restarts, seed=seed, max_iter=max_iter)
    assert est.numeric_max <= 4.0 / 9.0 + 1e-6, (
        f"numeric cross-check failed: {est.numeric_max} > 4/9 + 1e-6"
    )
    return ConeBoundCertificate("CERTIFIED", True, delta2, cg, est)
