"""Normalized Lagrangian of a 3-graph: exact evaluation and simplex ascent.

For a 3-graph H on n vertices and x in the probability simplex,

    p_H(x) = 6 * sum_{ijk in H} x_i x_j x_k,

and lambda(H) = max p_H over the simplex. The maximum is estimated by
projected gradient ascent with Armijo backtracking from many random starts,
then certified from below by rounding the best float point to a nearby
rational simplex point and re-evaluating p_H exactly. Upper bounds are a
different business entirely (see the cone module for the one structured
family where we have them).

The simplex projection is the sorting-based Euclidean projection: find the
largest k with u_k - (sum_{j<=k} u_j - 1)/k > 0 for the decreasingly sorted
u, shift by that threshold and clip at zero.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction

import numpy as np
from numba import njit, prange, set_num_threads

from .core import ThreeGraph, graph_hash
from .errors import CapExceeded, DimensionMismatch, DomainError

GRID_VERTEX_CAP = 6  # default cap for the exhaustive lattice oracle
ROUND_DENOMINATOR = 10**6  # float -> rational via continued fractions
SUPPORT_EPS = 1e-9  # coordinates below this are shrunk away after ascent


class WeightVector:
    """Simplex point with exact rational entries and a float mirror."""

    __slots__ = ("weights", "dimension", "floats")

    def __init__(self, weights):
        ws = tuple(Fraction(w) for w in weights)
        if any(w < 0 for w in ws):
            raise DomainError("weights must be nonnegative")
        if sum(ws) != 1:
            raise DomainError("weights must sum to exactly 1")
        self.weights = ws
        self.dimension = len(ws)
        self.floats = tuple(float(w) for w in ws)

    @classmethod
    def uniform(cls, n: int) -> "WeightVector":
        return cls([Fraction(1, n)] * n)

    @classmethod
    def from_floats(cls, values, max_denominator: int = ROUND_DENOMINATOR) -> "WeightVector":
        """Round floats to rationals (denominator-capped convergents), clip
        at zero and renormalize exactly."""
        fr = [Fraction(max(float(v), 0.0)).limit_denominator(max_denominator) for v in values]
        total = sum(fr)
        if total <= 0:
            raise DomainError("cannot normalize an all-zero vector")
        return cls([f / total for f in fr])

    def __repr__(self) -> str:
        return f"WeightVector({[str(w) for w in self.weights]})"


class LagrangianEstimate:
    """Certified lower bound plus the numeric picture of the ascent."""

    __slots__ = ("lower_bound", "witness", "numeric_max", "restarts_used", "converged")

    def __init__(self, lower_bound: Fraction, witness: WeightVector,
                 numeric_max: float, restarts_used: int, converged: bool):
        self.lower_bound = lower_bound
        self.witness = witness
        self.numeric_max = numeric_max
        self.restarts_used = restarts_used
        self.converged = converged

    def __repr__(self) -> str:
        return (
            f"LagrangianEstimate(lower_bound={self.lower_bound}, "
            f"numeric_max={self.numeric_max:.12g}, "
            f"restarts={self.restarts_used}, converged={self.converged})"
        )


def evaluate_p(graph: ThreeGraph, x: WeightVector) -> Fraction:
    """p_H(x) = 6 sum_{ijk in H} x_i x_j x_k, exactly."""
    if x.dimension != graph.vertex_count:
        raise DimensionMismatch(
            f"weight dimension {x.dimension} != vertex count {graph.vertex_count}"
        )
    w = x.weights
    return 6 * sum((w[a] * w[b] * w[c] for a, b, c in graph.edges), Fraction(0))


def blowup_density(graph: ThreeGraph, part_sizes) -> Fraction:
    """Edge density of the blow-up with the given part sizes.

    Each edge ijk contributes n_i*n_j*n_k transversal triples; density is
    that count over C(sum n_i, 3).
    """
    sizes = [int(s) for s in part_sizes]
    if len(sizes) != graph.vertex_count:
        raise DimensionMismatch(
            f"{len(sizes)} part sizes for {graph.vertex_count} vertices"
        )
    if any(s < 1 for s in sizes):
        raise DomainError("part sizes must be positive")
    total = sum(sizes)
    if total < 3:
        raise DomainError("blow-up needs at least 3 vertices")
    count = sum(sizes[a] * sizes[b] * sizes[c] for a, b, c in graph.edges)
    return Fraction(count, math.comb(total, 3))


# ---------------------------------------------------------------------------
# projected gradient ascent
# ---------------------------------------------------------------------------

def project_rows_to_simplex(X: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row onto the probability simplex."""
    R, n = X.shape
    U = -np.sort(-X, axis=1)
    css = np.cumsum(U, axis=1) - 1.0
    idx = np.arange(1, n + 1, dtype=np.float64)
    cond = U - css / idx > 0
    rho = n - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(R), rho] / (rho + 1.0)
    return np.maximum(X - theta[:, None], 0.0)


class _PolyObjective:
    """p_H and its gradient, vectorized over rows of simplex points.

    grad_i p = 6 d_i with d_i = sum_{jk: ijk in H} x_j x_k (the weighted
    link value of i); assembled via three one-hot scatter matrices.
    """

    def __init__(self, graph: ThreeGraph, factor: float = 6.0):
        m, n = len(graph.edges), graph.vertex_count
        self.n = n
        self.factor = factor
        self.e = np.array(graph.edges, dtype=np.intp).reshape(m, 3)
        self.scatter = [np.zeros((m, n)) for _ in range(3)]
        for r in range(3):
            self.scatter[r][np.arange(m), self.e[:, r]] = 1.0

    def value(self, X: np.ndarray) -> np.ndarray:
        e = self.e
        return self.factor * (X[:, e[:, 0]] * X[:, e[:, 1]] * X[:, e[:, 2]]).sum(axis=1)

    def value_grad(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        e = self.e
        P0, P1, P2 = X[:, e[:, 0]], X[:, e[:, 1]], X[:, e[:, 2]]
        vals = self.factor * (P0 * P1 * P2).sum(axis=1)
        S0, S1, S2 = self.scatter
        grads = self.factor * ((P1 * P2) @ S0 + (P0 * P2) @ S1 + (P0 * P1) @ S2)
        return vals, grads


def ascend_on_simplex(objective, starts: np.ndarray, tol: float, max_iter: int):
    """Projected gradient ascent with Armijo backtracking, rows in lockstep.

    objective needs .value(X) and .value_grad(X). A row is converged when
    the unit-step projected-gradient residual |proj(x + grad) - x|_inf drops
    to tol; rows whose step size underflows are frozen unconverged.
    Returns (points, values, converged_flags, iterations_used).
    """
    X = np.asarray(starts, dtype=np.float64).copy()
    R = X.shape[0]
    vals = objective.value(X)
    step = np.ones(R)
    converged = np.zeros(R, dtype=bool)
    strikes = np.zeros(R, dtype=np.int64)  # consecutive no-progress accepts
    active = np.arange(R)
    iters = 0
    while active.size and iters < max_iter:
        iters += 1
        Xa = X[active]
        va, ga = objective.value_grad(Xa)
        vals[active] = va
        resid = np.abs(project_rows_to_simplex(Xa + ga) - Xa).max(axis=1)
        done = resid <= tol
        if done.any():
            converged[active[done]] = True
            keep = ~done
            active = active[keep]
            if not active.size:
                break
            Xa, va, ga = Xa[keep], va[keep], ga[keep]
        sa = step[active].copy()
        accepted = np.zeros(active.size, dtype=bool)
        Y = Xa.copy()
        fY = va.copy()
        for _ in range(60):
            todo = ~accepted
            trial = project_rows_to_simplex(Xa[todo] + sa[todo, None] * ga[todo])
            ft = objective.value(trial)
            gain = ((trial - Xa[todo]) * ga[todo]).sum(axis=1)
            ok = ft >= va[todo] + 1e-4 * gain
            idx = np.flatnonzero(todo)
            good = idx[ok]
            Y[good] = trial[ok]
            fY[good] = ft[ok]
            accepted[good] = True
            bad = idx[~ok]
            if not bad.size:
                break
            sa[bad] *= 0.5
            if (sa[bad] < 1e-14).all():
                break
        # Rows that found no step, or that keep "accepting" improvements at
        # the float rounding floor, are numerically stationary: freeze them
        # (converged stays False; their value is machine-precision final).
        progress = fY - va > 1e-15 * (1.0 + np.abs(fY))
        strikes[active] = np.where(accepted & progress, 0, strikes[active] + 1)
        alive = accepted & (strikes[active] < 25)
        X[active] = np.where(accepted[:, None], Y, Xa)
        vals[active] = np.where(accepted, fY, va)
        step[active] = np.minimum(sa * 2.0, 4.0)
        active = active[alive]
    return X, vals, converged, iters


def _dirichlet_starts(n: int, restarts: int, seed: int) -> np.ndarray:
    """Dirichlet(1,...,1) starts (one rng per restart: seed + index), plus
    the uniform point and every vertex indicator."""
    starts = np.empty((restarts + 1 + n, n), dtype=np.float64)
    for i in range(restarts):
        rng = np.random.default_rng(seed + i)
        e = rng.exponential(size=n)
        starts[i] = e / e.sum()
    starts[restarts] = 1.0 / n
    starts[restarts + 1:] = np.eye(n)
    return starts


def maximize_lagrangian(
    graph: ThreeGraph,
    restarts: int = 200,
    tol: float = 1e-10,
    seed: int = 0,
    max_iter: int = 50_000,
) -> LagrangianEstimate:
    """Estimate lambda(H) by restarted ascent; certify a rational lower bound.

    The best float point is rounded to a rational simplex point (convergents
    with denominator <= 1e6, renormalized exactly) and p_H re-evaluated in
    exact arithmetic: that value is the certificate. numeric_max is the best
    value seen by any restart (including the rounded witness, which can top
    the float ascent by a hair), so numeric_max >= float(lower_bound) - 1e-9
    always holds.
    """
    if restarts < 1:
        raise DomainError("restarts must be >= 1")
    n = graph.vertex_count
    if n < 1:
        raise DimensionMismatch("graph needs at least one vertex")
    if not graph.edges:
        return LagrangianEstimate(Fraction(0), WeightVector.uniform(n), 0.0, restarts, True)
    objective = _PolyObjective(graph)
    starts = _dirichlet_starts(n, restarts, seed)
    X, vals, conv, _ = ascend_on_simplex(objective, starts, tol, max_iter)
    # among value-optimal rows (1e-12 slack) prefer one that actually met tol
    near = np.flatnonzero(vals >= vals.max() - 1e-12)
    conv_near = near[conv[near]]
    best = int(conv_near[0]) if conv_near.size else int(near[0])
    x_best, val_best = X[best].copy(), float(vals[best])
    # support shrinking: drop dust coordinates, renormalize, polish briefly
    shrunk = np.where(x_best < SUPPORT_EPS, 0.0, x_best)
    if shrunk.sum() > 0 and not np.array_equal(shrunk, x_best):
        shrunk = shrunk / shrunk.sum()
        Xp, vp, cp, _ = ascend_on_simplex(objective, shrunk[None, :], tol, 500)
        if float(vp[0]) >= val_best - 1e-12:
            x_best, val_best = Xp[0], float(vp[0])
            conv_best = bool(cp[0]) or bool(conv[best])
        else:
            conv_best = bool(conv[best])
    else:
        conv_best = bool(conv[best])
    witness, lower = _round_to_witness(graph, x_best)
    numeric_max = max(float(vals.max()), val_best, float(lower))
    return LagrangianEstimate(lower, witness, numeric_max, len(starts), conv_best)


_DENOMINATOR_LADDER = (2, 3, 4, 6, 8, 9, 12, 16, 24, 36, 60, 120, 1000, ROUND_DENOMINATOR)


def _round_to_witness(graph: ThreeGraph, x: np.ndarray) -> tuple[WeightVector, Fraction]:
    """Round a float simplex point to the rational witness with the best
    exact value, trying coarse denominators first (optima often sit at
    small rationals; a coarser convergent is still a convergent)."""
    best_w, best_v = None, None
    for den in _DENOMINATOR_LADDER:
        try:
            w = WeightVector.from_floats(x, den)
        except DomainError:
            continue
        v = evaluate_p(graph, w)
        if best_v is None or v > best_v:
            best_w, best_v = w, v
    return best_w, best_v


def witness_record(graph: ThreeGraph, estimate: LagrangianEstimate, seed: int) -> dict:
    """JSON-ready record of a Lagrangian lower-bound witness."""
    return {
        "graph_hash": graph_hash(graph),
        "weights": [str(w) for w in estimate.witness.weights],
        "lower_bound": str(estimate.lower_bound),
        "numeric_max": estimate.numeric_max,
        "restarts": estimate.restarts_used,
        "seed": seed,
    }


# ---------------------------------------------------------------------------
# exhaustive lattice oracle
# ---------------------------------------------------------------------------

@njit(cache=True)
def _eval_prefix(k, R, E0, EU, EV, EUV):  # pragma: no cover - numba
    c0 = np.int64(0)
    for i in range(E0.shape[0]):
        c0 += k[E0[i, 0]] * k[E0[i, 1]] * k[E0[i, 2]]
    cu = np.int64(0)
    for i in range(EU.shape[0]):
        cu += k[EU[i, 0]] * k[EU[i, 1]]
    cv = np.int64(0)
    for i in range(EV.shape[0]):
        cv += k[EV[i, 0]] * k[EV[i, 1]]
    cw = np.int64(0)
    for i in range(EUV.shape[0]):
        cw += k[EUV[i]]
    # N(a) = c0 + cu*a + cv*(R-a) + cw*a*(R-a) is concave in a: check the
    # endpoints and the two lattice points around the stationary point
    best = c0 + cv * R
    v = c0 + cu * R
    if v > best:
        best = v
    if cw > 0 and R > 0:
        a = (cu - cv + cw * R) // (2 * cw)
        for aa in (a, a + 1):
            if 0 <= aa <= R:
                v = c0 + cu * aa + cv * (R - aa) + cw * aa * (R - aa)
                if v > best:
                    best = v
    return best


@njit(cache=True, parallel=True)
def _grid_max_kernel(S, d, E0, EU, EV, EUV):  # pragma: no cover - numba
    per = np.zeros(S + 1, dtype=np.int64)
    for k0 in prange(S + 1):
        k = np.zeros(d, dtype=np.int64)
        k[0] = k0
        if d == 1:
            per[k0] = _eval_prefix(k, S - k0, E0, EU, EV, EUV)
            continue
        total = k0
        best = np.int64(0)
        while True:
            v = _eval_prefix(k, S - total, E0, EU, EV, EUV)
            if v > best:
                best = v
            i = d - 1
            while i >= 1:
                k[i] += 1
                total += 1
                if total <= S:
                    break
                total -= k[i]
                k[i] = 0
                i -= 1
            if i == 0:
                break
        per[k0] = best
    return per.max()


def _apply_thread_cap() -> None:
    cap = os.environ.get("HYPERJUMP_THREADS")
    if cap:
        try:
            set_num_threads(max(1, int(cap)))
        except ValueError:
            pass


def grid_oracle(graph: ThreeGraph, steps: int = 300, vertex_cap: int = GRID_VERTEX_CAP) -> float:
    """Exhaustive max of p_H over the lattice {k/steps : sum k = steps}.

    Exact integer arithmetic inside: maximizes N = sum k_i k_j k_k over
    lattice prefixes, reducing the last two coordinates analytically (N is
    a concave integer quadratic in how a fixed remainder splits between
    them). Validation oracle only - hence the vertex cap.
    """
    if steps < 1:
        raise DomainError("steps must be positive")
    n = graph.vertex_count
    if n > vertex_cap:
        raise CapExceeded(f"grid oracle capped at {vertex_cap} vertices (got {n})")
    if not graph.edges or n < 3:
        return 0.0
    u, v = n - 2, n - 1
    e0, eu, ev, euv = [], [], [], []
    for a, b, c in graph.edges:
        tri = (a, b, c)
        has_u, has_v = u in tri, v in tri
        rest = [w for w in tri if w != u and w != v]
        if has_u and has_v:
            euv.append(rest[0])
        elif has_u:
            eu.append(rest)
        elif has_v:
            ev.append(rest)
        else:
            e0.append(rest)
    E0 = np.array(e0, dtype=np.int64).reshape(-1, 3)
    EU = np.array(eu, dtype=np.int64).reshape(-1, 2)
    EV = np.array(ev, dtype=np.int64).reshape(-1, 2)
    EUV = np.array(euv, dtype=np.int64).reshape(-1)
    _apply_thread_cap()
    best = _grid_max_kernel(steps, n - 2, E0, EU, EV, EUV)
    return 6.0 * float(best) / float(steps) ** 3
