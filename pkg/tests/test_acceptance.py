"""Acceptance sweep: the headline guarantees, each at its stated tolerance.

Every test prints one `criterion N: PASS/FAIL` line (visible under -s)
and enforces its runtime budget; together they are the contract the rest
of the suite refines.
"""

import json
import math
import time
from contextlib import contextmanager
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from hyperjump.cli import main
from hyperjump.cone import (
    RHO0,
    S_THRESHOLD,
    algebra_identities,
    check_one_over_27,
    check_tau_threshold,
    falsify_q_tau,
    g_poly,
    inequality_sweep,
    tau,
)
from hyperjump.core import ThreeGraph, check_sparse, codegree_profile
from hyperjump.designs import SUPPORTED_ORDERS, build_sts, search_pair
from hyperjump.lagrangian import grid_oracle, maximize_lagrangian
from hyperjump.smallgraphs import enumerate_up_to

TRIPLE = ThreeGraph(3, ((0, 1, 2),))
SHARE_PAIR = ThreeGraph(4, ((0, 1, 2), (0, 1, 3)))
K4 = ThreeGraph(4, ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)))


@contextmanager
def criterion(number: int, budget_seconds: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"criterion {number}: FAIL")
        raise
    elapsed = time.perf_counter() - start
    if elapsed >= budget_seconds:
        print(f"criterion {number}: FAIL (took {elapsed:.1f}s, "
              f"budget {budget_seconds:.0f}s)")
        pytest.fail(f"criterion {number} exceeded its runtime budget")
    print(f"criterion {number}: PASS ({elapsed:.1f}s)")


def test_criterion_01_witness_lower_bounds(capsys):
    with criterion(1, 30.0):
        for t in (9, 13, 15):
            start = time.perf_counter()
            code = main(["verify", "--t", str(t), "--seed", "0"])
            elapsed = time.perf_counter() - start
            out = capsys.readouterr().out
            assert code == 0
            content = json.loads(out.rsplit("--- report ---", 1)[1])
            closed = Fraction(4, 9) + Fraction(4, 27 * t) - Fraction(16, 27 * t * t)
            assert Fraction(content["lower_bound"]) == closed
            assert Fraction(content["lower_bound"]) > Fraction(4, 9)
            assert content["status"] == "VALID"
            assert content["policy"] == "exhaustive"
            assert content["subsets_checked"] == math.comb(t, 4)
            assert elapsed < 10.0, f"t = {t} took {elapsed:.1f}s"


def test_criterion_02_tau_boundary_values():
    with criterion(2, 5.0):
        rising = (1 - 5 / 9) * (1 - math.sqrt(1 - 5 / 9)) / 2
        assert abs(rising - 2 / 27) < 1e-12
        assert abs(tau(5 / 9) - 2 / 27) < 1e-12
        assert tau(Fraction(5, 9)) == Fraction(2, 27)
        assert abs(RHO0 - (5 - 2 * math.sqrt(3)) / 9) < 1e-15
        assert abs(tau(RHO0) - 1 / 27) < 1e-12


def test_criterion_03_tau_threshold_sweep():
    with criterion(3, 60.0):
        report = check_tau_threshold(10_000, seed=0, grid=10_000)
        assert report.ok
        assert report.violations == []
        assert report.worst_phi_margin > 0       # max Phi stayed below 4/9 + 1e-10
        assert report.worst_apex_gap <= 1e-8


def test_criterion_04_polynomial_identity():
    with criterion(4, 5.0):
        rng = np.random.default_rng(0)
        for _ in range(100):
            den = int(rng.integers(2, 10**9))
            num = int(rng.integers(1, den))
            report = algebra_identities(Fraction(num, den))
            assert report.identity_holds    # exact rational equality
        expected = (58 - 33 * math.sqrt(3)) / 27
        assert abs(g_poly(S_THRESHOLD) - expected) < 1e-12


def test_criterion_05_inequality_impossibility_sweep():
    with criterion(5, 30.0):
        report = inequality_sweep(10_000, 1_000)
        assert report.violations == 0
        assert report.worst_margin > 0


def test_criterion_06_one_over_27_at_desk_scale():
    with criterion(6, 300.0):
        sparse_classes = list(enumerate_up_to(
            6, predicate=lambda g: check_sparse(g, "brute").is_sparse
        ))
        assert len(sparse_classes) == 23
        for graph in sparse_classes:
            report = check_one_over_27(graph, restarts=60, seed=0)
            assert report.max_q <= 1 / 27 + 1e-9
        for graph in (TRIPLE, SHARE_PAIR):
            report = check_one_over_27(graph, restarts=60, seed=0)
            assert abs(report.max_q - 1 / 27) < 1e-6


def test_criterion_07_falsification_suite():
    with criterion(7, 600.0):
        def hypotheses(g):
            return (check_sparse(g, "exact").is_sparse
                    and codegree_profile(g).max_codegree <= 2)

        found_none = True
        for graph in enumerate_up_to(7, predicate=hypotheses):
            report = falsify_q_tau(graph, restarts=200, seed=0)
            found_none = found_none and not report.found
        assert found_none

        report = falsify_q_tau(K4, restarts=200, seed=0)
        assert report.found
        assert report.hypotheses_violated
        assert report.counterexample["q"] == "1/16"
        assert report.counterexample["rho"] == "1/4"
        assert Fraction(1, 16) > Fraction(tau(Fraction(1, 4)))


def test_criterion_08_solver_vs_grid_oracle():
    with criterion(8, 120.0):
        for graph in enumerate_up_to(5, include_edgeless=True):
            oracle = grid_oracle(graph, 300)
            estimate = maximize_lagrangian(graph, restarts=48, seed=0)
            assert abs(estimate.numeric_max - oracle) < 2e-3, graph.edges
        lam_triple = maximize_lagrangian(TRIPLE, restarts=48, seed=0).numeric_max
        lam_k4 = maximize_lagrangian(K4, restarts=48, seed=0).numeric_max
        assert abs(lam_triple - 2 / 9) < 1e-6
        assert abs(lam_k4 - 3 / 8) < 1e-6


def test_criterion_09_design_constructions():
    with criterion(9, 120.0):
        for t in SUPPORTED_ORDERS:
            build_sts(t)  # pair coverage is checked exhaustively on build
        for t in (7, 9, 13, 15):
            pair = search_pair(t, 3, max_attempts=10_000, seed=0)
            assert pair is not None and pair.edge_disjoint
            assert pair.achieved_cogirth >= 3
            union = pair.union_graph()
            assert union.edge_count == t * (t - 1) // 3
            profile = codegree_profile(union)
            assert len(profile.pair_degrees) == math.comb(t, 2)
            assert set(profile.pair_degrees.values()) == {2}


def test_criterion_10_sparsity_oracle_equivalence():
    with criterion(10, 120.0):
        for graph in enumerate_up_to(5, include_edgeless=True):
            assert (check_sparse(graph, "exact").is_sparse
                    == check_sparse(graph, "brute").is_sparse)
        rng = np.random.default_rng(0)
        for _ in range(10_000):
            n = int(rng.integers(3, 9))
            pool = list(combinations(range(n), 3))
            keep = rng.random(len(pool)) < float(rng.uniform(0.05, 0.6))
            graph = ThreeGraph(n, tuple(tr for tr, k in zip(pool, keep) if k))
            assert (check_sparse(graph, "exact").is_sparse
                    == check_sparse(graph, "brute").is_sparse)
