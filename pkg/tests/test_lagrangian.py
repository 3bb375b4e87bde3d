"""Exact evaluation, simplex ascent, rational witnesses, grid oracle."""

from fractions import Fraction

import numpy as np
import pytest

from hyperjump.core import ThreeGraph
from hyperjump.errors import CapExceeded, DimensionMismatch, DomainError
from hyperjump.lagrangian import (
    WeightVector,
    blowup_density,
    evaluate_p,
    grid_oracle,
    maximize_lagrangian,
    project_rows_to_simplex,
    witness_record,
)

TRIPLE = ThreeGraph(3, ((0, 1, 2),))
SHARE_PAIR = ThreeGraph(4, ((0, 1, 2), (0, 1, 3)))
K4 = ThreeGraph(4, ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)))


def test_weight_vector_validation():
    w = WeightVector.uniform(3)
    assert sum(w.weights) == 1
    with pytest.raises(DomainError):
        WeightVector((Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(DomainError):
        WeightVector((Fraction(3, 2), Fraction(-1, 2)))


def test_weight_vector_from_floats_renormalizes():
    w = WeightVector.from_floats([0.3333333, 0.3333333, 0.3333334])
    assert sum(w.weights) == 1
    assert all(x >= 0 for x in w.weights)


def test_evaluate_p_exact_values():
    assert evaluate_p(TRIPLE, WeightVector.uniform(3)) == Fraction(2, 9)
    assert evaluate_p(K4, WeightVector.uniform(4)) == Fraction(3, 8)
    skew = WeightVector((Fraction(1, 2), Fraction(1, 2), Fraction(0), Fraction(0)))
    assert evaluate_p(K4, skew) == 0
    with pytest.raises(DimensionMismatch):
        evaluate_p(TRIPLE, WeightVector.uniform(4))


def test_blowup_density_approaches_lagrangian():
    # balanced blow-ups of a single triple decrease toward 2/9
    prev = Fraction(2)
    for size in (1, 2, 4, 8, 16):
        dens = blowup_density(TRIPLE, (size, size, size))
        assert Fraction(2, 9) < dens < prev
        prev = dens
    assert blowup_density(TRIPLE, (16, 16, 16)) < Fraction(2, 9) + Fraction(1, 50)


def test_projection_lands_on_simplex():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(64, 7)) * 3.0
    P = project_rows_to_simplex(X)
    assert np.all(P >= -1e-15)
    assert np.allclose(P.sum(axis=1), 1.0, atol=1e-12)
    # points already on the simplex are fixed
    S = np.abs(rng.normal(size=(16, 5)))
    S /= S.sum(axis=1, keepdims=True)
    assert np.allclose(project_rows_to_simplex(S), S, atol=1e-12)


def test_maximize_single_triple():
    est = maximize_lagrangian(TRIPLE, restarts=40, seed=0)
    assert est.lower_bound == Fraction(2, 9)
    assert abs(est.numeric_max - 2 / 9) < 1e-9
    assert est.converged


def test_maximize_k4():
    est = maximize_lagrangian(K4, restarts=40, seed=0)
    assert est.lower_bound == Fraction(3, 8)
    assert abs(est.numeric_max - 3 / 8) < 1e-9


def test_maximize_share_pair_hits_ridge_value():
    est = maximize_lagrangian(SHARE_PAIR, restarts=40, seed=0)
    assert est.lower_bound == Fraction(2, 9)


def test_maximize_edgeless():
    est = maximize_lagrangian(ThreeGraph(5, ()), restarts=4, seed=0)
    assert est.lower_bound == 0
    assert est.numeric_max == 0.0
    assert est.converged


def test_maximize_respects_isolated_vertices():
    padded = ThreeGraph(6, ((0, 1, 2),))
    est = maximize_lagrangian(padded, restarts=40, seed=1)
    assert est.lower_bound == Fraction(2, 9)


def test_witness_record_fields():
    est = maximize_lagrangian(TRIPLE, restarts=10, seed=3)
    rec = witness_record(TRIPLE, est, seed=3)
    assert rec["lower_bound"] == "2/9"
    assert rec["seed"] == 3
    assert len(rec["weights"]) == 3
    assert rec["graph_hash"]


def test_grid_oracle_known_values():
    assert abs(grid_oracle(TRIPLE, 300) - 2 / 9) < 2e-3
    assert grid_oracle(K4, 300) == pytest.approx(3 / 8, abs=2e-3)
    # steps divisible by 3 nail the uniform point exactly
    assert grid_oracle(TRIPLE, 300) == pytest.approx(2 / 9, abs=1e-12)


def test_grid_oracle_caps_and_trivia():
    with pytest.raises(CapExceeded):
        grid_oracle(ThreeGraph(7, ((0, 1, 2),)), 60)
    assert grid_oracle(ThreeGraph(4, ()), 60) == 0.0


def test_determinism_same_seed():
    a = maximize_lagrangian(SHARE_PAIR, restarts=25, seed=9)
    b = maximize_lagrangian(SHARE_PAIR, restarts=25, seed=9)
    assert a.lower_bound == b.lower_bound
    assert a.numeric_max == b.numeric_max
