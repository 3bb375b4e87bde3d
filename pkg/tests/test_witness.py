"""Witness pipeline: lower-bound leg, subgraph leg, certificate files."""

import json
from fractions import Fraction

import pytest

from hyperjump.cone import build_cone
from hyperjump.core import ThreeGraph, graph_hash
from hyperjump.designs import build_internal_system
from hyperjump.errors import (
    DimensionMismatch,
    DomainError,
    FormatError,
    UnsupportedOrder,
    WeightMismatch,
)
from hyperjump.witness import (
    TARGET,
    WitnessCertificate,
    assemble_witness,
    build_witness,
    certify_lower_bound,
    certify_small_subgraphs,
    emit_certificate,
    load_certificate,
    reverify_certificate,
)

EXPECTED = {
    9: Fraction(992, 2187),
    13: Fraction(688, 1521),
    15: Fraction(2744, 6075),
}


@pytest.fixture(scope="module")
def pipeline_results():
    return {
        t: assemble_witness(t, 4, seed=0, max_attempts=300, spot_checks=1)
        for t in (9, 13, 15)
    }


def test_pipeline_produces_valid_certificates(pipeline_results):
    for t, (cg, cert) in pipeline_results.items():
        assert cert.status == "VALID", f"t = {t}"
        assert cert.lower_bound == EXPECTED[t]
        assert cert.lower_bound > TARGET
        assert cert.all_certified
        assert cert.subgraph_policy == "exhaustive"
        assert cert.weighting == {"apex": "1/3", "part": f"2/{3 * t}"}
        assert cg.graph.vertex_count == t + 1
        assert cg.graph.edge_count == t * (t - 1) // 3 + t * (t - 1) // 2


def test_pipeline_margin_at_thirteen(pipeline_results):
    _, cert = pipeline_results[13]
    assert cert.lower_bound - TARGET == Fraction(4, 507)


def test_lower_bound_closed_form_leg(pipeline_results):
    cg, _ = pipeline_results[9]
    result = certify_lower_bound(cg, 9, restarts=4, seed=0)
    assert result.closed_form
    assert result.value == EXPECTED[9]
    assert result.apex_weight == Fraction(1, 3)
    assert result.part_weight == Fraction(2, 27)
    assert result.best >= result.value
    assert sum(result.ascent_witness.weights) == 1


def test_small_t_refused():
    with pytest.raises(UnsupportedOrder):
        build_witness(3)
    with pytest.raises(UnsupportedOrder):
        assemble_witness(4)


def test_lower_bound_dimension_guard(pipeline_results):
    cg, _ = pipeline_results[9]
    with pytest.raises(DimensionMismatch):
        certify_lower_bound(cg, 13)


def test_lower_bound_fallback_without_full_union():
    union, _ = build_internal_system(7, 4, max_attempts=300, seed=0)
    trimmed = ThreeGraph(7, union.edges[:-1])
    result = certify_lower_bound(build_cone(trimmed), 7, restarts=4, seed=0)
    assert not result.closed_form
    assert result.value == Fraction(4, 9) + Fraction(4, 1029)


def test_lower_bound_refuses_small_systems():
    union, _ = build_internal_system(7, 4, max_attempts=300, seed=0)
    small = ThreeGraph(7, union.edges[:-2])  # 12 edges, 4*12 <= 49
    with pytest.raises(WeightMismatch, match="t\\^2/4"):
        certify_lower_bound(build_cone(small), 7)


def test_subgraph_leg_exhaustive(pipeline_results):
    cg, _ = pipeline_results[9]
    certification = certify_small_subgraphs(cg, cg.base, 4, spot_checks=2)
    assert certification.policy == "exhaustive"
    assert certification.checked == 126
    assert certification.all_certified
    assert certification.spot_checked == 2
    assert certification.worst_spot_value <= 4 / 9 + 1e-6


def test_subgraph_leg_catches_dense_sets():
    bad = ThreeGraph(5, ((0, 1, 2), (0, 1, 3), (0, 2, 3)))
    certification = certify_small_subgraphs(build_cone(bad), bad, 4)
    assert not certification.all_certified
    assert {"subset": [0, 1, 2, 3], "reason": "not sparse"} in certification.failures


def test_subgraph_leg_catches_codegree_overflow():
    bad = ThreeGraph(6, ((0, 1, 2), (0, 1, 3), (0, 1, 4)))
    certification = certify_small_subgraphs(build_cone(bad), bad, 5)
    reasons = {f["reason"] for f in certification.failures}
    assert "codegree 3" in reasons


def test_failed_leg_invalidates_certificate():
    bad = ThreeGraph(5, ((0, 1, 2), (0, 1, 3), (0, 2, 3)))
    cert = WitnessCertificate(t=5, m=4, graph_hash=graph_hash(bad))
    cert.lower_bound = Fraction(1, 2)
    certification = certify_small_subgraphs(build_cone(bad), bad, 4)
    cert.apply_subgraphs(certification)
    assert cert.finalize() == "INVALID"


def test_subgraph_leg_sampled_policy(pipeline_results):
    cg, _ = pipeline_results[13]
    certification = certify_small_subgraphs(
        cg, cg.base, 4, policy="sampled", sample_count=200, seed=1
    )
    assert certification.policy == "sampled(count=200, seed=1)"
    assert certification.checked == 200
    assert certification.all_certified


def test_subgraph_leg_policy_validation():
    wide = ThreeGraph(33, ())
    with pytest.raises(DomainError, match="exhaustive limit"):
        certify_small_subgraphs(build_cone(wide), wide, 6, policy="exhaustive")
    with pytest.raises(DomainError):
        certify_small_subgraphs(build_cone(wide), wide, 6, policy="census")
    with pytest.raises(DomainError):
        certify_small_subgraphs(build_cone(wide), wide, 2)


def test_incomplete_draft_refuses_export():
    draft = WitnessCertificate(t=9, m=4)
    assert draft.finalize() == "INVALID"
    with pytest.raises(DomainError):
        draft.to_content()


def test_certificate_roundtrip(pipeline_results, tmp_path):
    _, cert = pipeline_results[9]
    path = tmp_path / "t9.json"
    envelope = emit_certificate(cert, path)
    loaded, raw = load_certificate(path)
    assert loaded == cert
    assert raw["content_hash"] == envelope["content_hash"]
    report = reverify_certificate(path)
    assert report.hash_ok and report.arithmetic_ok and report.deep_ok is None
    assert report.ok


def test_emit_is_stable(pipeline_results, tmp_path):
    _, cert = pipeline_results[13]
    e1 = emit_certificate(cert, tmp_path / "a.json")
    e2 = emit_certificate(cert, tmp_path / "b.json")
    assert e1["content_hash"] == e2["content_hash"]
    assert e1["content"] == e2["content"]


def test_tampered_certificate_detected(pipeline_results, tmp_path):
    _, cert = pipeline_results[9]
    path = tmp_path / "t9.json"
    emit_certificate(cert, path)
    envelope = json.loads(path.read_text())
    envelope["content"]["lower_bound"] = "5/9"
    path.write_text(json.dumps(envelope))
    report = reverify_certificate(path)
    assert not report.hash_ok
    assert not report.ok


def test_inconsistent_claim_detected(tmp_path):
    # hash intact, but the stored numbers cannot support the VALID stamp
    cert = WitnessCertificate(
        t=9,
        m=4,
        graph_hash="0" * 64,
        lower_bound=Fraction(1, 9),
        subgraph_policy="exhaustive",
        subgraphs_checked=126,
        all_certified=True,
        status="VALID",
    )
    path = tmp_path / "bogus.json"
    emit_certificate(cert, path)
    report = reverify_certificate(path)
    assert report.hash_ok
    assert not report.arithmetic_ok
    assert not report.ok


def test_certificate_format_errors(tmp_path):
    bad_json = tmp_path / "broken.json"
    bad_json.write_text("{not json")
    with pytest.raises(FormatError):
        load_certificate(bad_json)

    no_hash = tmp_path / "nohash.json"
    no_hash.write_text(json.dumps({"content": {}}))
    with pytest.raises(FormatError, match="content_hash"):
        load_certificate(no_hash)

    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"content": {"version": "1"}, "content_hash": "x"}))
    with pytest.raises(FormatError, match="missing fields"):
        load_certificate(missing)


def test_deep_reverify_from_seeds(tmp_path):
    _, cert = assemble_witness(9, 4, seed=0, spot_checks=0)
    path = tmp_path / "deep.json"
    emit_certificate(cert, path)
    report = reverify_certificate(path, deep=True)
    assert report.deep_ok
    assert report.ok
