"""Triple-system constructions, relabeling, pair search, and pair files."""

import math
import re

import numpy as np
import pytest

from hyperjump.core import LabelledTripleSystem, codegree_profile, find_dense_configuration
from hyperjump.designs import (
    COGIRTH_CAP,
    SUPPORTED_ORDERS,
    SteinerTripleSystem,
    StsPair,
    build_internal_system,
    build_sts,
    cogirth_of,
    default_method,
    load_pair,
    relabel,
    save_pair,
    search_pair,
)
from hyperjump.errors import (
    DomainError,
    FormatError,
    NotABijection,
    UnsupportedOrder,
    WrongResidue,
)


def test_build_sts_all_supported_orders():
    for t in SUPPORTED_ORDERS:
        system = build_sts(t)
        assert system.t == t
        assert len(system.triples) == t * (t - 1) // 6
        assert system.construction_tag == default_method(t)


def test_build_sts_every_method():
    # validity is enforced by the constructor, so building is the check
    for t in (9, 15, 21, 27, 33):
        assert build_sts(t, "bose").construction_tag == "bose"
    for t in (7, 13, 19, 25, 31):
        assert build_sts(t, "skolem").construction_tag == "skolem"
    for t in (7, 13, 15, 19, 21, 25, 27, 31, 33):
        assert build_sts(t, "cyclic").construction_tag == "cyclic"


def test_build_sts_wrong_residue():
    with pytest.raises(WrongResidue, match="not 1 or 3 mod 6"):
        build_sts(8)
    with pytest.raises(WrongResidue):
        build_sts(13, "bose")
    with pytest.raises(WrongResidue):
        build_sts(9, "skolem")


def test_build_sts_unsupported_orders():
    with pytest.raises(UnsupportedOrder):
        build_sts(37)
    with pytest.raises(UnsupportedOrder):
        build_sts(3)
    with pytest.raises(UnsupportedOrder, match="no cyclic system of order 9"):
        build_sts(9, "cyclic")
    with pytest.raises(DomainError):
        build_sts(7, "netto")


def test_system_constructor_rejects_non_designs():
    fano = build_sts(7)
    with pytest.raises(DomainError, match="expected 7"):
        SteinerTripleSystem(7, fano.triples[:-1], "x")
    # swap one triple for a fresh one: pair coverage breaks
    tampered = fano.triples[:-1] + ((0, 1, 6),)
    with pytest.raises(DomainError):
        SteinerTripleSystem(7, tampered, "x")


def test_relabel_identity_and_inverse():
    fano = build_sts(7)
    assert relabel(fano, range(7)).triples == fano.triples
    perm = [3, 0, 6, 1, 5, 2, 4]
    inverse = [perm.index(i) for i in range(7)]
    back = relabel(relabel(fano, perm), inverse)
    assert back.triples == fano.triples


def test_relabel_preserves_validity():
    system = build_sts(13)
    rng = np.random.default_rng(5)
    for _ in range(10):
        image = relabel(system, rng.permutation(13))
        assert len(image.triples) == 26
        assert codegree_profile(image.graph()).max_codegree == 1


def test_relabel_rejects_non_bijections():
    fano = build_sts(7)
    with pytest.raises(NotABijection):
        relabel(fano, [0, 0, 2, 3, 4, 5, 6])
    with pytest.raises(NotABijection):
        relabel(fano, [0, 1, 2])
    with pytest.raises(NotABijection):
        relabel(fano, [1, 2, 3, 4, 5, 6, 7])


def test_identical_pair_has_cogirth_2():
    fano = build_sts(7)
    pair = StsPair(fano, fano, 2, False)
    assert cogirth_of(pair) == 2
    assert pair.common_triples() == fano.triples
    assert pair.union_graph().edge_count == 7


def test_cogirth_cap_and_validation():
    pair = search_pair(7, 3, max_attempts=500, seed=0)
    assert pair.edge_disjoint
    assert cogirth_of(pair, cap=3) == 3
    # edge-disjoint unions admit no 3 triples on 4 vertices, so 4 is free
    assert cogirth_of(pair, cap=4) == 4
    with pytest.raises(DomainError):
        cogirth_of(pair, cap=2)


def test_dense_four_set_bounds_cogirth():
    # three labelled triples on 4 vertices need three distinct labels,
    # which a two-system union never supplies; checked here directly
    system = LabelledTripleSystem(4, ((1, (0, 1, 2)), (2, (0, 1, 3)), (3, (0, 2, 3))))
    assert find_dense_configuration(system, 4) is not None


def test_stspair_flag_consistency():
    fano = build_sts(7)
    pair = search_pair(7, 3, max_attempts=500, seed=0)
    with pytest.raises(DomainError):
        StsPair(fano, fano, 3, True)
    with pytest.raises(DomainError):
        StsPair(pair.first, pair.second, 2, True)
    with pytest.raises(DomainError):
        StsPair(fano, fano, 1, False)
    with pytest.raises(DomainError):
        StsPair(fano, build_sts(9), 2, False)


def test_search_pair_finds_disjoint_pairs():
    for t in (7, 9, 13, 15):
        pair = search_pair(t, 3, max_attempts=2_000, seed=0)
        assert pair is not None and pair.edge_disjoint, f"t = {t}"
        assert pair.achieved_cogirth >= 3
        assert not pair.common_triples()
        union = pair.union_graph()
        assert union.edge_count == t * (t - 1) // 3


def test_search_pair_target_five_returns_best_found():
    # matching bowties across the two systems are abundant, so cogirth 5
    # is out of reach; the search must still hand back its best pair
    pair = search_pair(13, 5, max_attempts=40, seed=0)
    assert pair is not None
    assert pair.edge_disjoint
    assert pair.achieved_cogirth == 4


def test_search_pair_deterministic():
    a = search_pair(9, 3, max_attempts=300, seed=42)
    b = search_pair(9, 3, max_attempts=300, seed=42)
    assert a.first.triples == b.first.triples
    assert a.second.triples == b.second.triples
    assert a.achieved_cogirth == b.achieved_cogirth


def test_search_pair_validation():
    with pytest.raises(UnsupportedOrder):
        search_pair(11, 3)
    with pytest.raises(DomainError):
        search_pair(7, 2)
    assert search_pair(7, 3, max_attempts=0) is None


def test_build_internal_system_reports():
    for t in (9, 13):
        union, report = build_internal_system(t, 4, max_attempts=300, seed=0)
        assert report.edge_disjoint
        assert union.edge_count == t * (t - 1) // 3
        assert report.union_edge_count == report.expected_edge_count == union.edge_count
        assert report.max_codegree == 2
        assert report.required_cogirth == 5
        assert report.achieved_cogirth == 4
        assert report.exceeds_quarter_bound
        assert report.subset_policy == "exhaustive"
        assert report.subsets_checked == math.comb(t, 4)
        assert report.failures == []
        assert report.sparsity_ok


def test_build_internal_system_codegrees_exactly_two():
    union, _ = build_internal_system(9, 4, max_attempts=300, seed=0)
    profile = codegree_profile(union)
    assert profile.max_codegree == 2
    assert len(profile.pair_degrees) == math.comb(9, 2)
    assert set(profile.pair_degrees.values()) == {2}


def test_build_internal_system_validation():
    with pytest.raises(DomainError):
        build_internal_system(9, 2)
    with pytest.raises(UnsupportedOrder):
        build_internal_system(10, 4)


def test_internal_report_json_fields():
    _, report = build_internal_system(9, 4, max_attempts=300, seed=3)
    data = report.to_json()
    assert data["inputs"] == {"t": 9, "m": 4}
    assert data["seed"] == 3
    assert data["subset_policy"] == "exhaustive"
    assert data["violations"] == []


def test_pair_file_roundtrip(tmp_path):
    pair = search_pair(7, 3, max_attempts=500, seed=0)
    path = tmp_path / "pair.3g2"
    save_pair(pair, path)
    text = path.read_text()
    assert re.search(r"(?m)^%$", text)
    assert text.count("# sts t=7") == 2
    loaded = load_pair(path)
    assert loaded.first.triples == pair.first.triples
    assert loaded.second.triples == pair.second.triples
    # the search scored under cap = target; the loader rescored at the full cap
    assert loaded.achieved_cogirth == cogirth_of(pair)
    assert loaded.edge_disjoint


def test_load_pair_rescores_from_disk(tmp_path):
    # an identical pair written by hand must come back with cogirth 2
    fano = build_sts(7)
    path = tmp_path / "same.3g2"
    save_pair(StsPair(fano, fano, 2, False), path)
    loaded = load_pair(path)
    assert loaded.achieved_cogirth == 2
    assert not loaded.edge_disjoint


def test_load_pair_format_errors(tmp_path):
    pair = search_pair(7, 3, max_attempts=500, seed=0)
    path = tmp_path / "pair.3g2"
    save_pair(pair, path)
    text = path.read_text()

    one_block = tmp_path / "one.3g2"
    one_block.write_text(text.replace("%\n", ""))
    with pytest.raises(FormatError, match="two blocks"):
        load_pair(one_block)

    headerless = tmp_path / "bare.3g2"
    headerless.write_text(re.sub(r"(?m)^# sts.*\n", "", text, count=1))
    with pytest.raises(FormatError, match="header"):
        load_pair(headerless)

    mismatched = tmp_path / "bad_t.3g2"
    mismatched.write_text(text.replace("# sts t=7", "# sts t=9", 1))
    with pytest.raises(FormatError, match="vertex count"):
        load_pair(mismatched)


def test_cogirth_cap_constant_sane():
    assert COGIRTH_CAP == 8
    assert all(t % 6 in (1, 3) for t in SUPPORTED_ORDERS)
