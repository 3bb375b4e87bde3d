"""
Searching for edge-disjoint Steiner triple system pairs
=======================================================

Two triple systems on the same points whose unions stay locally thin are
the combinatorial core of every witness this package emits. This script
builds systems, relabels one at random until the pair is edge-disjoint,
and inspects how thin the union really is.
"""

from hyperjump import (
    build_internal_system,
    build_sts,
    codegree_profile,
    cogirth_of,
    relabel,
    search_pair,
)

# Classic constructions at small orders. Validation runs on construction:
# every vertex pair must be covered exactly once.
fano = build_sts(7)
print("order 7 :", len(fano.triples), "triples via", fano.construction_tag)
print("order 9 :", len(build_sts(9).triples), "triples via bose")
print("order 13:", len(build_sts(13, "cyclic").triples), "triples via cyclic")

# Relabeling preserves the design property; a pair of relabeled copies is
# scored by its cogirth: the largest g below the cap such that no i
# labelled triples span i+1 or fewer vertices for any i < g.
shifted = relabel(fano, [(v + 1) % 7 for v in range(7)])
print("\nshift by 1 shares",
      len(set(fano.triples) & set(shifted.triples)), "triples with the original")

# The searcher relabels a structurally different second system until the
# pair is edge-disjoint (cogirth >= 3 -- and 4 comes for free after that).
for t in (7, 9, 13, 15):
    pair = search_pair(t, target_cogirth=3, max_attempts=2_000, seed=0)
    union = pair.union_graph()
    print(f"t={t:>2}: disjoint={pair.edge_disjoint}"
          f"  cogirth(cap 8)={cogirth_of(pair)}"
          f"  union edges={union.edge_count} (= t(t-1)/3)")

# Every pair of points now lies in exactly two triples of the union --
# one from each side.
pair = search_pair(13, 3, max_attempts=2_000, seed=0)
profile = codegree_profile(pair.union_graph())
print("\nt=13 union codegrees:", sorted(set(profile.pair_degrees.values())))

# The full builder also runs the verification that actually matters
# downstream: every 4-vertex subset of the union must induce at most 2
# triples. Cogirth 5 is out of reach (matching bowties across the two
# systems are everywhere), and that is fine -- the direct check decides.
union, report = build_internal_system(13, 4, max_attempts=2_000, seed=0)
print(f"t=13, m=4: cogirth wanted {report.required_cogirth},"
      f" achieved {report.achieved_cogirth};"
      f" direct check over {report.subsets_checked} subsets ->"
      f" {'clean' if report.sparsity_ok else report.failures}")
