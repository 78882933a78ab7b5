import random

import pytest

from scramblegraph.errors import InternalConsistencyError
from scramblegraph.relations import (
    Interval,
    MacContigView,
    RelationConfig,
    RelationTriple,
    detect_containment,
    detect_interleave,
    detect_overlap,
    ies_intervals,
    relation_counts,
    relation_triple,
)

CFG = RelationConfig()


def view(mac, *spans):
    return MacContigView.from_intervals(mac, [Interval(a, b) for a, b in spans])


class TestIesIntervals:
    def test_single_mds_has_no_gaps(self):
        assert ies_intervals(view("g", (100, 200))) == ()

    def test_direct_gap(self):
        assert ies_intervals(view("g", (100, 200), (400, 500))) == (Interval(201, 399),)

    def test_sorted_internally(self):
        unsorted = MacContigView("g", (Interval(400, 500), Interval(100, 200)), ())
        assert ies_intervals(unsorted) == (Interval(201, 399),)

    def test_adjacent_intervals_rejected(self):
        with pytest.raises(InternalConsistencyError):
            view("g", (100, 200), (201, 300))

    def test_count_matches_mds_count(self):
        v = view("g", (1, 10), (20, 30), (40, 50), (70, 90))
        assert len(v.ies_intervals) == len(v.mds_intervals) - 1


class TestOverlap:
    def test_twenty_shared_bases(self):
        assert detect_overlap(view("a", (100, 200)), view("b", (181, 260)), CFG)

    def test_nineteen_shared_bases(self):
        assert not detect_overlap(view("a", (100, 200)), view("b", (182, 260)), CFG)

    def test_clean_containment_excluded(self):
        assert not detect_overlap(view("a", (100, 200)), view("b", (120, 180)), CFG)

    def test_submargin_containment_counts_as_overlap(self):
        # inner interval with a 4 bp margin is not a clean containment
        assert detect_overlap(view("a", (100, 200)), view("b", (104, 195)), CFG)
        assert not detect_containment(view("b", (104, 195)), view("a", (100, 200)), CFG)

    def test_symmetry(self):
        rng = random.Random(3)
        for _ in range(300):
            g1 = _random_view(rng, "a")
            g2 = _random_view(rng, "b")
            assert detect_overlap(g1, g2, CFG) == detect_overlap(g2, g1, CFG)

    def test_monotone_in_threshold(self):
        rng = random.Random(4)
        for _ in range(200):
            g1, g2 = _random_view(rng, "a"), _random_view(rng, "b")
            lo = RelationConfig(overlap_min_bp=rng.randint(0, 30))
            hi = RelationConfig(overlap_min_bp=lo.overlap_min_bp + rng.randint(1, 30))
            if detect_overlap(g1, g2, hi):
                assert detect_overlap(g1, g2, lo)


class TestContainment:
    def test_exact_margins(self):
        assert detect_containment(view("a", (105, 195)), view("b", (100, 200)), CFG)

    def test_left_margin_short(self):
        assert not detect_containment(view("a", (104, 195)), view("b", (100, 200)), CFG)

    def test_identical_intervals(self):
        assert not detect_containment(view("a", (100, 200)), view("b", (100, 200)), CFG)

    def test_direction(self):
        inner, outer = view("a", (105, 195)), view("b", (100, 200))
        assert detect_containment(inner, outer, CFG)
        assert not detect_containment(outer, inner, CFG)

    def test_exclusive_with_overlap_on_same_pair(self):
        rng = random.Random(9)
        for _ in range(300):
            g1, g2 = _random_view(rng, "a", max_mds=1), _random_view(rng, "b", max_mds=1)
            assert not (detect_overlap(g1, g2, CFG) and detect_containment(g1, g2, CFG))
            assert not (detect_overlap(g1, g2, CFG) and detect_containment(g2, g1, CFG))


class TestInterleave:
    G1 = view("a", (100, 200), (400, 500))

    def test_inside_gap(self):
        assert detect_interleave(self.G1, view("b", (250, 300)), CFG)

    def test_five_bases_into_flank(self):
        assert detect_interleave(self.G1, view("b", (196, 300)), CFG)

    def test_eleven_bases_into_flank(self):
        assert not detect_interleave(self.G1, view("b", (190, 300)), CFG)

    def test_single_mds_contig_never_interleaves(self):
        assert not detect_interleave(view("a", (100, 200)), view("b", (150, 160)), CFG)

    def test_outside_all_gaps(self):
        assert not detect_interleave(self.G1, view("b", (600, 700)), CFG)

    def test_translation_invariance(self):
        rng = random.Random(17)
        for _ in range(200):
            g1, g2 = _random_view(rng, "a"), _random_view(rng, "b")
            shift = rng.randint(1, 10_000)
            s1 = view("a", *[(i.start + shift, i.end + shift) for i in g1.mds_intervals])
            s2 = view("b", *[(i.start + shift, i.end + shift) for i in g2.mds_intervals])
            assert detect_interleave(g1, g2, CFG) == detect_interleave(s1, s2, CFG)

    def test_monotone_in_slack(self):
        rng = random.Random(21)
        for _ in range(200):
            g1, g2 = _random_view(rng, "a"), _random_view(rng, "b")
            lo = RelationConfig(interleave_slack_bp=rng.randint(0, 10))
            hi = RelationConfig(interleave_slack_bp=lo.interleave_slack_bp + rng.randint(1, 10))
            if detect_interleave(g1, g2, lo):
                assert detect_interleave(g1, g2, hi)


class TestRelationTriple:
    def test_disjoint_contigs(self):
        assert relation_triple(view("a", (1, 50)), view("b", (500, 600)), CFG) == (0, 0, 0)

    def test_triangle_locus_pairs(self):
        purple_like = view("a", (1000, 1500), (3000, 3500))
        black_like = view("b", (1480, 2000), (2600, 2900))
        cyan_like = view("c", (2100, 2400))
        assert relation_triple(purple_like, black_like, CFG) == RelationTriple(1, 0, 1)
        assert relation_triple(black_like, purple_like, CFG) == RelationTriple(1, 0, 0)
        assert relation_triple(purple_like, cyan_like, CFG) == RelationTriple(0, 0, 1)
        assert relation_triple(black_like, cyan_like, CFG) == RelationTriple(0, 0, 1)
        assert relation_triple(cyan_like, purple_like, CFG) == RelationTriple(0, 0, 0)
        assert relation_triple(cyan_like, black_like, CFG) == RelationTriple(0, 0, 0)

    def test_counts_match_detections(self):
        rng = random.Random(31)
        for _ in range(200):
            g1, g2 = _random_view(rng, "a"), _random_view(rng, "b")
            triple = relation_triple(g1, g2, CFG)
            counts = relation_counts(g1, g2, CFG)
            assert tuple(int(c > 0) for c in counts) == triple


def _random_view(rng, mac, max_mds=4):
    count = rng.randint(1, max_mds)
    spans = []
    cursor = rng.randint(1, 200)
    for _ in range(count):
        start = cursor + rng.randint(2, 120)
        end = start + rng.randint(0, 150)
        spans.append((start, end))
        cursor = end
    return view(mac, *spans)
