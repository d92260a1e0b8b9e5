import dataclasses
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hitfam.errors import InadmissibleError, InfeasibleError, InvalidPatternError, ShapeError
from hitfam.oracle import enumerate_admissible, is_d_hitting
from hitfam.patterns import (
    Pattern,
    conforms,
    cut_pieces,
    enumerate_patterns,
    parse_pattern,
    pattern_count_bound,
    pattern_family,
    pattern_of_tuple,
    schedule_for_pattern,
)
from hitfam.poset import hits, is_admissible, make_complete_tree, make_double_tree

T2 = make_complete_tree(2)
EXAMPLE = ("00", "01", "11")


def example_pattern():
    return pattern_of_tuple(T2, EXAMPLE)


class TestPattern:
    def test_example_extraction(self):
        p = example_pattern()
        assert p.tree_string() == "B(B(L,L),L)"
        assert p.parent == (None, 0, 1, 1, 0)
        assert p.sib == (None, 0, 0, 1, 1)
        assert p.heval == (0, 1, None, None, None)
        assert p.patsch == (0, 1, 2, 3, 4)
        assert p.serialize() == "d=3;h=2;tree=B(B(L,L),L);heval=0,1;patsch=0,1,2,3,4"

    def test_pair_closure(self):
        p = pattern_of_tuple(make_complete_tree(1), ("0", "1"))
        assert len(p.parent) == 3 == 2 * 2 - 1

    def test_round_trip_text(self):
        for p in enumerate_patterns(3, 2):
            assert parse_pattern(p.serialize()) == p

    @pytest.mark.parametrize("change, message", [
        ({"heval": (1, 1, None, None, None)}, "increase"),
        ({"heval": (0, 2, None, None, None)}, "heval"),
        ({"sib": (None, 1, 0, 1, 1)}, "sib"),
        ({"patsch": (1, 0, 2, 3, 4)}, "patsch"),
        ({"d": 2}, "outside"),
    ])
    def test_invariants_enforced(self, change, message):
        with pytest.raises(InvalidPatternError, match=message):
            dataclasses.replace(example_pattern(), **change)

    @pytest.mark.parametrize("line", ["", "d=3;h=2;tree=B(L;heval=0;patsch=0,1,2",
                                      "d=3;h=2;tree=B(L,L);heval=;patsch=0,1,2"])
    def test_bad_lines(self, line):
        with pytest.raises(InvalidPatternError):
            parse_pattern(line)

    def test_inadmissible(self):
        with pytest.raises(InadmissibleError):
            pattern_of_tuple(T2, ("00", "e", "1"))

    def test_needs_complete_tree(self):
        with pytest.raises(ShapeError):
            pattern_of_tuple(make_double_tree(1), ("L:0", "L:1"))


class TestEnumeration:
    @pytest.mark.parametrize("d, h, count", [(2, 1, 3), (2, 2, 6), (3, 1, 2), (3, 2, 29),
                                             (3, 3, 81), (4, 2, 150)])
    def test_counts_within_bound(self, d, h, count):
        found = enumerate_patterns(d, h)
        assert len(found) == count <= pattern_count_bound(d, h)
        assert len({p.serialize() for p in found}) == count

    def test_bound_values(self):
        assert pattern_count_bound(2, 1) == 128
        assert pattern_count_bound(3, 2) == 163840

    def test_budget_reports_bound(self):
        with pytest.raises(InfeasibleError, match="163840"):
            enumerate_patterns(3, 2, budget=5)

    def test_depth_one_rejected(self):
        with pytest.raises(InvalidPatternError):
            enumerate_patterns(1, 2)


class TestConformance:
    def test_round_trip(self):
        assert conforms(T2, EXAMPLE, example_pattern())

    def test_reversed_patsch(self):
        p = dataclasses.replace(example_pattern(), patsch=(0, 4, 1, 3, 2))
        assert not conforms(T2, EXAMPLE, p)

    def test_wrong_size(self):
        assert not conforms(T2, ("00", "01"), example_pattern())

    def test_wrong_layer(self):
        assert not conforms(make_complete_tree(3), ("000", "001", "11"),
                            dataclasses.replace(example_pattern(), h=3))

    @pytest.mark.parametrize("h", [1, 2, 3])
    def test_coverage_exhaustive(self, h):
        tree = make_complete_tree(h)
        known = {p.serialize(): p for p in enumerate_patterns(3, h)}
        for t in enumerate_admissible(tree, 3):
            p = pattern_of_tuple(tree, t)
            assert p.serialize() in known
            assert conforms(tree, t, known[p.serialize()])

    def test_coverage_sampled_depth_four(self):
        tree = make_complete_tree(3)
        known = {p.serialize() for p in enumerate_patterns(4, 3)}
        tuples = enumerate_admissible(tree, 4)
        for t in random.Random(0).sample(tuples, 300):
            assert pattern_of_tuple(tree, t).serialize() in known


class TestCutting:
    def test_example_hits(self):
        s = schedule_for_pattern(example_pattern())
        assert T2.is_schedule(s) and hits(s, EXAMPLE)

    def test_chain_pattern(self):
        # inner nodes at layers 0 and 1: both layers go first, then one
        # depth-first piece below each layer-2 event
        p = parse_pattern("d=3;h=3;tree=U(U(L));heval=0,1;patsch=0,1,2")
        s = schedule_for_pattern(p)
        assert s[:3] == ("e", "0", "1")
        assert s[3:6] == ("00", "000", "001")
        assert [x for x in s if len(x) == 2] == ["00", "01", "10", "11"]

    def test_height_mismatch(self):
        with pytest.raises(InvalidPatternError):
            schedule_for_pattern(example_pattern(), h=1)

    @pytest.mark.parametrize("d, h", [(2, 2), (3, 2), (3, 3), (4, 2)])
    def test_every_pattern_gives_a_schedule(self, d, h):
        tree = make_complete_tree(h)
        for p in enumerate_patterns(d, h):
            pieces = [piece for state, piece in cut_pieces(p)]
            flat = [x for piece in pieces for x in piece]
            assert sorted(flat) == sorted(tree.events)
            assert tree.is_schedule(flat)

    @pytest.mark.parametrize("d, h", [(3, 2), (3, 3), (4, 2)])
    def test_cut_state_invariant(self, d, h):
        for p in enumerate_patterns(d, h):
            for state, _ in cut_pieces(p):
                assert state.violations() == []

    @pytest.mark.parametrize("h", [2, 3])
    def test_schedule_hits_conforming_tuples(self, h):
        tree = make_complete_tree(h)
        scheds = {p.serialize(): schedule_for_pattern(p) for p in enumerate_patterns(3, h)}
        for t in enumerate_admissible(tree, 3):
            key = pattern_of_tuple(tree, t).serialize()
            assert hits(scheds[key], t)

    def test_every_conforming_pair_is_hit(self):
        for p in enumerate_patterns(3, 2):
            s = schedule_for_pattern(p)
            for t in enumerate_admissible(T2, 3):
                if conforms(T2, t, p):
                    assert hits(s, t)


class TestFamily:
    @pytest.mark.parametrize("d, h", [(2, 3), (3, 1), (3, 2), (3, 3), (4, 2)])
    def test_hitting(self, d, h):
        fam = pattern_family(d, h)
        assert len(fam) <= pattern_count_bound(d, h)
        assert len(set(fam.rows)) == len(fam)
        assert is_d_hitting(fam.poset, fam, d).is_hitting


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_round_trip_property(data):
    tree = make_complete_tree(3)
    d = data.draw(st.integers(2, 4))
    events = data.draw(st.permutations(tree.events))[:d]
    t = tuple(events)
    if not is_admissible(tree, t):
        return
    p = pattern_of_tuple(tree, t)
    assert isinstance(p, Pattern)
    assert len(p.parent) <= 2 * d - 1
    assert conforms(tree, t, p)
    assert hits(schedule_for_pattern(p), t)
