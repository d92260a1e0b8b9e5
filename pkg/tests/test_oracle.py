import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from hitfam.basic import dfs_family, leftdfs
from hitfam.errors import InadmissibleError, InfeasibleError, InvalidDepthError, InvalidFamilyError
from hitfam.oracle import (
    count_schedules,
    enumerate_admissible,
    enumerate_schedules,
    is_d_hitting,
    min_hitting_size,
    schedule_hitting,
)
from hitfam.poset import (
    Family,
    hits,
    make_antichain,
    make_chain,
    make_chain_plus_event,
    make_complete_tree,
    make_double_tree,
)

POSETS = [
    make_chain(4),
    make_antichain(4),
    make_chain_plus_event(3),
    make_complete_tree(2),
    make_double_tree(1),
    make_double_tree(2),
]


class TestEnumeration:
    def test_chain_unique(self):
        assert enumerate_schedules(make_chain(3)).schedules == [("1", "2", "3")]

    def test_chain_plus_event(self):
        got = set(enumerate_schedules(make_chain_plus_event(2)).schedules)
        assert got == {("*", "1", "2"), ("1", "*", "2"), ("1", "2", "*")}

    def test_cap_sets_overflow(self):
        res = enumerate_schedules(make_antichain(4), cap=5)
        assert len(res.schedules) == 5 and res.overflow
        assert not enumerate_schedules(make_antichain(3), cap=6).overflow

    def test_lexicographic_order(self):
        scheds = enumerate_schedules(make_antichain(3)).schedules
        assert scheds == sorted(scheds)

    @pytest.mark.parametrize("p", POSETS[:5], ids=repr)
    def test_matches_filtered_permutations(self, p):
        got = enumerate_schedules(p).schedules
        assert set(got) == set(oracles.schedules(p.events, p.cover_edges))
        assert len(got) == len(set(got)) == count_schedules(p)

    def test_admissible_examples(self):
        assert enumerate_admissible(make_chain(3), 2) == [("1", "2"), ("1", "3"), ("2", "3")]
        assert len(enumerate_admissible(make_antichain(3), 3)) == 6
        # the three interleavings are the only admissible triples
        assert len(enumerate_admissible(make_chain_plus_event(2), 3)) == 3

    @pytest.mark.parametrize("d", [1, 4])
    def test_depth_out_of_range(self, d):
        with pytest.raises(InvalidDepthError):
            enumerate_admissible(make_chain(3), d)


class TestVerify:
    def test_dfs_two_hitting(self):
        t = make_complete_tree(2)
        report = is_d_hitting(t, dfs_family(t), 2)
        assert report.is_hitting and report.first_missed is None

    def test_single_dfs_not_two_hitting(self):
        t = make_complete_tree(1)
        report = is_d_hitting(t, [leftdfs(t)], 2)
        assert not report.is_hitting
        assert report.first_missed == ("1", "0")

    def test_all_permutations_hit(self):
        p = make_antichain(4)
        assert is_d_hitting(p, enumerate_schedules(p).schedules, 3).is_hitting

    def test_invalid_row(self):
        with pytest.raises(InvalidFamilyError):
            is_d_hitting(make_chain(3), [("3", "2", "1")], 2)

    def test_family_of_other_poset(self):
        with pytest.raises(InvalidFamilyError):
            is_d_hitting(make_chain(2), Family(make_antichain(2), [("1", "2")]), 2)

    def test_tuple_budget(self):
        with pytest.raises(InfeasibleError):
            is_d_hitting(make_antichain(6), [tuple("123456")], 3, budget=10)

    def test_report_counts(self):
        p = make_antichain(3)
        rows = [("1", "2", "3"), ("3", "2", "1")]
        report = is_d_hitting(p, rows, 2)
        assert report.admissible_count == 6
        assert report.per_row_hit_counts == (3, 3)
        assert report.as_dict()["is_hitting"]

    @pytest.mark.parametrize("p", POSETS[:5], ids=repr)
    def test_matches_brute_force(self, p):
        scheds = enumerate_schedules(p).schedules
        for k in range(1, 3):
            for rows in itertools.combinations(scheds[:6], k):
                for d in (2, 3):
                    expect = oracles.is_hitting(p.events, p.cover_edges, rows, d)
                    assert is_d_hitting(p, rows, d).is_hitting == expect


class TestMinimum:
    def test_chain_plus_event(self):
        assert min_hitting_size(make_chain_plus_event(3), 3) == 4

    def test_tree_dimension(self):
        assert min_hitting_size(make_complete_tree(1), 2) == 2

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_chain(self, d):
        assert min_hitting_size(make_chain(5), d) == 1

    def test_matches_brute_force(self):
        p = make_antichain(4)
        assert min_hitting_size(p, 3) == oracles.min_family(p.events, [], 3) == 6

    def test_tree_three_hitting(self):
        assert min_hitting_size(make_complete_tree(2), 3) == 8

    @pytest.mark.parametrize("p", POSETS[:5], ids=repr)
    def test_monotone_in_depth(self, p):
        # d = 4 on the 7-node tree is beyond the exact search
        top = 3 if len(p) > 4 else 4
        sizes = [min_hitting_size(p, d) for d in range(2, top + 1)]
        assert sizes == sorted(sizes)

    def test_budget(self):
        with pytest.raises(InfeasibleError):
            min_hitting_size(make_antichain(5), 2, budget=10)


class TestScheduleHitting:
    def test_examples(self):
        assert schedule_hitting(make_chain_plus_event(3), ("1", "*", "2")) == ("1", "*", "2", "3")
        assert schedule_hitting(make_complete_tree(2), ("00", "01")) == (
            "e", "0", "1", "00", "01", "10", "11")

    def test_inadmissible(self):
        with pytest.raises(InadmissibleError):
            schedule_hitting(make_chain(3), ("3", "1"))

    @settings(max_examples=100, deadline=None)
    @given(st.sampled_from(POSETS), st.data())
    def test_always_hits(self, p, data):
        d = data.draw(st.integers(2, min(4, len(p))))
        t = data.draw(st.sampled_from(enumerate_admissible(p, d)))
        s = schedule_hitting(p, t)
        assert p.is_schedule(s) and hits(s, t)


@pytest.mark.parametrize("p", POSETS[:5], ids=repr)
def test_every_admissible_tuple_has_a_schedule(p):
    scheds = oracles.schedules(p.events, p.cover_edges)
    for d in (2, 3):
        for t in enumerate_admissible(p, d):
            assert any(oracles.hits(s, t) for s in scheds)
