import math

import pytest

from hitfam.doubletree import (
    antichain_family_from_leaves,
    arbitrary_tree_family,
    build_M,
    build_blocks,
    doubletree_family,
    embedding_codes,
    left_traversal,
    right_traversal,
    separation_check,
    separation_failures,
    tree_family,
)
from hitfam.errors import AddressingError, InvalidSizeError, ShapeError
from hitfam.oracle import is_d_hitting, min_hitting_size
from hitfam.poset import (
    Poset,
    make_antichain,
    make_complete_tree,
    make_double_tree,
    make_kary_tree,
    tree_from_parents,
)

LEFT1 = ("F:e", "L:0", "L:1", "S:e")
RIGHT1 = ("F:e", "L:1", "L:0", "S:e")


class TestTraversals:
    def test_base(self):
        assert left_traversal(1) == LEFT1
        assert right_traversal(1) == RIGHT1

    def test_height_two(self):
        row = left_traversal(2)
        assert len(row) == 10
        assert row == ("F:e", "F:0", "L:00", "L:01", "S:0", "F:1", "L:10", "L:11", "S:1", "S:e")
        assert make_double_tree(2).is_schedule(row)
        assert make_double_tree(2).is_schedule(right_traversal(2))

    def test_subtree(self):
        assert left_traversal(2, "1") == ("F:1", "L:10", "L:11", "S:1")
        assert left_traversal(2, "01") == ("L:01",)

    @pytest.mark.parametrize("prefix", ["2", "000", "ab"])
    def test_bad_prefix(self, prefix):
        with pytest.raises(AddressingError):
            left_traversal(2, prefix)


class TestMatrix:
    def test_base_case_verbatim(self):
        assert build_M(1).rows == (LEFT1, RIGHT1, LEFT1, RIGHT1)

    @pytest.mark.parametrize("h", range(1, 7))
    def test_dimensions(self, h):
        m = build_M(h)
        p = make_double_tree(h)
        assert len(m.rows) == 4 * h
        assert m.block_width == 3 * 2 ** (h - 1) - 1
        assert all(len(r) == 3 * 2**h - 2 and p.is_schedule(r) for r in m.rows)

    def test_zero(self):
        with pytest.raises(InvalidSizeError):
            build_M(0)

    @pytest.mark.parametrize("h", range(1, 5))
    def test_three_hitting(self, h):
        fam = doubletree_family(h)
        assert is_d_hitting(fam.poset, fam, 3).is_hitting

    @pytest.mark.parametrize("h", range(1, 5))
    def test_separation(self, h):
        m = build_M(h)
        assert separation_check(m) and not separation_failures(m)

    def test_separation_detects_damage(self):
        m = build_M(2)
        broken = type(m)(m.h, tuple(left_traversal(2) for _ in m.rows), m.block_width, m.blocks)
        assert not separation_check(broken)

    @pytest.mark.parametrize("h", range(1, 5))
    def test_row_formula(self, h):
        # top-half row i: F . OO(0)[i] . OO(1)[i] . OI(1)[i] . OI(0)[i] . S
        m = build_M(h + 1)
        b0, b1 = build_blocks(h, "0"), build_blocks(h, "1")
        for i in range(2 * h):
            assert m.rows[i] == ("F:e",) + b0.oo[i] + b1.oo[i] + b1.oi[i] + b0.oi[i] + ("S:e",)
            bottom = m.rows[2 * (h + 1) + i]
            assert bottom == ("F:e",) + b1.io[i] + b0.io[i] + b0.ii[i] + b1.ii[i] + ("S:e",)

    @pytest.mark.parametrize("h", range(1, 5))
    def test_traversal_rows(self, h):
        m = build_M(h + 1)
        top = m.rows[2 * h:2 * h + 2]
        assert top[0] == left_traversal(h + 1)
        assert top[1][1:-1] == left_traversal(h + 1, "1") + left_traversal(h + 1, "0")

    def test_minimum_at_height_one(self):
        assert min_hitting_size(make_double_tree(1), 3) == 2 <= len(build_M(1).rows)


class TestRestrictedFamilies:
    @pytest.mark.parametrize("h", range(1, 5))
    def test_tree(self, h):
        fam = tree_family(h)
        n = 2 ** (h + 1) - 1
        assert fam.poset == make_complete_tree(h) and len(fam.poset) == n
        assert len(fam) == 4 * h == 4 * math.log2(n + 1) - 4
        assert is_d_hitting(fam.poset, fam, 3).is_hitting

    @pytest.mark.parametrize("h", range(1, 5))
    def test_antichain(self, h):
        fam = antichain_family_from_leaves(h)
        assert fam.poset == make_antichain(2**h)
        assert len(fam) == 4 * h
        assert is_d_hitting(fam.poset, fam, 3).is_hitting

    def test_antichain_truncated(self):
        fam = antichain_family_from_leaves(3, 6)
        assert fam.poset == make_antichain(6)
        assert is_d_hitting(fam.poset, fam, 3).is_hitting

    def test_leaf_antichain_lower_bound(self):
        # the leaves form an antichain of size 2**h, so h rows are needed
        for h in range(1, 5):
            assert len(build_M(h).rows) >= h


class TestArbitraryTrees:
    def test_binary_is_identity(self):
        t = make_complete_tree(2)
        assert arbitrary_tree_family(t).rows == tree_family(2).rows
        assert len(arbitrary_tree_family(t)) == 8

    def test_ternary(self):
        t = make_kary_tree(3, 2)
        codes, width = embedding_codes(t)
        assert width == 2 and max(len(c) for c in codes.values()) == 4
        fam = arbitrary_tree_family(t)
        assert len(fam) <= 4 * 2 * 2
        assert is_d_hitting(t, fam, 3).is_hitting

    def test_star(self):
        parents = {"r": None} | {f"c{i}": "r" for i in range(5)}
        t = tree_from_parents(parents)
        fam = arbitrary_tree_family(t)
        assert len(fam) <= 12
        assert is_d_hitting(t, fam, 3).is_hitting

    def test_path(self):
        t = Poset(["a", "b", "c"], [("a", "b"), ("b", "c")])
        assert arbitrary_tree_family(t).rows == (("a", "b", "c"),)

    def test_uneven_tree(self):
        parents = {"r": None, "a": "r", "b": "r", "c": "a", "d": "a", "e": "a", "f": "c"}
        t = tree_from_parents(parents)
        assert is_d_hitting(t, arbitrary_tree_family(t), 3).is_hitting

    def test_not_a_tree(self):
        with pytest.raises(ShapeError):
            arbitrary_tree_family(make_double_tree(1))
