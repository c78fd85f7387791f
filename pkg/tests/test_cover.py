"""Finite covers: positive hulls, greedy upper bounds, uncovered witnesses.

The headline fact being exercised: no finite family of translated stage
sets ever covers the unit cube, and the search procedures must either
produce a box that witnesses the failure or say explicitly that the stage
budget ran out.  Witnesses are replayed through their validity checker and
through the brute-force stage construction from test_cantor.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fatcantor import (
    Box,
    BoxUnion,
    CantorSchedule,
    CoverAttempt,
    Diff,
    Gen,
    Inter,
    NeedsDeeperStage,
    Union,
    UncoveredWitness,
    approx_set,
    base_expr,
    clip_to_box,
    find_uncovered_box,
    grid_translate_pool,
    infinite_cube_report,
    iter_leaves,
    outer_upper,
    positive_hull,
    quartered_translate_pool,
    uncovered_witness_valid,
    verify_cover,
)

from strategies import fractions, ring_exprs
from test_cantor import brute_stage_intervals

S1 = CantorSchedule(1)


# ---------------------------------------------------------------------------
# positive hull
# ---------------------------------------------------------------------------


class TestPositiveHull:
    @given(e=ring_exprs(max_leaves=5))
    def test_hull_contains_the_expression_at_every_stage(self, e):
        hull = positive_hull(e)
        for n in range(4):
            inner = approx_set(e, S1, n)
            outer = approx_set(hull, S1, n)
            assert outer.contains_union(inner)

    @given(e=ring_exprs(max_leaves=5))
    def test_hull_is_difference_free(self, e):
        hull = positive_hull(e)

        def scan(node):
            if isinstance(node, Gen):
                return
            assert not isinstance(node, Diff)
            scan(node.left)
            scan(node.right)

        scan(hull)

    def test_hull_of_a_difference_is_its_left_side(self):
        g = base_expr(S1)
        shifted = Gen((Fraction(1, 4),), Box.unit_cube(1))
        assert positive_hull(Diff(g, shifted)) == g


# ---------------------------------------------------------------------------
# cover verification
# ---------------------------------------------------------------------------


class TestVerifyCover:
    def test_stage_approximation_covers_itself(self):
        target = S1.stage_approx(2)
        assert verify_cover(target, [base_expr(S1)], S1, 2)

    def test_deeper_stages_no_longer_cover(self):
        # the stage-3 approximation is strictly inside stage 2
        target = S1.stage_approx(2)
        assert not verify_cover(target, [base_expr(S1)], S1, 3)

    def test_translates_can_fill_the_gaps_of_one_element(self):
        target = BoxUnion.single(Box.interval(Fraction(0), Fraction(3, 4)))
        pool = [Gen((t,), Box.whole_space(1)) for t in
                (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(-1, 4))]
        covered = verify_cover(target, pool, S1, 1)
        # independent replay via interval arithmetic
        blocked = []
        for g in pool:
            blocked.extend(
                (lo + g.translation[0], hi + g.translation[0])
                for lo, hi in brute_stage_intervals(S1.c, S1.rho, 1)
            )
        edges = sorted({e for b in blocked for e in b if 0 <= e <= Fraction(3, 4)} | {Fraction(0), Fraction(3, 4)})
        gap_free = all(
            any(blo <= (lo + hi) / 2 <= bhi for blo, bhi in blocked)
            for lo, hi in zip(edges, edges[1:])
        )
        assert covered == gap_free

    @given(e=ring_exprs(max_leaves=3), n=st.integers(min_value=0, max_value=3))
    def test_every_expression_covers_its_own_approximation(self, e, n):
        target = approx_set(e, S1, n)
        assert verify_cover(target, [e], S1, n)


# ---------------------------------------------------------------------------
# greedy outer bound
# ---------------------------------------------------------------------------


class TestOuterUpper:
    def test_self_cover_reports_the_stage_measure(self):
        att = outer_upper(base_expr(S1), [base_expr(S1)], S1, stage=2)
        assert att.verified and not att.infinite
        assert att.subset == (0,)
        assert att.total_premeasure_upper == Fraction(5, 8)

    def test_clipped_target_needs_less(self):
        target = clip_to_box(base_expr(S1), Box.interval(Fraction(0), Fraction(1, 4)))
        att = outer_upper(target, [base_expr(S1)], S1, stage=2)
        assert att.verified
        # stage-2 set inside [0, 1/4): [0, 10/64) plus [14/64, 16/64)
        assert att.total_premeasure_upper == Fraction(10, 64) + Fraction(2, 64)

    def test_plain_intervals_admit_no_cover_and_report_infinity(self):
        att = outer_upper(Box.interval(Fraction(0), Fraction(1, 4)), [base_expr(S1)], S1, stage=2)
        assert att.infinite
        assert not att.verified
        assert att.total_premeasure_upper is None
        assert att.subset == ()

    def test_budget_exhaustion_also_reports_infinity(self):
        pool = grid_translate_pool(S1, 4)
        att = outer_upper(Box.unit_cube(1), pool, S1, stage=3, budget=5)
        assert att.infinite

    @given(n=st.integers(min_value=1, max_value=3))
    def test_verified_attempts_replay_through_verify_cover(self, n):
        pool = grid_translate_pool(S1, 4)
        target = clip_to_box(base_expr(S1), Box.interval(Fraction(0), Fraction(1, 2)))
        att = outer_upper(target, pool, S1, stage=n)
        if not att.infinite:
            chosen = [pool[i] for i in att.subset]
            assert verify_cover(approx_set(target, S1, n), chosen, S1, n)


# ---------------------------------------------------------------------------
# uncovered witnesses
# ---------------------------------------------------------------------------


class TestUncoveredBox:
    def test_empty_family_leaves_the_whole_interior_free(self):
        w = find_uncovered_box(Box.unit_cube(1), [], S1, 4)
        assert isinstance(w, UncoveredWitness)
        assert uncovered_witness_valid(S1, Box.unit_cube(1), [], w)
        assert Box.unit_cube(1).contains_box(w.box)

    def test_single_element_witness_lands_in_a_gap(self):
        w = find_uncovered_box(Box.unit_cube(1), [base_expr(S1)], S1, 8)
        assert isinstance(w, UncoveredWitness)
        assert uncovered_witness_valid(S1, Box.unit_cube(1), [base_expr(S1)], w)
        lo, hi = w.box.lo[0], w.box.hi[0]
        mid = (lo + hi) / 2
        # replay against the brute construction at the witness stage
        assert not any(
            blo <= mid <= bhi for blo, bhi in brute_stage_intervals(S1.c, S1.rho, w.stage)
        )

    def test_shallow_caps_yield_needs_deeper(self):
        pool = quartered_translate_pool(S1, 16)
        got = find_uncovered_box(Box.unit_cube(1), pool, S1, 1)
        assert isinstance(got, NeedsDeeperStage)
        assert got.deepest_stage == 1

    def test_witnesses_against_quartered_pools(self):
        for size in (1, 2, 4, 8, 16):
            pool = quartered_translate_pool(S1, size)
            w = find_uncovered_box(Box.unit_cube(1), pool, S1, 12)
            assert isinstance(w, UncoveredWitness), f"pool size {size} inconclusive"
            assert uncovered_witness_valid(S1, Box.unit_cube(1), pool, w)

    def test_tampered_witnesses_are_rejected(self):
        pool = [base_expr(S1)]
        w = find_uncovered_box(Box.unit_cube(1), pool, S1, 8)
        assert isinstance(w, UncoveredWitness)
        # move the box into the covered left edge of the stage set
        fake = UncoveredWitness(
            box=Box.interval(Fraction(0), Fraction(1, 64)),
            stage=w.stage,
            certificates=w.certificates,
        )
        assert not uncovered_witness_valid(S1, Box.unit_cube(1), pool, fake)

    @given(
        t1=fractions(min_value=Fraction(-1, 2), max_value=Fraction(1, 2)),
        t2=fractions(min_value=Fraction(-1, 2), max_value=Fraction(1, 2)),
    )
    def test_two_random_translates_never_cover(self, t1, t2):
        pool = [Gen((t1,), Box.whole_space(1)), Gen((t2,), Box.whole_space(1))]
        got = find_uncovered_box(Box.unit_cube(1), pool, S1, 12)
        assert isinstance(got, UncoveredWitness)
        assert uncovered_witness_valid(S1, Box.unit_cube(1), pool, got)

    def test_dimension_two_also_witnesses(self):
        s2 = CantorSchedule(2)
        pool = quartered_translate_pool(s2, 4)
        got = find_uncovered_box(Box.unit_cube(2), pool, s2, 8)
        assert isinstance(got, UncoveredWitness)
        assert uncovered_witness_valid(s2, Box.unit_cube(2), pool, got)


# ---------------------------------------------------------------------------
# the full no-cover report
# ---------------------------------------------------------------------------


class TestInfiniteCubeReport:
    def test_small_pool_report_is_fully_witnessed(self):
        rep = infinite_cube_report(S1, 2, 12)
        assert rep.all_witnessed
        assert rep.stage_cap == 12
        # every nonempty subfamily of the pool appears
        assert len(rep.rows) == 2 ** len(rep.pool) - 1
        for row in rep.rows:
            assert row.verified
            assert row.witness is not None
            assert row.inconclusive_stage is None

    def test_rows_replay_against_their_subfamilies(self):
        rep = infinite_cube_report(S1, 4, 12)
        assert rep.all_witnessed
        for row in rep.rows:
            members = [rep.pool[i] for i in row.subset]
            assert uncovered_witness_valid(S1, Box.unit_cube(1), members, row.witness)

    def test_empty_pool_uses_the_empty_family(self):
        rep = infinite_cube_report(S1, 0, 4)
        assert rep.all_witnessed
        assert len(rep.rows) == 1
        assert rep.rows[0].subset == ()

    def test_pool_cap_is_enforced(self):
        from fatcantor import BudgetError

        with pytest.raises(BudgetError):
            infinite_cube_report(S1, 6, 8, max_pool=4)
