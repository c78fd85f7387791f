"""Finite covers, certified upper bounds, and uncovered-box witnesses.

Covering questions about ring expressions are decided against stage
evaluations of their positive hulls.  The hull (drop every subtraction,
keep the positive side) only enlarges a set, so

* a failure certificate is sound against the true sets: a box missing
  every hull's stage approximation misses every true element;
* a success certificate is labeled for what it is: the target's stage
  evaluation is covered by the union of the elements' stage hulls.

The witness search shrinks an open box through the elements one generator
leaf at a time, so each step only needs the 1-D gap structure of a single
translate; nothing d-dimensional is ever materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cantor import (
    DEFAULT_BOX_CAP,
    CantorSchedule,
    GapCertificate,
    NeedsDeeperStage,
    find_gap,
    middle_half,
)
from .errors import BudgetError, DimensionMismatchError, PreconditionError, UnboundedBoxError
from .geometry import Box, BoxUnion
from .rationals import as_fraction
from .ring import Diff, Gen, Inter, RingExpr, Union, approx_set, iter_leaves, measure_bounds

DEFAULT_SUBSET_BUDGET = 4096
DEFAULT_POOL_CAP = 12


def positive_hull(e: "RingExpr") -> "RingExpr":
    """Union-of-generators upper bound for an expression.

    Unions are kept, differences and intersections are replaced by their
    left side; the result contains only Gen and Union nodes and its set
    contains the original one.
    """
    if isinstance(e, Gen):
        return e
    if isinstance(e, Union):
        return Union(positive_hull(e.left), positive_hull(e.right))
    if isinstance(e, (Diff, Inter)):
        return positive_hull(e.left)
    raise PreconditionError(f"not a ring expression: {e!r}")


def hull_leaves(e: "RingExpr") -> list[Gen]:
    return list(iter_leaves(positive_hull(e)))


def verify_cover(
    target: BoxUnion,
    elements: Sequence["RingExpr"],
    s: CantorSchedule,
    stage: int,
    *,
    box_cap: int = DEFAULT_BOX_CAP,
) -> bool:
    """Is ``target`` exactly inside the union of the elements' stage hulls?"""
    if target.dim != s.d:
        raise DimensionMismatchError(f"target dimension {target.dim} vs schedule {s.d}")
    covered = BoxUnion.empty(s.d)
    for e in elements:
        covered = covered.union(approx_set(positive_hull(e), s, stage, box_cap=box_cap))
    return covered.contains_union(target)


@dataclass(frozen=True)
class CoverAttempt:
    """Best cover found by :func:`outer_upper`.

    ``verified`` means the target's stage evaluation is exactly contained
    in the union of the chosen elements' stage-``stage`` hulls; since hulls
    only shrink with deeper stages while containing the true elements, the
    certified statement is "the true target set is covered by the stage
    hulls of the chosen elements".  ``infinite`` marks exhaustion of the
    search without any verified cover; no arithmetic infinity is involved.
    """

    subset: tuple[int, ...]
    stage: int
    total_premeasure_upper: Fraction | None
    verified: bool
    infinite: bool


def _target_union(
    target: "RingExpr | Box",
    s: CantorSchedule,
    stage: int,
    *,
    box_cap: int,
) -> BoxUnion:
    if isinstance(target, Box):
        if not target.is_bounded:
            raise UnboundedBoxError("cover target box must be bounded")
        return BoxUnion.single(target)
    return approx_set(positive_hull(target), s, stage, box_cap=box_cap)


def outer_upper(
    target: "RingExpr | Box",
    pool: Sequence["RingExpr"],
    s: CantorSchedule,
    *,
    stage: int,
    budget: int = DEFAULT_SUBSET_BUDGET,
    clip: bool = True,
    box_cap: int = DEFAULT_BOX_CAP,
) -> CoverAttempt:
    """Search the pool for a verified cover with minimal total upper bound.

    Greedy first (largest freshly covered measure, ties by pool index),
    then exhaustive over subsets in bitmask order until ``budget`` subsets
    have been examined.  Pool elements are optionally clipped to the
    target's bounding box, which shrinks their premeasures but cannot break
    a cover.  Deterministic throughout.
    """
    from .ring import clip_to_box  # local import keeps module load order simple

    if not pool:
        raise PreconditionError("empty cover pool")
    target_u = _target_union(target, s, stage, box_cap=box_cap)
    bbox = target_u.bounding_box()
    elements = list(pool)
    if clip and bbox is not None:
        elements = [clip_to_box(e, bbox) for e in elements]

    hull_sets = [approx_set(positive_hull(e), s, stage, box_cap=box_cap) for e in elements]
    uppers = [measure_bounds(e, s, stage, box_cap=box_cap).upper for e in elements]

    def total(subset: tuple[int, ...]) -> Fraction:
        return sum((uppers[i] for i in subset), Fraction(0))

    def covers(subset: tuple[int, ...]) -> bool:
        covered = BoxUnion.empty(s.d)
        for i in subset:
            covered = covered.union(hull_sets[i])
        return covered.contains_union(target_u)

    best: tuple[Fraction, tuple[int, ...]] | None = None

    # Greedy pass.
    remaining = target_u
    chosen: list[int] = []
    available = list(range(len(elements)))
    while not remaining.is_empty and available:
        gains = [(remaining.intersect(hull_sets[i]).measure(), i) for i in available]
        gain, pick = max(gains, key=lambda g: (g[0], -g[1]))
        if gain <= 0:
            break
        chosen.append(pick)
        available.remove(pick)
        remaining = remaining.subtract(hull_sets[pick])
    if remaining.is_empty and chosen:
        subset = tuple(sorted(chosen))
        if covers(subset):
            best = (total(subset), subset)

    # Exhaustive pass, bounded by the subset budget.
    examined = 0
    p = len(elements)
    for mask in range(1, 1 << p):
        if examined >= budget:
            break
        examined += 1
        subset = tuple(i for i in range(p) if mask >> i & 1)
        t = total(subset)
        if best is not None and t >= best[0]:
            continue
        if covers(subset):
            best = (t, subset)

    if best is None:
        return CoverAttempt(
            subset=(), stage=stage, total_premeasure_upper=None, verified=False, infinite=True
        )
    return CoverAttempt(
        subset=best[1],
        stage=stage,
        total_premeasure_upper=best[0],
        verified=True,
        infinite=False,
    )


@dataclass(frozen=True)
class LeafCertificate:
    """Per-generator record inside an uncovered-box witness."""

    element_index: int
    leaf_index: int
    translation: tuple[Fraction, ...]
    certificate: GapCertificate


@dataclass(frozen=True)
class UncoveredWitness:
    """Open box inside the target that misses every cover element.

    ``stage`` is the deepest stage any leaf needed.  The box sits inside
    the witness of every per-leaf certificate, hence misses each leaf's
    stage approximation and a fortiori the true element sets.
    """

    box: Box
    stage: int
    certificates: tuple[LeafCertificate, ...]


def find_uncovered_box(
    target: Box,
    elements: Sequence["RingExpr"],
    s: CantorSchedule,
    stage_cap: int,
) -> UncoveredWitness | NeedsDeeperStage:
    """Sequentially shrink an open box inside ``target`` past every element.

    Processing order is deterministic: elements in the given order, then
    the generator leaves of each element's positive hull left to right.
    Each step calls :func:`find_gap` for one translate inside the current
    box; the final box is disjoint from every element.  With no elements
    the witness is the shrunk interior of the target.
    """
    if target.dim != s.d:
        raise DimensionMismatchError(f"target dimension {target.dim} vs schedule {s.d}")
    if not target.is_bounded:
        raise UnboundedBoxError("witness target must be bounded")
    if not target.has_positive_sides():
        raise PreconditionError("witness target needs positive sides")

    box = Box(target.lo, target.hi)
    certificates: list[LeafCertificate] = []
    deepest = 0
    processed = False
    for ei, element in enumerate(elements):
        for li, leaf in enumerate(hull_leaves(element)):
            outcome = find_gap(s, leaf.translation, box, stage_cap)
            if isinstance(outcome, NeedsDeeperStage):
                return NeedsDeeperStage(
                    deepest_stage=outcome.deepest_stage, element_index=ei, leaf_index=li
                )
            certificates.append(
                LeafCertificate(
                    element_index=ei,
                    leaf_index=li,
                    translation=leaf.translation,
                    certificate=outcome,
                )
            )
            box = outcome.box
            deepest = max(deepest, outcome.stage)
            processed = True
    if not processed:
        pairs = [middle_half(lo, hi) for lo, hi in zip(box.lo, box.hi)]  # type: ignore[arg-type]
        box = Box(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))
    return UncoveredWitness(box=box, stage=deepest, certificates=tuple(certificates))


def uncovered_witness_valid(
    s: CantorSchedule,
    target: Box,
    elements: Sequence["RingExpr"],
    witness: UncoveredWitness,
) -> bool:
    """Re-verify a witness from serialized data alone.

    Checks that the box is a positive open box inside the target, that the
    recorded certificates enumerate exactly the hull leaves of the given
    elements, and that the box misses each leaf's closed stage
    approximation at that leaf's own recorded stage.
    """
    box = witness.box
    if box.dim != s.d or not box.is_bounded or not box.has_positive_sides():
        return False
    if not target.contains_box(box):
        return False
    expected: list[tuple[int, int, tuple[Fraction, ...]]] = []
    for ei, element in enumerate(elements):
        for li, leaf in enumerate(hull_leaves(element)):
            expected.append((ei, li, leaf.translation))
    recorded = [(c.element_index, c.leaf_index, c.translation) for c in witness.certificates]
    if recorded != expected:
        return False
    for cert in witness.certificates:
        shifted = [as_fraction(v) for v in cert.translation]
        if not any(
            not s.interval_meets_stage_translate(
                cert.certificate.stage, shifted[axis], box.lo[axis], box.hi[axis]  # type: ignore[arg-type]
            )
            for axis in range(s.d)
        ):
            return False
    return True


def grid_translate_pool(
    s: CantorSchedule,
    size: int,
    *,
    step: Fraction | None = None,
    clip: Box | None = None,
) -> list["RingExpr"]:
    """Diagonal grid of clipped translates: t_i = i*step*(1, ..., 1)."""
    if size < 0:
        raise PreconditionError(f"pool size must be nonnegative, got {size}")
    if step is None:
        step = Fraction(1, size) if size else Fraction(1)
    if clip is None:
        clip = Box.unit_cube(s.d)
    return [Gen((Fraction(i) * step,) * s.d, clip) for i in range(size)]


def quartered_translate_pool(s: CantorSchedule, size: int) -> list["RingExpr"]:
    """Distinct ring elements from few translates: quarter-grid translates
    crossed with quarter clip boxes along axis 0.

    Useful for large families: the witness search only ever has to dodge
    four distinct translates, so its stage requirement stays flat while the
    family still consists of ``size`` pairwise distinct elements.
    """
    if size < 0:
        raise PreconditionError(f"pool size must be nonnegative, got {size}")
    unit = Box.unit_cube(s.d)
    pool: list[RingExpr] = []
    for i in range(size):
        t = Fraction(i % 4, 4)
        qlo = Fraction(i // 4 % 4, 4)
        lo = (qlo,) + (Fraction(0),) * (s.d - 1)
        hi = (qlo + Fraction(1, 4),) + (Fraction(1),) * (s.d - 1)
        clip = unit.intersect(Box(lo, hi))
        pool.append(Gen((t,) * s.d, clip if clip is not None else Box.empty(s.d)))
    return pool


@dataclass(frozen=True)
class SubsetWitnessRow:
    """One row of the infinite-cube table: a subfamily and its outcome."""

    subset: tuple[int, ...]
    witness: UncoveredWitness | None
    inconclusive_stage: int | None
    verified: bool


@dataclass(frozen=True)
class InfiniteCubeReport:
    """Witness table showing no subfamily of the pool covers the unit cube.

    Every row with a witness certifies that subfamily fails to cover; rows
    that hit the stage cap are reported inconclusive, never as covers.  A
    fully witnessed table is the finite, checkable face of "the unit cube
    has no finite cover of finite total premeasure".
    """

    pool: tuple["RingExpr", ...]
    stage_cap: int
    rows: tuple[SubsetWitnessRow, ...]
    all_witnessed: bool


def infinite_cube_report(
    s: CantorSchedule,
    pool_size: int,
    stage_cap: int,
    *,
    pool: Sequence["RingExpr"] | None = None,
    max_pool: int = DEFAULT_POOL_CAP,
) -> InfiniteCubeReport:
    """Run the witness search for every nonempty subfamily of a grid pool."""
    if pool is None:
        pool = grid_translate_pool(s, pool_size)
    if len(pool) > max_pool:
        raise BudgetError(
            f"pool of {len(pool)} elements would need {(1 << len(pool)) - 1} subset rows,"
            f" above the cap for {max_pool} elements"
        )
    target = Box.unit_cube(s.d)
    rows: list[SubsetWitnessRow] = []
    masks = range(1, 1 << len(pool)) if pool else [0]
    for mask in masks:
        subset = tuple(i for i in range(len(pool)) if mask >> i & 1)
        chosen = [pool[i] for i in subset]
        outcome = find_uncovered_box(target, chosen, s, stage_cap)
        if isinstance(outcome, NeedsDeeperStage):
            rows.append(
                SubsetWitnessRow(
                    subset=subset,
                    witness=None,
                    inconclusive_stage=outcome.deepest_stage,
                    verified=False,
                )
            )
        else:
            rows.append(
                SubsetWitnessRow(
                    subset=subset,
                    witness=outcome,
                    inconclusive_stage=None,
                    verified=uncovered_witness_valid(s, target, chosen, outcome),
                )
            )
    return InfiniteCubeReport(
        pool=tuple(pool),
        stage_cap=stage_cap,
        rows=tuple(rows),
        all_witnessed=all(r.verified for r in rows),
    )
