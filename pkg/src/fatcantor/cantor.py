"""Symmetric fat Cantor sets with exact stage arithmetic.

The 1-D construction starts from [0, 1] and at stage k removes the open
middle interval of length ``c * rho**k`` from each surviving interval; the
d-dimensional set is the product of d copies.  With ``2*rho < 1`` the
removals form a geometric series and everything is closed-form in
rationals: stage measures, the limit measure, interval endpoints, and the
gap structure behind membership tests and nowhere-density witnesses.

A stage-n approximation is a union of ``2**(n*d)`` boxes, so exact
materialization explodes quickly; the helpers here that only need the
local structure near a query interval descend the construction tree and
prune, touching O(stage) intervals instead.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

from .errors import BudgetError, DimensionMismatchError, PreconditionError
from .geometry import Box, BoxUnion
from .rationals import as_fraction

DEFAULT_BOX_CAP = 1 << 16


@dataclass(frozen=True)
class CantorSchedule:
    """Removal schedule r_k = c * rho**k in ambient dimension d.

    Validity needs ``2*rho < 1`` (children keep positive length at every
    split) and ``c*rho/(1 - 2*rho) < 1`` (the removed total stays below 1,
    so the limit set keeps positive measure).  Positivity of the limit also
    guarantees feasibility stage by stage: lambda_k - c*rho*(2*rho)**k is
    decreasing in k with positive limit, hence every surviving interval is
    strictly longer than the next removal.
    """

    d: int
    c: Fraction = Fraction(1)
    rho: Fraction = Fraction(1, 4)

    def __post_init__(self) -> None:
        if not isinstance(self.d, int) or self.d < 1:
            raise PreconditionError(f"dimension must be a positive integer, got {self.d!r}")
        c = as_fraction(self.c)
        rho = as_fraction(self.rho)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "rho", rho)
        if c <= 0:
            raise PreconditionError(f"c must be positive, got {c}")
        if rho <= 0 or 2 * rho >= 1:
            raise PreconditionError(f"rho must satisfy 0 < 2*rho < 1, got {rho}")
        if c * rho / (1 - 2 * rho) >= 1:
            raise PreconditionError(
                f"removed total c*rho/(1-2*rho) = {c * rho / (1 - 2 * rho)} must stay below 1"
            )

    # -- closed forms ------------------------------------------------------

    def removal_length(self, k: int) -> Fraction:
        if k < 1:
            raise PreconditionError(f"removals start at stage 1, got {k}")
        return self.c * self.rho**k

    def stage_measure_1d(self, n: int) -> Fraction:
        """lambda_1(A_n) = 1 - sum_{k<=n} 2**(k-1) * c * rho**k, exactly."""
        if n < 0:
            raise PreconditionError(f"stage must be nonnegative, got {n}")
        two_rho = 2 * self.rho
        removed = self.c * self.rho * (1 - two_rho**n) / (1 - two_rho)
        return 1 - removed

    def limit_measure_1d(self) -> Fraction:
        return 1 - self.c * self.rho / (1 - 2 * self.rho)

    def stage_measure(self, n: int) -> Fraction:
        return self.stage_measure_1d(n) ** self.d

    def limit_measure(self) -> Fraction:
        return self.limit_measure_1d() ** self.d

    def stage_defect(self, n: int) -> Fraction:
        """lambda(A_n^d \\ C^d) = lambda_1(A_n)**d - lambda_1(C)**d."""
        return self.stage_measure(n) - self.limit_measure()

    def stage_interval_length(self, n: int) -> Fraction:
        """Common length of the 2**n surviving intervals at stage n."""
        return self.stage_measure_1d(n) / (1 << n)

    # -- stage geometry ----------------------------------------------------

    def stage_intervals_1d(self, n: int, *, cap: int = DEFAULT_BOX_CAP) -> list[tuple[Fraction, Fraction]]:
        """All 2**n closed surviving intervals [lo, hi] at stage n, left to right."""
        if n < 0:
            raise PreconditionError(f"stage must be nonnegative, got {n}")
        if (1 << n) > cap:
            raise BudgetError(
                f"stage {n} has {1 << n} intervals, above the cap of {cap}"
            )
        intervals: list[tuple[Fraction, Fraction]] = [(Fraction(0), Fraction(1))]
        for k in range(1, n + 1):
            child = self.stage_interval_length(k)
            nxt: list[tuple[Fraction, Fraction]] = []
            for lo, hi in intervals:
                nxt.append((lo, lo + child))
                nxt.append((hi - child, hi))
            intervals = nxt
        return intervals

    def stage_approx(self, n: int, *, box_cap: int = DEFAULT_BOX_CAP) -> BoxUnion:
        """Stage-n approximation as a canonical half-open box union.

        The true stage set is closed; its half-open realization here has the
        same measure and supports exact box algebra.  Membership and gap
        queries, which do care about endpoints, use the closed-interval
        helpers instead.
        """
        count = 1 << (n * self.d)
        if count > box_cap:
            feasible = 0
            while (1 << ((feasible + 1) * self.d)) <= box_cap:
                feasible += 1
            raise BudgetError(
                f"stage {n} in dimension {self.d} needs {count} boxes, above the cap of"
                f" {box_cap}; largest feasible stage is {feasible}"
            )
        ivs = self.stage_intervals_1d(n, cap=box_cap)
        boxes = tuple(
            Box(tuple(p[0] for p in prod), tuple(p[1] for p in prod))
            for prod in itertools.product(ivs, repeat=self.d)
        )
        # Products of disjoint sorted intervals are already canonical.
        return BoxUnion(self.d, boxes)

    def _descend_overlapping(
        self, n: int, qlo: Fraction, qhi: Fraction
    ) -> list[tuple[Fraction, Fraction]]:
        """Stage-n surviving intervals whose closure meets [qlo, qhi]."""
        found: list[tuple[Fraction, Fraction]] = []
        stack: list[tuple[Fraction, Fraction, int]] = [(Fraction(0), Fraction(1), 0)]
        while stack:
            lo, hi, depth = stack.pop()
            if hi < qlo or lo > qhi:
                continue
            if depth == n:
                found.append((lo, hi))
                continue
            child = self.stage_interval_length(depth + 1)
            # Right child pushed first so the left-to-right order survives the stack.
            stack.append((hi - child, hi, depth + 1))
            stack.append((lo, lo + child, depth + 1))
        found.sort()
        return found

    def first_free_subinterval(
        self, n: int, t: Fraction, jlo: Fraction, jhi: Fraction
    ) -> tuple[Fraction, Fraction] | None:
        """Leftmost positive-length open piece of (jlo, jhi) missing A_n + t.

        Returns an open interval disjoint from the closed stage-n set
        translated by t, or ``None`` when the translate covers (jlo, jhi).
        """
        if jlo >= jhi:
            raise PreconditionError(f"empty query interval ({jlo}, {jhi})")
        shifted = [
            (lo + t, hi + t) for lo, hi in self._descend_overlapping(n, jlo - t, jhi - t)
        ]
        cursor = jlo
        for lo, hi in shifted:
            if lo > cursor:
                return cursor, min(lo, jhi)
            if hi > cursor:
                cursor = hi
            if cursor >= jhi:
                return None
        if cursor < jhi:
            return cursor, jhi
        return None

    def interval_meets_stage_translate(
        self, n: int, t: Fraction, qlo: Fraction, qhi: Fraction
    ) -> bool:
        """Does the closed interval [qlo, qhi] meet the closed A_n + t?"""
        return bool(self._descend_overlapping(n, qlo - t, qhi - t))


@dataclass(frozen=True)
class Membership:
    """Outcome of a membership query: status plus the deciding stage."""

    status: Literal["in", "out", "unknown"]
    stage: int


def _trace_coordinate(s: CantorSchedule, x: Fraction, cap: int) -> tuple[str, int]:
    if x < 0 or x > 1:
        return "out", 0
    lo, hi = Fraction(0), Fraction(1)
    if x == lo or x == hi:
        return "in", 0
    for k in range(1, cap + 1):
        child = s.stage_interval_length(k)
        left_hi = lo + child
        right_lo = hi - child
        if x <= left_hi:
            hi = left_hi
        elif x >= right_lo:
            lo = right_lo
        else:
            return "out", k
        if x == lo or x == hi:
            return "in", k
    return "unknown", cap


def membership(s: CantorSchedule, x: Sequence[object], stage_cap: int) -> Membership:
    """Decide x in C^d by descent, up to ``stage_cap`` stages per coordinate.

    Points that become endpoints of a surviving interval stay in the set
    forever (removals are open middles), so they resolve to ``in`` at a
    finite stage; points inside a removed gap resolve to ``out``; anything
    still undecided at the cap is reported ``unknown``.
    """
    if len(x) != s.d:
        raise DimensionMismatchError(f"point of length {len(x)} in dimension {s.d}")
    if stage_cap < 0:
        raise PreconditionError(f"stage cap must be nonnegative, got {stage_cap}")
    coords = [as_fraction(v) for v in x]
    out_stage: int | None = None
    in_stage = 0
    unknown = False
    for v in coords:
        status, stage = _trace_coordinate(s, v, stage_cap)
        if status == "out":
            out_stage = stage if out_stage is None else min(out_stage, stage)
        elif status == "in":
            in_stage = max(in_stage, stage)
        else:
            unknown = True
    if out_stage is not None:
        return Membership("out", out_stage)
    if unknown:
        return Membership("unknown", stage_cap)
    return Membership("in", in_stage)


@dataclass(frozen=True)
class GapCertificate:
    """An open box exactly disjoint from a stage approximation.

    ``box`` is interpreted as its open interior; disjointness from the
    closed stage-``stage`` translate is exact and robust (the witness is
    shrunk away from the gap boundary, so even the closure stays clear).
    """

    stage: int
    box: Box


@dataclass(frozen=True)
class NeedsDeeperStage:
    """Search ran to its stage cap without producing a certificate."""

    deepest_stage: int
    element_index: int | None = None
    leaf_index: int | None = None


def middle_half(lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Shrink (lo, hi) by a quarter of its length on each side."""
    margin = (hi - lo) / 4
    return lo + margin, hi - margin


def find_gap(
    s: CantorSchedule, t: Sequence[object], j: Box, stage_cap: int
) -> GapCertificate | NeedsDeeperStage:
    """Open sub-box of ``j`` missing the translated stage approximation.

    Scans stages m = 0, 1, ... and within each stage the axes in order,
    taking the leftmost free piece of the first axis that has one; the
    witness is the middle half of that piece (a product set misses the
    translate as soon as one coordinate factor does).  Deterministic:
    smallest qualifying stage, then lexicographic position.
    """
    if len(t) != s.d or j.dim != s.d:
        raise DimensionMismatchError(
            f"translation of length {len(t)}, box of dimension {j.dim}, schedule dimension {s.d}"
        )
    if not j.is_bounded:
        raise PreconditionError("find_gap needs a bounded query box")
    if not j.has_positive_sides():
        raise PreconditionError("find_gap needs a query box with positive sides")
    if stage_cap < 0:
        raise PreconditionError(f"stage cap must be nonnegative, got {stage_cap}")
    shift = [as_fraction(v) for v in t]
    for m in range(stage_cap + 1):
        for axis in range(s.d):
            free = s.first_free_subinterval(m, shift[axis], j.lo[axis], j.hi[axis])  # type: ignore[arg-type]
            if free is None:
                continue
            wlo, whi = middle_half(*free)
            lo = list(j.lo)
            hi = list(j.hi)
            lo[axis] = wlo
            hi[axis] = whi
            return GapCertificate(stage=m, box=Box(tuple(lo), tuple(hi)))
    return NeedsDeeperStage(deepest_stage=stage_cap)


def gap_certificate_valid(
    s: CantorSchedule, t: Sequence[object], cert: GapCertificate, *, within: Box | None = None
) -> bool:
    """Re-check a certificate from its serialized data alone.

    The witness (as an open box) must be nonempty, sit inside ``within``
    when given, and miss the closed stage translate: some coordinate
    interval must meet no surviving interval of A_stage + t_i.
    """
    if len(t) != s.d or cert.box.dim != s.d:
        return False
    if not cert.box.has_positive_sides() or not cert.box.is_bounded:
        return False
    if within is not None and not within.contains_box(cert.box):
        return False
    shift = [as_fraction(v) for v in t]
    for axis in range(s.d):
        if not s.interval_meets_stage_translate(
            cert.stage, shift[axis], cert.box.lo[axis], cert.box.hi[axis]  # type: ignore[arg-type]
        ):
            return True
    return False
