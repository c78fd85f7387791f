"""Exact axis-aligned box algebra with canonical disjoint unions.

The carrier of every set computation in this package is the half-open box
``[lo_1, hi_1) x ... x [lo_d, hi_d)``.  Half-open boxes tile exactly (no
double-counted faces), so finite unions admit a unique canonical form:

* recursively decompose along axis 0 into slabs cut at box endpoints,
* canonicalize each slab's cross-section in the remaining coordinates,
* merge adjacent slabs whose cross-sections are identical,
* order the resulting boxes lexicographically by lower corner.

The surviving slab boundaries are exactly the points where the set's
cross-section changes, which is intrinsic to the set; equal sets therefore
produce structurally equal representations and ``==`` is set equality.

Coordinates are rationals or the explicit infinity markers from
``rationals`` (so the same Box type expresses half-space clips); volume
and measure reject unbounded boxes.  No floating point anywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterable, Sequence

from .errors import BudgetError, DimensionMismatchError, PreconditionError, UnboundedBoxError
from .rationals import NEG_INF, POS_INF, Coord, as_fraction, is_finite

DEFAULT_TILE_CAP = 1 << 16


def _coerce_coord(value: object) -> Coord:
    if value is POS_INF or value is NEG_INF:
        return value  # type: ignore[return-value]
    return as_fraction(value)


@dataclass(frozen=True)
class Box:
    """A half-open box; sides may be infinite.

    ``lo_i <= hi_i`` always holds; the box is empty as soon as some
    ``lo_i == hi_i``.  Topological certificates elsewhere reinterpret a Box
    as its open interior where documented; the algebra here is half-open.
    """

    lo: tuple[Coord, ...]
    hi: tuple[Coord, ...]

    def __post_init__(self) -> None:
        lo = tuple(_coerce_coord(v) for v in self.lo)
        hi = tuple(_coerce_coord(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise DimensionMismatchError(f"corner dimensions differ: {len(lo)} vs {len(hi)}")
        for a, b in zip(lo, hi):
            if a > b:
                raise PreconditionError(f"box side inverted: lo={a} > hi={b}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    # -- constructors ----------------------------------------------------

    @staticmethod
    def interval(lo: object, hi: object) -> "Box":
        return Box((_coerce_coord(lo),), (_coerce_coord(hi),))

    @staticmethod
    def from_intervals(intervals: Sequence[tuple[object, object]]) -> "Box":
        return Box(tuple(p[0] for p in intervals), tuple(p[1] for p in intervals))

    @staticmethod
    def cube(corner: Sequence[object], side: object) -> "Box":
        lo = tuple(_coerce_coord(v) for v in corner)
        s = as_fraction(side)
        return Box(lo, tuple(v + s for v in lo))

    @staticmethod
    def unit_cube(dim: int) -> "Box":
        return Box.cube((Fraction(0),) * dim, Fraction(1))

    @staticmethod
    def empty(dim: int) -> "Box":
        zero = Fraction(0)
        return Box((zero,) * dim, (zero,) * dim)

    @staticmethod
    def whole_space(dim: int) -> "Box":
        return Box((NEG_INF,) * dim, (POS_INF,) * dim)

    @staticmethod
    def half_space(dim: int, axis: int, threshold: object, *, above: bool) -> "Box":
        """{x : x_axis >= threshold} when ``above`` else {x : x_axis < threshold}."""
        if not 0 <= axis < dim:
            raise PreconditionError(f"axis {axis} out of range for dimension {dim}")
        t = as_fraction(threshold)
        lo: list[Coord] = [NEG_INF] * dim
        hi: list[Coord] = [POS_INF] * dim
        if above:
            lo[axis] = t
        else:
            hi[axis] = t
        return Box(tuple(lo), tuple(hi))

    # -- queries ----------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def is_empty(self) -> bool:
        return any(a == b for a, b in zip(self.lo, self.hi))

    @property
    def is_bounded(self) -> bool:
        return all(is_finite(v) for v in self.lo + self.hi)

    def has_positive_sides(self) -> bool:
        return all(a < b for a, b in zip(self.lo, self.hi))

    def sides(self) -> tuple[Fraction, ...]:
        if not self.is_bounded:
            raise UnboundedBoxError(f"side lengths of unbounded box {self}")
        return tuple(b - a for a, b in zip(self.lo, self.hi))  # type: ignore[operator]

    def volume(self) -> Fraction:
        if not self.is_bounded:
            raise UnboundedBoxError(f"volume of unbounded box {self}")
        return prod(self.sides(), start=Fraction(1))

    def translate(self, v: Sequence[object]) -> "Box":
        if len(v) != self.dim:
            raise DimensionMismatchError(f"translation of length {len(v)} for dimension {self.dim}")
        w = tuple(as_fraction(x) for x in v)
        return Box(
            tuple(a + x for a, x in zip(self.lo, w)),
            tuple(b + x for b, x in zip(self.hi, w)),
        )

    def intersect(self, other: "Box") -> "Box | None":
        """Exact intersection; ``None`` when the result is empty."""
        if other.dim != self.dim:
            raise DimensionMismatchError(f"intersect {self.dim}-dim with {other.dim}-dim box")
        lo = tuple(a if a >= c else c for a, c in zip(self.lo, other.lo))
        hi = tuple(b if b <= d else d for b, d in zip(self.hi, other.hi))
        for a, b in zip(lo, hi):
            if a >= b:
                return None
        return Box(lo, hi)

    def contains_point(self, x: Sequence[object]) -> bool:
        if len(x) != self.dim:
            raise DimensionMismatchError(f"point of length {len(x)} in dimension {self.dim}")
        pt = tuple(as_fraction(v) for v in x)
        return all(a <= v and v < b for a, v, b in zip(self.lo, pt, self.hi))

    def contains_box(self, other: "Box") -> bool:
        if other.dim != self.dim:
            raise DimensionMismatchError(f"contain {other.dim}-dim box in {self.dim}-dim box")
        if other.is_empty:
            return True
        return all(a <= c for a, c in zip(self.lo, other.lo)) and all(
            d <= b for b, d in zip(self.hi, other.hi)
        )

    def is_half_space(self) -> bool:
        """Exactly one coordinate has exactly one finite bound, the rest are free."""
        special = 0
        for a, b in zip(self.lo, self.hi):
            fin = (1 if is_finite(a) else 0) + (1 if is_finite(b) else 0)
            if fin == 0:
                continue
            if fin == 2:
                return False
            special += 1
        return special == 1

    def half_space_parts(self) -> tuple[int, Fraction, bool]:
        """(axis, threshold, above) of a half-space box."""
        if not self.is_half_space():
            raise PreconditionError(f"{self} is not an axis half-space")
        for i, (a, b) in enumerate(zip(self.lo, self.hi)):
            if is_finite(a):
                return i, a, True  # type: ignore[return-value]
            if is_finite(b):
                return i, b, False  # type: ignore[return-value]
        raise AssertionError("unreachable")

    def complement_half_space(self) -> "Box":
        axis, threshold, above = self.half_space_parts()
        return Box.half_space(self.dim, axis, threshold, above=not above)

    def __repr__(self) -> str:
        parts = ", ".join(f"[{a}, {b})" for a, b in zip(self.lo, self.hi))
        return f"Box({parts})"


def open_boxes_overlap(a: Box, b: Box) -> bool:
    """Do the open interiors of two boxes intersect?"""
    if a.dim != b.dim:
        raise DimensionMismatchError("dimension mismatch")
    return all(max(x, y) < min(z, w) for x, y, z, w in zip(a.lo, b.lo, a.hi, b.hi))


def open_box_meets_closed_box(open_box: Box, closed_box: Box) -> bool:
    """Does the open interior of ``open_box`` meet the closure of ``closed_box``?

    (a, b) meets [c, d] exactly when c < b and a < d.
    """
    if open_box.dim != closed_box.dim:
        raise DimensionMismatchError("dimension mismatch")
    return all(
        c < b and a < d
        for a, b, c, d in zip(open_box.lo, open_box.hi, closed_box.lo, closed_box.hi)
    )


def _box_minus(a: Box, b: Box) -> list[Box]:
    """a \\ b as disjoint half-open boxes (possibly just [a])."""
    overlap = a.intersect(b)
    if overlap is None or overlap.is_empty:
        return [] if a.is_empty else [a]
    pieces: list[Box] = []
    lo = list(a.lo)
    hi = list(a.hi)
    for i in range(a.dim):
        if lo[i] < overlap.lo[i]:
            piece_hi = list(hi)
            piece_hi[i] = overlap.lo[i]
            pieces.append(Box(tuple(lo), tuple(piece_hi)))
        if overlap.hi[i] < hi[i]:
            piece_lo = list(lo)
            piece_lo[i] = overlap.hi[i]
            pieces.append(Box(tuple(piece_lo), tuple(hi)))
        lo[i] = overlap.lo[i]
        hi[i] = overlap.hi[i]
    return [p for p in pieces if not p.is_empty]


_Raw = tuple[tuple[Coord, ...], tuple[Coord, ...]]


def _canon_rec(raw: list[_Raw], d: int) -> tuple[_Raw, ...]:
    """Canonical slab decomposition of a union of non-empty d-dim raw boxes."""
    if d == 1:
        ivs = sorted((lo[0], hi[0]) for lo, hi in raw)
        merged: list[list[Coord]] = []
        for lo0, hi0 in ivs:
            if merged and lo0 <= merged[-1][1]:
                if hi0 > merged[-1][1]:
                    merged[-1][1] = hi0
            else:
                merged.append([lo0, hi0])
        return tuple(((lo0,), (hi0,)) for lo0, hi0 in merged)

    cuts = sorted({lo[0] for lo, _ in raw} | {hi[0] for _, hi in raw})
    slabs: list[tuple[Coord, Coord, tuple[_Raw, ...]]] = []
    for x0, x1 in itertools.pairwise(cuts):
        tails = [(lo[1:], hi[1:]) for lo, hi in raw if lo[0] <= x0 and x1 <= hi[0]]
        if not tails:
            continue
        rest = _canon_rec(tails, d - 1)
        if slabs and slabs[-1][1] == x0 and slabs[-1][2] == rest:
            slabs[-1] = (slabs[-1][0], x1, rest)
        else:
            slabs.append((x0, x1, rest))
    out: list[_Raw] = []
    for x0, x1, rest in slabs:
        for tlo, thi in rest:
            out.append(((x0,) + tlo, (x1,) + thi))
    return tuple(out)


def _canonical(dim: int, boxes: Iterable[Box]) -> tuple[Box, ...]:
    raw: list[_Raw] = []
    for b in boxes:
        if b.dim != dim:
            raise DimensionMismatchError(f"{b.dim}-dim box in {dim}-dim union")
        if not b.is_empty:
            raw.append((b.lo, b.hi))
    if not raw:
        return ()
    return tuple(Box(lo, hi) for lo, hi in _canon_rec(raw, dim))


@dataclass(frozen=True)
class BoxUnion:
    """Canonical finite disjoint union of half-open boxes.

    Always construct through :meth:`from_boxes` (or the set operations);
    the constructor trusts its input.  Because the representation is
    canonical, structural equality is set equality and instances are
    usable as dictionary keys.
    """

    dim: int
    boxes: tuple[Box, ...]

    @staticmethod
    def from_boxes(dim: int, boxes: Iterable[Box]) -> "BoxUnion":
        return BoxUnion(dim, _canonical(dim, boxes))

    @staticmethod
    def empty(dim: int) -> "BoxUnion":
        return BoxUnion(dim, ())

    @staticmethod
    def single(box: Box) -> "BoxUnion":
        return BoxUnion.from_boxes(box.dim, [box])

    @property
    def is_empty(self) -> bool:
        return not self.boxes

    def _check_dim(self, other: "BoxUnion") -> None:
        if other.dim != self.dim:
            raise DimensionMismatchError(f"union of dimension {self.dim} vs {other.dim}")

    def union(self, other: "BoxUnion") -> "BoxUnion":
        self._check_dim(other)
        return BoxUnion.from_boxes(self.dim, self.boxes + other.boxes)

    def intersect(self, other: "BoxUnion") -> "BoxUnion":
        self._check_dim(other)
        pieces: list[Box] = []
        for a in self.boxes:
            for b in other.boxes:
                ab = a.intersect(b)
                if ab is not None and not ab.is_empty:
                    pieces.append(ab)
        return BoxUnion.from_boxes(self.dim, pieces)

    def intersect_box(self, box: Box) -> "BoxUnion":
        pieces: list[Box] = []
        for a in self.boxes:
            ab = a.intersect(box)
            if ab is not None and not ab.is_empty:
                pieces.append(ab)
        return BoxUnion.from_boxes(self.dim, pieces)

    def subtract(self, other: "BoxUnion") -> "BoxUnion":
        self._check_dim(other)
        pieces: list[Box] = []
        for a in self.boxes:
            parts = [a]
            for b in other.boxes:
                parts = [q for p in parts for q in _box_minus(p, b)]
                if not parts:
                    break
            pieces.extend(parts)
        return BoxUnion.from_boxes(self.dim, pieces)

    def translate(self, v: Sequence[object]) -> "BoxUnion":
        # A uniform shift preserves the canonical slab structure, so the
        # shifted boxes are already canonical.
        return BoxUnion(self.dim, tuple(b.translate(v) for b in self.boxes))

    def measure(self) -> Fraction:
        total = Fraction(0)
        for b in self.boxes:
            total += b.volume()
        return total

    def contains_point(self, x: Sequence[object]) -> bool:
        return any(b.contains_point(x) for b in self.boxes)

    def contains_union(self, other: "BoxUnion") -> bool:
        return other.subtract(self).is_empty

    def bounding_box(self) -> Box | None:
        if not self.boxes:
            return None
        lo = tuple(min(b.lo[i] for b in self.boxes) for i in range(self.dim))
        hi = tuple(max(b.hi[i] for b in self.boxes) for i in range(self.dim))
        return Box(lo, hi)

    def __repr__(self) -> str:
        return f"BoxUnion(dim={self.dim}, boxes={list(self.boxes)!r})"


def volume(box: Box) -> Fraction:
    return box.volume()


@dataclass(frozen=True)
class TileReport:
    """Outcome of :func:`tile_check`: both sides of the tiling identity."""

    base: Box
    q: tuple[Fraction, ...]
    scaled_box: Box
    refinement: Box
    counts_per_axis: tuple[int, ...]
    count: int
    scaled_volume: Fraction
    tiles_volume: Fraction
    equal: bool
    tiling_verified: bool


def tile_check(base: Box, q: Sequence[object], *, max_tiles: int = DEFAULT_TILE_CAP) -> TileReport:
    """Decompose the q-scaled box into exact translates of a refinement box.

    With base side lengths ``a_i`` and positive rationals ``q_i = p_i/s_i``
    in lowest terms, the box ``[0, q_i * a_i)`` splits into exactly
    ``prod(p_i)`` translates of the refinement box ``[0, a_i / s_i)``:
    scaling by a rational never needs more than a common refinement.  Both
    the volume identity and the literal disjoint tiling are verified.
    """
    if not base.is_bounded:
        raise UnboundedBoxError("tile_check needs a bounded base box")
    if not base.has_positive_sides():
        raise PreconditionError("tile_check needs a base box with positive sides")
    scale = tuple(as_fraction(v) for v in q)
    if len(scale) != base.dim:
        raise DimensionMismatchError(f"q of length {len(scale)} for dimension {base.dim}")
    if any(v <= 0 for v in scale):
        raise PreconditionError(f"q must be positive, got {scale}")

    sides = base.sides()
    ref_sides = tuple(a / v.denominator for a, v in zip(sides, scale))
    counts = tuple(v.numerator for v in scale)
    count = prod(counts)
    zero = Fraction(0)
    scaled_box = Box((zero,) * base.dim, tuple(v * a for v, a in zip(scale, sides)))
    refinement = Box((zero,) * base.dim, ref_sides)

    if count > max_tiles:
        raise BudgetError(f"tiling would need {count} boxes, above the cap of {max_tiles}")

    tiles = [
        refinement.translate([i * s for i, s in zip(idx, ref_sides)])
        for idx in itertools.product(*(range(c) for c in counts))
    ]
    tiled = BoxUnion.from_boxes(base.dim, tiles)
    tiling_verified = tiled == BoxUnion.single(scaled_box)

    scaled_volume = scaled_box.volume()
    tiles_volume = count * refinement.volume()
    return TileReport(
        base=base,
        q=scale,
        scaled_box=scaled_box,
        refinement=refinement,
        counts_per_axis=counts,
        count=count,
        scaled_volume=scaled_volume,
        tiles_volume=tiles_volume,
        equal=scaled_volume == tiles_volume,
        tiling_verified=tiling_verified,
    )
