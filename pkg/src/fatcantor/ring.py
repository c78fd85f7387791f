"""Set expressions over clipped Cantor translates, with certified bounds.

An expression tree denotes a set built from generators ``(C^d + x) ∩ J``
(``Gen``) by union, set difference, and intersection.  Evaluating the tree
with the stage-n approximation in place of ``C^d`` gives an exactly
computable box union whose measure brackets the true measure: each leaf's
approximation differs from its true set inside a shell of measure at most
``stage_defect(n)``, and symmetric differences propagate subadditively
through all three connectives.  That yields the certified interval

    [max(0, m - L*defect), m + L*defect],     m = stage measure, L = leaves,

tightened to upper = m when the tree has no ``Diff`` node (then the stage
evaluation is an outer approximation).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .cantor import DEFAULT_BOX_CAP, CantorSchedule
from .errors import BudgetError, DimensionMismatchError, PreconditionError
from .geometry import Box, BoxUnion
from .rationals import as_fraction

DEFAULT_STAGE_CAP = 24
DEFAULT_RN_CAP = 4096
REFERENCE_STAGE = 4


@dataclass(frozen=True)
class Gen:
    """Generator leaf: the ambient Cantor product translated by ``translation``
    and clipped to ``clip`` (which may be unbounded or empty)."""

    translation: tuple[Fraction, ...]
    clip: Box

    def __post_init__(self) -> None:
        t = tuple(as_fraction(v) for v in self.translation)
        if len(t) != self.clip.dim:
            raise DimensionMismatchError(
                f"translation of length {len(t)} with clip of dimension {self.clip.dim}"
            )
        object.__setattr__(self, "translation", t)

    @property
    def dim(self) -> int:
        return self.clip.dim


@dataclass(frozen=True)
class Union:
    left: "RingExpr"
    right: "RingExpr"


@dataclass(frozen=True)
class Diff:
    left: "RingExpr"
    right: "RingExpr"


@dataclass(frozen=True)
class Inter:
    left: "RingExpr"
    right: "RingExpr"


RingExpr = "Gen | Union | Diff | Inter"


def expr_dim(e: "RingExpr") -> int:
    if isinstance(e, Gen):
        return e.dim
    left = expr_dim(e.left)
    right = expr_dim(e.right)
    if left != right:
        raise DimensionMismatchError(f"mixed dimensions {left} and {right} in expression")
    return left


def iter_leaves(e: "RingExpr") -> Iterator[Gen]:
    """Generator leaves in left-to-right order."""
    if isinstance(e, Gen):
        yield e
    else:
        yield from iter_leaves(e.left)
        yield from iter_leaves(e.right)


def leaf_count(e: "RingExpr") -> int:
    return sum(1 for _ in iter_leaves(e))


def has_diff(e: "RingExpr") -> bool:
    if isinstance(e, Gen):
        return False
    if isinstance(e, Diff):
        return True
    return has_diff(e.left) or has_diff(e.right)


def base_expr(s: CantorSchedule) -> Gen:
    """The untranslated ambient set clipped to the unit cube."""
    return Gen((Fraction(0),) * s.d, Box.unit_cube(s.d))


def simplify(e: "RingExpr") -> "RingExpr | None":
    """Structurally simplify; ``None`` denotes the empty set.

    Rules: a leaf with an empty clip is empty; X \\ X and ops with an empty
    side collapse; Union/Inter(X, X) -> X.  Structural equality implies set
    equality, so the denoted set is preserved exactly, and the leaf count
    never grows, so every bound proved for the simplified tree is at least
    as tight.
    """
    if isinstance(e, Gen):
        return None if e.clip.is_empty else e
    left = simplify(e.left)
    right = simplify(e.right)
    if isinstance(e, Union):
        if left is None:
            return right
        if right is None:
            return left
        return left if left == right else Union(left, right)
    if isinstance(e, Diff):
        if left is None:
            return None
        if right is None:
            return left
        return None if left == right else Diff(left, right)
    if left is None or right is None:
        return None
    return left if left == right else Inter(left, right)


def approx_set(
    e: "RingExpr", s: CantorSchedule, n: int, *, box_cap: int = DEFAULT_BOX_CAP
) -> BoxUnion:
    """Evaluate the tree with stage-n boxes in place of the limit set."""
    if expr_dim(e) != s.d:
        raise DimensionMismatchError(f"expression dimension {expr_dim(e)} vs schedule {s.d}")
    stage = s.stage_approx(n, box_cap=box_cap)

    def run(node: "RingExpr") -> BoxUnion:
        if isinstance(node, Gen):
            return stage.translate(node.translation).intersect_box(node.clip)
        left = run(node.left)
        right = run(node.right)
        if isinstance(node, Union):
            return left.union(right)
        if isinstance(node, Diff):
            return left.subtract(right)
        return left.intersect(right)

    return run(e)


@dataclass(frozen=True)
class MeasureBounds:
    """Certified rational interval around the true measure of an expression."""

    lower: Fraction
    upper: Fraction
    stage: int
    leaf_count: int

    def __post_init__(self) -> None:
        if self.lower < 0 or self.lower > self.upper:
            raise PreconditionError(f"malformed bounds [{self.lower}, {self.upper}]")

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def intersects(self, other: "MeasureBounds") -> bool:
        return self.lower <= other.upper and other.lower <= self.upper


def measure_bounds(
    e: "RingExpr", s: CantorSchedule, n: int, *, box_cap: int = DEFAULT_BOX_CAP
) -> MeasureBounds:
    """Bracket the true measure of ``e`` using the stage-n evaluation."""
    simplified = simplify(e)
    if simplified is None:
        return MeasureBounds(Fraction(0), Fraction(0), stage=n, leaf_count=0)
    m = approx_set(simplified, s, n, box_cap=box_cap).measure()
    L = leaf_count(simplified)
    budget = L * s.stage_defect(n)
    lower = max(Fraction(0), m - budget)
    upper = m if not has_diff(simplified) else m + budget
    return MeasureBounds(lower, upper, stage=n, leaf_count=L)


def premeasure(
    e: "RingExpr",
    s: CantorSchedule,
    tol: Fraction,
    *,
    stage_cap: int = DEFAULT_STAGE_CAP,
    box_cap: int = DEFAULT_BOX_CAP,
) -> MeasureBounds:
    """Deepen the stage until the certified interval is narrower than ``tol``."""
    tol = as_fraction(tol)
    if tol <= 0:
        raise PreconditionError(f"tolerance must be positive, got {tol}")
    best: MeasureBounds | None = None
    for n in range(1, stage_cap + 1):
        try:
            bounds = measure_bounds(e, s, n, box_cap=box_cap)
        except BudgetError as exc:
            raise BudgetError(
                f"box cap hit at stage {n} before reaching tolerance {tol}", partial=best
            ) from exc
        if best is None or bounds.width < best.width:
            best = bounds
        if bounds.width <= tol:
            return bounds
    raise BudgetError(
        f"stage cap {stage_cap} reached with width {best.width if best else '?'} > {tol}",
        partial=best,
    )


def clip_to_box(e: "RingExpr", box: Box) -> "RingExpr":
    """Intersect an expression with a box, structurally.

    Clipping pushes to the leaves: generators absorb the box into their
    clip, unions and intersections distribute, and a difference clips only
    its left side ((A \\ B) ∩ I = (A ∩ I) \\ B).  The leaf count is
    unchanged and the denoted set is exactly the intersection.
    """
    if expr_dim(e) != box.dim:
        raise DimensionMismatchError(f"clip box dimension {box.dim} vs expression {expr_dim(e)}")
    if isinstance(e, Gen):
        new_clip = e.clip.intersect(box)
        return Gen(e.translation, new_clip if new_clip is not None else Box.empty(e.dim))
    if isinstance(e, Union):
        return Union(clip_to_box(e.left, box), clip_to_box(e.right, box))
    if isinstance(e, Diff):
        return Diff(clip_to_box(e.left, box), e.right)
    return Inter(clip_to_box(e.left, box), e.right)


def generate_rn(
    pool: Sequence["RingExpr"],
    n: int,
    s: CantorSchedule,
    *,
    reference_stage: int = REFERENCE_STAGE,
    max_size: int = DEFAULT_RN_CAP,
    box_cap: int = DEFAULT_BOX_CAP,
) -> list["RingExpr"]:
    """n-th layer of the ring tower: R_1 = pool, R_{k+1} = {A ∪ B, A \\ B}.

    Elements are deduplicated by their canonical stage evaluation at
    ``reference_stage`` (first occurrence wins, so the order is the
    deterministic enumeration order).  Two semantically distinct sets that
    agree at the reference stage would merge; callers who care can raise
    the reference stage.
    """
    if n < 1:
        raise PreconditionError(f"ring layers start at 1, got {n}")
    if not pool:
        raise PreconditionError("empty generator pool")

    def key(expr: "RingExpr") -> BoxUnion:
        return approx_set(expr, s, reference_stage, box_cap=box_cap)

    current: list["RingExpr"] = []
    seen: dict[BoxUnion, int] = {}
    for e in pool:
        k = key(e)
        if k not in seen:
            seen[k] = len(current)
            current.append(e)
    for _ in range(n - 1):
        nxt: list["RingExpr"] = []
        keys: dict[BoxUnion, int] = {}
        for a in current:
            for b in current:
                for candidate in (Union(a, b), Diff(a, b)):
                    k = key(candidate)
                    if k not in keys:
                        keys[k] = len(nxt)
                        nxt.append(candidate)
                        if len(nxt) > max_size:
                            raise BudgetError(
                                f"ring layer exceeded {max_size} elements", partial=current
                            )
        current = nxt
        seen = keys
    return current


@dataclass(frozen=True)
class SplitReport:
    """Exact additivity of a stage evaluation across an axis half-space."""

    whole: Fraction
    inside: Fraction
    outside: Fraction
    stage: int
    equal: bool


def split_identity_check(
    e: "RingExpr",
    half_space: Box,
    s: CantorSchedule,
    n: int,
    *,
    box_cap: int = DEFAULT_BOX_CAP,
) -> SplitReport:
    """Check lambda(S_n(e)) = lambda(S_n(e ∩ A)) + lambda(S_n(e ∩ A^c)) exactly.

    ``half_space`` must be an axis half-space; with half-open boxes the two
    clipped evaluations partition the original one, so the identity holds
    with exact rational arithmetic, not merely up to tolerance.
    """
    if not half_space.is_half_space():
        raise PreconditionError(f"{half_space!r} is not an axis half-space")
    whole = approx_set(e, s, n, box_cap=box_cap).measure()
    inside = approx_set(clip_to_box(e, half_space), s, n, box_cap=box_cap).measure()
    outside = approx_set(
        clip_to_box(e, half_space.complement_half_space()), s, n, box_cap=box_cap
    ).measure()
    return SplitReport(
        whole=whole,
        inside=inside,
        outside=outside,
        stage=n,
        equal=whole == inside + outside,
    )
