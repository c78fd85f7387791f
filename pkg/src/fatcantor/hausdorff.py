"""Gauge sums over stage covers, diameter-volume checks, and level solving.

The stage-``n`` boxes of the construction form a cover of the limit set by
``2**(n*d)`` congruent cubes of side ``stage_interval_length(n)``, so the
sum of ``diam**s`` over the cover is a single closed-form quantity.  Its
diameter involves ``sqrt(d)``, hence values live in the quadratic field
ℚ[√d] rather than plain rationals; comparisons against rational thresholds
are done by squaring, never by floating point.

Also here: the explicit pipeline turning the measure of the limit set into
a covered cube (via :mod:`.packing`), and the one-dimensional level
function ``x -> measure(limit set ∩ [0, x])`` together with a certified
bisection inverse.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .cantor import CantorSchedule
from .errors import BudgetError, PreconditionError, UnboundedBoxError
from .geometry import Box, BoxUnion
from .packing import CubeFamily, PackingLayout, layout_covers, pack_cover
from .quadratic import ExtendedRational
from .rationals import as_fraction, pow2
from .ring import MeasureBounds


@dataclass(frozen=True)
class PowerGauge:
    """The gauge ``t -> t**exponent`` for a nonnegative integer exponent."""

    exponent: int

    def __post_init__(self) -> None:
        if not isinstance(self.exponent, int) or self.exponent < 0:
            raise PreconditionError(
                f"gauge exponent must be a nonnegative integer, got {self.exponent!r}"
            )

    def of_sqrt(self, squared: Fraction) -> ExtendedRational:
        """Evaluate the gauge at ``sqrt(squared)``, exactly."""
        squared = as_fraction(squared)
        if squared < 0:
            raise PreconditionError("cannot evaluate a gauge at sqrt of a negative value")
        half, odd = divmod(self.exponent, 2)
        scalar = ExtendedRational.from_rational(squared**half)
        if not odd:
            return scalar
        return scalar * ExtendedRational.sqrt_fraction(squared)


def min_stage_for_delta(s: CantorSchedule, delta: Fraction) -> int:
    """Smallest stage whose boxes have diameter strictly below ``delta``.

    The stage-n boxes are cubes of side ``l_n``, so their diameter is
    ``l_n * sqrt(d)``; the comparison is done on squares to stay rational.
    """
    delta = as_fraction(delta)
    if delta <= 0:
        raise PreconditionError(f"delta must be positive, got {delta}")
    n = 0
    while True:
        side = s.stage_interval_length(n)
        if side * side * s.d < delta * delta:
            return n
        n += 1


@dataclass(frozen=True)
class DeltaCover:
    """Closed-form summary of the stage cover used for a gauge sum."""

    stage: int
    delta: Fraction
    count: int
    side: Fraction
    diam_squared: Fraction
    value: ExtendedRational


def nu_delta_upper(
    s: CantorSchedule,
    gauge: PowerGauge,
    delta: Fraction,
    *,
    stage: int | None = None,
) -> DeltaCover:
    """Upper bound for the gauge sum at scale ``delta`` via a stage cover.

    By default the first stage fine enough for ``delta`` is used; passing
    ``stage`` explicitly selects a deeper (still admissible) cover, which
    can only improve the bound for decaying gauges.
    """
    delta = as_fraction(delta)
    minimal = min_stage_for_delta(s, delta)
    if stage is None:
        stage = minimal
    elif stage < minimal:
        raise PreconditionError(
            f"stage {stage} boxes are not finer than delta={delta}; "
            f"the first admissible stage is {minimal}"
        )
    side = s.stage_interval_length(stage)
    count = 1 << (stage * s.d)
    diam_sq = side * side * s.d
    value = gauge.of_sqrt(diam_sq) * count
    return DeltaCover(
        stage=stage,
        delta=delta,
        count=count,
        side=side,
        diam_squared=diam_sq,
        value=value,
    )


def diam_squared(u: Box | BoxUnion) -> Fraction:
    """Squared diameter (of the closure), exact.

    The sup of pairwise distances over a finite union of boxes is attained
    at a pair of corners, so the square is a plain rational even though the
    diameter itself usually is not.
    """
    boxes = [u] if isinstance(u, Box) else list(u.boxes)
    if not boxes or all(b.is_empty for b in boxes):
        raise PreconditionError("diameter of the empty set is undefined here")
    corners: list[tuple[Fraction, ...]] = []
    for b in boxes:
        if not b.is_bounded:
            raise UnboundedBoxError("diameter requires bounded boxes")
        for picks in itertools.product(*zip(b.lo, b.hi)):
            corners.append(picks)
    best = Fraction(0)
    for i in range(len(corners)):
        for j in range(i + 1, len(corners)):
            dist = sum((p - q) ** 2 for p, q in zip(corners[i], corners[j]))
            if dist > best:
                best = dist
    return best


@dataclass(frozen=True)
class DiamVolumeReport:
    volume: Fraction
    diam_squared: Fraction
    dim: int
    ok: bool


def diam_volume_check(u: Box | BoxUnion) -> DiamVolumeReport:
    """Check ``volume <= diam**dim`` by comparing squares."""
    if isinstance(u, Box):
        dim = u.dim
        vol = volume_of(u)
    else:
        dim = u.dim
        vol = u.measure()
    dsq = diam_squared(u)
    ok = vol * vol <= dsq**dim
    return DiamVolumeReport(volume=vol, diam_squared=dsq, dim=dim, ok=ok)


def volume_of(b: Box) -> Fraction:
    return b.volume()


def _int_root_floor(x: int, k: int) -> int:
    """Largest integer r with r**k <= x (x >= 0, k >= 1)."""
    if x < 0:
        raise PreconditionError("integer root of a negative number")
    if x in (0, 1) or k == 1:
        return x
    # Integer Newton seeded above the root (2**ceil(bits/k) >= x**(1/k)),
    # descending monotonically; the final touch-up loops run O(1) times.
    r = 1 << ((x.bit_length() + k - 1) // k)
    while True:
        nxt = ((k - 1) * r + x // r ** (k - 1)) // k
        if nxt >= r:
            break
        r = nxt
    while r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def rational_root(q: Fraction, k: int) -> Fraction | None:
    """Exact k-th root of a nonnegative rational, or None if irrational."""
    q = as_fraction(q)
    if q < 0 or k < 1:
        raise PreconditionError("rational_root needs q >= 0 and k >= 1")
    rn = _int_root_floor(q.numerator, k)
    rd = _int_root_floor(q.denominator, k)
    if rn**k == q.numerator and rd**k == q.denominator:
        return Fraction(rn, rd)
    return None


def dyadic_root_floor(q: Fraction, k: int, bits: int) -> Fraction:
    """Largest dyadic ``m / 2**bits`` whose k-th power is <= q."""
    q = as_fraction(q)
    if q <= 0:
        raise PreconditionError("dyadic_root_floor needs q > 0")
    scaled = (q.numerator << (k * bits)) // q.denominator
    m = _int_root_floor(scaled, k)
    return Fraction(m, 1 << bits)


def side_scale_for(d: int, a: Fraction, *, bits: int = 24) -> tuple[Fraction, bool]:
    """The scale ``alpha`` with ``alpha**d = a / (2 * d**(d/2))``.

    Returns ``(alpha, exact)``.  When the defining equation has no rational
    solution, the largest dyadic value on a ``2**-bits`` grid that does not
    exceed the true root is returned instead (``exact=False``); undershooting
    is sound for every downstream use: the volume hypothesis of the packing
    step only gets easier and the covered cube only shrinks.
    """
    a = as_fraction(a)
    if d < 1 or a <= 0:
        raise PreconditionError("need dimension >= 1 and a > 0")
    # alpha**(2d) = a**2 / (4 * d**d) is rational regardless of parity.
    q = a * a / (4 * Fraction(d) ** d)
    exact = rational_root(q, 2 * d)
    if exact is not None:
        return exact, True
    while True:
        approx = dyadic_root_floor(q, 2 * d, bits)
        if approx > 0:
            return approx, False
        bits *= 2


@dataclass(frozen=True)
class ChainChecks:
    """The pipeline's inequality chain, each link an exact comparison.

    ``cube_constant`` records that sets are replaced by their enclosing
    axis-aligned cube (constant 1) rather than an enclosing ball, which is
    what keeps every quantity inside ℚ[√d].
    """

    sum_exceeds_half_a: bool
    diam_preserved: bool
    alpha_consistent: bool
    covers_target: bool
    gauge_dominates_covered_volume: bool
    cube_constant: str = "enclosing axis cube, constant 1"

    def all_ok(self) -> bool:
        return (
            self.sum_exceeds_half_a
            and self.diam_preserved
            and self.alpha_consistent
            and self.covers_target
            and self.gauge_dominates_covered_volume
        )


@dataclass(frozen=True)
class CorollaryReport:
    """Record of the measure-to-covered-cube pipeline, step by step."""

    d: int
    a: Fraction
    delta: Fraction
    cover: DeltaCover
    alpha: Fraction
    alpha_exact: bool
    kept: int
    family: CubeFamily
    layout: PackingLayout
    covered_cube: Box
    verified: bool
    checks: ChainChecks


def corollary_pipeline(
    s: CantorSchedule,
    delta: Fraction,
    *,
    a: Fraction | None = None,
    bits: int = 24,
    verify: bool = True,
) -> CorollaryReport:
    """From a measure lower bound to an explicitly covered cube.

    Steps: (1) validate ``0 < a <= limit measure``; (2) pick the first
    stage fine enough for ``delta``; (3) take the stage boxes as the cover
    and record the gauge sum for the exponent ``d``; (4) solve
    ``alpha**d = a / (2 d**(d/2))``; (5) keep the shortest prefix of the
    cover whose normalized volumes reach 1; (6) pack those cubes into a
    covering of ``[0, alpha/2]**d``; (7) optionally re-verify the coverage
    by exact box subtraction.
    """
    delta = as_fraction(delta)
    if a is None:
        a = s.limit_measure()
    a = as_fraction(a)
    if not 0 < a <= s.limit_measure():
        raise PreconditionError(
            f"a must lie in (0, {s.limit_measure()}], got {a}"
        )
    cover = nu_delta_upper(s, PowerGauge(s.d), delta)
    alpha, alpha_exact = side_scale_for(s.d, a, bits=bits)

    ratio = (cover.side / alpha) ** s.d
    total = Fraction(0)
    kept = 0
    while total < 1:
        if kept >= cover.count:
            raise AssertionError(
                "stage cover exhausted before reaching the packing hypothesis;"
                " the measure bound makes this impossible"
            )
        total += ratio
        kept += 1
    family = CubeFamily(s.d, (cover.side,) * kept)
    layout = pack_cover(family, target_side=Fraction(1, 2), alpha=alpha)
    verified = layout_covers(family, layout) if verify else False

    # Exact inequality chain.  The packing inputs are axis cubes with the
    # same side as the cover boxes, so their diameters agree identically.
    half_a = ExtendedRational.from_rational(a / 2)
    sum_ok = (cover.value - half_a).sign() > 0
    cube_diam_sq = diam_squared(Box.cube((Fraction(0),) * s.d, cover.side))
    diam_ok = ExtendedRational.sqrt_fraction(cube_diam_sq) == ExtendedRational.sqrt_fraction(
        cover.diam_squared
    )
    q = a * a / (4 * Fraction(s.d) ** s.d)
    alpha_pow = alpha ** (2 * s.d)
    alpha_ok = alpha_pow == q if alpha_exact else alpha_pow <= q
    covered_vol = layout.target.volume()
    gauge_ok = (cover.value - ExtendedRational.from_rational(covered_vol)).sign() >= 0
    checks = ChainChecks(
        sum_exceeds_half_a=sum_ok,
        diam_preserved=diam_ok,
        alpha_consistent=alpha_ok,
        covers_target=verified if verify else True,
        gauge_dominates_covered_volume=gauge_ok,
    )
    return CorollaryReport(
        d=s.d,
        a=a,
        delta=delta,
        cover=cover,
        alpha=alpha,
        alpha_exact=alpha_exact,
        kept=kept,
        family=family,
        layout=layout,
        covered_cube=layout.target,
        verified=verified,
        checks=checks,
    )


# ---------------------------------------------------------------------------
# The level function (measure below a first-coordinate threshold) and its
# certified inverse.
# ---------------------------------------------------------------------------


def _stage_level(s: CantorSchedule, x: Fraction, n: int) -> Fraction:
    """Exact ``measure(stage-n set ∩ [0, x])`` by descending one branch.

    Each stage-k block carries exactly ``lambda_n / 2**k`` of the stage-n
    set, so whole blocks to the left of ``x`` are summed in closed form and
    only the block containing ``x`` is ever split: O(n) work.
    """
    if x <= 0:
        return Fraction(0)
    if x >= 1:
        return s.stage_measure_1d(n)
    lam = s.stage_measure_1d(n)
    acc = Fraction(0)
    lo, hi = Fraction(0), Fraction(1)
    for k in range(1, n + 1):
        child = s.stage_interval_length(k)
        left_hi = lo + child
        right_lo = hi - child
        if x >= right_lo:
            acc += lam * pow2(-k)
            lo = right_lo
        elif x <= left_hi:
            hi = left_hi
        else:
            # x sits in the removed gap: the left child lies fully below it
            # and the right child fully above, so the sum is complete.
            return acc + lam * pow2(-k)
    return acc + max(Fraction(0), min(x, hi) - lo)


def range_function(s: CantorSchedule, x: Fraction, stage: int) -> MeasureBounds:
    """Certified bounds for ``measure(limit set ∩ {first coordinate <= x})``.

    Agrees exactly with clipping the base generator to the half-space and
    taking its measure bounds at the same stage — the single-branch descent
    just computes that in O(stage) arithmetic instead of materializing
    ``2**(stage*d)`` boxes.  Both bounds are monotone nondecreasing in ``x``
    at fixed stage.
    """
    if stage < 0:
        raise PreconditionError("stage must be nonnegative")
    x = as_fraction(x)
    at = _stage_level(s, x, stage) * s.stage_measure_1d(stage) ** (s.d - 1)
    lower = at - s.stage_defect(stage)
    if lower < 0:
        lower = Fraction(0)
    return MeasureBounds(lower=lower, upper=at, stage=stage, leaf_count=1)


@dataclass(frozen=True)
class LevelSolution:
    """Result of inverting the level function at ``target``.

    ``status`` is ``"converged"`` when the certified ``[lo, hi]`` interval
    of abscissas shrank below half the tolerance, or ``"straddle"`` when
    some midpoint's own level bounds pin the target more tightly than the
    tolerance (the level function is locally flat there, so no point does
    better).  The invariant is exact throughout:
    level(lo) <= target <= level(hi); either way
    ``|bracket.midpoint() - target| <= tol``.
    """

    target: Fraction
    point: Fraction
    lo: Fraction
    hi: Fraction
    bracket: MeasureBounds
    iterations: int
    status: str


def _classify_point(
    s: CantorSchedule, x: Fraction, target: Fraction, tol: Fraction
) -> tuple[str, MeasureBounds]:
    """Certify level(x) <= target ("le"), >= target ("ge"), or "straddle"."""
    n = 1
    while True:
        br = range_function(s, x, n)
        if br.upper <= target:
            return "le", br
        if br.lower >= target:
            return "ge", br
        if br.width <= tol:
            return "straddle", br
        n += 1


def _stage_for_width(s: CantorSchedule, width: Fraction) -> int:
    n = 1
    while s.stage_defect(n) > width:
        n += 1
    return n


def solve_level(
    s: CantorSchedule,
    target: Fraction,
    *,
    tol: Fraction = Fraction(1, 1 << 20),
    max_iter: int = 10_000,
) -> LevelSolution:
    """Find ``x`` whose level is ``target``, by certified bisection.

    Maintains level(lo) <= target <= level(hi) with exact comparisons at
    adaptively chosen stages.  The level function is 1-Lipschitz, so once
    ``hi - lo <= tol/2`` the midpoint's true level is within ``tol/2`` of
    the target; its bounds are then refined below width ``tol/2`` as well,
    giving ``|midpoint(bounds) - target| <= tol``.  Midpoints whose bounds
    cannot be separated from the target (flat spots of the level function)
    end the search early with an even tighter ``"straddle"`` result.
    """
    target = as_fraction(target)
    tol = as_fraction(tol)
    if tol <= 0:
        raise PreconditionError("tolerance must be positive")
    top = s.limit_measure()
    if not 0 <= target <= top:
        raise PreconditionError(f"target must lie in [0, {top}], got {target}")
    half = tol / 2
    lo, hi = Fraction(0), Fraction(1)
    iterations = 0
    while hi - lo > half:
        if iterations >= max_iter:
            raise BudgetError(
                f"bisection did not reach tolerance within {max_iter} iterations",
                partial=(lo, hi),
            )
        mid = (lo + hi) / 2
        verdict, br = _classify_point(s, mid, target, half)
        if verdict == "le":
            lo = mid
        elif verdict == "ge":
            hi = mid
        else:
            return LevelSolution(
                target=target,
                point=mid,
                lo=mid,
                hi=mid,
                bracket=br,
                iterations=iterations + 1,
                status="straddle",
            )
        iterations += 1
    point = (lo + hi) / 2
    pbr = range_function(s, point, _stage_for_width(s, half))
    return LevelSolution(
        target=target,
        point=point,
        lo=lo,
        hi=hi,
        bracket=pbr,
        iterations=iterations,
        status="converged",
    )
