"""Polar tick grid, LP range positions, and tick-crossing swaps.

Liquidity lives on angle ranges: a position contributes its liquidity to
the pool's scale at every angle in [lower, upper) (half-open, so a
boundary belongs to the segment above it). Aggregate liquidity is kept as
signed deltas at the range boundaries; since fixed-point addition is
exact, the prefix sums match a brute-force sum over containing positions
bit for bit, in any insertion order.

A swap that traverses several tick segments trades each segment on its
own scaled circle: within a segment the scale is the active liquidity
there, and at a boundary the virtual reserves re-anchor to the new
circle at the same angle, which keeps the marginal price (cot of the
angle) continuous across the crossing.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import (
    DomainError,
    InsufficientLiquidityError,
    NotFoundError,
    NumericError,
    ValidationError,
)
from .fixed import (
    FixedDecimal,
    ONE,
    ZERO,
    fp_acos,
    fp_add,
    fp_div,
    fp_mul,
    fp_sin,
    fp_sin_cos,
    fp_sub,
)
from .invariant import CurveParams, PoolState
from .polar import (
    NINETY,
    angle_of_state,
    angle_to_price,
    deg_to_rad,
    rad_to_deg,
)
from .swap import SwapQuote, effective_pair_circle

F = FixedDecimal

_NINETY_RAW = 90 * 10 ** 18


@dataclass(frozen=True)
class TickGrid:
    """Uniform tick granularity; the spacing must divide 90 evenly."""

    spacing_deg: FixedDecimal = field(default_factory=lambda: ONE)

    def __post_init__(self):
        if self.spacing_deg <= ZERO:
            raise ValidationError("tick spacing must be positive")
        if _NINETY_RAW % self.spacing_deg.raw != 0:
            raise ValidationError("tick spacing must divide 90 degrees evenly")

    @property
    def tick_count(self) -> int:
        return _NINETY_RAW // self.spacing_deg.raw

    def is_aligned(self, angle_deg: FixedDecimal) -> bool:
        return (
            ZERO <= angle_deg <= NINETY
            and angle_deg.raw % self.spacing_deg.raw == 0
        )

    def boundary(self, index: int) -> FixedDecimal:
        if not 0 <= index <= self.tick_count:
            raise ValidationError("tick index out of range")
        return FixedDecimal.from_raw(index * self.spacing_deg.raw)


@dataclass(frozen=True)
class LpPosition:
    """A liquidity amount committed over a tick-aligned angle range."""

    id: str
    lower_deg: FixedDecimal
    upper_deg: FixedDecimal
    liquidity: FixedDecimal
    side: str = "long"

    def __post_init__(self):
        if self.side not in ("long", "short"):
            raise ValidationError("side must be 'long' or 'short'")
        if self.liquidity <= ZERO:
            raise ValidationError("liquidity must be positive")
        if not self.lower_deg < self.upper_deg:
            raise ValidationError("lower bound must be below upper bound")
        if self.lower_deg < ZERO or self.upper_deg > NINETY:
            raise ValidationError("position must lie within [0, 90] degrees")

    def contains(self, angle_deg: FixedDecimal) -> bool:
        return self.lower_deg <= angle_deg < self.upper_deg

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "lower_deg": str(self.lower_deg),
            "upper_deg": str(self.upper_deg),
            "liquidity": str(self.liquidity),
            "side": self.side,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "LpPosition":
        return cls(
            id=str(obj["id"]),
            lower_deg=F(obj["lower_deg"]),
            upper_deg=F(obj["upper_deg"]),
            liquidity=F(obj["liquidity"]),
            side=obj.get("side", "long"),
        )


@dataclass(frozen=True)
class TickLedger:
    """All registered positions on one grid."""

    grid: TickGrid = field(default_factory=TickGrid)
    positions: tuple[LpPosition, ...] = ()

    def position(self, position_id: str) -> LpPosition:
        for p in self.positions:
            if p.id == position_id:
                return p
        raise NotFoundError(position_id)

    def to_list(self) -> list[dict]:
        return [p.to_dict() for p in self.positions]


def boundary_deltas(ledger: TickLedger) -> list[tuple[int, FixedDecimal]]:
    """Sorted (raw boundary angle, signed liquidity change crossing up)."""
    deltas: dict[int, FixedDecimal] = {}
    for p in ledger.positions:
        sign = ONE if p.side == "long" else -ONE
        amt = fp_mul(sign, p.liquidity)
        deltas[p.lower_deg.raw] = fp_add(deltas.get(p.lower_deg.raw, ZERO), amt)
        deltas[p.upper_deg.raw] = fp_sub(deltas.get(p.upper_deg.raw, ZERO), amt)
    return sorted((raw, d) for raw, d in deltas.items() if not d.is_zero())


def active_liquidity(ledger: TickLedger, angle_deg: FixedDecimal) -> FixedDecimal:
    """Aggregate liquidity at an angle (sum over containing positions)."""
    if angle_deg < ZERO or angle_deg > NINETY:
        raise DomainError("angle outside [0, 90] degrees")
    total = ZERO
    for raw, delta in boundary_deltas(ledger):
        if raw > angle_deg.raw:
            break
        total = fp_add(total, delta)
    if total < ZERO:
        raise NumericError("negative aggregate liquidity in the ledger")
    return total


def _check_aggregate_non_negative(ledger: TickLedger):
    total = ZERO
    for _, delta in boundary_deltas(ledger):
        total = fp_add(total, delta)
        if total < ZERO:
            raise ValidationError("short liquidity exceeds long liquidity")


def add_position(ledger: TickLedger, position: LpPosition, *,
                 _from_hedge: bool = False) -> TickLedger:
    """Register a position; bounds must sit on the grid.

    Short positions are constructible only through the hedge builder, and
    only while longs cover them everywhere.
    """
    if position.side == "short" and not _from_hedge:
        raise ValidationError("short positions are created by the hedge builder")
    if not ledger.grid.is_aligned(position.lower_deg) or not ledger.grid.is_aligned(
        position.upper_deg
    ):
        raise ValidationError("position bounds must be tick-aligned")
    if any(p.id == position.id for p in ledger.positions):
        raise ValidationError(f"duplicate position id {position.id!r}")
    updated = replace(ledger, positions=ledger.positions + (position,))
    if position.side == "short":
        _check_aggregate_non_negative(updated)
    return updated


def remove_position(ledger: TickLedger, position_id: str) -> TickLedger:
    """Drop a position by id; unknown ids raise NotFoundError."""
    ledger.position(position_id)
    remaining = tuple(p for p in ledger.positions if p.id != position_id)
    updated = replace(ledger, positions=remaining)
    _check_aggregate_non_negative(updated)
    return updated


def tick_width_in_price(grid: TickGrid, tick_index: int):
    """Price interval spanned by one tick.

    Returns (price_lo, price_hi); price_hi is None for the first tick,
    whose lower angle boundary maps to unbounded price.
    """
    if not 0 <= tick_index < grid.tick_count:
        raise ValidationError("tick index out of range")
    angle_lo = grid.boundary(tick_index)
    angle_hi = grid.boundary(tick_index + 1)
    price_lo = angle_to_price(angle_hi)
    price_hi = None if angle_lo.is_zero() else angle_to_price(angle_lo)
    return price_lo, price_hi


@dataclass(frozen=True)
class SegmentFill:
    """One constant-liquidity stretch of a tick-crossing swap."""

    index: int
    angle_from_deg: FixedDecimal
    angle_to_deg: FixedDecimal
    liquidity: FixedDecimal
    delta_in: FixedDecimal
    delta_out: FixedDecimal

    def to_csv_row(self) -> list[str]:
        return [
            str(self.index),
            str(self.angle_from_deg),
            str(self.angle_to_deg),
            str(self.liquidity),
            str(self.delta_in),
            str(self.delta_out),
        ]


SEGMENT_CSV_HEADER = [
    "segment_index", "angle_from", "angle_to", "liquidity", "delta_in", "delta_out",
]


@dataclass(frozen=True)
class TickSwapResult:
    quote: SwapQuote
    segments: tuple[SegmentFill, ...]
    final_angle_deg: FixedDecimal
    final_liquidity: FixedDecimal


def _pair_geometry(params: CurveParams, state: PoolState, scale: FixedDecimal,
                   i: int, j: int):
    """Center offset and radius of the pair circle at the given scale."""
    scaled = replace(state, liquidity_scale=scale)
    return effective_pair_circle(params, scaled, i, j)


def swap_across_ticks(params: CurveParams, ledger: TickLedger, state: PoolState,
                      token_in: int, delta_in: FixedDecimal,
                      token_out: int | None = None) -> TickSwapResult:
    """Trade across tick segments, re-scaling the curve at each crossing.

    The pool's scale within a segment is the ledger's active liquidity
    there. Runs of the arc with zero liquidity, or the arc ends, stop the
    trade with an insufficient-liquidity error carrying the partial fill.
    Crossings are supported for two-token pools; n-token pools trade
    pairwise on uniform ledgers.
    """
    if params.mode != "ccmm":
        raise ValidationError("tick traversal is defined on circular pools")
    if delta_in <= ZERO:
        raise ValidationError("delta_in must be positive")
    if token_out is None:
        if params.n != 2:
            raise ValidationError("token_out required for pools with n > 2")
        token_out = 1 - token_in
    i, j = token_in, token_out
    if i == j or not (0 <= i < params.n) or not (0 <= j < params.n):
        raise ValidationError("bad token indices")

    # canonical angle: in-token on the cosine axis, out-token on the sine
    # axis; selling the in-token always moves the angle upward
    if params.n == 2 and (i, j) == (1, 0):
        canonical_flip = True
    else:
        canonical_flip = False

    reserves = list(state.reserves)
    boundaries = boundary_deltas(ledger)

    def active_at(raw_angle: int) -> FixedDecimal:
        total = ZERO
        for raw, delta in boundaries:
            if raw > raw_angle:
                break
            total = fp_add(total, delta)
        return total

    # ledger angles are stated in canonical (token0) orientation; traversal
    # runs in trade orientation where the angle increases, which is the
    # mirrored angle when token 1 is sold
    if params.n == 2:
        canonical = angle_of_state(params, state)
        phi = fp_sub(NINETY, canonical) if canonical_flip else canonical
    else:
        scale0 = active_at(0)
        if not all(raw in (0, _NINETY_RAW) for raw, _ in boundaries):
            raise ValidationError(
                "tick crossings are two-token only; n-dim pools need a uniform ledger"
            )
        if scale0 <= ZERO:
            raise InsufficientLiquidityError(
                "ran out of liquidity: empty ledger",
                filled_in=ZERO, filled_out=ZERO,
            )
        offset0, radius0 = _pair_geometry(params, state, scale0, i, j)
        z0 = fp_div(fp_sub(offset0, reserves[i]), radius0)
        phi = rad_to_deg(fp_acos(z0))

    remaining = delta_in
    filled_in = ZERO
    filled_out = ZERO
    segments: list[SegmentFill] = []
    seg_index = 0

    def ledger_raw(trade_angle: FixedDecimal) -> int:
        # boundary angles in trade orientation
        return (_NINETY_RAW - trade_angle.raw) if canonical_flip else trade_angle.raw

    def boundaries_ahead(current: FixedDecimal):
        """Boundary raw angles strictly above the current trade angle."""
        raws = [raw for raw, _ in boundaries]
        if canonical_flip:
            converted = sorted(_NINETY_RAW - raw for raw in raws)
        else:
            converted = sorted(raws)
        return [r for r in converted if r > current.raw]

    # initial scale and pair geometry
    def scale_for(trade_angle: FixedDecimal, *, side_above: bool) -> FixedDecimal:
        # active liquidity uses half-open [lower, upper) in canonical space;
        # in trade orientation pick the segment we are about to trade in
        raw = ledger_raw(trade_angle)
        if canonical_flip:
            probe = raw - 1 if side_above else raw
        else:
            probe = raw if side_above else raw - 1
        probe = min(max(probe, 0), _NINETY_RAW)
        return active_at(probe)

    while True:
        scale = scale_for(phi, side_above=True)
        if scale <= ZERO:
            raise InsufficientLiquidityError(
                "ran out of liquidity at a dead segment",
                filled_in=filled_in, filled_out=filled_out,
                boundary_angle_deg=phi if not canonical_flip else fp_sub(NINETY, phi),
            )
        if params.n == 2:
            offset = fp_mul(params.l, scale)
            radius = offset
        else:
            offset, radius = _pair_geometry(params, state, scale, i, j)

        ahead = boundaries_ahead(phi)
        next_stop_raw = ahead[0] if ahead else _NINETY_RAW
        next_stop = FixedDecimal.from_raw(min(next_stop_raw, _NINETY_RAW))

        phi_rad = deg_to_rad(phi)
        stop_rad = deg_to_rad(next_stop)
        sin_phi, cos_phi = fp_sin_cos(phi_rad)
        sin_stop, cos_stop = fp_sin_cos(stop_rad)
        capacity = fp_mul(radius, fp_sub(cos_phi, cos_stop))

        if remaining <= capacity:
            z_end = fp_sub(cos_phi, fp_div(remaining, radius))
            phi_end_rad = fp_acos(z_end)
            out = fp_mul(radius, fp_sub(fp_sin(phi_end_rad), sin_phi))
            phi_end = rad_to_deg(phi_end_rad)
            segments.append(SegmentFill(
                index=seg_index,
                angle_from_deg=phi if not canonical_flip else fp_sub(NINETY, phi),
                angle_to_deg=phi_end if not canonical_flip else fp_sub(NINETY, phi_end),
                liquidity=scale,
                delta_in=remaining,
                delta_out=out,
            ))
            filled_in = fp_add(filled_in, remaining)
            filled_out = fp_add(filled_out, out)
            phi = phi_end
            remaining = ZERO
            break

        # consume the whole segment and cross
        out = fp_mul(radius, fp_sub(sin_stop, sin_phi))
        segments.append(SegmentFill(
            index=seg_index,
            angle_from_deg=phi if not canonical_flip else fp_sub(NINETY, phi),
            angle_to_deg=next_stop if not canonical_flip else fp_sub(NINETY, next_stop),
            liquidity=scale,
            delta_in=capacity,
            delta_out=out,
        ))
        filled_in = fp_add(filled_in, capacity)
        filled_out = fp_add(filled_out, out)
        remaining = fp_sub(remaining, capacity)
        phi = next_stop
        seg_index += 1

        if next_stop_raw >= _NINETY_RAW:
            raise InsufficientLiquidityError(
                "ran out of liquidity at the arc end",
                filled_in=filled_in, filled_out=filled_out,
                boundary_angle_deg=fp_sub(NINETY, phi) if canonical_flip else phi,
            )
        if params.n > 2:
            raise ValidationError(
                "tick crossings are two-token only; n-dim pools need a uniform ledger"
            )

    # final state: virtual reserves at the final angle on the final circle
    final_angle_trade = phi
    final_angle_canonical = (
        fp_sub(NINETY, final_angle_trade) if canonical_flip else final_angle_trade
    )
    final_scale = scale_for(final_angle_trade, side_above=True)
    if final_scale <= ZERO:
        final_scale = scale  # landed exactly on the upper edge of the last segment
    if params.n == 2:
        offset_f = fp_mul(params.l, final_scale)
        radius_f = offset_f
    else:
        offset_f, radius_f = _pair_geometry(params, state, final_scale, i, j)
    rad_f = deg_to_rad(final_angle_trade)
    sin_f, cos_f = fp_sin_cos(rad_f)
    in_final = fp_sub(offset_f, fp_mul(radius_f, cos_f))
    out_final = fp_sub(offset_f, fp_mul(radius_f, sin_f))
    reserves[i] = in_final
    reserves[j] = out_final

    # prices are the scale-free cotangent of the trade angle
    start_trade_angle = segments[0].angle_from_deg if not canonical_flip else fp_sub(
        NINETY, segments[0].angle_from_deg
    )
    sin_0, cos_0 = fp_sin_cos(deg_to_rad(start_trade_angle))
    if sin_f.is_zero() or sin_0.is_zero():
        raise NumericError("price undefined at the arc endpoint")
    price_of_in = fp_div(cos_f, sin_f)
    price_before = fp_div(cos_0, sin_0)

    quote = SwapQuote(
        token_in=i,
        token_out=j,
        amount_in=filled_in,
        amount_out=filled_out,
        price_before=price_before,
        price_after=price_of_in,
        new_reserves=tuple(reserves),
    )
    return TickSwapResult(
        quote=quote,
        segments=tuple(segments),
        final_angle_deg=final_angle_canonical,
        final_liquidity=final_scale,
    )


def commit_tick_swap(state: PoolState, result: TickSwapResult) -> PoolState:
    """Apply a tick swap: reserves, scale, and cached angle."""
    return PoolState(
        reserves=result.quote.new_reserves,
        liquidity_scale=result.final_liquidity,
        angle_deg=result.final_angle_deg,
    )
