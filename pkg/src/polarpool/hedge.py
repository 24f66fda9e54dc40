"""Synthetic binary depeg payoff from two adjacent LP range positions.

A depeg hedge is a vertical spread in tick space: a long band one tick
width wide starting at the strike angle, and a short band immediately
below it (lower angle, higher price). The short leg's liquidity is sized
so both legs hold the same amount of the risky token once the price has
fallen through them; the long-minus-short value is then exactly flat on
both sides of the transition, and normalizing the two plateau levels to
1 (deep depeg) and 0 (no depeg) yields the prediction-market-style
payoff.

Positions are marked at the arbitrage-consistent reserve mix: the angle
whose marginal price (cotangent) equals the valuation price, clamped to
the band.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError, RangeError, ValidationError
from .fixed import (
    FixedDecimal,
    ONE,
    ZERO,
    fp_atan2,
    fp_cos,
    fp_div,
    fp_mul,
    fp_sin,
    fp_sin_cos,
    fp_sub,
    fp_add,
)
from .invariant import CurveParams
from .polar import NINETY, deg_to_rad, price_to_angle, rad_to_deg
from .ticks import LpPosition, TickLedger, add_position

F = FixedDecimal


@dataclass(frozen=True)
class HedgeSpec:
    """Depeg threshold, band width in degrees, and the long leg's size.

    ``gap_deg`` separates the short band from the long one; the default 0
    keeps them adjacent ("right below"), which gives the sharpest step.
    """

    strike_price: FixedDecimal
    width_deg: FixedDecimal = field(default_factory=lambda: ONE)
    notional_liquidity: FixedDecimal = field(default_factory=lambda: ONE)
    gap_deg: FixedDecimal = field(default_factory=lambda: ZERO)

    def __post_init__(self):
        if not (ZERO < self.strike_price < ONE):
            raise ValidationError("depeg strike must lie in (0, 1)")
        if self.width_deg <= ZERO:
            raise ValidationError("band width must be positive")
        if self.notional_liquidity <= ZERO:
            raise ValidationError("notional liquidity must be positive")
        if self.gap_deg < ZERO:
            raise ValidationError("band gap cannot be negative")


@dataclass(frozen=True)
class PayoffCurve:
    """Ordered (price, value) samples."""

    samples: tuple[tuple[FixedDecimal, FixedDecimal], ...]

    def __post_init__(self):
        prices = [p for p, _ in self.samples]
        if any(b <= a for a, b in zip(prices, prices[1:])):
            raise ValidationError("prices must be strictly increasing")

    def to_rows(self) -> list[list[str]]:
        return [[str(p), str(v)] for p, v in self.samples]


def _band_amounts(params: CurveParams, position: LpPosition):
    """Full token holdings of a band once the price has crossed it.

    x when the pool angle is above the band, y when below; per the arc
    x(phi) = lam*l*(1 - cos phi), y(phi) = lam*l*(1 - sin phi).
    """
    lam_l = fp_mul(position.liquidity, params.l)
    lo = deg_to_rad(position.lower_deg)
    hi = deg_to_rad(position.upper_deg)
    x_full = fp_mul(lam_l, fp_sub(fp_cos(lo), fp_cos(hi)))
    y_full = fp_mul(lam_l, fp_sub(fp_sin(hi), fp_sin(lo)))
    return x_full, y_full


def position_value(params: CurveParams, position: LpPosition,
                   price: FixedDecimal) -> FixedDecimal:
    """Mark-to-price value of the claim a range position holds.

    Below the band in angle the position is entirely in y (constant
    value); above it entirely in x (value linear in price); inside it the
    on-curve mix at the arbitrage angle. The mark is of the held claim:
    short legs enter spreads through subtraction, not through this sign.
    """
    if price <= ZERO:
        raise DomainError("price must be positive")
    arb_angle = rad_to_deg(fp_atan2(ONE, price))
    clamped = min(max(arb_angle, position.lower_deg), position.upper_deg)
    lam_l = fp_mul(position.liquidity, params.l)
    lo = deg_to_rad(position.lower_deg)
    hi = deg_to_rad(position.upper_deg)
    at = deg_to_rad(clamped)
    x_pos = fp_mul(lam_l, fp_sub(fp_cos(lo), fp_cos(at)))
    y_pos = fp_mul(lam_l, fp_sub(fp_sin(hi), fp_sin(at)))
    return fp_add(fp_mul(price, x_pos), y_pos)


def _aligned_strike_angle(grid, spec: HedgeSpec) -> FixedDecimal:
    angle = price_to_angle(spec.strike_price)
    spacing = grid.spacing_deg.raw
    index = (angle.raw + spacing // 2) // spacing
    return FixedDecimal.from_raw(index * spacing)


def hedge_legs(params: CurveParams, grid, spec: HedgeSpec) -> tuple[LpPosition, LpPosition]:
    """Long and short leg positions of the spread (not yet registered).

    The long band starts at the tick-aligned strike angle and extends one
    width upward (cheaper prices); the short band sits immediately below.
    The short leg's liquidity is scaled so both legs hold identical x
    inventory after a full depeg, which is what makes the combined payoff
    flat on the depeg side.
    """
    if spec.width_deg.raw % grid.spacing_deg.raw:
        raise ValidationError("band width must be a multiple of the tick spacing")
    if spec.gap_deg.raw % grid.spacing_deg.raw:
        raise ValidationError("band gap must be a multiple of the tick spacing")
    strike_angle = _aligned_strike_angle(grid, spec)
    long_lo = strike_angle
    long_hi = fp_add(strike_angle, spec.width_deg)
    short_hi = fp_sub(strike_angle, spec.gap_deg)
    short_lo = fp_sub(short_hi, spec.width_deg)
    if short_lo < ZERO or long_hi > NINETY:
        raise RangeError("hedge bands leave the [0, 90] degree range")
    long_leg = LpPosition(
        id=f"hedge:{spec.strike_price}:{spec.width_deg}:long",
        lower_deg=long_lo,
        upper_deg=long_hi,
        liquidity=spec.notional_liquidity,
    )
    x_long, _ = _band_amounts(params, long_leg)
    probe_short = LpPosition(
        id="probe", lower_deg=short_lo, upper_deg=short_hi, liquidity=ONE
    )
    x_short_unit, _ = _band_amounts(params, probe_short)
    short_liquidity = fp_div(x_long, x_short_unit)
    short_leg = LpPosition(
        id=f"hedge:{spec.strike_price}:{spec.width_deg}:short",
        lower_deg=short_lo,
        upper_deg=short_hi,
        liquidity=short_liquidity,
        side="short",
    )
    return long_leg, short_leg


def build_hedge(params: CurveParams, ledger: TickLedger,
                spec: HedgeSpec) -> tuple[LpPosition, LpPosition, TickLedger]:
    """Construct the spread and register both legs in the ledger."""
    long_leg, short_leg = hedge_legs(params, ledger.grid, spec)
    ledger = add_position(ledger, long_leg)
    ledger = add_position(ledger, short_leg, _from_hedge=True)
    return long_leg, short_leg, ledger


class _LegMark:
    """Precomputed band trigonometry for fast repeated valuation."""

    def __init__(self, params: CurveParams, position: LpPosition):
        self.lam_l = fp_mul(position.liquidity, params.l)
        self.lo_rad = deg_to_rad(position.lower_deg)
        self.hi_rad = deg_to_rad(position.upper_deg)
        self.sin_lo, self.cos_lo = fp_sin_cos(self.lo_rad)
        self.sin_hi, self.cos_hi = fp_sin_cos(self.hi_rad)

    def value(self, price: FixedDecimal, arb_rad: FixedDecimal) -> FixedDecimal:
        if arb_rad <= self.lo_rad:
            sin_at, cos_at = self.sin_lo, self.cos_lo
        elif arb_rad >= self.hi_rad:
            sin_at, cos_at = self.sin_hi, self.cos_hi
        else:
            sin_at, cos_at = fp_sin_cos(arb_rad)
        x_pos = fp_mul(self.lam_l, fp_sub(self.cos_lo, cos_at))
        y_pos = fp_mul(self.lam_l, fp_sub(self.sin_hi, sin_at))
        return fp_add(fp_mul(price, x_pos), y_pos)


def hedge_payoff(params: CurveParams, spec: HedgeSpec, price_grid,
                 grid=None) -> PayoffCurve:
    """Normalized long-minus-short value across a price grid.

    Plateau levels come from the single-asset compositions: the no-depeg
    side is all-y on both legs (a constant), the deep-depeg side all-x
    with matched inventories (zero). The affine normalization maps them
    to 0 and 1 respectively.
    """
    from .ticks import TickGrid

    grid = grid or TickGrid()
    long_leg, short_leg = hedge_legs(params, grid, spec)
    short_as_long = LpPosition(
        id="short-mark",
        lower_deg=short_leg.lower_deg,
        upper_deg=short_leg.upper_deg,
        liquidity=short_leg.liquidity,
    )
    _, y_long = _band_amounts(params, long_leg)
    _, y_short = _band_amounts(params, short_as_long)
    no_depeg_level = fp_sub(y_long, y_short)
    scale = -no_depeg_level
    if scale <= ZERO:
        raise ValidationError("degenerate hedge: bands too narrow for the grid")
    long_mark = _LegMark(params, long_leg)
    short_mark = _LegMark(params, short_as_long)
    samples = []
    for price in price_grid:
        if price <= ZERO:
            raise DomainError("price must be positive")
        arb_rad = fp_atan2(ONE, price)
        raw = fp_sub(long_mark.value(price, arb_rad),
                     short_mark.value(price, arb_rad))
        samples.append((price, fp_div(fp_sub(raw, no_depeg_level), scale)))
    return PayoffCurve(samples=tuple(samples))
