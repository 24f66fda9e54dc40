"""Polar-coordinate swap path and price/angle conversion.

A two-token circular pool is an arc of the circle centered at (L, L) with
radius L = l * scale. Points on the trading arc are parameterized by the
angle phi in degrees,

    x = L (1 - cos phi),   y = L (1 - sin phi),   phi in [0, 90],

so phi = 0 is the all-y endpoint where x costs everything and phi = 90 the
all-x endpoint where x is free: larger angle means cheaper x. Tick systems
label angles through the rational convention phi = 90 / (price + 1), which
agrees with the arc at the anchors (price 1 at 45 degrees, price 0 at 90)
and is inverted by price = 90 / phi - 1.

Degrees are the public angle unit; radians appear only inside the
trigonometric calls.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, InsufficientLiquidityError, RangeError, ValidationError
from .fixed import (
    FixedDecimal,
    ONE,
    PI,
    ZERO,
    fp_acos,
    fp_add,
    fp_atan2,
    fp_cos,
    fp_div,
    fp_mul,
    fp_sin,
    fp_sqrt,
    fp_sub,
)
from .invariant import (
    CurveParams,
    ON_CURVE_TOLERANCE,
    PoolState,
    invariant_residual,
)
from .swap import SwapQuote, effective_pair_circle

F = FixedDecimal

NINETY = F(90)
RAD_PER_DEG = fp_div(PI, F(180))
DEG_PER_RAD = fp_div(F(180), PI)


def deg_to_rad(angle_deg: FixedDecimal) -> FixedDecimal:
    return fp_mul(angle_deg, RAD_PER_DEG)


def rad_to_deg(angle_rad: FixedDecimal) -> FixedDecimal:
    return fp_mul(angle_rad, DEG_PER_RAD)


@dataclass(frozen=True)
class PolarPoint:
    """Angle in degrees within [0, 90] plus distance from the arc center."""

    angle_deg: FixedDecimal
    radius: FixedDecimal

    def __post_init__(self):
        if self.angle_deg < ZERO or self.angle_deg > NINETY:
            raise ValidationError("angle must lie in [0, 90] degrees")


def price_to_angle(price: FixedDecimal) -> FixedDecimal:
    """Tick angle 90 / (price + 1); price 1 sits at 45 degrees."""
    if price < ZERO:
        raise DomainError("negative prices are disabled")
    return fp_div(NINETY, fp_add(price, ONE))


def angle_to_price(angle_deg: FixedDecimal) -> FixedDecimal:
    """Inverse tick mapping 90 / phi - 1 for phi in (0, 90]."""
    if angle_deg <= ZERO or angle_deg > NINETY:
        raise DomainError("angle must lie in (0, 90] degrees (0 is infinite price)")
    return fp_sub(fp_div(NINETY, angle_deg), ONE)


def reserves_at_angle(params: CurveParams, angle_deg: FixedDecimal,
                      scale: FixedDecimal = ONE) -> tuple[FixedDecimal, FixedDecimal]:
    """Arc point (x, y) at the given angle."""
    offset = fp_mul(params.l, scale)
    rad = deg_to_rad(angle_deg)
    x = fp_sub(offset, fp_mul(offset, fp_cos(rad)))
    y = fp_sub(offset, fp_mul(offset, fp_sin(rad)))
    return x, y


def cartesian_to_polar(params: CurveParams, x: FixedDecimal, y: FixedDecimal,
                       scale: FixedDecimal = ONE) -> PolarPoint:
    """Angle and radius of an on-curve reserve point.

    Rejects points whose distance from the center deviates from L by more
    than the on-curve tolerance.
    """
    offset = fp_mul(params.l, scale)
    dx = fp_sub(offset, x)
    dy = fp_sub(offset, y)
    if dx < ZERO or dy < ZERO:
        raise DomainError("point outside the trading quadrant")
    radius = fp_sqrt(fp_add(fp_mul(dx, dx), fp_mul(dy, dy)))
    if abs(fp_sub(radius, offset)) > ON_CURVE_TOLERANCE:
        raise DomainError("off-curve point: radius deviates from l*scale")
    if dx.is_zero():
        angle = NINETY
    else:
        angle = rad_to_deg(fp_atan2(dy, dx))
    return PolarPoint(angle_deg=angle, radius=radius)


def polar_to_cartesian(params: CurveParams, point: PolarPoint,
                       scale: FixedDecimal = ONE) -> tuple[FixedDecimal, FixedDecimal]:
    """Reserve point of a polar coordinate (inverse of cartesian_to_polar)."""
    offset = fp_mul(params.l, scale)
    rad = deg_to_rad(point.angle_deg)
    x = fp_sub(offset, fp_mul(point.radius, fp_cos(rad)))
    y = fp_sub(offset, fp_mul(point.radius, fp_sin(rad)))
    return x, y


def angle_of_state(params: CurveParams, state: PoolState) -> FixedDecimal:
    """Current polar angle of a two-token state, from cache or geometry."""
    if state.angle_deg is not None:
        return state.angle_deg
    x, y = state.reserves
    return cartesian_to_polar(params, x, y, state.liquidity_scale).angle_deg


def polar_swap_delta_y(params: CurveParams, x_in: FixedDecimal) -> FixedDecimal:
    """Trigonometric swap output with the historical 10000-fold scaling.

    Reproduces, step for step, the reference routine that rotates from the
    45-degree point using the 135-degree sine/cosine pair on a circle
    scaled by 10000. The scaling is part of the pinned output (the
    documented result for x_in = 1 is 0.999958580363); production code
    uses :func:`polar_swap_exact_in`, which drops the scaling.
    """
    l_scaled = fp_mul(params.l, F(10000))
    radians_45 = fp_div(PI, F(4))
    radians_135 = fp_mul(F(3), radians_45)
    l_cos = fp_mul(l_scaled, fp_cos(radians_135))
    l_sin = fp_mul(l_scaled, fp_sin(radians_135))
    ratio = fp_div(fp_sub(l_sin, x_in), l_scaled)
    radicand = fp_sub(ONE, fp_mul(ratio, ratio))
    if radicand < ZERO:
        raise RangeError("rotation leaves the arc: radicand negative")
    return fp_add(fp_mul(l_scaled, fp_sqrt(radicand)), l_cos)


def polar_swap_exact_in(params: CurveParams, state: PoolState, token_in: int,
                        delta_in: FixedDecimal,
                        token_out: int | None = None) -> SwapQuote:
    """Swap by rotating the reserve point along the arc (clean polar route).

    Same trade semantics as the Cartesian route, but the new reserve pair
    comes from the angle: consume the input reserve, recover the new pair
    angle through acos, and read the output reserve off the sine. Pools
    with more than two tokens reduce to the pair circle first.
    """
    if params.mode != "ccmm":
        raise ValidationError("polar route needs a circular pool")
    if token_out is None:
        if params.n != 2:
            raise ValidationError("token_out required for pools with n > 2")
        token_out = 1 - token_in
    if delta_in < ZERO:
        raise ValidationError("delta_in must be non-negative")
    i, j = token_in, token_out
    offset, radius = effective_pair_circle(params, state, i, j)
    reserves = list(state.reserves)
    in_new = fp_add(reserves[i], delta_in)
    if in_new > offset:
        raise InsufficientLiquidityError(
            "insufficient liquidity: rotation passes the axis endpoint"
        )
    z = fp_div(fp_sub(offset, in_new), radius)
    if z > ONE:
        raise DomainError("reserve point below the pair arc")
    angle_new_rad = fp_acos(z)
    out_new = fp_sub(offset, fp_mul(radius, fp_sin(angle_new_rad)))
    amount_out = fp_sub(reserves[j], out_new)

    def pair_price(xi, xj):
        den = fp_sub(offset, xj)
        if den.is_zero():
            raise DomainError("price undefined at the axis point")
        return fp_div(fp_sub(offset, xi), den)

    price_before = pair_price(reserves[i], reserves[j])
    reserves[i], reserves[j] = in_new, out_new
    price_after = pair_price(in_new, out_new)
    new_state = state.with_reserves(reserves)
    if abs(invariant_residual(params, new_state)) > ON_CURVE_TOLERANCE:
        raise RangeError("rotation left the curve beyond tolerance")
    return SwapQuote(
        token_in=i,
        token_out=j,
        amount_in=delta_in,
        amount_out=amount_out,
        price_before=price_before,
        price_after=price_after,
        new_reserves=tuple(reserves),
    )
