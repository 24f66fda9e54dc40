"""Tick ledger vs brute force; tick swaps vs numerical integration."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarpool.errors import (
    DomainError,
    InsufficientLiquidityError,
    NotFoundError,
    ValidationError,
)
from polarpool.fixed import FixedDecimal, ONE, WAD, ZERO, fp_mul, fp_sub
from polarpool.invariant import CurveParams, PoolState, solve_ccmm_scale
from polarpool.polar import reserves_at_angle
from polarpool.swap import ccmm_swap_exact_in
from polarpool.ticks import (
    LpPosition,
    TickGrid,
    TickLedger,
    active_liquidity,
    add_position,
    commit_tick_swap,
    remove_position,
    swap_across_ticks,
    tick_width_in_price,
)

F = FixedDecimal
CIRCLE = CurveParams(n=2)


def brute_force_active(ledger: TickLedger, angle: FixedDecimal) -> FixedDecimal:
    total = ZERO
    for p in ledger.positions:
        if p.contains(angle):
            total = total + (p.liquidity if p.side == "long" else -p.liquidity)
    return total


def make_fig3_ledger():
    """Full-range backstop of 5 plus a concentrated 3 on [40, 55]."""
    ledger = TickLedger(grid=TickGrid(spacing_deg=ONE))
    ledger = add_position(ledger, LpPosition("lp1", F(0), F(90), F(5)))
    ledger = add_position(ledger, LpPosition("lp2", F(40), F(55), F(3)))
    return ledger


class TestGrid:
    def test_spacing_must_divide_90(self):
        assert TickGrid(spacing_deg=ONE).tick_count == 90
        assert TickGrid(spacing_deg=F("0.5")).tick_count == 180
        with pytest.raises(ValidationError):
            TickGrid(spacing_deg=F("0.7"))

    def test_alignment(self):
        grid = TickGrid(spacing_deg=F("0.5"))
        assert grid.is_aligned(F("40.5"))
        assert not grid.is_aligned(F("40.25"))


class TestLedgerBookkeeping:
    def test_full_range_position(self):
        ledger = TickLedger()
        ledger = add_position(ledger, LpPosition("a", F(0), F(90), F(5)))
        for angle in [ZERO, F(30), F(45), F("89.999999999999999999")]:
            assert active_liquidity(ledger, angle) == F(5)

    def test_fig3_overlay(self):
        ledger = make_fig3_ledger()
        assert active_liquidity(ledger, F(45)) == F(8)
        assert active_liquidity(ledger, F(30)) == F(5)

    def test_remove_restores(self):
        ledger = make_fig3_ledger()
        ledger = remove_position(ledger, "lp2")
        assert active_liquidity(ledger, F(45)) == F(5)

    def test_unknown_id(self):
        with pytest.raises(NotFoundError):
            remove_position(TickLedger(), "ghost")

    def test_unaligned_bounds_rejected(self):
        ledger = TickLedger()
        with pytest.raises(ValidationError):
            add_position(ledger, LpPosition("a", F("0.25"), F(10), ONE))

    def test_short_needs_hedge_builder(self):
        ledger = TickLedger()
        with pytest.raises(ValidationError):
            add_position(ledger, LpPosition("s", F(10), F(11), ONE, side="short"))

    def test_short_cannot_exceed_long(self):
        ledger = TickLedger()
        ledger = add_position(ledger, LpPosition("a", F(10), F(12), ONE))
        with pytest.raises(ValidationError):
            add_position(
                ledger,
                LpPosition("s", F(10), F(12), F(2), side="short"),
                _from_hedge=True,
            )

    def test_empty_ledger_zero_everywhere(self):
        ledger = TickLedger()
        for angle in [ZERO, F(45), F(90)]:
            assert active_liquidity(ledger, angle) == ZERO

    def test_out_of_range_angle(self):
        with pytest.raises(DomainError):
            active_liquidity(TickLedger(), F(91))

    def test_thousand_random_ops_match_brute_force(self):
        rng = random.Random(20250809)
        ledger = TickLedger()
        live = []
        counter = 0
        for _ in range(1000):
            if live and rng.random() < 0.4:
                victim = live.pop(rng.randrange(len(live)))
                ledger = remove_position(ledger, victim)
            else:
                lo = rng.randrange(0, 90)
                hi = rng.randrange(lo + 1, 91)
                liq = F.from_raw(rng.randrange(1, 10 * WAD))
                pid = f"p{counter}"
                counter += 1
                ledger = add_position(
                    ledger, LpPosition(pid, F(lo), F(hi), liq)
                )
                live.append(pid)
        for _ in range(1000):
            angle = F.from_raw(rng.randrange(0, 90 * WAD))
            assert active_liquidity(ledger, angle) == brute_force_active(ledger, angle)

    @given(st.lists(st.tuples(st.integers(0, 89), st.integers(1, 90),
                              st.integers(1, 10 ** 19)), max_size=30),
           st.integers(0, 90 * WAD - 1))
    @settings(max_examples=200, deadline=None)
    def test_aggregation_property(self, spans, probe_raw):
        ledger = TickLedger()
        for k, (lo, span, liq_raw) in enumerate(spans):
            hi = min(90, lo + span)
            if hi <= lo:
                continue
            ledger = add_position(
                ledger, LpPosition(f"h{k}", F(lo), F(hi), F.from_raw(liq_raw))
            )
        angle = F.from_raw(probe_raw)
        assert active_liquidity(ledger, angle) == brute_force_active(ledger, angle)


class TestTickWidths:
    def test_tick_45_46(self):
        grid = TickGrid()
        lo, hi = tick_width_in_price(grid, 45)
        assert hi == ONE
        # 90/46 - 1 = 0.95652173913...
        assert abs(lo.raw - 956521739130434783) <= 2

    def test_tick_89_90(self):
        lo, hi = tick_width_in_price(TickGrid(), 89)
        assert lo == ZERO
        assert abs(hi.raw - 11235955056179775) <= 2

    def test_tick_0_unbounded(self):
        lo, hi = tick_width_in_price(TickGrid(), 0)
        assert hi is None
        assert lo == F(89)

    def test_widths_strictly_decreasing_to_45(self):
        grid = TickGrid()
        widths = []
        for k in range(46):
            lo, hi = tick_width_in_price(grid, k)
            widths.append(None if hi is None else hi.raw - lo.raw)
        assert widths[0] is None  # unbounded is widest
        finite = widths[1:]
        assert all(a > b for a, b in zip(finite, finite[1:]))


def integrate_swap_oracle(positions, start_deg: float, delta_in: float,
                          step_deg: float = 1e-4):
    """Float integration of the marginal flow with piecewise liquidity.

    dx = l*s(phi) sin(phi) dphi and dy = l*s(phi) cos(phi) dphi along the
    arc; independent of the engine's segment closed forms.
    """
    l = 2 + math.sqrt(2)

    def liquidity(phi):
        total = 0.0
        for lo, hi, liq in positions:
            if lo <= phi < hi:
                total += liq
        return total

    phi = start_deg
    consumed = 0.0
    out = 0.0
    step_rad = math.radians(step_deg)
    while consumed < delta_in:
        s = liquidity(phi + step_deg / 2)
        if s <= 0:
            raise AssertionError("oracle ran out of liquidity")
        mid = math.radians(phi + step_deg / 2)
        dx = l * s * math.sin(mid) * step_rad
        dy = l * s * math.cos(mid) * step_rad
        if consumed + dx >= delta_in:
            frac = (delta_in - consumed) / dx
            out += dy * frac
            consumed = delta_in
        else:
            consumed += dx
            out += dy
        phi += step_deg
        if phi >= 90:
            raise AssertionError("oracle hit the arc end")
    return out


class TestSwapAcrossTicks:
    def test_uniform_matches_single_segment_swap(self):
        ledger = TickLedger()
        ledger = add_position(ledger, LpPosition("lp1", F(0), F(90), F(5)))
        x, y = reserves_at_angle(CIRCLE, F(45), F(5))
        state = PoolState(reserves=(x, y), liquidity_scale=F(5), angle_deg=F(45))
        result = swap_across_ticks(CIRCLE, ledger, state, 0, ONE)
        direct = ccmm_swap_exact_in(CIRCLE, state, ONE)
        assert len(result.segments) == 1
        assert abs(result.quote.amount_out.raw - direct.amount_out.raw) <= 10 ** 6

    def test_fig3_trace_shows_one_drop_at_55(self):
        ledger = make_fig3_ledger()
        x, y = reserves_at_angle(CIRCLE, F(45), F(8))
        state = PoolState(reserves=(x, y), liquidity_scale=F(8), angle_deg=F(45))
        # capacity of [45, 55] at liquidity 8 is ~3.65; trade past it
        result = swap_across_ticks(CIRCLE, ledger, state, 0, F(5))
        assert len(result.segments) == 2
        assert result.segments[0].liquidity == F(8)
        assert result.segments[1].liquidity == F(5)
        assert result.segments[0].angle_to_deg == F(55)
        assert result.final_angle_deg > F(55)

    def test_fig3_matches_integration_oracle(self):
        ledger = make_fig3_ledger()
        positions = [(0.0, 90.0, 5.0), (40.0, 55.0, 3.0)]
        x, y = reserves_at_angle(CIRCLE, F(45), F(8))
        state = PoolState(reserves=(x, y), liquidity_scale=F(8), angle_deg=F(45))
        for delta in ["0.5", "2", "5", "8"]:
            result = swap_across_ticks(CIRCLE, ledger, state, 0, F(delta))
            want = integrate_swap_oracle(positions, 45.0, float(delta))
            got = result.quote.amount_out.raw / WAD
            assert abs(got - want) < 1e-6, f"delta {delta}: {got} vs {want}"

    def test_segment_conservation_exact(self):
        ledger = make_fig3_ledger()
        x, y = reserves_at_angle(CIRCLE, F(45), F(8))
        state = PoolState(reserves=(x, y), liquidity_scale=F(8), angle_deg=F(45))
        result = swap_across_ticks(CIRCLE, ledger, state, 0, F(6))
        total_in = ZERO
        total_out = ZERO
        for seg in result.segments:
            total_in = total_in + seg.delta_in
            total_out = total_out + seg.delta_out
        assert total_in == result.quote.amount_in
        assert total_out == result.quote.amount_out

    def test_reversibility_across_crossings(self):
        ledger = make_fig3_ledger()
        x, y = reserves_at_angle(CIRCLE, F(45), F(8))
        state = PoolState(reserves=(x, y), liquidity_scale=F(8), angle_deg=F(45))
        fwd = swap_across_ticks(CIRCLE, ledger, state, 0, F(5))
        mid = commit_tick_swap(state, fwd)
        back = swap_across_ticks(CIRCLE, ledger, mid, 1, fwd.quote.amount_out)
        final = commit_tick_swap(mid, back)
        assert abs(final.angle_deg.raw - 45 * WAD) <= 10 ** 9
        assert abs(final.reserves[0].raw - x.raw) <= 10 ** 9
        assert abs(final.reserves[1].raw - y.raw) <= 10 ** 9

    def test_runs_out_of_liquidity_reports_partial_fill(self):
        ledger = TickLedger()
        ledger = add_position(ledger, LpPosition("lp", F(40), F(50), F(5)))
        x, y = reserves_at_angle(CIRCLE, F(45), F(5))
        state = PoolState(reserves=(x, y), liquidity_scale=F(5), angle_deg=F(45))
        with pytest.raises(InsufficientLiquidityError) as info:
            swap_across_ticks(CIRCLE, ledger, state, 0, F(50))
        err = info.value
        assert err.filled_in is not None and err.filled_in > ZERO
        assert err.boundary_angle_deg == F(50)

    def test_price_continuous_across_crossing(self):
        ledger = make_fig3_ledger()
        x, y = reserves_at_angle(CIRCLE, F(45), F(8))
        state = PoolState(reserves=(x, y), liquidity_scale=F(8), angle_deg=F(45))
        # fill exactly to the 55-degree boundary, then a hair beyond
        capacity = fp_mul(fp_mul(CIRCLE.l, F(8)),
                          fp_sub(F("0.707106781186547524"), F("0.573576436351046096")))
        before = swap_across_ticks(CIRCLE, ledger, state, 0, capacity)
        just_after = swap_across_ticks(
            CIRCLE, ledger, state, 0, capacity + F("0.0001"))
        p1 = before.quote.price_after.raw / WAD
        p2 = just_after.quote.price_after.raw / WAD
        assert abs(p1 - p2) < 1e-3

    def test_n3_uniform_pairwise(self):
        params = CurveParams(n=3)
        scale = solve_ccmm_scale(params, (ONE, ONE, ONE))
        state = PoolState(reserves=(ONE, ONE, ONE), liquidity_scale=scale)
        ledger = TickLedger()
        ledger = add_position(ledger, LpPosition("base", F(0), F(90), scale))
        result = swap_across_ticks(params, ledger, state, 0, F("0.3"), token_out=1)
        # matches the closed-form pairwise swap
        from polarpool.swap import ndim_pairwise_swap

        direct = ndim_pairwise_swap(params, state, 0, 1, F("0.3"))
        assert abs(result.quote.amount_out.raw - direct.amount_out.raw) <= 10 ** 9
