"""Fingerprint closed forms, the multimodal radius, and the LP payoff."""

import mpmath
import pytest

from polarpool.errors import DomainError, ValidationError
from polarpool.fingerprint import (
    FingerprintParams,
    fingerprint_ccmm,
    fingerprint_cemm,
    fingerprint_csemm,
    lp_payoff,
    modality_count,
    multimodal_radius,
    payoff_fingerprint,
)
from polarpool.fixed import FixedDecimal, ONE, PI, TWO, WAD, fp_div, fp_exp, fp_mul
from polarpool.invariant import default_offset

mpmath.mp.dps = 40

F = FixedDecimal
L = default_offset()


def to_mp(x: FixedDecimal) -> mpmath.mpf:
    return mpmath.mpf(x.raw) / WAD


def reference_ccmm(t):
    l = 2 + mpmath.sqrt(2)
    return 2 * l * mpmath.exp(mpmath.mpf(3) * t / 2) / (1 + mpmath.exp(2 * t)) ** mpmath.mpf("1.5")


def t_grid(lo=-5, hi=5, n=1000):
    span = hi - lo
    return [F.from_raw(lo * WAD + span * WAD * k // (n - 1)) for k in range(n)]


class TestClosedForms:
    def test_peak_value(self):
        got = fingerprint_ccmm(FingerprintParams(), F(0))
        want = 1 + mpmath.sqrt(2)  # 2l / 2^{3/2} = l / sqrt(2)
        assert abs(to_mp(got) - want) < 1e-12

    def test_matches_printed_form_on_grid(self):
        p = FingerprintParams()
        for t in t_grid(-5, 5, 101):
            assert abs(to_mp(fingerprint_ccmm(p, t)) - reference_ccmm(to_mp(t))) < 1e-15

    def test_peak_at_zero_and_decay(self):
        p = FingerprintParams()
        values = [(t.raw, fingerprint_ccmm(p, t).raw) for t in t_grid(-6, 6, 241)]
        peak_t, _ = max(values, key=lambda kv: kv[1])
        assert abs(peak_t) <= WAD // 10
        assert fingerprint_ccmm(p, F(20)).raw < WAD // 10 ** 6
        assert fingerprint_ccmm(p, F(-20)).raw < WAD // 10 ** 6
        assert fingerprint_ccmm(p, F(20)).raw > 0

    def test_cemm_reduces_to_ccmm_at_c1(self):
        base = FingerprintParams()
        shifted = FingerprintParams(mode="cemm", c=ONE)
        for t in t_grid(-5, 5, 1000):
            assert fingerprint_cemm(shifted, t) == fingerprint_ccmm(base, t)

    def test_cemm_c2_at_zero(self):
        p = FingerprintParams(mode="cemm", c=TWO)
        want = 8 * (2 + mpmath.sqrt(2)) / 5 ** mpmath.mpf("1.5")
        assert abs(to_mp(fingerprint_cemm(p, F(0))) - want) < 1e-15

    def test_cemm_peak_moves_with_c(self):
        grid = t_grid(-4, 4, 801)
        peaks = []
        for c in [F("0.5"), ONE, TWO, F(4)]:
            p = FingerprintParams(mode="cemm", c=c)
            values = [(t.raw, fingerprint_cemm(p, t).raw) for t in grid]
            peaks.append(max(values, key=lambda kv: kv[1])[0])
        assert all(a < b for a, b in zip(peaks, peaks[1:]))

    def test_csemm_reduces_to_ccmm_at_circle_alpha(self):
        base = FingerprintParams()
        sup = FingerprintParams(mode="csemm", alpha=L)
        for t in t_grid(-5, 5, 1000):
            diff = to_mp(fingerprint_csemm(sup, t)) - to_mp(fingerprint_ccmm(base, t))
            assert abs(diff) < 1e-15

    def test_csemm_shift_translates_t(self):
        base = FingerprintParams(mode="csemm", alpha=F(4))
        shifted = FingerprintParams(mode="csemm", alpha=F(4), s_y=fp_exp(ONE))
        for t in t_grid(-3, 3, 101):
            lhs = fingerprint_csemm(shifted, t)
            rhs = fingerprint_csemm(base, t - ONE)
            assert abs(to_mp(lhs) - to_mp(rhs)) < 1e-15

    def test_csemm_alpha4_at_zero(self):
        p = FingerprintParams(mode="csemm", alpha=F(4))
        assert abs(to_mp(fingerprint_csemm(p, F(0)))
                   - mpmath.mpf("2.128533874054364330928571")) < 1e-14

    def test_csemm_eta_one_rejected(self):
        p = FingerprintParams(mode="csemm", alpha=TWO)
        with pytest.raises(DomainError):
            fingerprint_csemm(p, F(0))

    def test_positive_on_wide_grid(self):
        p = FingerprintParams()
        for t in t_grid(-20, 20, 201):
            assert fingerprint_ccmm(p, t).raw > 0

    def test_finite_trapezoid_integral(self):
        # integrable on any finite interval: the trapezoid sum is finite
        # and positive for every closed form
        p_circle = FingerprintParams()
        p_ell = FingerprintParams(mode="cemm", c=TWO)
        p_sup = FingerprintParams(mode="csemm", alpha=F(4))
        grid = t_grid(-8, 8, 401)
        h = to_mp(grid[1]) - to_mp(grid[0])
        for fn, params in [(fingerprint_ccmm, p_circle),
                           (fingerprint_cemm, p_ell),
                           (fingerprint_csemm, p_sup)]:
            ys = [to_mp(fn(params, t)) for t in grid]
            total = h * (sum(ys) - (ys[0] + ys[-1]) / 2)
            assert 0 < total < mpmath.inf


class TestMultimodal:
    def test_trough_value(self):
        p = FingerprintParams(mode="multimodal", alpha_mm=4)
        assert multimodal_radius(p, F(0)) == ONE

    def test_crest_value(self):
        # sin^2 = 1 at theta = pi/8 for alpha 4: r = 2^{1/16}
        p = FingerprintParams(mode="multimodal", alpha_mm=4)
        theta = fp_div(PI, F(8))
        want = mpmath.mpf(2) ** (mpmath.mpf(1) / 16)
        assert abs(to_mp(multimodal_radius(p, theta)) - want) < 1e-15

    def test_periodicity(self):
        p = FingerprintParams(mode="multimodal", alpha_mm=6)
        period = fp_div(PI, F(6))
        for k in range(1, 8):
            theta = F.from_raw(10 ** 17 * k)
            r1 = multimodal_radius(p, theta)
            r2 = multimodal_radius(p, theta + period)
            assert abs(r1.raw - r2.raw) <= 10 ** 6

    def test_range_bounds(self):
        for alpha in (4, 6, 8):
            p = FingerprintParams(mode="multimodal", alpha_mm=alpha)
            hi = mpmath.mpf(2) ** (mpmath.mpf(1) / (alpha * alpha))
            for k in range(200):
                theta = F.from_raw(PI.raw * k // 400)
                r = to_mp(multimodal_radius(p, theta))
                assert 1 - 1e-12 <= r <= hi + 1e-12

    def test_taxonomy(self):
        for alpha, want in [(4, 1), (6, 2), (8, 3)]:
            p = FingerprintParams(mode="multimodal", alpha_mm=alpha)
            assert modality_count(p) == want

    def test_validation(self):
        with pytest.raises(ValidationError):
            FingerprintParams(mode="multimodal", alpha_mm=5)
        with pytest.raises(ValidationError):
            FingerprintParams(mode="multimodal", alpha_mm=2)


class TestLpPayoff:
    def test_unit_price_minimizer(self):
        p = FingerprintParams()
        got = lp_payoff(p, ONE)
        # symmetric point (1, 1): V = 2; brute-force scan agrees
        best = min(
            to_mp(ONE) * x + (to_mp(L) - mpmath.sqrt(2 * to_mp(L) * x - x * x))
            for x in [mpmath.mpf(k) / 10 ** 5 * to_mp(L) for k in range(1, 10 ** 5, 37)]
        )
        assert abs(to_mp(got) - 2) < 1e-9
        assert to_mp(got) <= best + 1e-9

    def test_min_dominates_arc_points(self):
        import random

        from polarpool.swap import ccmm_y_of_x
        from polarpool.invariant import CurveParams

        circle = CurveParams(n=2)
        p = FingerprintParams()
        rng = random.Random(31)
        for _ in range(1000):
            price = F.from_raw(rng.randrange(WAD // 10, 10 * WAD))
            x = F.from_raw(rng.randrange(1, L.raw))
            y = ccmm_y_of_x(circle, x)
            value = fp_mul(price, x) + y
            assert lp_payoff(p, price) <= value + F.from_raw(100)

    def test_concave_in_price(self):
        p = FingerprintParams()
        vals = []
        for k in range(100):
            price = F.from_raw(WAD // 10 + (10 * WAD - WAD // 10) * k // 99)
            vals.append(to_mp(lp_payoff(p, price)))
        second = [vals[i - 1] - 2 * vals[i] + vals[i + 1] for i in range(1, len(vals) - 1)]
        assert all(d <= 1e-9 for d in second)

    def test_cemm_payoff_scales(self):
        p = FingerprintParams(mode="cemm", c=TWO)
        # at the price peak 2 the payoff is c times the circular unit value
        got = lp_payoff(p, TWO)
        want = 2 * lp_payoff(FingerprintParams(), ONE).raw
        assert abs(got.raw - want) <= 10 ** 7

    def test_multimodal_mode_rejected(self):
        with pytest.raises(ValidationError):
            lp_payoff(FingerprintParams(mode="multimodal"), ONE)


class TestPayoffFingerprintConsistency:
    def test_density_matches_closed_form_shape(self):
        p = FingerprintParams()
        n = 61
        numeric = []
        closed = []
        for k in range(n):
            t = F.from_raw(-3 * WAD + 6 * WAD * k // (n - 1))
            numeric.append(to_mp(payoff_fingerprint(p, t)))
            closed.append(to_mp(fingerprint_ccmm(p, t)))
        mean_n = sum(numeric) / n
        mean_c = sum(closed) / n
        cov = sum((a - mean_n) * (b - mean_c) for a, b in zip(numeric, closed))
        var_n = sum((a - mean_n) ** 2 for a in numeric)
        var_c = sum((b - mean_c) ** 2 for b in closed)
        corr = cov / mpmath.sqrt(var_n * var_c)
        assert corr >= mpmath.mpf("0.999")
