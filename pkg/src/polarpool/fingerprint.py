"""Liquidity fingerprints and the numerical LP payoff.

The fingerprint is the density of liquidity over log-price tick space
t = ln(price). Closed forms exist for the circular curve,

    L(t) = 2 l e^{3t/2} / (1 + e^{2t})^{3/2},

its elliptical shift by a price peak c, and the superelliptical family in
the equal-exponent case. All three are evaluated here in an
overflow-safe rearrangement: dividing numerator and denominator by
e^{3t/2} turns the ratio into (e^t + e^{-t})^{-3/2} and keeps every
intermediate inside the representable range for |t| well past 20.

The LP payoff V(p) = min over on-curve reserves of (p x + y) is computed
by golden-section search on the lower arc; the liquidity density
recovered from V via central finite differences, (V' - u V'') / 2 with
u = sqrt(price), reproduces the closed form without referencing it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError, NumericError, ValidationError
from .fixed import (
    FixedDecimal,
    HALF_PI,
    ONE,
    TWO,
    ZERO,
    fp_add,
    fp_div,
    fp_exp,
    fp_ln,
    fp_mul,
    fp_pow,
    fp_sin,
    fp_sqrt,
    fp_sub,
)
from .invariant import default_offset, eta

F = FixedDecimal

FINGERPRINT_MODES = ("ccmm", "cemm", "csemm", "multimodal")

# golden ratio conjugate (sqrt(5) - 1) / 2, correctly rounded
_INV_PHI = fp_div(fp_sub(fp_sqrt(F(5)), ONE), TWO)


@dataclass(frozen=True)
class FingerprintParams:
    """Inputs for the fingerprint family and the multimodal radius."""

    mode: str = "ccmm"
    l: FixedDecimal = field(default_factory=default_offset)
    c: FixedDecimal = field(default_factory=lambda: ONE)
    alpha: FixedDecimal = field(default_factory=default_offset)
    s_x: FixedDecimal = field(default_factory=lambda: ONE)
    s_y: FixedDecimal = field(default_factory=lambda: ONE)
    big_l: FixedDecimal = field(default_factory=lambda: ONE)
    alpha_mm: int = 4

    def __post_init__(self):
        if self.mode not in FINGERPRINT_MODES:
            raise ValidationError(f"unknown fingerprint mode {self.mode!r}")
        if self.l <= ZERO or self.c <= ZERO:
            raise ValidationError("l and c must be positive")
        if self.s_x <= ZERO or self.s_y <= ZERO:
            raise ValidationError("shift scales must be positive")
        if self.alpha_mm < 4 or self.alpha_mm % 2 != 0:
            raise ValidationError("multimodal alpha must be an even integer >= 4")

    @property
    def beta_mm(self) -> int:
        return self.alpha_mm * self.alpha_mm


def _sech_power(t: FixedDecimal, exponent: FixedDecimal,
                weight: FixedDecimal = ONE) -> FixedDecimal:
    """(e^t + weight * e^{-t}) ** (-exponent), the overflow-safe core."""
    d = fp_add(fp_exp(t), fp_mul(weight, fp_exp(-t)))
    return fp_pow(d, -exponent)


def fingerprint_ccmm(params: FingerprintParams, t: FixedDecimal) -> FixedDecimal:
    """Circular fingerprint; peaks at t = 0 with value l / sqrt(2)."""
    core = _sech_power(t, F("1.5"))
    return fp_mul(fp_mul(TWO, params.l), core)


def fingerprint_cemm(params: FingerprintParams, t: FixedDecimal) -> FixedDecimal:
    """Elliptical fingerprint with price peak c; c = 1 recovers the circle."""
    c2 = fp_mul(params.c, params.c)
    core = _sech_power(t, F("1.5"), weight=c2)
    return fp_mul(fp_mul(TWO, fp_mul(c2, params.l)), core)


def fingerprint_csemm(params: FingerprintParams, t: FixedDecimal) -> FixedDecimal:
    """Equal-exponent superelliptical fingerprint.

    The shift scales enter only through t' = t - ln(s_y / s_x); the
    constant-sum limit eta = 1 has no closed form and is rejected.
    """
    e = eta(params.alpha)
    em1 = fp_sub(e, ONE)
    if em1.is_zero():
        raise DomainError("fingerprint undefined at eta = 1 (constant-sum limit)")
    t_shift = fp_sub(t, fp_ln(fp_div(params.s_y, params.s_x)))
    half_b = fp_div(e, fp_mul(TWO, em1))
    g = fp_div(fp_add(e, ONE), e)
    core = _sech_power(fp_mul(half_b, t_shift), g)
    coeff = fp_div(fp_mul(TWO, params.alpha), em1)
    return fp_mul(coeff, core)


def multimodal_radius(params: FingerprintParams, theta: FixedDecimal) -> FixedDecimal:
    """Sinusoidally perturbed radius L / (1 - sin(alpha*theta)^2 / 2)^(1/beta)."""
    sin_a = fp_sin(fp_mul(F(params.alpha_mm), theta))
    inner = fp_sub(ONE, fp_div(fp_mul(sin_a, sin_a), TWO))
    exponent = fp_div(ONE, F(params.beta_mm))
    return fp_mul(params.big_l, fp_pow(inner, -exponent))


def modality_count(params: FingerprintParams, samples: int = 10_000) -> int:
    """Number of liquidity-density peaks over the price quadrant.

    Density peaks sit where the perturbed radius dips back to its base
    value (the curve is locally closest to the unperturbed circle), so
    the count is the number of strict local minima of the radius on the
    open interval (0, pi/2), with plateaus of equal values merged.
    """
    values = []
    for k in range(1, samples + 1):
        theta = FixedDecimal.from_raw(HALF_PI.raw * k // (samples + 1))
        values.append(multimodal_radius(params, theta).raw)
    # merge runs of equal values, then test strict minima
    runs = []
    for v in values:
        if not runs or runs[-1] != v:
            runs.append(v)
    count = 0
    for idx in range(1, len(runs) - 1):
        if runs[idx] < runs[idx - 1] and runs[idx] < runs[idx + 1]:
            count += 1
    return count


def _arc_value(params: FingerprintParams, price: FixedDecimal,
               x: FixedDecimal) -> FixedDecimal:
    """p*x + y on the lower arc of the (possibly c-shifted) circle."""
    radicand = fp_sub(fp_mul(fp_mul(TWO, params.l), x), fp_mul(x, x))
    y = fp_sub(params.l, fp_sqrt(radicand))
    if params.mode == "cemm":
        y = fp_mul(params.c, y)
    return fp_add(fp_mul(price, x), y)


def lp_payoff(params: FingerprintParams, price: FixedDecimal,
              tolerance: FixedDecimal = F("0.000000000001")) -> FixedDecimal:
    """LP value V(p) = min over the arc of (p x + y), by golden section.

    The objective is strictly convex on the arc, so the bracket shrinks
    geometrically; the search is capped and reports non-convergence
    rather than returning a stale bracket.
    """
    if params.mode not in ("ccmm", "cemm"):
        raise ValidationError("payoff is defined for circular and elliptical modes")
    if price <= ZERO:
        raise DomainError("price must be positive")
    a, b = ZERO, params.l
    x1 = fp_sub(b, fp_mul(_INV_PHI, fp_sub(b, a)))
    x2 = fp_add(a, fp_mul(_INV_PHI, fp_sub(b, a)))
    f1 = _arc_value(params, price, x1)
    f2 = _arc_value(params, price, x2)
    for _ in range(200):
        if fp_sub(b, a) <= tolerance:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = fp_sub(b, fp_mul(_INV_PHI, fp_sub(b, a)))
            f1 = _arc_value(params, price, x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = fp_add(a, fp_mul(_INV_PHI, fp_sub(b, a)))
            f2 = _arc_value(params, price, x2)
    else:
        raise NumericError("golden-section search failed to converge")
    mid = FixedDecimal.from_raw((a.raw + b.raw) // 2)
    return _arc_value(params, price, mid)


def payoff_fingerprint(params: FingerprintParams, t: FixedDecimal,
                       h: FixedDecimal = F("0.0001")) -> FixedDecimal:
    """Liquidity density recovered numerically from the payoff alone.

    Central finite differences of V on the sqrt-price axis u = e^{t/2}
    give V' and V''; the density at u is (V' - u V'') / 2. Matches the
    closed-form fingerprint up to finite-difference truncation.
    """
    u = fp_exp(fp_div(t, TWO))
    um, up = fp_sub(u, h), fp_add(u, h)
    v_minus = lp_payoff(params, fp_mul(um, um))
    v_0 = lp_payoff(params, fp_mul(u, u))
    v_plus = lp_payoff(params, fp_mul(up, up))
    d1 = fp_div(fp_sub(v_plus, v_minus), fp_mul(TWO, h))
    d2 = fp_div(fp_add(fp_sub(v_plus, fp_mul(TWO, v_0)), v_minus), fp_mul(h, h))
    return fp_div(fp_sub(d1, fp_mul(u, d2)), TWO)
