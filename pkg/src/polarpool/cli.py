"""Command-line surface for pool lifecycle, quoting, curves, and hedging.

Data goes to stdout, diagnostics to stderr. Exit codes are stable:
0 success, 2 validation failure, 3 infeasible trade, 4 internal numeric
error. All output is byte-deterministic for identical inputs: JSON is
emitted with sorted keys, CSV rows in a fixed order, and the only
randomness (trade generation) runs off an explicit seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys

from .errors import (
    DomainError,
    InsufficientLiquidityError,
    NotFoundError,
    NumericError,
    RangeError,
    ShapeError,
    ValidationError,
)
from .fingerprint import (
    FingerprintParams,
    fingerprint_ccmm,
    fingerprint_cemm,
    fingerprint_csemm,
    lp_payoff,
    multimodal_radius,
)
from .fixed import FixedDecimal, HALF_PI, ONE, ZERO, fp_add, fp_div, fp_mul, fp_pow, fp_sub
from .hedge import HedgeSpec, hedge_payoff
from .invariant import (
    CurveParams,
    PoolState,
    invariant_residual,
    solve_ccmm_scale,
    solve_csemm_scale,
)
from .polar import (
    angle_to_price,
    cartesian_to_polar,
    polar_swap_exact_in,
    price_to_angle,
    reserves_at_angle,
)
from .poolfile import PoolFile, load, save
from .swap import (
    SwapQuote,
    ccmm_swap_exact_in,
    ccmm_swap_exact_out,
    csemm_swap_exact_in,
    csemm_swap_exact_out,
    csemm_y_of_x,
    ndim_pairwise_swap,
    swap_exact_in,
)
from .ticks import (
    LpPosition,
    SEGMENT_CSV_HEADER,
    TickGrid,
    TickLedger,
    add_position,
    commit_tick_swap,
    swap_across_ticks,
)

F = FixedDecimal

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERIC = 4

DEFAULT_SEED = 1729


def _print_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _write_csv(rows, header, out_path=None) -> None:
    if out_path:
        with open(out_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(rows)


def _parse_fixed_list(text: str, count: int, what: str) -> tuple[FixedDecimal, ...]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != count:
        raise ValidationError(f"expected {count} {what}, got {len(parts)}")
    return tuple(F(p) for p in parts)


# -- init -------------------------------------------------------------------


def cmd_init(args) -> int:
    n = args.n
    reserves = (
        _parse_fixed_list(args.reserves, n, "reserves")
        if args.reserves
        else tuple(ONE for _ in range(n))
    )
    kwargs = {"n": n, "mode": args.mode}
    if args.l is not None:
        kwargs["l"] = F(args.l)
    if args.mode == "csemm":
        if not args.alphas:
            raise ValidationError("csemm mode needs --alphas")
        kwargs["alphas"] = _parse_fixed_list(args.alphas, n, "alphas")
    if args.mode == "shifted":
        kwargs["beta"] = F(args.beta)
        kwargs["c"] = F(args.c)
    params = CurveParams(**kwargs)

    if args.mode == "ccmm":
        scale = solve_ccmm_scale(params, reserves)
    elif args.mode == "csemm":
        scale = solve_csemm_scale(params, reserves)
    else:
        scale = _solve_shifted_scale(params, reserves)

    angle = None
    if n == 2 and params.mode == "ccmm":
        angle = cartesian_to_polar(params, reserves[0], reserves[1], scale).angle_deg
    state = PoolState(reserves=reserves, liquidity_scale=scale, angle_deg=angle)
    residual = invariant_residual(params, state)

    grid = TickGrid(spacing_deg=F(args.tick_spacing))
    ledger = TickLedger(grid=grid)
    ledger = add_position(ledger, LpPosition("base", ZERO, F(90), scale))

    save(args.pool, PoolFile(params=params, state=state, ledger=ledger))
    _print_json({
        "pool": args.pool,
        "mode": params.mode,
        "n": n,
        "liquidity_scale": str(scale),
        "residual": str(residual),
    })
    return EXIT_OK


def _solve_shifted_scale(params: CurveParams, reserves) -> FixedDecimal:
    """Bisection on the shifted-ellipse residual, increasing in scale."""
    from .invariant import shifted_ellipse_residual

    x, y = reserves
    lo = max(fp_div(x, params.l), fp_div(fp_div(y, params.c), params.l))
    if lo <= ZERO:
        raise ValidationError("on-curve construction needs positive reserves")
    if shifted_ellipse_residual(params, x, y, lo) > ZERO:
        raise ValidationError("reserves below the trading branch for any scale")
    hi = fp_mul(max(lo, ONE), F(2))
    for _ in range(80):
        if shifted_ellipse_residual(params, x, y, hi) > ZERO:
            break
        hi = fp_mul(hi, F(2))
    else:
        raise NumericError("shifted scale bracket search failed")
    for _ in range(140):
        mid = F.from_raw((lo.raw + hi.raw) // 2)
        if mid == lo or mid == hi:
            break
        if shifted_ellipse_residual(params, x, y, mid) > ZERO:
            hi = mid
        else:
            lo = mid
    return lo


# -- quote / swap -----------------------------------------------------------


def _route_quote(pool: PoolFile, args):
    """Execute the requested route; returns (quote, tick_result or None)."""
    params, state = pool.params, pool.state
    i, j = args.token_in, args.token_out
    if i == j or not (0 <= i < params.n) or not (0 <= j < params.n):
        raise ValidationError("bad token indices")
    amount = F(args.amount)
    if amount < ZERO:
        raise ValidationError("amount must be non-negative")

    if args.exact_out:
        if args.route != "cartesian":
            raise ValidationError("--exact-out is a cartesian-route feature")
        if params.n != 2:
            raise ValidationError("--exact-out needs a two-token pool")
        if params.mode == "ccmm":
            fn = ccmm_swap_exact_in if j == 0 else ccmm_swap_exact_out
        elif params.mode == "csemm":
            fn = csemm_swap_exact_in if j == 0 else csemm_swap_exact_out
        else:
            raise ValidationError("no closed-form swap for shifted pools")
        return fn(params, state, -amount), None

    if args.route == "cartesian":
        if params.mode == "csemm":
            if params.n != 2:
                raise ValidationError("superelliptical swaps are two-token only")
            quote = swap_exact_in(params, state, i, amount)
        elif params.mode == "ccmm":
            if params.n == 2:
                quote = swap_exact_in(params, state, i, amount)
            else:
                quote = ndim_pairwise_swap(params, state, i, j, amount)
        else:
            raise ValidationError("no closed-form swap for shifted pools")
        return quote, None
    if args.route == "polar":
        return polar_swap_exact_in(params, state, i, amount, token_out=j), None
    # ticks
    result = swap_across_ticks(params, pool.ledger, state, i, amount, token_out=j)
    return result.quote, result


def _quote_payload(pool: PoolFile, args, quote: SwapQuote, tick_result) -> dict:
    payload = quote.to_dict()
    payload["route"] = args.route
    if args.route == "polar":
        cart = swap_exact_in(pool.params, pool.state, quote.token_in, quote.amount_in) \
            if pool.params.n == 2 else ndim_pairwise_swap(
                pool.params, pool.state, quote.token_in, quote.token_out, quote.amount_in)
        diff = abs(fp_sub(quote.amount_out, cart.amount_out))
        payload["route_diff_vs_cartesian"] = str(diff)
    if tick_result is not None:
        payload["segments"] = len(tick_result.segments)
        payload["final_angle_deg"] = str(tick_result.final_angle_deg)
        if args.trace_csv:
            _write_csv(
                [seg.to_csv_row() for seg in tick_result.segments],
                SEGMENT_CSV_HEADER,
                args.trace_csv,
            )
            payload["trace_csv"] = args.trace_csv
    return payload


def cmd_quote(args) -> int:
    pool = load(args.pool)
    quote, tick_result = _route_quote(pool, args)
    _print_json(_quote_payload(pool, args, quote, tick_result))
    return EXIT_OK


def cmd_swap(args) -> int:
    pool = load(args.pool)
    quote, tick_result = _route_quote(pool, args)
    if tick_result is not None:
        new_state = commit_tick_swap(pool.state, tick_result)
    else:
        new_state = PoolState(
            reserves=quote.new_reserves,
            liquidity_scale=pool.state.liquidity_scale,
            angle_deg=None,
        )
    save(args.pool, pool.with_state(new_state))
    _print_json(_quote_payload(pool, args, quote, tick_result))
    return EXIT_OK


# -- replay / trade generation ----------------------------------------------


def _read_trade_log(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["seq", "token_in", "token_out", "amount_in"]:
            raise ValidationError("trade log header must be seq,token_in,token_out,amount_in")
        rows = []
        last_seq = None
        for row in reader:
            if len(row) != 4:
                raise ValidationError(f"malformed trade row: {row}")
            seq = int(row[0])
            if last_seq is not None and seq <= last_seq:
                raise ValidationError("seq must be strictly increasing")
            last_seq = seq
            rows.append((seq, int(row[1]), int(row[2]), F(row[3])))
    return rows


def cmd_replay(args) -> int:
    pool = load(args.pool)
    trades = _read_trade_log(args.log)
    state = pool.state
    max_residual = ZERO
    out_rows = []
    for seq, i, j, amount in trades:
        if not (0 <= i < pool.params.n and 0 <= j < pool.params.n) or i == j:
            raise ValidationError(f"trade {seq}: bad token indices")
        try:
            result = swap_across_ticks(
                pool.params, pool.ledger, state, i, amount, token_out=j
            )
        except InsufficientLiquidityError as exc:
            sys.stderr.write(f"replay halted at seq {seq}: {exc}\n")
            return EXIT_INFEASIBLE
        state = commit_tick_swap(state, result)
        residual = abs(invariant_residual(pool.params, state))
        if residual > max_residual:
            max_residual = residual
        out_rows.append([
            str(seq), str(i), str(j), str(amount),
            str(result.quote.amount_out), str(residual),
        ])
    if args.out_csv:
        _write_csv(out_rows, ["seq", "token_in", "token_out", "amount_in",
                              "amount_out", "residual"], args.out_csv)
    _print_json({
        "trades": len(trades),
        "final_reserves": [str(r) for r in state.reserves],
        "final_liquidity_scale": str(state.liquidity_scale),
        "max_residual": str(max_residual),
        "out_csv": args.out_csv,
    })
    return EXIT_OK


def cmd_gen_trades(args) -> int:
    pool = load(args.pool)
    rng = random.Random(args.seed)
    state = pool.state
    rows = []
    for seq in range(1, args.count + 1):
        i = rng.randrange(pool.params.n)
        j = (i + 1 + rng.randrange(pool.params.n - 1)) % pool.params.n
        # consume an integer percentage (1..30) of the remaining arc
        from .swap import effective_pair_circle

        offset, radius = effective_pair_circle(pool.params, state, i, j)
        z = fp_div(fp_sub(offset, state.reserves[i]), radius)
        capacity = fp_mul(radius, z)  # input room down to the 90-degree end
        pct = rng.randrange(1, 31)
        amount = fp_mul(capacity, F.from_fraction(pct, 100))
        if amount <= ZERO:
            continue
        result = swap_across_ticks(
            pool.params, pool.ledger, state, i, amount, token_out=j
        )
        state = commit_tick_swap(state, result)
        rows.append([str(seq), str(i), str(j), str(amount)])
    _write_csv(rows, ["seq", "token_in", "token_out", "amount_in"], args.out)
    _print_json({"trades": len(rows), "seed": args.seed, "out": args.out})
    return EXIT_OK


# -- curve / fingerprint / payoff / hedge emission ---------------------------


def _sample_grid(lo: FixedDecimal, hi: FixedDecimal, n: int):
    if n < 2:
        raise ValidationError("need at least 2 samples")
    if hi <= lo:
        raise ValidationError("sample range must be increasing")
    span = fp_sub(hi, lo)
    return [
        fp_add(lo, F.from_raw(span.raw * k // (n - 1)))
        for k in range(n)
    ]


def cmd_curve(args) -> int:
    n = 2
    if args.mode == "csemm":
        if not args.alphas:
            raise ValidationError("csemm mode needs --alphas")
        alphas = _parse_fixed_list(args.alphas, n, "alphas")
        params = CurveParams(n=n, mode="csemm", alphas=alphas)
    elif args.mode == "shifted":
        params = CurveParams(n=n, mode="shifted", beta=F(args.beta), c=F(args.c))
    else:
        params = CurveParams(n=n)
    rows = []
    if args.mode == "ccmm":
        for angle in _sample_grid(ZERO, F(90), args.samples):
            x, y = reserves_at_angle(params, angle)
            rows.append([str(x), str(y)])
    elif args.mode == "csemm":
        a_x = params.alphas[0]
        if a_x > ONE:
            x_lo, x_hi = ZERO, a_x
        else:
            # negative-alpha curves have hyperbolic tails; sweep a window
            x_lo, x_hi = F("0.1"), fp_mul(params.l, F(3))
        for x in _sample_grid(x_lo, x_hi, args.samples):
            rows.append([str(x), str(csemm_y_of_x(params, x))])
    else:
        for x in _sample_grid(ZERO, params.l, args.samples):
            bx = fp_sub(params.l, x)
            inner = fp_sub(fp_pow(params.l, params.beta), fp_pow(bx, params.beta))
            y_over_c = fp_sub(params.l, fp_pow(inner, fp_div(ONE, params.beta)))
            rows.append([str(x), str(fp_mul(params.c, y_over_c))])
    _write_csv(rows, ["x", "y"], args.out)
    return EXIT_OK


def cmd_fingerprint(args) -> int:
    fp_kwargs = {"mode": args.mode}
    if args.l is not None:
        fp_kwargs["l"] = F(args.l)
    if args.mode == "cemm":
        fp_kwargs["c"] = F(args.c)
    if args.mode == "csemm":
        fp_kwargs["alpha"] = F(args.alpha)
        fp_kwargs["s_x"] = F(args.s_x)
        fp_kwargs["s_y"] = F(args.s_y)
    if args.mode == "multimodal":
        fp_kwargs["alpha_mm"] = args.alpha_mm
        fp_kwargs["big_l"] = F(args.big_l)
    params = FingerprintParams(**fp_kwargs)
    rows = []
    if args.mode == "multimodal":
        for k in range(args.samples):
            theta = F.from_raw(HALF_PI.raw * k // (args.samples - 1))
            rows.append([str(theta), str(multimodal_radius(params, theta))])
    else:
        fn = {"ccmm": fingerprint_ccmm, "cemm": fingerprint_cemm,
              "csemm": fingerprint_csemm}[args.mode]
        for t in _sample_grid(F(args.t_min), F(args.t_max), args.samples):
            rows.append([str(t), str(fn(params, t))])
    _write_csv(rows, ["t", "value"], args.out)
    return EXIT_OK


def cmd_payoff(args) -> int:
    kwargs = {"mode": args.mode}
    if args.mode == "cemm":
        kwargs["c"] = F(args.c)
    params = FingerprintParams(**kwargs)
    rows = []
    for price in _sample_grid(F(args.price_min), F(args.price_max), args.samples):
        if price <= ZERO:
            continue
        rows.append([str(price), str(lp_payoff(params, price))])
    _write_csv(rows, ["price", "value"], args.out)
    return EXIT_OK


def cmd_hedge(args) -> int:
    spec = HedgeSpec(
        strike_price=F(args.strike),
        width_deg=F(args.width_deg),
        notional_liquidity=F(args.notional),
    )
    grid = TickGrid(spacing_deg=F(args.tick_spacing or args.width_deg))
    prices = [p for p in _sample_grid(F(args.price_min), F(args.price_max),
                                      args.samples) if p > ZERO]
    curve = hedge_payoff(CurveParams(n=2), spec, prices, grid=grid)
    _write_csv(curve.to_rows(), ["price", "payoff"], args.out)
    return EXIT_OK


def cmd_convert(args) -> int:
    if (args.price is None) == (args.angle is None):
        raise ValidationError("give exactly one of --price or --angle")
    if args.price is not None:
        price = F(args.price)
        _print_json({"price": str(price), "angle_deg": str(price_to_angle(price))})
    else:
        angle = F(args.angle)
        _print_json({"angle_deg": str(angle), "price": str(angle_to_price(angle))})
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarpool",
        description="Deterministic circular/superelliptical market maker engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create a pool file born on-curve")
    p.add_argument("--pool", required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--mode", choices=["ccmm", "csemm", "shifted"], default="ccmm")
    p.add_argument("--l", default=None, help="offset parameter (default 2+sqrt(2))")
    p.add_argument("--alphas", default=None, help="comma-separated, csemm only")
    p.add_argument("--beta", default="2", help="shifted-ellipse exponent")
    p.add_argument("--c", default="1", help="shifted-ellipse price peak")
    p.add_argument("--reserves", default=None, help="comma-separated initial reserves")
    p.add_argument("--tick-spacing", default="1")
    p.set_defaults(fn=cmd_init)

    for name, fn in [("quote", cmd_quote), ("swap", cmd_swap)]:
        p = sub.add_parser(name, help=f"{name} a trade against a pool file")
        p.add_argument("--pool", required=True)
        p.add_argument("--token-in", type=int, required=True)
        p.add_argument("--token-out", type=int, required=True)
        p.add_argument("--amount", required=True)
        p.add_argument("--exact-out", action="store_true",
                       help="amount is the desired output of token-out")
        p.add_argument("--route", choices=["cartesian", "polar", "ticks"],
                       default="cartesian")
        p.add_argument("--trace-csv", default=None,
                       help="segment trace output (ticks route)")
        p.set_defaults(fn=fn)

    p = sub.add_parser("replay", help="apply a trade log through the tick route")
    p.add_argument("--pool", required=True)
    p.add_argument("--log", required=True)
    p.add_argument("--out-csv", default=None)
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("gen-trades", help="generate a feasible random trade log")
    p.add_argument("--pool", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gen_trades)

    p = sub.add_parser("curve", help="emit on-curve points as CSV")
    p.add_argument("--mode", choices=["ccmm", "csemm", "shifted"], default="ccmm")
    p.add_argument("--alphas", default=None)
    p.add_argument("--beta", default="2")
    p.add_argument("--c", default="1")
    p.add_argument("--samples", type=int, default=181)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_curve)

    p = sub.add_parser("fingerprint", help="emit a liquidity fingerprint as CSV")
    p.add_argument("--mode", choices=["ccmm", "cemm", "csemm", "multimodal"],
                   default="ccmm")
    p.add_argument("--l", default=None)
    p.add_argument("--c", default="1")
    p.add_argument("--alpha", default="4")
    p.add_argument("--s-x", default="1")
    p.add_argument("--s-y", default="1")
    p.add_argument("--alpha-mm", type=int, default=4)
    p.add_argument("--big-l", default="1")
    p.add_argument("--t-min", default="-5")
    p.add_argument("--t-max", default="5")
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_fingerprint)

    p = sub.add_parser("payoff", help="emit the LP payoff curve as CSV")
    p.add_argument("--mode", choices=["ccmm", "cemm"], default="ccmm")
    p.add_argument("--c", default="1")
    p.add_argument("--price-min", default="0.1")
    p.add_argument("--price-max", default="10")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_payoff)

    p = sub.add_parser("hedge", help="emit the normalized depeg-hedge payoff as CSV")
    p.add_argument("--strike", required=True)
    p.add_argument("--width-deg", default="1")
    p.add_argument("--notional", default="1")
    p.add_argument("--tick-spacing", default=None)
    p.add_argument("--price-min", default="0.3")
    p.add_argument("--price-max", default="1.8")
    p.add_argument("--samples", type=int, default=2001)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_hedge)

    p = sub.add_parser("convert", help="convert between price and tick angle")
    p.add_argument("--price", default=None)
    p.add_argument("--angle", default=None)
    p.set_defaults(fn=cmd_convert)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InsufficientLiquidityError as exc:
        sys.stderr.write(f"infeasible trade: {exc}\n")
        if exc.filled_in is not None:
            sys.stderr.write(
                f"partial fill: in={exc.filled_in} out={exc.filled_out} "
                f"boundary={exc.boundary_angle_deg}\n"
            )
        return EXIT_INFEASIBLE
    except (ValidationError, DomainError, ShapeError, NotFoundError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_VALIDATION
    except (RangeError, NumericError) as exc:
        sys.stderr.write(f"numeric error: {exc}\n")
        return EXIT_NUMERIC
    except OSError as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
