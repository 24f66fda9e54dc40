#!/usr/bin/env python3
"""Build a depeg hedge and dump its payoff next to the single-leg marks."""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from polarpool.fixed import FixedDecimal as F
from polarpool.hedge import HedgeSpec, hedge_legs, hedge_payoff, position_value
from polarpool.invariant import CurveParams
from polarpool.ticks import TickGrid

OUT = pathlib.Path(__file__).resolve().parent.parent / "out"


def run(strike="0.95"):
    OUT.mkdir(exist_ok=True)
    params = CurveParams(n=2)
    spec = HedgeSpec(F(strike))
    long_leg, short_leg = hedge_legs(params, TickGrid(), spec)
    print(f"strike {strike}: long [{long_leg.lower_deg}, {long_leg.upper_deg}] deg, "
          f"short [{short_leg.lower_deg}, {short_leg.upper_deg}] deg, "
          f"short liquidity {short_leg.liquidity}")

    lo, hi, n = F("0.5").raw, F("1.5").raw, 2001
    prices = [F.from_raw(lo + (hi - lo) * k // (n - 1)) for k in range(n)]
    curve = hedge_payoff(params, spec, prices)
    path = OUT / f"hedge_payoff_{strike}.csv"
    with open(path, "w") as fh:
        fh.write("price,combined,long_leg,short_leg\n")
        for (price, combined) in curve.samples:
            fh.write(",".join([
                str(price), str(combined),
                str(position_value(params, long_leg, price)),
                str(position_value(params, short_leg, price)),
            ]) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    run(*sys.argv[1:])
