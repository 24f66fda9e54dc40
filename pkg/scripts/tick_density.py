#!/usr/bin/env python3
"""Print the price interval of every 1-degree tick.

Shows the non-uniform discretization: unbounded width at angle 0,
narrowing toward the unit-price tick at 45 degrees, then shrinking on
toward price 0 at 90.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from polarpool.ticks import TickGrid, tick_width_in_price


def run():
    grid = TickGrid()
    print(f"{'tick':>6} {'angle range':>12} {'price_lo':>22} {'price_hi':>22}")
    for k in range(grid.tick_count):
        lo, hi = tick_width_in_price(grid, k)
        hi_text = "inf" if hi is None else str(hi)
        print(f"{k:>6} {f'[{k},{k + 1})':>12} {str(lo):>22} {hi_text:>22}")


if __name__ == "__main__":
    run()
