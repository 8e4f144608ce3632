#!/usr/bin/env python3
"""Two-dimensional scan of the sideband detunings (superposition lifetime).

Default grid is 21x21 over +-1.2 W; pass --points 9 for a fast smoke run.
"""

import argparse

from starlab.presets import run_preset
from starlab.sweeps import emit_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/detuning_scan")
    ap.add_argument("--points", type=int, default=None)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    result = run_preset("fig3a", points=args.points, workers=args.workers)
    emit_report(result, args.out)
    best = max((r for r in result.rows if r.fit is not None), key=lambda r: r.fit.T_L)
    print(f"{len(result.rows)} cells in {result.runtime_s:.0f}s -> {args.out}")
    print(f"best cell: nu0 = {best.coords['nu0_mhz']:+.2f} MHz, "
          f"nu1 = {best.coords['nu1_mhz']:+.2f} MHz, T_L = {best.fit.T_L:.1f} us")


if __name__ == "__main__":
    main()
