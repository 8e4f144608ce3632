#!/usr/bin/env python3
"""Scan of the two drive rates W and Omega at nu = W/sqrt(3), kappa = Omega."""

import argparse

from starlab.presets import run_preset
from starlab.sweeps import emit_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/drive_rate_scan")
    ap.add_argument("--points", type=int, default=None)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    result = run_preset("fig3b", points=args.points, workers=args.workers)
    emit_report(result, args.out)
    best = max((r for r in result.rows if r.fit is not None), key=lambda r: r.fit.T_L)
    print(f"{len(result.rows)} cells in {result.runtime_s:.0f}s -> {args.out}")
    print(f"best cell: W = {best.coords['w_mhz']:.2f} MHz, "
          f"Omega = {best.coords['omega_mhz']:.2f} MHz, T_L = {best.fit.T_L:.1f} us")


if __name__ == "__main__":
    main()
