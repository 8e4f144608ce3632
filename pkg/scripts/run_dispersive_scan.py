#!/usr/bin/env python3
"""Lifetime of the three logical states versus the residual dispersive shift."""

import argparse

from starlab.presets import run_preset
from starlab.sweeps import emit_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/dispersive_scan")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    result = run_preset("figA1", workers=args.workers)
    emit_report(result, args.out)
    print(f"{len(result.rows)} runs in {result.runtime_s:.0f}s -> {args.out}")
    for r in result.rows:
        print(f"{r.coords['initial_state']:>3} chi = {r.coords['chi_mhz']:5.3f} MHz  "
              f"T_L = {r.fit.T_L:8.1f} us")


if __name__ == "__main__":
    main()
