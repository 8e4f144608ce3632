#!/usr/bin/env python3
"""Qutrit-T1 scan: simulated logical lifetimes against the analytic rate model."""

import argparse

from starlab.presets import run_preset
from starlab.sweeps import emit_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/t1_scaling")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    result = run_preset("fig4", workers=args.workers)
    emit_report(result, args.out)
    print(f"{len(result.rows)} runs in {result.runtime_s:.0f}s -> {args.out}")
    print(f"{'state':>5} {'T1':>5} {'T_L sim':>9} {'T_L model':>9} {'ratio':>6}")
    for r in result.rows:
        print(f"{r.coords['initial_state']:>5} {r.coords['t1_us']:5.0f} "
              f"{r.fit.T_L:9.1f} {r.predicted_T_L_us:9.1f} "
              f"{r.fit.T_L / r.coords['t1_us']:6.1f}")


if __name__ == "__main__":
    main()
