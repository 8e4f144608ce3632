#!/usr/bin/env python3
"""Process-fidelity traces for the logical states and the bare-qutrit reference.

Stores the full trajectories (trajectory_*.csv) next to the fit summary.
"""

import argparse

from starlab.presets import run_preset
from starlab.sweeps import emit_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/process_fidelity")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    result = run_preset("figA2", workers=args.workers, store_trajectories=True)
    emit_report(result, args.out)
    print(f"{len(result.rows)} traces in {result.runtime_s:.0f}s -> {args.out}")
    for r in result.rows:
        print(f"{r.coords['initial_state']:>3}: T_L = {r.fit.T_L:8.1f} us "
              f"(model {r.predicted_T_L_us:.1f} us)")


if __name__ == "__main__":
    main()
