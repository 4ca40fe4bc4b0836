"""Capture loss versus arrival-time error for the matched sech schedule."""

import argparse

import numpy as np

from darkstate.control import sech_matched_cos_theta
from darkstate.model import SystemParams
from darkstate.pulses import TimeGrid
from darkstate.reduced import fit_power_law, timing_sensitivity


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--points", type=int, default=9)
    args = ap.parse_args()
    params = SystemParams.from_dimensionless(4.0, 20.0)
    grid = TimeGrid.default()
    deltas = np.geomspace(0.01, 0.1, args.points)
    amps = timing_sensitivity(params, sech_matched_cos_theta(params, grid), deltas,
                              workers=args.workers)
    for d, a in zip(deltas, amps):
        print(f"delta = {d:.4f} T: 1 - |D| = {1 - a:.4e}")
    a, p = fit_power_law(deltas, 1 - amps)
    print(f"loss ~ {a:.4f} (delta/T)^{p:.4f}")


if __name__ == "__main__":
    main()
