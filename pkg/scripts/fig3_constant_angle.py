"""Output envelopes for sech loading at a fixed mixing angle.

Prints the signed overlap with the input and the RMS output duration for
each effective decay rate; both fall as gamma_eff grows.
"""

import argparse

from darkstate.figures import constant_angle_scan
from darkstate.model import SystemParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gamma-eff", type=float, nargs="+",
                    default=[0.01, 0.03, 0.1, 0.3, 1, 3, 10, 30, 100])
    args = ap.parse_args()
    params = SystemParams.from_dimensionless(10 * max(args.gamma_eff), 20.0)
    print(f"{'gamma_eff T':>12} {'Re<in|out>':>12} {'rms width/T':>12}")
    for e in constant_angle_scan(params, args.gamma_eff):
        print(f"{e.gamma_eff_T:12.3g} {e.overlap:12.6f} {e.tail_width:12.5f}")


if __name__ == "__main__":
    main()
