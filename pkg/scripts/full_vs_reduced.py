"""Compare the unreduced equations with the dark-state model as g sqrt(N) varies.

Deviation is the max over the grid of | |D_full|^2 - |D_reduced|^2 |.
"""

import numpy as np

from darkstate.control import check_adiabaticity, sech_matched_cos_theta
from darkstate.full import ModeBank, encode_input_modes, integrate_full
from darkstate.model import SystemParams
from darkstate.pulses import TimeGrid, make_sech
from darkstate.reduced import integrate_dark_state


def main():
    grid = TimeGrid.default()
    pulse = make_sech(grid)
    for G in (2.0, 4.0, 10.0, 20.0, 40.0):
        p = SystemParams.from_dimensionless(4.0, G, gamma_a_T=1.0)
        sched = sech_matched_cos_theta(p, grid)
        bank = ModeBank.make(p.gamma)
        full = integrate_full(p, bank, encode_input_modes(pulse, bank), sched)
        red = integrate_dark_state(p, pulse, sched.with_omega_cap(p, full.omega_cap))
        dev = np.max(np.abs(full.population - red.population))
        margin = min(check_adiabaticity(p, sched).ratios.values())
        print(f"g sqrt(N) T = {G:5.1f}: smallest margin {margin:8.1f}, deviation {dev:.3e}")


if __name__ == "__main__":
    main()
