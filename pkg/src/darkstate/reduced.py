"""Adiabatic dark-state dynamics in the Markov limit.

The dark-state amplitude obeys

    dD/dt = sqrt(gamma) cos(theta) phi_in(t) - (gamma/2) cos^2(theta) D

and the field leaving the input mirror is phi_out = phi_in - sqrt(gamma) cos(theta) D.
Two independent routes are provided: fixed-step RK4 on the grid
(:func:`integrate_dark_state`) and the closed-form integral evaluated by
cumulative Simpson quadrature (:func:`quadrature_solution`).
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy.integrate import cumulative_simpson

from .integrate import half_grid, rk4
from .pulses import PulseEnvelope, make_sech, shift

# Blocks of the quadrature are rescaled once the accumulated damping exponent
# exceeds this value, keeping exp() in range.
_EXP_BLOCK = 200.0


@dataclass(frozen=True)
class ReducedTrajectory:
    grid: object
    D: np.ndarray
    phi_out: np.ndarray
    phi_in: np.ndarray

    @property
    def times(self):
        return self.grid.times

    @property
    def population(self):
        return np.abs(self.D) ** 2

    def ledger(self):
        """|D|^2 + emitted so far + input still to arrive, per grid point.

        Equals 1 at all times when the coherence decay is neglected.
        """
        dt = self.grid.dt
        out_sq = np.abs(self.phi_out) ** 2
        in_sq = np.abs(self.phi_in) ** 2
        emitted = cumulative_simpson(out_sq, dx=dt, initial=0.0)
        pending = in_sq.sum() * dt - cumulative_simpson(in_sq, dx=dt, initial=0.0)
        return self.population + emitted + pending

    def reflected_energy(self):
        return float(np.sum(np.abs(self.phi_out) ** 2) * self.grid.dt)

    def output_envelope(self):
        return PulseEnvelope(self.grid, self.phi_out, "output", normalized=False)

    def to_csv(self, path):
        from .io import write_csv
        D = np.asarray(self.D, dtype=complex)
        po = np.asarray(self.phi_out, dtype=complex)
        write_csv(path, ["t", "re_D", "im_D", "abs_D_sq", "re_phi_out", "im_phi_out"],
                  [self.times, D.real, D.imag, np.abs(D) ** 2, po.real, po.imag])


def _coefficients(params, pulse, schedule, include_gamma_c):
    pulse.grid.require_same(schedule.grid)
    cos = np.asarray(schedule.cos_theta, dtype=float)
    sin_sq = np.clip(1.0 - cos * cos, 0.0, None)
    rate = 0.5 * params.gamma * cos * cos
    if include_gamma_c:
        rate = rate + 0.5 * params.gamma_c * sin_sq
    source = math.sqrt(params.gamma) * cos * np.asarray(pulse.values)
    return cos, rate, source


def integrate_dark_state(params, pulse, schedule, include_gamma_c=False):
    """RK4 on the pulse grid, coefficients at midpoints from cubic splines.

    ``include_gamma_c`` adds -(gamma_c/2) sin^2(theta) D, a coherence-decay
    term neglected during loading by default.
    """
    cos, rate, source = _coefficients(params, pulse, schedule, include_gamma_c)
    t = pulse.grid.times
    r_h = half_grid(t, rate)
    s_h = half_grid(t, source.astype(complex))

    def rhs(j, d):
        return s_h[j] - r_h[j] * d

    D = rk4(rhs, 0j, pulse.grid.dt, len(t) - 1)
    phi_out = pulse.values - math.sqrt(params.gamma) * cos * D
    return ReducedTrajectory(pulse.grid, D, phi_out, np.asarray(pulse.values))


def _cumulative(y, dt):
    if len(y) >= 3:
        return cumulative_simpson(y, dx=dt, initial=0.0)
    return np.concatenate([[0.0], np.cumsum(0.5 * dt * (y[1:] + y[:-1]))])


def quadrature_solution(params, pulse, schedule, include_gamma_c=False, tail_tol=1e-6):
    """Evaluate D(t) = int cos*phi*sqrt(gamma) exp(-int_tau^t rate) dtau by quadrature.

    The damping exponent is a cumulative integral; within blocks where it
    grows by less than ~200 the double integral factorises, so the whole
    trajectory costs O(n).
    """
    cos, rate, source = _coefficients(params, pulse, schedule, include_gamma_c)
    dt = pulse.grid.dt
    lead = np.abs(pulse.values[0]) ** 2 * dt
    peak = np.max(np.abs(pulse.values))
    if np.abs(pulse.values[0]) > tail_tol * peak:
        warnings.warn(f"envelope has not vanished at t_start (|phi|^2 dt = {lead:.3e})")

    K = _cumulative(rate, dt)
    n = len(K)
    D = np.zeros(n, dtype=complex)
    start = 0
    d0 = 0j
    while start < n - 1:
        stop = start + 1
        while stop < n - 1 and K[stop + 1] - K[start] < _EXP_BLOCK:
            stop += 1
        k_loc = K[start:stop + 1] - K[start]
        w = np.exp(k_loc)
        src = source[start:stop + 1] * w
        F = _cumulative(src.real, dt) + 1j * _cumulative(np.imag(src), dt)
        D[start:stop + 1] = np.exp(-k_loc) * (d0 + F)
        d0 = D[stop]
        start = stop
    phi_out = pulse.values - math.sqrt(params.gamma) * cos * D
    return ReducedTrajectory(pulse.grid, D, phi_out, np.asarray(pulse.values))


def loading_output(params, pulse, schedule, include_gamma_c=False):
    """Input-output relation: phi_out = phi_in - gamma cos(t) int cos phi_in exp(...)."""
    return quadrature_solution(params, pulse, schedule, include_gamma_c)


def asymptotic_amplitude(traj, center=0.0, t_pulse=1.0, horizon=10.0):
    """|D| read out ``horizon`` pulse durations after ``center`` (or at the grid end)."""
    i = traj.grid.index_of(center + horizon * t_pulse)
    return float(abs(traj.D[i]))


def _one_delay(args):
    params, pulse, schedule, delta = args
    traj = integrate_dark_state(params, shift(pulse, delta), schedule)
    return asymptotic_amplitude(traj, pulse.delay + delta, params.t_pulse)


def timing_sensitivity(params, schedule, deltas, pulse=None, workers=1):
    """Asymptotic |D| when the packet arrives late by each of ``deltas``.

    ``pulse`` defaults to the sech packet the schedule was matched to.
    With ``workers > 1`` the scan runs in a process pool; results keep the
    order of ``deltas``.
    """
    if pulse is None:
        pulse = make_sech(schedule.grid, params.t_pulse, 0.0)
    jobs = [(params, pulse, schedule, float(d)) for d in deltas]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return np.array(list(pool.map(_one_delay, jobs)))
    return np.array([_one_delay(j) for j in jobs])


def fit_power_law(x, y):
    """Least-squares fit y = a x^p in log space; returns (a, p)."""
    p, log_a = np.polyfit(np.log(x), np.log(y), 1)
    return float(np.exp(log_a)), float(p)
