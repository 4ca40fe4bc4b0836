"""Data builders for the reference scenarios (constant-angle loading, matched
loading of three pulse shapes, the full storage cycle, hold-time scans)."""

from dataclasses import dataclass
import math

import numpy as np

from .control import schedule_from_cos_theta, sech_matched_cos_theta
from .cycle import default_plan, run_cycle
from .errors import DomainError
from .pulses import PULSE_FAMILIES, TimeGrid, make_sech
from .reduced import asymptotic_amplitude, integrate_dark_state, loading_output


def constant_schedule(params, grid, gamma_eff):
    """cos^2(theta) = gamma_eff/gamma at all times."""
    if not 0.0 < gamma_eff <= params.gamma:
        raise DomainError(f"gamma_eff must lie in (0, gamma], got {gamma_eff!r}")
    cos = np.full(grid.n_points, math.sqrt(gamma_eff / params.gamma))
    return schedule_from_cos_theta(params, grid, cos)


def rms_width(times, values, dt):
    """Energy-weighted RMS duration of |values|^2 about its centroid."""
    w = np.abs(values) ** 2
    total = np.sum(w) * dt
    mean = np.sum(times * w) * dt / total
    return float(math.sqrt(np.sum((times - mean) ** 2 * w) * dt / total))


@dataclass(frozen=True)
class ConstantAngleEntry:
    gamma_eff_T: float
    overlap: float
    tail_width: float
    reflected: float
    times: np.ndarray
    phi_in: np.ndarray
    phi_out: np.ndarray


def constant_angle_scan(params, gamma_eff_T, dt=0.005, t_start=-10.0, horizon=20.0):
    """Sech loading with a fixed mixing angle for each effective decay rate.

    For each gamma_eff T the grid runs to max(40, horizon/(gamma_eff T)) so the
    slow cavity has emptied, with step min(dt, 0.05/(gamma_eff T)).
    ``overlap`` is the signed Re<phi_in|phi_out>, running from +1 (packet
    reflected untouched) to -1 (instant re-emission with a pi phase), and
    ``tail_width`` is the RMS duration of phi_out.
    """
    T = params.t_pulse
    out = []
    for g_eff in gamma_eff_T:
        t_end = max(40.0, horizon / g_eff) * T
        # resolve the decay as well as the pulse
        grid = TimeGrid.with_spacing(t_start * T, t_end, min(dt, 0.05 / g_eff) * T)
        pulse = make_sech(grid, T)
        traj = loading_output(params, pulse, constant_schedule(params, grid, g_eff / T))
        ov = float(np.real(np.sum(np.conj(pulse.values) * traj.phi_out)) * grid.dt)
        out.append(ConstantAngleEntry(
            float(g_eff), ov, rms_width(grid.times, traj.phi_out, grid.dt),
            traj.reflected_energy(), grid.times, np.asarray(pulse.values), traj.phi_out))
    return out


def resample(entry_times, values, times):
    v = np.asarray(values)
    if np.iscomplexobj(v):
        return np.interp(times, entry_times, v.real) + 1j * np.interp(times, entry_times, v.imag)
    return np.interp(times, entry_times, v)


def matched_loading(params, grid, families=("sech", "gaussian", "hyper_gaussian")):
    """Each pulse shape loaded with the sech-matched schedule.

    Returns (schedule, {family: (trajectory, asymptotic |D|)}).
    """
    sched = sech_matched_cos_theta(params, grid)
    out = {}
    for fam in families:
        pulse = PULSE_FAMILIES[fam](grid, params.t_pulse)
        traj = integrate_dark_state(params, pulse, sched)
        out[fam] = (traj, asymptotic_amplitude(traj, 0.0, params.t_pulse))
    return sched, out


def hold_scan(params, holds, pulse=None, **plan_kw):
    """Released photon number for each hold duration (units of T).

    Returns (holds, released numbers, fitted decay rate of the released
    number in units of 1/T).
    """
    holds = np.asarray(holds, dtype=float)
    released = []
    pulse_cache = pulse
    for h in holds:
        plan = default_plan(params, hold=h, **plan_kw)
        if pulse_cache is None:
            pulse_cache = make_sech(plan.load_schedule.grid, params.t_pulse)
        released.append(run_cycle(plan, pulse_cache).released_number)
    released = np.array(released)
    if len(holds) >= 2:
        slope = np.polyfit(holds * params.t_pulse, np.log(released), 1)[0]
        rate = -slope * params.t_pulse
    else:
        rate = math.nan
    return holds, released, float(rate)
