"""Capture, hold and release of a single-photon packet, and the polarization qubit map."""

from dataclasses import dataclass, field, replace
import math

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.optimize import curve_fit

from .control import ControlSchedule, require_feasible, sech_matched_cos_theta
from .errors import DomainError
from .pulses import PulseEnvelope, TimeGrid
from .reduced import integrate_dark_state

DECOUPLED_TOL = 1e-6


@dataclass(frozen=True)
class CyclePlan:
    """Load on ``load_schedule``'s grid, hold with the drive off, then release.

    Storage starts at the end of the load grid (t0) and the release begins
    at t1 = t0 + hold_duration. Without an explicit release schedule the load
    schedule is mirrored about t1.
    """

    params: object
    load_schedule: ControlSchedule
    hold_duration: float = 0.0
    release_schedule: ControlSchedule = None

    def __post_init__(self):
        if self.hold_duration < 0:
            raise DomainError("hold_duration must be >= 0")
        if self.release_schedule is None:
            object.__setattr__(self, "release_schedule",
                               self.load_schedule.time_reversed(self.t1))
        if self.load_schedule.cos_theta[-1] > DECOUPLED_TOL:
            raise DomainError("load schedule must end with cos(theta) = 0")
        if self.release_schedule.cos_theta[0] > DECOUPLED_TOL:
            raise DomainError("release schedule must start with cos(theta) = 0")

    @property
    def t0(self):
        return self.load_schedule.grid.t_end

    @property
    def t1(self):
        return self.t0 + self.hold_duration

    def combined_schedule(self):
        """Load, hold and release on one uniform grid (hold rounded to whole steps)."""
        lg, rg = self.load_schedule.grid, self.release_schedule.grid
        dt = lg.dt
        if not math.isclose(rg.dt, dt, rel_tol=1e-9):
            raise DomainError("load and release grids must share the step size")
        n_hold = int(round(self.hold_duration / dt))
        cos = np.concatenate([self.load_schedule.cos_theta, np.zeros(max(n_hold - 1, 0)),
                              self.release_schedule.cos_theta[0 if n_hold else 1:]])
        om = np.concatenate([self.load_schedule.omega, np.zeros(max(n_hold - 1, 0)),
                             self.release_schedule.omega[0 if n_hold else 1:]])
        grid = TimeGrid(lg.t_start, lg.t_start + dt * (len(cos) - 1), len(cos))
        return ControlSchedule(grid, cos, om, omega_max=self.load_schedule.omega_max)


def default_plan(params, load_end=15.0, hold=0.0, t_start=-10.0, dt=None):
    """Matched sech loading on [t_start, load_end] (in units of T), mirrored release.

    With the defaults the released packet peaks near t = 30 T.
    """
    T = params.t_pulse
    dt = TimeGrid.default(T).dt if dt is None else dt
    grid = TimeGrid.with_spacing(t_start * T, load_end * T, dt)
    return CyclePlan(params, sech_matched_cos_theta(params, grid), hold * T)


@dataclass(frozen=True)
class CycleResult:
    load: object
    D_stored: complex
    D_release: complex
    release: PulseEnvelope
    ledger: dict
    t0: float
    t1: float

    @property
    def stored_number(self):
        return abs(self.D_stored) ** 2

    @property
    def released_number(self):
        return self.release.norm()

    @property
    def closure(self):
        L = self.ledger
        return L["reflected"] + L["decayed"] + L["released"] + L["remaining"]

    def to_csv(self, path):
        """Input and output envelopes on one time axis (hold interval omitted)."""
        from .io import write_csv
        # with no hold the release grid starts on the last load sample
        k = 1 if self.release.grid.t_start <= self.load.grid.t_end else 0
        t = np.concatenate([self.load.times, self.release.times[k:]])
        phi_in = np.concatenate([self.load.phi_in, np.zeros(self.release.grid.n_points - k)])
        phi_out = np.concatenate([self.load.phi_out, self.release.values[k:]])
        phi_in = np.asarray(phi_in, dtype=complex)
        phi_out = np.asarray(phi_out, dtype=complex)
        write_csv(path, ["t", "re_phi_in", "im_phi_in", "re_phi_out", "im_phi_out"],
                  [t, phi_in.real, phi_in.imag, phi_out.real, phi_out.imag])


def release_envelope(params, D_at_release, release_schedule):
    """Output packet -sqrt(gamma) D(t1) cos(t) exp(-(gamma/2) int_t1^t cos^2).

    Unnormalised: its norm is the released photon number.
    """
    cos = np.asarray(release_schedule.cos_theta, dtype=float)
    if cos[0] > DECOUPLED_TOL:
        raise DomainError(f"release must start decoupled, cos(theta) = {cos[0]:.3e}")
    K = cumulative_simpson(cos * cos, dx=release_schedule.grid.dt, initial=0.0)
    vals = -math.sqrt(params.gamma) * D_at_release * cos * np.exp(-0.5 * params.gamma * K)
    return PulseEnvelope(release_schedule.grid, vals.astype(complex), "release",
                         params.t_pulse, normalized=False)


def hold_decay(D, gamma_c, duration):
    """Dark-state amplitude after ``duration`` with the drive off."""
    return D * math.exp(-0.5 * gamma_c * duration)


def run_cycle(plan, pulse, amplitude=1.0, include_gamma_c=False):
    """Run load (reduced model), analytic hold decay and closed-form release.

    ``amplitude`` scales the input packet (used for polarization channels).
    """
    require_feasible(plan.load_schedule)
    require_feasible(plan.release_schedule)
    params = plan.params
    src = pulse if amplitude == 1.0 else pulse.scaled(amplitude)
    load = integrate_dark_state(params, src, plan.load_schedule, include_gamma_c)
    D0 = complex(load.D[-1])
    D1 = hold_decay(D0, params.gamma_c, plan.hold_duration)
    out = release_envelope(params, D1, plan.release_schedule)
    released = out.norm()
    ledger = {
        "reflected": load.reflected_energy(),
        "stored": abs(D0) ** 2,
        "decayed": abs(D0) ** 2 - abs(D1) ** 2,
        "released": released,
        "remaining": abs(D1) ** 2 - released,
    }
    return CycleResult(load, D0, D1, out, ledger, plan.t0, plan.t1)


def sech_fit(envelope):
    """Least-squares fit of |phi| to A sech(2 (t - t_c)/w).

    Returns (A, t_c, w, residual) with the residual as relative L2 error.
    """
    t = envelope.times
    y = np.abs(envelope.values)
    i = int(np.argmax(y))

    def model(t, A, tc, w):
        x = np.abs(2.0 * (t - tc) / w)
        return A * 2.0 * np.exp(-x) / (1.0 + np.exp(-2.0 * x))

    popt, _ = curve_fit(model, t, y, p0=(y[i], t[i], 1.0))
    res = y - model(t, *popt)
    return popt[0], popt[1], popt[2], float(np.sqrt(np.sum(res ** 2) / np.sum(y ** 2)))


# -- polarization qubits ------------------------------------------------------

@dataclass(frozen=True)
class PolarizationState:
    """Amplitudes of the sigma+ and sigma- channels."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        n = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(n - 1.0) > 1e-12:
            raise DomainError(f"qubit not normalised: |alpha|^2 + |beta|^2 = {n!r}")

    @classmethod
    def random(cls, rng):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        return cls(complex(v[0]), complex(v[1]))

    @classmethod
    def normalized(cls, alpha, beta):
        n = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        return cls(alpha / n, beta / n)

    def overlap(self, other):
        return np.conj(self.alpha) * other.alpha + np.conj(self.beta) * other.beta


def fidelity(a, b):
    """|<a|b>|^2 for two polarization states."""
    return float(abs(a.overlap(b)) ** 2)


@dataclass(frozen=True)
class PolarizationResult:
    stored_plus: complex
    stored_minus: complex
    released: PolarizationState
    fidelity: float
    channels: tuple = field(default=(), repr=False)

    @property
    def stored_relative_phase(self):
        return float(np.angle(self.stored_plus / self.stored_minus))


def _released_qubit(out_plus, out_minus, mode):
    ap, am = mode.overlap(out_plus), mode.overlap(out_minus)
    return PolarizationState.normalized(ap, am)


def run_polarization_cycle(plan, pulse, qubit, model="reduced", bank=None):
    """Store and release ``qubit`` = alpha|sigma+> + beta|sigma->.

    The two circular channels evolve independently under the same schedule.
    Stored amplitudes are those of the collective spin states c+ and c-, i.e.
    i*D at the end of loading (cos(theta) = 0 there). ``model="full"`` runs
    the unreduced equations on the combined load/hold/release schedule.
    """
    if not isinstance(qubit, PolarizationState):
        raise DomainError("qubit must be a PolarizationState")
    if model == "reduced":
        plus = run_cycle(plan, pulse, qubit.alpha)
        minus = run_cycle(plan, pulse, qubit.beta)
        unit = release_envelope(plan.params, 1.0, plan.release_schedule)
        mode = replace(unit, values=unit.values / math.sqrt(unit.norm()))
        released = _released_qubit(plus.release, minus.release, mode)
        c_plus, c_minus = 1j * plus.D_stored, 1j * minus.D_stored
        channels = (plus, minus)
    elif model == "full":
        from .full import ModeBank, decode_output, encode_input_modes, integrate_full
        params = plan.params
        bank = ModeBank.make(params.gamma, params.t_pulse) if bank is None else bank
        sched = plan.combined_schedule()
        long_pulse = PulseEnvelope(sched.grid, np.concatenate(
            [pulse.values, np.zeros(sched.grid.n_points - pulse.grid.n_points)]),
            pulse.family, pulse.t_pulse, pulse.delay)
        X = encode_input_modes(long_pulse, bank)
        runs = [integrate_full(params, bank, amp * X, sched) for amp in (qubit.alpha, qubit.beta)]
        i0 = sched.grid.index_of(plan.t0)
        c_plus, c_minus = complex(runs[0].c[i0]), complex(runs[1].c[i0])
        outs = [decode_output(r, bank) for r in runs]
        i1 = sched.grid.index_of(plan.t1)
        # released part only: restrict to times after the release starts
        mask = np.zeros(sched.grid.n_points)
        mask[i1:] = 1.0
        outs = [replace(o, values=o.values * mask) for o in outs]
        combo = np.conj(qubit.alpha) * outs[0].values + np.conj(qubit.beta) * outs[1].values
        mode = replace(outs[0], values=combo / math.sqrt(np.sum(np.abs(combo) ** 2)
                                                           * sched.grid.dt))
        released = _released_qubit(outs[0], outs[1], mode)
        channels = tuple(runs)
    else:
        raise DomainError(f"unknown model {model!r}")
    return PolarizationResult(c_plus, c_minus, released, fidelity(qubit, released), channels)
