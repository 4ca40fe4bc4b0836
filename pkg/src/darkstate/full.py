"""Unreduced amplitude equations with a discretised free-field continuum.

    da/dt  = -(gamma_a/2) a - i G b - i Omega c
    db/dt  = -i G a - i kappa sum_k xi_k
    dc/dt  = -(gamma_c/2) c - i Omega a
    dxi_k/dt = -i Delta_k xi_k - i kappa b

with G = g sqrt(N). The modes are integrated in their own rotating frame,
xi_k = X_k exp(-i Delta_k (t - t0)), so only the coupling terms oscillate.
A bank of n modes with spacing dDelta and kappa^2 = gamma dDelta / 2 pi
reproduces the Markov decay rate gamma until the recurrence time 2 pi/dDelta,
up to a band-edge shift: to first order a flat band of half-width W decays at
gamma (1 + gamma/(pi W)). The default ``band_edge`` calibration lowers kappa
to cancel that shift.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np

from .errors import ConvergenceError, DomainError
from .integrate import fine_grid
from .model import AmplitudeState, dark_bright_rotate, mixing_angle_from_omega
from .pulses import PulseEnvelope

FULL_CAP_FACTOR = 100.0
_CHUNK = 256


@dataclass(frozen=True)
class ModeBank:
    detunings: np.ndarray
    kappa: float
    gamma: float

    @classmethod
    def make(cls, gamma, t_pulse=1.0, delta_max=None, n_modes=1024, calibration="band_edge",
             check=True):
        """Uniform detunings on [-delta_max, delta_max] (default 40/T).

        ``calibration="markov"`` uses kappa^2 = gamma dDelta/2pi exactly;
        ``"band_edge"`` solves for the kappa whose decay pole sits at gamma/2.
        """
        if delta_max is None:
            delta_max = 40.0 / t_pulse
        det = np.linspace(-delta_max, delta_max, n_modes)
        spacing = 2.0 * delta_max / (n_modes - 1)
        if calibration == "markov":
            g0 = gamma
        elif calibration == "band_edge":
            # amplitude pole: lambda = g0/2 + (g0/pi) atan(lambda/W), want lambda = gamma/2
            g0 = gamma / (1.0 + (2.0 / math.pi) * math.atan(gamma / (2.0 * delta_max)))
        else:
            raise DomainError(f"unknown calibration {calibration!r}")
        bank = cls(det, math.sqrt(g0 * spacing / (2.0 * math.pi)), gamma)
        if check:
            bank.validate(t_pulse)
        return bank

    @property
    def n_modes(self):
        return len(self.detunings)

    @property
    def delta_max(self):
        return float(self.detunings[-1])

    @property
    def spacing(self):
        return float(self.detunings[1] - self.detunings[0])

    @property
    def markov_gamma(self):
        """2 pi kappa^2 / dDelta, the rate the bank would give with infinite bandwidth."""
        return 2.0 * math.pi * self.kappa ** 2 / self.spacing

    @property
    def recurrence_time(self):
        return 2.0 * math.pi / self.spacing

    def validate(self, t_pulse):
        if self.delta_max < 20.0 / t_pulse or self.delta_max < 10.0 * self.gamma:
            raise DomainError(
                f"mode bandwidth {self.delta_max:.4g} must exceed 20/T and 10*gamma")

    def spectrum_csv(self, path, xi):
        from .io import write_csv
        xi = np.asarray(xi, dtype=complex)
        write_csv(path, ["delta", "re_xi", "im_xi", "abs_xi_sq"],
                  [self.detunings, xi.real, xi.imag, np.abs(xi) ** 2])


def _fourier(bank, times, values, t0, sign):
    """sqrt(dDelta/2pi) * sum_i values_i exp(sign*i*Delta_k (t_i - t0)) * weight."""
    pref = math.sqrt(bank.spacing / (2.0 * math.pi))
    out = np.empty(bank.n_modes, dtype=complex)
    tau = np.asarray(times) - t0
    for lo in range(0, bank.n_modes, _CHUNK):
        d = bank.detunings[lo:lo + _CHUNK, None]
        out[lo:lo + _CHUNK] = np.exp(sign * 1j * d * tau[None, :]) @ values
    return pref * out


def encode_input_modes(pulse, bank, t0=None):
    """Mode amplitudes X_k(t0) of the free packet whose field at the mirror is phi.

    X_k = sqrt(dDelta/2pi) int phi(t) exp(i Delta_k (t - t0)) dt.
    """
    T = pulse.t_pulse
    if 1.0 / T >= bank.delta_max / 4.0:
        xi = _fourier(bank, pulse.times, np.asarray(pulse.values) * pulse.grid.dt,
                      pulse.grid.t_start if t0 is None else t0, +1)
        leak = 1.0 - float(np.sum(np.abs(xi) ** 2))
        raise DomainError(f"pulse bandwidth 1/T = {1 / T:.4g} exceeds delta_max/4; "
                          f"spectral leakage ~ {leak:.3e}")
    span = pulse.grid.t_end - pulse.grid.t_start
    if span >= bank.recurrence_time:
        raise DomainError(f"grid span {span:.4g} exceeds the mode recurrence time "
                          f"{bank.recurrence_time:.4g}")
    t0 = pulse.grid.t_start if t0 is None else t0
    return _fourier(bank, pulse.times, np.asarray(pulse.values) * pulse.grid.dt, t0, +1)


def field_at_mirror(bank, X, times, t0):
    """phi(t) = sqrt(dDelta/2pi) sum_k X_k exp(-i Delta_k (t - t0))."""
    pref = math.sqrt(bank.spacing / (2.0 * math.pi))
    tau = np.asarray(times) - t0
    out = np.empty(len(tau), dtype=complex)
    for lo in range(0, len(tau), 4 * _CHUNK):
        ph = np.exp(-1j * np.outer(tau[lo:lo + 4 * _CHUNK], bank.detunings))
        out[lo:lo + 4 * _CHUNK] = ph @ X
    return pref * out


@dataclass(frozen=True)
class FullTrajectory:
    grid: object
    t0: float
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    omega: np.ndarray
    D: np.ndarray
    B: np.ndarray
    norm: np.ndarray
    xi_times: np.ndarray
    xi_snapshots: np.ndarray
    xi_final: np.ndarray
    coupling: float
    omega_cap: float
    substeps: int

    @property
    def times(self):
        return self.grid.times

    @property
    def population(self):
        return np.abs(self.D) ** 2

    @property
    def drive_ratio(self):
        """Omega / (g sqrt(<n>)) with <n> = |b|^2, in units of the collective G.

        Multiply by sqrt(N) for the single-atom g normalisation.
        """
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.omega / (self.coupling * np.abs(self.b))

    def final_state(self):
        return AmplitudeState(self.a[-1], self.b[-1], self.c[-1], self.xi_final)

    def to_csv(self, path):
        from .io import write_csv
        cols = ["t", "re_a", "im_a", "re_b", "im_b", "re_c", "im_c", "abs_D_sq",
                "abs_B_sq", "norm"]
        arrs = [self.times, self.a.real, self.a.imag, self.b.real, self.b.imag,
                self.c.real, self.c.imag, np.abs(self.D) ** 2, np.abs(self.B) ** 2, self.norm]
        write_csv(path, cols, arrs)


def _auto_substeps(dt, rates):
    h_max = min(1.5 / max(rates[0], 1e-300), 0.2 / max(rates[1], 1e-300),
                0.2 / max(rates[2], 1e-300))
    return max(1, int(math.ceil(dt / h_max)))


def _propagate(coupling, gamma_a, gamma_c, bank, X0, grid, omega_nodes, substeps,
               initial, xi_every):
    """Core RK4 loop; records a, b, c at every grid node."""
    t = grid.times
    t0 = float(t[0])
    n_nodes = len(t)
    m = substeps
    h = grid.dt / m
    om = fine_grid(t, omega_nodes, m, kind="pchip")
    om = np.maximum(om, 0.0)
    kap = bank.kappa
    det = bank.detunings
    G = coupling
    ha, hc = 0.5 * gamma_a, 0.5 * gamma_c

    a, b, c = (complex(v) for v in initial)
    X = np.array(X0, dtype=complex)
    rec = np.empty((n_nodes, 3), dtype=complex)
    rec[0] = a, b, c
    mode_norm = np.empty(n_nodes)
    mode_norm[0] = np.vdot(X, X).real
    snaps_t, snaps = [t0], [X.copy()]
    half_phase = np.exp(0.5j * det * h)

    for node in range(n_nodes - 1):
        p0 = np.exp(1j * det * (t[node] - t0))
        for sub in range(m):
            j = 2 * (node * m + sub)
            pm = p0 * half_phase
            p1 = pm * half_phase
            pc0, pcm, pc1 = p0.conj(), pm.conj(), p1.conj()
            o0, om_, o1 = om[j], om[j + 1], om[j + 2]

            s = kap * (X @ pc0)
            ka1 = -ha * a - 1j * (G * b + o0 * c)
            kb1 = -1j * (G * a + s)
            kc1 = -hc * c - 1j * o0 * a
            kx1 = (-1j * kap * b) * p0

            a2, b2, c2 = a + 0.5 * h * ka1, b + 0.5 * h * kb1, c + 0.5 * h * kc1
            X2 = X + (0.5 * h) * kx1
            s = kap * (X2 @ pcm)
            ka2 = -ha * a2 - 1j * (G * b2 + om_ * c2)
            kb2 = -1j * (G * a2 + s)
            kc2 = -hc * c2 - 1j * om_ * a2
            kx2 = (-1j * kap * b2) * pm

            a3, b3, c3 = a + 0.5 * h * ka2, b + 0.5 * h * kb2, c + 0.5 * h * kc2
            X3 = X + (0.5 * h) * kx2
            s = kap * (X3 @ pcm)
            ka3 = -ha * a3 - 1j * (G * b3 + om_ * c3)
            kb3 = -1j * (G * a3 + s)
            kc3 = -hc * c3 - 1j * om_ * a3
            kx3 = (-1j * kap * b3) * pm

            a4, b4, c4 = a + h * ka3, b + h * kb3, c + h * kc3
            X4 = X + h * kx3
            s = kap * (X4 @ pc1)
            ka4 = -ha * a4 - 1j * (G * b4 + o1 * c4)
            kb4 = -1j * (G * a4 + s)
            kc4 = -hc * c4 - 1j * o1 * a4
            kx4 = (-1j * kap * b4) * p1

            w = h / 6.0
            a = a + w * (ka1 + 2 * ka2 + 2 * ka3 + ka4)
            b = b + w * (kb1 + 2 * kb2 + 2 * kb3 + kb4)
            c = c + w * (kc1 + 2 * kc2 + 2 * kc3 + kc4)
            X = X + w * (kx1 + 2 * kx2 + 2 * kx3 + kx4)
            p0 = p1
        rec[node + 1] = a, b, c
        mode_norm[node + 1] = np.vdot(X, X).real
        if (node + 1) % xi_every == 0 and node + 1 < n_nodes - 1:
            snaps_t.append(float(t[node + 1]))
            snaps.append(X.copy())
    snaps_t.append(float(t[-1]))
    snaps.append(X.copy())
    return rec, mode_norm, np.array(snaps_t), np.array(snaps), X


def integrate_full(params, bank, xi0, schedule, initial=(0j, 0j, 0j), omega_cap=None,
                   substeps=None, check_convergence=False, xi_every=16):
    """Integrate the unreduced equations on the schedule's grid.

    The drive is clipped at ``omega_cap`` (default 100 g sqrt(N)); compare
    against the reduced model on ``schedule.with_omega_cap(params, cap)``.
    ``check_convergence`` reruns with half the step and raises
    ConvergenceError if any final amplitude moves by more than 1e-6.
    """
    G = params.g_sqrt_n
    cap = FULL_CAP_FACTOR * G if omega_cap is None else omega_cap
    omega_nodes = np.minimum(np.asarray(schedule.omega, dtype=float), cap)
    if substeps is None:
        substeps = _auto_substeps(schedule.grid.dt,
                                  (max(omega_nodes.max(), G), bank.delta_max, G))
    traj = _run(G, params.gamma_a, params.gamma_c, bank, xi0, schedule.grid,
                omega_nodes, substeps, initial, xi_every, params, cap)
    if check_convergence:
        fine = _run(G, params.gamma_a, params.gamma_c, bank, xi0, schedule.grid,
                    omega_nodes, 2 * substeps, initial, xi_every, params, cap)
        change = max(np.max(np.abs(fine.xi_final - traj.xi_final)),
                     abs(fine.a[-1] - traj.a[-1]), abs(fine.b[-1] - traj.b[-1]),
                     abs(fine.c[-1] - traj.c[-1]))
        if not change <= 1e-6:  # also catches a run that overflowed to NaN
            raise ConvergenceError(f"step halving changes the final state by {change:.2e}")
    return traj


def _run(G, gamma_a, gamma_c, bank, X0, grid, omega_nodes, m, initial, xi_every,
         params, cap):
    rec, mode_norm, snaps_t, snaps, X = _propagate(G, gamma_a, gamma_c, bank, X0, grid,
                                                   omega_nodes, m, initial, xi_every)
    a, b, c = rec[:, 0], rec[:, 1], rec[:, 2]
    if params is not None:
        angle = mixing_angle_from_omega(params, omega_nodes)
        D, B = dark_bright_rotate(AmplitudeState(a, b, c), angle)
    else:
        D = B = np.full(len(a), np.nan + 0j)
    norm = np.abs(a) ** 2 + np.abs(b) ** 2 + np.abs(c) ** 2 + mode_norm
    return FullTrajectory(grid, float(grid.t_start), a, b, c, omega_nodes, D, B, norm,
                          snaps_t, snaps, X, G, cap, m)


def integrate_bare_cavity(bank, grid, xi0=None, b0=0j, substeps=None):
    """Empty cavity (no atoms, no drive) coupled to the mode bank."""
    X0 = np.zeros(bank.n_modes, dtype=complex) if xi0 is None else xi0
    if substeps is None:
        substeps = _auto_substeps(grid.dt, (1.0, bank.delta_max, 1.0))
    return _run(0.0, 0.0, 0.0, bank, X0, grid, np.zeros(grid.n_points), substeps,
                (0j, b0, 0j), 16, None, 0.0)


def fit_decay_rate(traj, t_lo, t_hi):
    """Decay rate of |b|^2 from a log-linear fit over [t_lo, t_hi]."""
    t = traj.times
    m = (t >= t_lo) & (t <= t_hi)
    slope = np.polyfit(t[m], np.log(np.abs(traj.b[m]) ** 2), 1)[0]
    return float(-slope)


def decode_output(traj, bank, grid=None, residual_tol=1e-6):
    """Free field at the mirror implied by the final mode amplitudes.

    Returns an unnormalised envelope; its norm is the photon number that left
    the cavity plus any input that never entered.
    """
    grid = traj.grid if grid is None else grid
    residual = abs(traj.a[-1]) ** 2 + abs(traj.b[-1]) ** 2 + abs(traj.c[-1]) ** 2
    if residual > residual_tol:
        warnings.warn(f"excitation {residual:.3e} still inside the cavity system")
    vals = field_at_mirror(bank, traj.xi_final, grid.times, traj.t0)
    return PulseEnvelope(grid, vals, "output", normalized=False)
