"""Classical Fabry-Perot round-trip model of impedance matching.

A lossless input mirror with real amplitude reflectivity R and transmission
T = i sqrt(1 - R^2) feeds a cavity with round-trip amplitude loss zeta and
round-trip time tau_c:

    E_c(t)   = T E_in(t) + R zeta E_c(t - tau_c)
    E_out(t) = T zeta E_c(t - tau_c) + R E_in(t) = E_in/R + (T/R) E_c

Expanding the delay to first order gives
dE_c/dt = -eta E_c + T/(R zeta tau_c) E_in with eta = (1 - R zeta)/(R zeta tau_c).
For R, zeta near one this leads to the matching condition

    gamma_int/2 + d/dt ln E_in = (gamma/2) tau_0/tau_c,

with gamma = 2(1 - R)/tau_0 and gamma_int = 2(1 - zeta)/tau_c. For the
intracavity medium tau_0/tau_c = cos^2(theta) and gamma_int = -2 d/dt ln cos(theta).
"""

from dataclasses import dataclass
import math

import numpy as np

from .control import COS_FLOOR, log_derivative
from .errors import DomainError, SingularityError
from .integrate import half_grid, rk4
from .pulses import TimeGrid


@dataclass(frozen=True)
class MirrorCavity:
    R: float
    zeta: float = 1.0
    tau_c: float = 1e-3
    tau_0: float = None

    def __post_init__(self):
        if not 0.0 < self.R < 1.0:
            raise DomainError("R must lie in (0, 1)")
        if not 0.0 < self.zeta <= 1.0:
            raise DomainError("zeta must lie in (0, 1]")
        if self.tau_c <= 0:
            raise DomainError("tau_c must be positive")
        if self.tau_0 is None:
            object.__setattr__(self, "tau_0", self.tau_c)
        if not 0.0 < self.tau_0 <= self.tau_c * (1 + 1e-12):
            raise DomainError("need 0 < tau_0 <= tau_c")

    @classmethod
    def from_rates(cls, gamma, tau_0, tau_ratio=1.0, gamma_int=0.0):
        """Cavity with empty decay rate ``gamma`` and internal loss rate ``gamma_int``.

        ``tau_ratio`` is tau_0/tau_c.
        """
        tau_c = tau_0 / tau_ratio
        return cls(1.0 - 0.5 * gamma * tau_0, 1.0 - 0.5 * gamma_int * tau_c, tau_c, tau_0)

    @property
    def T_mirror(self):
        return 1j * math.sqrt((1.0 - self.R) * (1.0 + self.R))

    @property
    def eta(self):
        rz = self.R * self.zeta
        return (1.0 - rz) / (rz * self.tau_c)

    @property
    def gamma(self):
        return 2.0 * (1.0 - self.R) / self.tau_0

    @property
    def gamma_int(self):
        return 2.0 * (1.0 - self.zeta) / self.tau_c

    def matched(self):
        """True when zeta = R, the steady-state zero-reflection condition."""
        return math.isclose(self.zeta, self.R, rel_tol=1e-12)


@dataclass(frozen=True)
class RoundTripResult:
    times: np.ndarray
    e_in: np.ndarray
    e_c: np.ndarray
    e_out: np.ndarray
    e_c_ode: np.ndarray
    e_out_ode: np.ndarray
    delay_samples: int
    resampled: bool

    def ode_deviation(self):
        """max |E_c(recursion) - E_c(ODE)| relative to max |E_c(ODE)|."""
        return float(np.max(np.abs(self.e_c - self.e_c_ode)) / np.max(np.abs(self.e_c_ode)))

    def stored_energy(self):
        """Energy in the last round trip of circulating samples, per node."""
        m = self.delay_samples
        p = np.abs(self.e_c) ** 2
        c = np.concatenate([[0.0], np.cumsum(p)])
        lo = np.maximum(np.arange(1, len(p) + 1) - m, 0)
        return c[1:] - c[lo]

    def to_csv(self, path, residual=None):
        from .io import write_csv
        cols = ["t", "re_E_in", "im_E_in", "re_E_c", "im_E_c", "re_E_out", "im_E_out"]
        arrs = [self.times, self.e_in.real, self.e_in.imag, self.e_c.real, self.e_c.imag,
                self.e_out.real, self.e_out.imag]
        if residual is not None:
            cols.append("residual")
            arrs.append(np.nan_to_num(residual, nan=0.0))
        write_csv(path, cols, arrs)


def _recursion(cav, e_in, m):
    T, rz = cav.T_mirror, cav.R * cav.zeta
    e_c = np.zeros(len(e_in), dtype=complex)
    buf = np.zeros(m, dtype=complex)  # circular delay line, one round trip long
    for n, x in enumerate(e_in):
        k = n % m
        delayed = buf[k]
        e_c[n] = T * x + rz * delayed
        buf[k] = e_c[n]
    return e_c


def _ode_limit(cav, e_in, dt):
    src = half_grid(np.arange(len(e_in)) * dt, e_in.astype(complex))
    a = cav.T_mirror / (cav.R * cav.zeta * cav.tau_c)
    eta = cav.eta

    def rhs(j, y):
        return -eta * y + a * src[j]

    return rk4(rhs, 0j, dt, len(e_in) - 1)


def roundtrip_simulate(cav, e_in, grid):
    """Iterate the delay recursion and solve its first-order ODE limit.

    The sample spacing must divide tau_c; otherwise the field is resampled
    onto the nearest finer commensurate grid and the results interpolated
    back (flagged by ``resampled``). The circulating field is zero before
    the first sample.
    """
    e_in = np.asarray(e_in, dtype=complex)
    if len(e_in) != grid.n_points:
        raise DomainError("E_in must be sampled on the grid")
    ratio = cav.tau_c / grid.dt
    m = int(round(ratio))
    resampled = abs(ratio - m) > 1e-9 * max(ratio, 1.0) or m < 1
    t = grid.times
    if resampled:
        m = max(int(math.ceil(ratio)), 1)
        fine = TimeGrid.with_spacing(grid.t_start, grid.t_end, cav.tau_c / m)
        tf = fine.times
        ef = np.interp(tf, t, e_in.real) + 1j * np.interp(tf, t, e_in.imag)
        e_c_f = _recursion(cav, ef, m)
        ode_f = _ode_limit(cav, ef, fine.dt)
        e_c = np.interp(t, tf, e_c_f.real) + 1j * np.interp(t, tf, e_c_f.imag)
        e_c_ode = np.interp(t, tf, ode_f.real) + 1j * np.interp(t, tf, ode_f.imag)
    else:
        e_c = _recursion(cav, e_in, m)
        e_c_ode = _ode_limit(cav, e_in, grid.dt)
    R, T = cav.R, cav.T_mirror
    return RoundTripResult(t, e_in, e_c, e_in / R + (T / R) * e_c,
                           e_c_ode, e_in / R + (T / R) * e_c_ode, m, resampled)


def _input_log_derivative(e_in, t, rel):
    e = np.asarray(e_in)
    if np.iscomplexobj(e) and np.any(np.abs(e.imag) > 1e-14 * np.max(np.abs(e))):
        raise DomainError("generalized matching expects a real positive field")
    e = np.real(e)
    peak = np.max(np.abs(e))
    ok = np.abs(e) > rel * peak
    sign = np.sign(e[ok])
    if np.any(sign != sign[0]):
        i = np.flatnonzero(ok)[np.flatnonzero(sign != sign[0])[0]]
        raise SingularityError("input field changes sign", time=float(t[i]))
    out = np.full(len(e), np.nan)
    idx = np.flatnonzero(ok)
    # contiguous runs only; the spline would bridge gaps otherwise
    for run in np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1):
        if len(run) >= 4:
            out[run] = log_derivative(t[run], e[run])
    return out


def matching_residual(gamma, tau_ratio, gamma_int, e_in, t, rel=1e-12):
    """gamma_int/2 + d/dt ln E_in - (gamma/2) tau_0/tau_c, NaN where E_in ~ 0.

    ``tau_ratio`` and ``gamma_int`` may be scalars or arrays on ``t``.
    """
    t = np.asarray(t, dtype=float)
    dlog = _input_log_derivative(e_in, t, rel)
    return 0.5 * np.asarray(gamma_int) + dlog - 0.5 * gamma * np.asarray(tau_ratio)


def generalized_matching_residual(cav, e_in, grid, rel=1e-12):
    """Matching residual with the cavity's gamma, gamma_int and tau_0/tau_c."""
    return matching_residual(cav.gamma, cav.tau_0 / cav.tau_c, cav.gamma_int,
                             e_in, grid.times, rel)


def group_velocity_ratio(angle):
    """v_gr/c = tau_0/tau_c = cos^2(theta)."""
    c = np.asarray(angle.cos_theta, dtype=float)
    return c * c


def photon_probability_loss_rate(schedule, floor=COS_FLOOR, mask=None):
    """gamma_int(t) = -2 d/dt ln cos(theta); NaN where cos(theta) <= ``floor``.

    ``mask`` restricts the evaluation further; derivatives are taken within
    each contiguous run of admitted nodes so clamps do not leak into them.
    """
    cos = np.asarray(schedule.cos_theta, dtype=float)
    t = schedule.times
    out = np.full(len(cos), np.nan)
    ok = cos > floor
    if mask is not None:
        ok &= mask
    idx = np.flatnonzero(ok)
    for run in np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1):
        if len(run) >= 4:
            out[run] = -2.0 * log_derivative(t[run], cos[run])
        elif len(run):
            out[run] = 0.0 if len(run) == 1 else -2.0 * np.gradient(np.log(cos[run]), t[run])
    return out


def quantum_matching_residual(params, schedule, pulse, rel=1e-12):
    """Classical matching residual with tau_0/tau_c = cos^2 and gamma_int from cos(theta).

    Vanishes (to discretisation error) wherever ``schedule`` impedance-matches
    ``pulse``; NaN outside the window where both are non-negligible and, for
    solver output, at nodes where cos(theta) was clamped.
    """
    pulse.grid.require_same(schedule.grid)
    cos = np.asarray(schedule.cos_theta, dtype=float)
    g_int = photon_probability_loss_rate(schedule, mask=schedule.matched_mask)
    return matching_residual(params.gamma, cos * cos, g_int, pulse.values, schedule.times, rel)
