"""Impedance-matched mixing-angle schedules and the drive that realises them."""

from dataclasses import dataclass, field, replace
import math

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, InfeasibleError, SingularityError
from .model import mixing_angle_from_omega, omega_from_cos_theta
from .pulses import TimeGrid

COS_FLOOR = 1e-12
DEFAULT_CAP_FACTOR = 1e6
REFINE_TOL = 1e-8
INFEASIBLE_ENERGY = 1e-6


@dataclass(frozen=True)
class ControlSchedule:
    """Sampled cos(theta)(t) and Omega(t) on a grid.

    ``omega`` is capped at ``omega_max`` where the ideal drive diverges; the
    ``capped`` mask marks those samples. Schedules from the matching solver
    carry ``matched_mask``, true where the matching equation is enforced
    (inside the signal window and not clamped to 1 or to the floor).
    """

    grid: TimeGrid
    cos_theta: np.ndarray
    omega: np.ndarray
    feasible: bool = True
    omega_max: float = math.inf
    margin_report: object = None
    clamp_events: int = 0
    diagnostic: str = ""
    window: tuple = None
    matched_mask: np.ndarray = None

    @property
    def times(self):
        return self.grid.times

    @property
    def capped(self):
        return np.asarray(self.omega) >= self.omega_max

    def consistency_error(self, params):
        """Max relative deviation of cos_theta from cos(Omega) on uncapped samples."""
        ok = ~self.capped & np.isfinite(self.omega)
        cos_from_omega = mixing_angle_from_omega(params, self.omega[ok]).cos_theta
        ref = np.maximum(np.abs(self.cos_theta[ok]), 1e-300)
        return float(np.max(np.abs(cos_from_omega - self.cos_theta[ok]) / ref, initial=0.0))

    def with_omega_cap(self, params, cap):
        """Clip the drive at ``cap`` and recompute cos(theta) there to stay consistent."""
        omega = np.minimum(self.omega, cap)
        clipped = np.asarray(self.omega) > cap
        cos = np.array(self.cos_theta, dtype=float)
        cos[clipped] = mixing_angle_from_omega(params, omega[clipped]).cos_theta
        return replace(self, cos_theta=cos, omega=omega, omega_max=cap)

    def time_reversed(self, t_release):
        """Mirror image starting at ``t_release``: cos'(t_release + s) = cos(t_end - s)."""
        g = self.grid
        new = TimeGrid(t_release, t_release + (g.t_end - g.t_start), g.n_points)
        mask = None if self.matched_mask is None else self.matched_mask[::-1].copy()
        return replace(self, grid=new, cos_theta=np.asarray(self.cos_theta)[::-1].copy(),
                       omega=np.asarray(self.omega)[::-1].copy(), matched_mask=mask)

    def to_csv(self, path):
        from .io import write_csv
        write_csv(path, ["t", "cos_theta", "omega"], [self.times, self.cos_theta, self.omega])


def schedule_from_cos_theta(params, grid, cos_theta, omega_max=None, **kw):
    """Build a schedule from sampled cos(theta), deriving the (capped) drive."""
    cos = np.asarray(cos_theta, dtype=float)
    if cos.shape != (grid.n_points,):
        raise DomainError("cos_theta does not match the grid")
    if np.any(cos < 0) or np.any(cos > 1):
        raise DomainError("cos_theta must lie in [0, 1]")
    cap = DEFAULT_CAP_FACTOR * params.g_sqrt_n if omega_max is None else omega_max
    omega = np.full_like(cos, cap)
    inner = cos < 1
    omega[inner] = np.minimum(omega_from_cos_theta(params, cos[inner]), cap)
    return ControlSchedule(grid, cos, omega, omega_max=cap, **kw)


def schedule_from_omega(params, grid, omega, **kw):
    angle = mixing_angle_from_omega(params, np.asarray(omega, dtype=float))
    return ControlSchedule(grid, np.asarray(angle.cos_theta), np.asarray(angle.omega), **kw)


def load_schedule_csv(path, params):
    """Read a ``t, cos_theta, omega`` file written by :meth:`ControlSchedule.to_csv`."""
    from .io import read_csv
    cols, data = read_csv(path)
    if cols[:3] != ["t", "cos_theta", "omega"]:
        raise DomainError(f"{path}: expected columns t, cos_theta, omega")
    t = data[:, 0]
    grid = TimeGrid(float(t[0]), float(t[-1]), len(t))
    if not np.allclose(grid.times, t, rtol=0, atol=1e-9 * max(1.0, abs(t).max())):
        raise DomainError(f"{path}: time column is not uniform")
    omega = data[:, 2]
    return ControlSchedule(grid, data[:, 1].copy(), omega.copy(),
                           omega_max=float(omega.max()) if len(omega) else math.inf)


# -- analytic solution for the sech packet -----------------------------------

def sech_cos_theta(t, gamma_T, T=1.0):
    """Closed-form matched cos(theta) for phi ~ sech(2t/T).

    Equivalent to sqrt(2/(gamma T)) sech(u)/sqrt(1 + tanh u) with u = 2t/T,
    rewritten as (2/sqrt(gamma T)) / sqrt(1 + exp(2u)) to avoid overflow.
    """
    u = 2.0 * np.asarray(t, dtype=float) / T
    return (2.0 / math.sqrt(gamma_T)) * np.exp(-0.5 * np.logaddexp(0.0, 2.0 * u))


def sech_omega(t, gamma_T, g_sqrt_n, T=1.0):
    """Closed-form matched drive; NaN where it does not exist (gamma T < 4)."""
    u = 2.0 * np.asarray(t, dtype=float) / T
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        den = np.exp(2.0 * u) + (1.0 - 4.0 / gamma_T)
        om = g_sqrt_n * (2.0 / math.sqrt(gamma_T)) / np.sqrt(den)
    return np.where(den > 0, om, np.nan)


def _sech_schedule(params, grid, omega_max):
    gT = params.gamma_T
    T = params.t_pulse
    t = grid.times
    cap = DEFAULT_CAP_FACTOR * params.g_sqrt_n if omega_max is None else omega_max
    cos = sech_cos_theta(t, gT, T)
    omega = sech_omega(t, gT, params.g_sqrt_n, T)
    feasible = gT >= 4.0
    diag = ""
    if not feasible:
        bad = ~np.isfinite(omega) | (cos > 1)
        diag = (f"gamma*T = {gT:.6g} < 4: matched cos(theta) exceeds 1 for "
                f"{int(bad.sum())} samples (t <= {t[bad].max():.4g}); pulse too short")
        cos = np.minimum(cos, 1.0)
    omega = np.where(np.isfinite(omega), np.minimum(omega, cap), cap)
    return ControlSchedule(grid, cos, omega, feasible=feasible, omega_max=cap, diagnostic=diag)


def sech_matched_cos_theta(params, grid, omega_max=None):
    """Matched schedule for a sech packet centred at t = 0, cos(theta) from the closed form.

    Returns an infeasible schedule (``feasible=False``) when gamma*T < 4.
    """
    return _sech_schedule(params, grid, omega_max)


def sech_matched_omega(params, grid, omega_max=None):
    """Same schedule, addressed by its drive Omega(t).

    Omega(t) = g sqrt(N) sech(u) / sqrt((1 + tanh u)(tanh u + gamma T/2 - 1)); it
    diverges as t -> -inf at gamma*T = 4 and is capped at ``omega_max``.
    """
    return _sech_schedule(params, grid, omega_max)


# -- numerical solution for arbitrary real envelopes -------------------------

def log_derivative(t, values):
    """d/dt ln|values| at the nodes ``t``, from a cubic spline of ln|values|."""
    return CubicSpline(t, np.log(np.abs(values)))(t, 1)


def _signal_window(values, rel=1e-12):
    """Index range [lo, hi] of the contiguous support above ``rel * peak``."""
    a = np.abs(values)
    ipk = int(np.argmax(a))
    above = a >= rel * a[ipk]
    lo = ipk
    while lo > 0 and above[lo - 1]:
        lo -= 1
    hi = ipk
    while hi < len(a) - 1 and above[hi + 1]:
        hi += 1
    return lo, hi


def _solve_log_cos(rate, s0, h, n_steps, gamma):
    """Integrate d/dt ln cos = dlnphi/dt - (gamma/2) cos^2 with clamping.

    ``rate`` holds d ln phi/dt on the half grid.
    """
    log_floor = math.log(COS_FLOOR)
    clamps = 0

    def rhs(j, s):
        return rate[j] - 0.5 * gamma * math.exp(2.0 * s)

    s_path = np.empty(n_steps + 1)
    s = s0
    s_path[0] = s
    half = 0.5 * h
    for i in range(n_steps):
        j = 2 * i
        k1 = rhs(j, s)
        k2 = rhs(j + 1, s + half * k1)
        k3 = rhs(j + 1, s + half * k2)
        k4 = rhs(j + 2, s + h * k3)
        s = s + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if s > 0.0:
            s, clamps = 0.0, clamps + 1
        elif s < log_floor:
            s, clamps = log_floor, clamps + 1
        s_path[i + 1] = s
    return s_path, clamps


def solve_impedance_matching(params, pulse, cos_theta_start=None, omega_max=None,
                             rel_window=1e-12, max_refine=4):
    """Solve the quantum impedance-matching condition for ``pulse``.

    Integrates ``-d/dt ln cos + d/dt ln phi = (gamma/2) cos^2`` forward from
    ``cos_theta_start`` over the part of the grid where the envelope exceeds
    ``rel_window`` of its peak. Before that window cos(theta) stays at the
    start value, after it the drive is off (cos = 0). The step is halved until
    the solution changes by less than 1e-8.

    ``cos_theta_start`` defaults to min(1, 2/sqrt(gamma T)), the early-time
    value of the sech solution; for other shapes this is a heuristic.
    """
    if not pulse.is_real():
        raise DomainError("impedance matching needs a real-valued envelope")
    gamma = params.gamma
    if cos_theta_start is None:
        cos_theta_start = min(1.0, 2.0 / math.sqrt(params.gamma_T))
    if not 0.0 < cos_theta_start <= 1.0:
        raise DomainError("cos_theta_start must lie in (0, 1]")

    grid = pulse.grid
    t = grid.times
    phi = np.real(pulse.values)
    lo, hi = _signal_window(phi, rel_window)
    seg = phi[lo:hi + 1]
    if np.any(np.sign(seg) != np.sign(seg[0])) or np.any(seg == 0):
        k = int(np.argmax((np.sign(seg) != np.sign(seg[0])) | (seg == 0)))
        raise SingularityError(f"envelope crosses zero near t = {t[lo + k]:.6g}", t[lo + k])
    if hi - lo < 2:
        raise DomainError("envelope support too narrow for the grid")

    tw = t[lo:hi + 1]
    spline = CubicSpline(tw, np.log(np.abs(seg)))
    n_steps = hi - lo
    s0 = math.log(cos_theta_start)

    prev = None
    diag = ""
    for level in range(max_refine + 1):
        m = 2 ** level
        tf = np.linspace(tw[0], tw[-1], 2 * n_steps * m + 1)
        rate = spline(tf, 1)
        path, clamps = _solve_log_cos(rate, s0, grid.dt / m, n_steps * m, gamma)
        s_nodes = path[::m]
        if prev is not None:
            change = float(np.max(np.abs(np.exp(s_nodes) - np.exp(prev))))
            if change < REFINE_TOL:
                break
        prev = s_nodes
    else:
        diag = f"step halving still changes cos(theta) by {change:.2e}"

    cos = np.zeros(grid.n_points)
    cos[:lo] = cos_theta_start
    cos[lo:hi + 1] = np.exp(s_nodes)
    mask = np.zeros(grid.n_points, dtype=bool)
    mask[lo:hi + 1] = (s_nodes < 0.0) & (s_nodes > math.log(COS_FLOOR))
    # Matching would need cos(theta) > 1 where the envelope rises faster
    # than gamma/2; input arriving there is partly reflected.
    top = s_nodes >= 0.0
    top[0] = False
    starved = float(np.sum(seg[top] ** 2) * grid.dt)
    feasible = starved <= INFEASIBLE_ENERGY
    if not feasible:
        diag = (diag + "; " if diag else "") + (
            f"cos(theta) held at 1 while {starved:.3e} of the input arrives")
    if hi < grid.n_points - 1:
        diag = (diag + "; " if diag else "") + f"drive switched off after t = {t[hi]:.6g}"
    return schedule_from_cos_theta(params, grid, cos, omega_max=omega_max,
                                   clamp_events=clamps, diagnostic=diag, feasible=feasible,
                                   window=(float(t[lo]), float(t[hi])), matched_mask=mask)


# -- adiabaticity -------------------------------------------------------------

@dataclass(frozen=True)
class AdiabaticityReport:
    ratios: dict
    margin: float
    passed: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.passed.values())


def check_adiabaticity(params, schedule, margin=100.0):
    """Minimum over the schedule of the adiabatic-following ratios.

    Ratios: Omega0^2/(gamma gamma_a), Omega0^2 T/gamma_a,
    Omega0^2/(sqrt(gamma/T) gamma_a) and g^2 N/(gamma gamma_a); each passes
    when >= ``margin``.
    """
    if not margin > 1:
        raise DomainError("margin must be > 1")
    om = np.asarray(schedule.omega, dtype=float)
    om0_sq = params.coupling_sq + float(np.min(om)) ** 2
    T = params.t_pulse
    ga, g = params.gamma_a, params.gamma

    def ratio(num, den):
        return math.inf if den == 0 else num / den

    ratios = {
        "omega0_sq_over_gamma_gamma_a": ratio(om0_sq, g * ga),
        "omega0_sq_T_over_gamma_a": ratio(om0_sq * T, ga),
        "omega0_sq_over_sqrt_gamma_T_gamma_a": ratio(om0_sq, math.sqrt(g / T) * ga),
        "g2N_over_gamma_gamma_a": ratio(params.coupling_sq, g * ga),
    }
    return AdiabaticityReport(ratios, margin, {k: v >= margin for k, v in ratios.items()})


def require_feasible(schedule):
    if not schedule.feasible:
        raise InfeasibleError(schedule.diagnostic or "schedule is infeasible")
