"""Physical parameters, mixing angle and the dark/bright basis.

Times and rates share one unit. Only the collective coupling ``g*sqrt(N)``
enters the dynamics; ``N`` is kept as an integer for bookkeeping.

Phase convention: the dark and bright amplitudes are

    D = i(-cos(theta) b + sin(theta) c),    B = sin(theta) b + cos(theta) c,

the coefficients of the dark state vector as written in the collective basis.
Everything downstream compares moduli or relative phases only.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DomainError, InfeasibleError


@dataclass(frozen=True)
class SystemParams:
    """Rates and counts of the cavity + ensemble system.

    Attributes:
        g: single-atom vacuum Rabi frequency.
        n_atoms: number of atoms N.
        gamma: empty-cavity (field-amplitude squared) decay rate.
        gamma_a: excited-state decay rate.
        gamma_c: lower-level coherence decay rate.
        t_pulse: characteristic pulse duration T.
    """

    g: float
    n_atoms: int
    gamma: float
    gamma_a: float = 0.0
    gamma_c: float = 0.0
    t_pulse: float = 1.0

    def __post_init__(self):
        if not self.g > 0:
            raise DomainError(f"g must be > 0, got {self.g}")
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise DomainError(f"n_atoms must be a positive integer, got {self.n_atoms}")
        object.__setattr__(self, "n_atoms", int(self.n_atoms))
        for name in ("gamma", "gamma_a", "gamma_c"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and >= 0, got {v}")
        if not self.t_pulse > 0:
            raise DomainError(f"t_pulse must be > 0, got {self.t_pulse}")
        if not (math.isfinite(self.g_sqrt_n) and self.g_sqrt_n > 0):
            raise DomainError("collective coupling g*sqrt(N) must be finite and positive")

    @classmethod
    def from_dimensionless(cls, gamma_T, g_sqrt_n_T, gamma_a_T=0.0, gamma_c_T=0.0,
                           n_atoms=1, t_pulse=1.0):
        """Build from rates scaled by the pulse duration T."""
        T = float(t_pulse)
        g = g_sqrt_n_T / (T * math.sqrt(n_atoms))
        return cls(g=g, n_atoms=n_atoms, gamma=gamma_T / T, gamma_a=gamma_a_T / T,
                   gamma_c=gamma_c_T / T, t_pulse=T)

    @property
    def g_sqrt_n(self):
        return self.g * math.sqrt(self.n_atoms)

    @property
    def coupling_sq(self):
        """g^2 N."""
        return self.g * self.g * self.n_atoms

    @property
    def gamma_T(self):
        return self.gamma * self.t_pulse


@dataclass(frozen=True)
class MixingAngle:
    """cos(theta), the drive Omega and Omega_0 = sqrt(g^2 N + Omega^2).

    Fields may be scalars or equally shaped arrays.
    """

    cos_theta: float
    omega: float
    omega0: float

    @property
    def sin_theta(self):
        # (1-c)(1+c) keeps cos^2 + sin^2 = 1 to rounding
        with np.errstate(divide="ignore", invalid="ignore"):
            c = np.asarray(self.cos_theta, dtype=float)
            s = np.sqrt(np.clip((1.0 - c) * (1.0 + c), 0.0, None))
        return s if s.ndim else float(s)

    @property
    def theta(self):
        return np.arccos(self.cos_theta)


@dataclass
class AmplitudeState:
    """Amplitudes of |a,0,0_k>, |b,1,0_k>, |c,0,0_k> and the free modes."""

    a: complex = 0j
    b: complex = 0j
    c: complex = 0j
    xi: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def norm_sq(self):
        return (abs(self.a) ** 2 + abs(self.b) ** 2 + abs(self.c) ** 2
                + float(np.sum(np.abs(self.xi) ** 2)))


def mixing_angle_from_omega(params, omega):
    """cos(theta) = Omega / sqrt(Omega^2 + g^2 N); accepts scalars or arrays."""
    om = np.asarray(omega, dtype=float)
    if np.any(om < 0) or np.any(np.isnan(om)):
        raise DomainError("omega must be >= 0")
    G = params.g_sqrt_n
    with np.errstate(divide="ignore", over="ignore"):
        ratio = G / om  # inf for om == 0, 0 for om == inf
        cos = 1.0 / np.hypot(1.0, ratio)
        omega0 = np.where(np.isinf(om), np.inf, np.hypot(om, G))
    if om.ndim == 0:
        return MixingAngle(float(cos), float(om), float(omega0))
    return MixingAngle(cos, om, omega0)


def omega_from_cos_theta(params, cos_theta):
    """Invert the mixing-angle relation: Omega = g sqrt(N) cos / sin.

    Raises InfeasibleError at cos_theta == 1 (infinite drive) and DomainError
    outside [0, 1].
    """
    c = np.asarray(cos_theta, dtype=float)
    if np.any(np.isnan(c)) or np.any(c < 0) or np.any(c > 1):
        raise DomainError("cos_theta must lie in [0, 1)")
    if np.any(c == 1):
        raise InfeasibleError("cos_theta = 1 requires an infinite drive")
    sin = np.sqrt((1.0 - c) * (1.0 + c))
    om = params.g_sqrt_n * c / sin
    return float(om) if om.ndim == 0 else om


def dark_bright_rotate(state, angle):
    """Return the (D, B) amplitudes of ``state`` for mixing angle ``angle``."""
    cos = np.asarray(angle.cos_theta)
    sin = np.asarray(angle.sin_theta)
    D = 1j * (-cos * state.b + sin * state.c)
    B = sin * state.b + cos * state.c
    if np.ndim(D) == 0:
        return complex(D), complex(B)
    return D, B


def dark_state_decay_rate(params, angle):
    """Amplitude decay rate gamma_D/2 = (gamma/2) cos^2(theta) of the dark state."""
    return 0.5 * params.gamma * np.square(angle.cos_theta)
