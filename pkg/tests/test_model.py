import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from darkstate.errors import DomainError, InfeasibleError
from darkstate.model import (AmplitudeState, SystemParams, dark_bright_rotate,
                             dark_state_decay_rate, mixing_angle_from_omega,
                             omega_from_cos_theta)

P = SystemParams(g=1.0, n_atoms=1, gamma=4.0)
finite = st.floats(-10, 10, allow_nan=False)


def test_from_dimensionless_keeps_collective_coupling():
    for n in (1, 100, 10_000):
        p = SystemParams.from_dimensionless(4.0, 20.0, n_atoms=n)
        assert p.n_atoms == n
        assert p.g_sqrt_n == pytest.approx(20.0, rel=1e-14)
        assert p.coupling_sq == pytest.approx(400.0, rel=1e-13)


@pytest.mark.parametrize("kw", [
    dict(g=0.0, n_atoms=1, gamma=1.0),
    dict(g=1.0, n_atoms=0, gamma=1.0),
    dict(g=1.0, n_atoms=2.5, gamma=1.0),
    dict(g=1.0, n_atoms=1, gamma=-1.0),
    dict(g=1.0, n_atoms=1, gamma=1.0, gamma_a=math.inf),
    dict(g=1.0, n_atoms=1, gamma=1.0, t_pulse=0.0),
])
def test_invalid_params_rejected(kw):
    with pytest.raises(DomainError):
        SystemParams(**kw)


def test_mixing_angle_examples():
    assert mixing_angle_from_omega(P, 1.0).cos_theta == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert mixing_angle_from_omega(P, 0.0).cos_theta == 0.0
    ang = mixing_angle_from_omega(P, math.inf)
    assert ang.cos_theta == 1.0 and ang.sin_theta == 0.0
    with pytest.raises(DomainError):
        mixing_angle_from_omega(P, -1.0)


@given(st.floats(0, 1e6), st.floats(0, 1e6))
def test_cos_theta_monotone_in_omega(a, b):
    lo, hi = sorted((a, b))
    c = mixing_angle_from_omega(P, np.array([lo, hi])).cos_theta
    assert c[0] <= c[1]
    assert 0.0 <= c[0] and c[1] <= 1.0


@given(st.floats(1e-6, 500.0))
def test_omega_round_trip(omega):
    # double precision limits the round trip to about eps*(Omega/G)^2
    back = omega_from_cos_theta(P, mixing_angle_from_omega(P, omega).cos_theta)
    assert back == pytest.approx(omega, rel=1e-10)


@given(st.floats(0, 1, exclude_max=True))
def test_cos_round_trip(cos):
    om = omega_from_cos_theta(P, cos)
    assert mixing_angle_from_omega(P, om).cos_theta == pytest.approx(cos, rel=1e-12, abs=1e-300)


def test_omega_from_cos_errors():
    with pytest.raises(InfeasibleError):
        omega_from_cos_theta(P, 1.0)
    for bad in (-0.1, 1.1, math.nan):
        with pytest.raises(DomainError):
            omega_from_cos_theta(P, bad)


@given(finite, finite, finite, finite, st.floats(0, 1e4))
def test_rotation_is_unitary(br, bi, cr, ci, omega):
    state = AmplitudeState(b=complex(br, bi), c=complex(cr, ci))
    D, B = dark_bright_rotate(state, mixing_angle_from_omega(P, omega))
    before = abs(state.b) ** 2 + abs(state.c) ** 2
    assert abs(D) ** 2 + abs(B) ** 2 == pytest.approx(before, rel=1e-14, abs=1e-14)


def test_rotation_limits():
    state = AmplitudeState(b=0.6, c=0.8j)
    D, B = dark_bright_rotate(state, mixing_angle_from_omega(P, 0.0))
    assert D == pytest.approx(1j * state.c) and B == pytest.approx(state.b)
    D, B = dark_bright_rotate(state, mixing_angle_from_omega(P, math.inf))
    assert D == pytest.approx(-1j * state.b) and B == pytest.approx(state.c)


def test_rotation_vectorised():
    om = np.linspace(0, 5, 7)
    st_ = AmplitudeState(b=np.full(7, 0.3 + 0j), c=np.full(7, 0.4j))
    D, B = dark_bright_rotate(st_, mixing_angle_from_omega(P, om))
    assert D.shape == (7,)
    assert np.allclose(np.abs(D) ** 2 + np.abs(B) ** 2, 0.25)


def test_dark_state_decay_rate():
    ang = mixing_angle_from_omega(P, 1.0)
    assert dark_state_decay_rate(P, ang) == pytest.approx(0.5 * 4.0 * 0.5)


def test_amplitude_norm():
    s = AmplitudeState(a=0.1, b=0.2j, c=0.3, xi=np.array([0.4, 0.5j]))
    assert s.norm_sq() == pytest.approx(0.01 + 0.04 + 0.09 + 0.16 + 0.25)
