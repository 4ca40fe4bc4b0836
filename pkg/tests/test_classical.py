import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from darkstate.classical import (MirrorCavity, generalized_matching_residual, group_velocity_ratio,
                                 matching_residual, photon_probability_loss_rate,
                                 quantum_matching_residual, roundtrip_simulate)
from darkstate.control import schedule_from_cos_theta, sech_matched_cos_theta
from darkstate.errors import DomainError, SingularityError
from darkstate.model import SystemParams, mixing_angle_from_omega
from darkstate.pulses import TimeGrid, make_custom, make_sech


@given(st.floats(0.01, 0.999), st.floats(0.01, 1.0))
def test_mirror_is_lossless(R, zeta):
    cav = MirrorCavity(R, zeta, 0.01)
    T = cav.T_mirror
    assert abs(R) ** 2 + abs(T) ** 2 == pytest.approx(1.0, abs=1e-12)
    assert (np.conj(R) * T + R * np.conj(T)) == pytest.approx(0.0, abs=1e-15)


def test_mirror_validation():
    for kw in (dict(R=1.0), dict(R=0.9, zeta=0.0), dict(R=0.9, tau_c=-1.0),
               dict(R=0.9, tau_c=0.01, tau_0=0.02)):
        with pytest.raises(DomainError):
            MirrorCavity(**kw)


def test_rates_round_trip():
    cav = MirrorCavity.from_rates(2.0, 0.001, tau_ratio=0.25, gamma_int=0.5)
    assert cav.gamma == pytest.approx(2.0) and cav.gamma_int == pytest.approx(0.5)
    assert cav.tau_0 / cav.tau_c == pytest.approx(0.25)


GRID = TimeGrid(0.0, 40.0, 4001)  # dt = 0.01


def test_steady_state():
    cav = MirrorCavity(0.99, 1.0, 0.01)
    res = roundtrip_simulate(cav, np.ones(GRID.n_points), GRID)
    assert not res.resampled and res.delay_samples == 1
    assert res.e_c[-1] == pytest.approx(cav.T_mirror / (1 - 0.99), rel=1e-10)


def test_free_decay_is_geometric():
    cav = MirrorCavity(0.95, 0.9, 0.05)
    e_in = np.zeros(GRID.n_points)
    e_in[0] = 1.0
    res = roundtrip_simulate(cav, e_in, GRID)
    m = res.delay_samples
    assert m == 5
    assert res.e_c[3 * m] / res.e_c[2 * m] == pytest.approx(0.95 * 0.9, rel=1e-12)


def test_matched_cavity_does_not_reflect():
    cav = MirrorCavity(0.99, 0.99, 0.01)
    assert cav.matched()
    res = roundtrip_simulate(cav, np.ones(GRID.n_points), GRID)
    assert abs(res.e_out[-1]) < 1e-3


@given(st.floats(0.5, 0.999), st.integers(1, 20))
def test_lossless_energy_bookkeeping(R, m):
    grid = TimeGrid(0.0, 10.0, 1001)
    rng = np.random.default_rng(int(R * 1e6) + m)
    e_in = rng.normal(size=grid.n_points) + 1j * rng.normal(size=grid.n_points)
    res = roundtrip_simulate(MirrorCavity(R, 1.0, m * grid.dt), e_in, grid)
    flux = np.abs(res.e_in) ** 2 - np.abs(res.e_out) ** 2
    stored = res.stored_energy()
    d_stored = np.diff(np.concatenate([[0.0], stored]))
    assert np.max(np.abs(flux - d_stored)) < 1e-6


def test_recursion_matches_ode_limit():
    cav = MirrorCavity(0.99, 1.0, 0.01)
    e_in = np.exp(-((GRID.times - 15.0) / 1.0) ** 2)  # timescale 100 tau_c
    assert roundtrip_simulate(cav, e_in, GRID).ode_deviation() < 0.01


def test_incommensurate_delay_resampled():
    cav = MirrorCavity(0.99, 1.0, 0.0123)
    e_in = np.exp(-((GRID.times - 15.0) / 2.0) ** 2)
    res = roundtrip_simulate(cav, e_in, GRID)
    assert res.resampled and len(res.e_c) == GRID.n_points
    assert res.ode_deviation() < 0.01


def test_generalised_residual_constant_field():
    cav = MirrorCavity.from_rates(2.0, 0.001, tau_ratio=0.5, gamma_int=1.0)
    r = generalized_matching_residual(cav, np.ones(GRID.n_points), GRID)
    assert np.max(np.abs(r)) < 1e-9


def test_quantum_condition_closes(params4, grid, sech):
    r = quantum_matching_residual(params4, sech_matched_cos_theta(params4, grid), sech)
    assert np.nanmax(np.abs(r)) < 1e-6
    assert np.count_nonzero(np.isfinite(r)) > grid.n_points // 3


def test_perturbed_schedule_violates_condition(grid, sech):
    p = SystemParams.from_dimensionless(9.0, 20.0)  # cos(theta) <= 2/3 leaves room
    s = sech_matched_cos_theta(p, grid)
    bad = schedule_from_cos_theta(p, grid, 1.01 * s.cos_theta)
    r = quantum_matching_residual(p, bad, sech)
    ok = np.isfinite(r)
    # a constant factor leaves gamma_int unchanged, so only the cos^2 term moves
    expected = -0.5 * p.gamma * (1.01 ** 2 - 1) * s.cos_theta[ok] ** 2
    assert np.max(np.abs(r[ok] - expected)) < 1e-6
    assert np.min(r[ok]) < -1e-2


def test_residual_rejects_sign_change(grid):
    t = grid.times
    with pytest.raises(SingularityError):
        matching_residual(4.0, 1.0, 0.0, t * np.exp(-t ** 2), t)


def test_group_velocity_ratio():
    p = SystemParams(g=1.0, n_atoms=1, gamma=1.0)
    assert group_velocity_ratio(mixing_angle_from_omega(p, math.inf)) == 1.0
    assert group_velocity_ratio(mixing_angle_from_omega(p, 0.0)) == 0.0
    assert group_velocity_ratio(mixing_angle_from_omega(p, 1.0)) == pytest.approx(0.5)


def test_loss_rate_examples(params4, grid):
    const = schedule_from_cos_theta(params4, grid, np.full(grid.n_points, 0.3))
    assert np.allclose(photon_probability_loss_rate(const), 0.0, atol=1e-12)
    tau = 7.0
    exp = schedule_from_cos_theta(params4, grid, np.exp(-(grid.times - grid.t_start) / tau))
    assert np.allclose(photon_probability_loss_rate(exp), 2 / tau, rtol=1e-9)


def test_loss_rate_finite_difference(params4, grid):
    s = sech_matched_cos_theta(params4, grid)
    rate = photon_probability_loss_rate(s)
    i = grid.index_of(0.0)
    t0, h = grid.times[i], 1e-5
    from darkstate.control import sech_cos_theta
    fd = -2 * (math.log(sech_cos_theta(t0 + h, 4.0)) - math.log(sech_cos_theta(t0 - h, 4.0))) / (2 * h)
    assert rate[i] == pytest.approx(fd, abs=1e-6)
    zero = schedule_from_cos_theta(params4, grid, np.zeros(grid.n_points))
    assert np.all(np.isnan(photon_probability_loss_rate(zero)))
