"""Fixed-step classical Runge-Kutta for complex-valued systems.

Coefficients of the right-hand side are sampled on a *half grid*: index ``j``
refers to time ``t0 + j*h/2``, so step ``i`` uses ``j = 2i, 2i+1, 2i+2``.
Callers precompute their time-dependent coefficients there, which keeps the
inner loop free of interpolation calls.
"""

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator


def rk4_iter(rhs, y0, h, n_steps):
    """Yield ``(i, y_i)`` for ``i = 0..n_steps``.

    ``rhs(j, y)`` returns dy/dt at half-grid index ``j``.
    """
    y = y0
    yield 0, y
    half = 0.5 * h
    for i in range(n_steps):
        j = 2 * i
        k1 = rhs(j, y)
        k2 = rhs(j + 1, y + half * k1)
        k3 = rhs(j + 1, y + half * k2)
        k4 = rhs(j + 2, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        yield i + 1, y


def rk4(rhs, y0, h, n_steps):
    """Integrate and return every step stacked along axis 0."""
    out = [y for _, y in rk4_iter(rhs, y0, h, n_steps)]
    return np.asarray(out)


def half_grid(t, values, kind="cubic"):
    """Sample ``values`` (given on nodes ``t``) on the interleaved half grid.

    Returns an array of length ``2*len(t) - 1`` whose even entries are the
    original samples. ``kind="pchip"`` avoids overshoot for clipped data.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values)
    mid = 0.5 * (t[:-1] + t[1:])
    if np.iscomplexobj(values):
        mids = _interp(t, values.real, mid, kind) + 1j * _interp(t, values.imag, mid, kind)
    else:
        mids = _interp(t, values, mid, kind)
    out = np.empty(2 * len(t) - 1, dtype=np.result_type(values, float))
    out[0::2] = values
    out[1::2] = mids
    return out


def fine_grid(t, values, substeps, kind="cubic"):
    """Resample nodal data onto a grid refined ``substeps`` times, half grid included."""
    t = np.asarray(t, dtype=float)
    n_fine = (len(t) - 1) * substeps
    tf = np.linspace(t[0], t[-1], 2 * n_fine + 1)
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return _interp(t, values.real, tf, kind) + 1j * _interp(t, values.imag, tf, kind)
    return _interp(t, values, tf, kind)


def _interp(t, y, x, kind):
    if kind == "pchip":
        return PchipInterpolator(t, y)(x)
    if kind == "linear":
        return np.interp(x, t, y)
    return CubicSpline(t, y)(x)
