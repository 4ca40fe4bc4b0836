"""Input envelopes on uniform time grids.

Envelopes are stored as phi(t) with sum(|phi|^2) * dt = 1, i.e. the field at
the input mirror in units where the quantization length and the speed of light
drop out.
"""

from dataclasses import dataclass, replace
from functools import cached_property
import csv

import numpy as np

from .errors import DomainError, GridMismatchError, TruncationError

EDGE_TOL = 1e-6


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    n_points: int

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise DomainError("t_start must be < t_end")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise DomainError("n_points must be an integer >= 2")
        object.__setattr__(self, "n_points", int(self.n_points))

    @classmethod
    def default(cls, t_pulse=1.0):
        """[-10T, 40T] with 8192 points."""
        return cls(-10.0 * t_pulse, 40.0 * t_pulse, 8192)

    @classmethod
    def with_spacing(cls, t_start, t_end, dt):
        n = int(np.ceil((t_end - t_start) / dt)) + 1
        return cls(t_start, t_end, n)

    @property
    def dt(self):
        return (self.t_end - self.t_start) / (self.n_points - 1)

    @cached_property
    def times(self):
        t = np.linspace(self.t_start, self.t_end, self.n_points)
        t.flags.writeable = False
        return t

    def index_of(self, t):
        """Nearest grid index to time ``t`` (clipped to the grid)."""
        i = int(round((t - self.t_start) / self.dt))
        return min(max(i, 0), self.n_points - 1)

    def require_same(self, other):
        if self != other:
            raise GridMismatchError(f"grids differ: {self} vs {other}")


@dataclass(frozen=True)
class PulseEnvelope:
    """Sampled complex envelope phi(t_i) with its provenance tag.

    ``normalized=False`` marks output envelopes whose norm carries a photon
    number rather than being fixed to one.
    """

    grid: TimeGrid
    values: np.ndarray
    family: str = "custom"
    t_pulse: float = 1.0
    delay: float = 0.0
    normalized: bool = True

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.n_points,):
            raise GridMismatchError("values do not match the grid length")

    @property
    def times(self):
        return self.grid.times

    def norm(self):
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.dt)

    def is_real(self):
        return not np.iscomplexobj(self.values) or np.all(np.asarray(self.values).imag == 0)

    def peak_time(self):
        return float(self.times[np.argmax(np.abs(self.values))])

    def overlap(self, other):
        """<self|other> = sum conj(self) * other * dt."""
        self.grid.require_same(other.grid)
        return complex(np.sum(np.conj(self.values) * other.values) * self.grid.dt)

    def scaled(self, factor):
        return replace(self, values=factor * np.asarray(self.values, dtype=complex),
                       normalized=False)

    def to_csv(self, path):
        from .io import write_csv
        v = np.asarray(self.values, dtype=complex)
        write_csv(path, ["t", "re_phi", "im_phi"], [self.times, v.real, v.imag])


def _finish(grid, values, family, t_pulse, delay):
    values = np.asarray(values)
    peak = np.max(np.abs(values))
    if peak == 0 or not np.isfinite(peak):
        raise DomainError("envelope must be finite and not identically zero")
    edge = max(abs(values[0]), abs(values[-1]))
    if edge >= EDGE_TOL * peak:
        raise TruncationError(
            f"envelope is {edge / peak:.2e} of its peak at the grid edge; widen the grid")
    norm = np.sqrt(np.sum(np.abs(values) ** 2) * grid.dt)
    return PulseEnvelope(grid, values / norm, family, t_pulse, delay, True)


def _check_span(grid, T, delay, half_width=6.0):
    if grid.t_start > delay - half_width * T or grid.t_end < delay + half_width * T:
        raise TruncationError(
            f"grid [{grid.t_start}, {grid.t_end}] must cover [{delay - half_width * T}, "
            f"{delay + half_width * T}]")


def make_sech(grid, T=1.0, delay=0.0):
    """phi(t) proportional to sech(2(t - delay)/T); peak 1/sqrt(T)."""
    _check_span(grid, T, delay)
    x = 2.0 * (grid.times - delay) / T
    # sech via exp(-|x|) avoids overflow in cosh
    ax = np.abs(x)
    vals = 2.0 * np.exp(-ax) / (1.0 + np.exp(-2.0 * ax))
    return _finish(grid, vals, "sech", T, delay)


def make_gaussian(grid, T=1.0, delay=0.0):
    """phi(t) proportional to exp(-(t - delay)^2 / T^2)."""
    _check_span(grid, T, delay)
    x = (grid.times - delay) / T
    return _finish(grid, np.exp(-x * x), "gaussian", T, delay)


def make_hyper_gaussian(grid, T=1.0, delay=0.0):
    """phi(t) proportional to exp(-(t - delay)^4 / T^4)."""
    _check_span(grid, T, delay)
    x = (grid.times - delay) / T
    return _finish(grid, np.exp(-(x ** 4)), "hyper_gaussian", T, delay)


PULSE_FAMILIES = {
    "sech": make_sech,
    "gaussian": make_gaussian,
    "hyper_gaussian": make_hyper_gaussian,
}


def make_pulse(family, grid, T=1.0, delay=0.0):
    try:
        return PULSE_FAMILIES[family](grid, T, delay)
    except KeyError:
        raise DomainError(f"unknown pulse family {family!r}") from None


def make_custom(grid, values, T=1.0, delay=0.0):
    """Wrap sampled complex values, renormalising them."""
    values = np.asarray(values)
    if values.shape != (grid.n_points,):
        raise GridMismatchError("values do not match the grid length")
    return _finish(grid, values, "custom", T, delay)


def shift(pulse, delta_t):
    """Delay the envelope by ``delta_t``: phi'(t) = phi(t - delta_t).

    Uses a band-limited (Fourier) shift on a zero-padded copy, so shifting
    back and forth is exact up to rounding.
    """
    if delta_t == 0:
        return pulse
    v = np.asarray(pulse.values)
    n = len(v)
    m = 2 * n
    dt = pulse.grid.dt
    if pulse.is_real():
        spec = np.fft.rfft(v.real, m)
        w = 2 * np.pi * np.fft.rfftfreq(m, dt)
        out = np.fft.irfft(spec * np.exp(-1j * w * delta_t), m)[:n]
    else:
        spec = np.fft.fft(v, m)
        w = 2 * np.pi * np.fft.fftfreq(m, dt)
        out = np.fft.ifft(spec * np.exp(-1j * w * delta_t))[:n]
    peak = np.max(np.abs(out))
    if max(abs(out[0]), abs(out[-1])) >= EDGE_TOL * peak or abs(delta_t) > 0.5 * n * dt:
        raise TruncationError(f"shift by {delta_t} moves the packet off the grid")
    norm = np.sqrt(np.sum(np.abs(out) ** 2) * dt)
    return replace(pulse, values=out / norm, delay=pulse.delay + delta_t)


def load_pulse_csv(path, grid=None, T=1.0):
    """Read ``t, re_phi[, im_phi]`` (header line required) into an envelope.

    Without ``grid`` the file must be uniformly sampled; otherwise the data
    are interpolated linearly onto ``grid`` (zero outside the file's range).
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"{path}: empty file")
    header, body = rows[0], [r for r in rows[1:] if r]
    try:
        float(header[0])
    except ValueError:
        pass
    else:
        raise DomainError(f"{path}: header line required")
    if len(header) not in (2, 3):
        raise DomainError(f"{path}: expected 2 or 3 columns, got {len(header)}")
    data = np.array([[float(x) for x in r] for r in body])
    t = data[:, 0]
    vals = data[:, 1] + (1j * data[:, 2] if data.shape[1] == 3 else 0.0)
    if grid is None:
        if len(t) < 2 or not np.allclose(np.diff(t), t[1] - t[0], rtol=1e-6, atol=0):
            raise DomainError(f"{path}: non-uniform time column; pass a grid")
        grid = TimeGrid(float(t[0]), float(t[-1]), len(t))
    else:
        re = np.interp(grid.times, t, vals.real, left=0.0, right=0.0)
        im = np.interp(grid.times, t, np.imag(vals), left=0.0, right=0.0)
        vals = re + 1j * im if np.any(im) else re
    if not np.iscomplexobj(vals) or not np.any(np.imag(vals)):
        vals = np.real(vals)
    return make_custom(grid, vals, T=T)
