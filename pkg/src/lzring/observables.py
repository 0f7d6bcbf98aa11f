"""Flip probabilities, the excited-state series and its end-of-window average.

A site counts as excited when its diabatic spin differs from the initial
reference configuration.  E.S(t) is the site average of that probability.
"""

import math
from dataclasses import dataclass

import numpy as np

from .operators import slot_mask

WINDOW_FRACTION = 0.1


@dataclass(frozen=True)
class FtpeResult:
    ftpe: float
    window_start: float
    samples_used: int


def _n_sites(dim):
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise ValueError(f"state length {dim} is not a power of two >= 2")
    return n


def _flip_mask(site, reference_config, n):
    if not 0 <= site < n:
        raise IndexError(f"site {site} out of range for n={n}")
    b = np.arange(1 << n)
    return ((b ^ reference_config) & slot_mask(site, n)) != 0


def site_flip_probability(psi, site, reference_config):
    """Probability that ``site`` is flipped relative to ``reference_config``."""
    psi = np.asarray(psi)
    n = _n_sites(psi.shape[0])
    p = np.abs(psi) ** 2
    return float(p[_flip_mask(site, reference_config, n)].sum())


def site_stay_probability(psi, site, reference_config):
    psi = np.asarray(psi)
    n = _n_sites(psi.shape[0])
    p = np.abs(psi) ** 2
    return float(p[~_flip_mask(site, reference_config, n)].sum())


def flip_probabilities(pops, reference_config, n):
    """Per-sample, per-site flip probabilities from populations of shape (samples, 2**n)."""
    pops = np.atleast_2d(pops)
    b = np.arange(1 << n)
    flipped = ((b[:, None] ^ reference_config) >> (n - 1 - np.arange(n))[None, :]) & 1
    return pops @ flipped.astype(np.float64)


def excited_series(site_flip_prob):
    """Site-averaged excited population E.S(t); the ground series is ``1 - E.S``."""
    return np.asarray(site_flip_prob, dtype=np.float64).mean(axis=1)


def ftpe(series, times):
    """Average of ``series`` over the final 10% of the time span.

    Trapezoid rule over the stored samples; when no sample sits on the window
    start the value there is linearly interpolated.
    """
    series = np.asarray(series, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    if series.shape != times.shape or series.ndim != 1:
        raise ValueError("series and times must be 1-D arrays of equal length")
    t0, t1 = times[0], times[-1]
    span = t1 - t0
    if not span > 0:
        raise ValueError("times must increase")
    start = t0 + (1.0 - WINDOW_FRACTION) * span
    width = t1 - start
    snap = 1e-9 * span

    inside = np.nonzero(times >= start - snap)[0]
    if len(inside) < 2:
        raise ValueError(f"need >= 2 samples in the final window, found {len(inside)}")
    first = inside[0]
    ts = times[first:]
    ys = series[first:]
    if abs(ts[0] - start) > snap:
        prev = first - 1
        w = (start - times[prev]) / (times[first] - times[prev])
        y_start = series[prev] + w * (series[first] - series[prev])
        ts = np.concatenate(([start], ts))
        ys = np.concatenate(([y_start], ys))
    else:
        ts = ts.copy()
        ts[0] = start
    area = float(np.sum(0.5 * (ys[1:] + ys[:-1]) * np.diff(ts)))
    value = area / width
    if not math.isfinite(value):
        raise ValueError("non-finite FTPE")
    return FtpeResult(ftpe=value, window_start=float(start), samples_used=len(inside))
