"""Initial states and time evolution of i dpsi/dt = H(t) psi (hbar = 1)."""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from . import observables
from . import operators as ops
from .errors import DegenerateGroundStateError, IntegrationError, NormDriftError
from .model import hamiltonian_at

INIT_MODES = ("adiabatic", "diabatic")
METHODS = ("split4", "rk4")
GAP_TOL = 1e-9


@dataclass(frozen=True)
class IntegratorConfig:
    """Time-stepping controls.

    ``method`` selects the propagator: ``"split4"`` (default) is a unitary
    fourth-order splitting, ``"rk4"`` the classical Runge-Kutta scheme.  The
    latter damps fast phase oscillations and only conserves the norm for
    slow sweeps at ``dt=1e-3``.
    """

    dt: float = 1e-3
    norm_tol: float = 1e-6
    sample_count: int = 2001
    init_mode: str = "adiabatic"
    method: str = "split4"

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not (math.isfinite(self.norm_tol) and self.norm_tol > 0):
            raise ValueError(f"norm_tol must be > 0, got {self.norm_tol}")
        if self.sample_count < 2:
            raise ValueError(f"sample_count must be >= 2, got {self.sample_count}")
        if self.init_mode not in INIT_MODES:
            raise ValueError(f"init_mode must be one of {INIT_MODES}, got {self.init_mode!r}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    site_flip_prob: np.ndarray  # shape (samples, n)
    es_mean: np.ndarray
    gs_mean: np.ndarray
    norm: np.ndarray
    reference_config: int
    n: int

    @property
    def max_norm_drift(self):
        return float(np.max(np.abs(self.norm - 1.0)))


def initial_state(h, t_start, mode="adiabatic"):
    """Return ``(psi, reference_config)`` at ``t_start``.

    ``adiabatic`` picks the lowest eigenvector of H(t_start), phased so its
    largest amplitude is real and positive; ``reference_config`` is the
    basis index of that amplitude.  ``diabatic`` picks the basis state with
    the lowest diagonal energy (lowest index on ties).
    """
    if not math.isfinite(t_start):
        raise ValueError(f"t_start must be finite, got {t_start}")
    H = hamiltonian_at(h, t_start)
    if mode == "diabatic":
        ref = int(np.argmin(H.diagonal().real))
        psi = np.zeros(h.dim, dtype=np.complex128)
        psi[ref] = 1.0
        return psi, ref
    if mode != "adiabatic":
        raise ValueError(f"init_mode must be one of {INIT_MODES}, got {mode!r}")

    try:
        evals, evecs = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise IntegrationError(f"eigensolver failed at t={t_start}: {exc}") from exc
    if h.dim > 1:
        gap = evals[1] - evals[0]
        if gap <= GAP_TOL:
            raise DegenerateGroundStateError(gap, GAP_TOL)
    psi = evecs[:, 0].astype(np.complex128)
    ref = int(np.argmax(np.abs(psi)))
    psi *= abs(psi[ref]) / psi[ref]
    psi[ref] = abs(psi[ref])
    return psi, ref


def rk4_step(h, psi, t, dt):
    """One classical RK4 step of dpsi/dt = -i H(t) psi."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")

    def rhs(tau, y):
        return -1j * (hamiltonian_at(h, tau) @ y)

    with np.errstate(over="ignore", invalid="ignore"):
        k1 = rhs(t, psi)
        k2 = rhs(t + dt / 2, psi + dt / 2 * k1)
        k3 = rhs(t + dt / 2, psi + dt / 2 * k2)
        k4 = rhs(t + dt, psi + dt * k3)
        out = psi + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise IntegrationError(f"non-finite amplitudes after step at t={t} (dt={dt} too large?)")
    return out


def sample_times(t_start, t_end, count):
    return t_start + np.arange(count) * ((t_end - t_start) / (count - 1))


def propagate(h, psi0, times, dt, method="split4"):
    """Evolve ``psi0`` through ``times``; return populations ``|psi|**2`` per sample."""
    psi = np.array(psi0, dtype=np.complex128)
    times = np.ascontiguousarray(times, dtype=np.float64)
    pops = np.zeros((len(times), h.dim))
    if method == "split4":
        mag = ops.spin_signs(h.n).sum(axis=0).astype(np.int64)
        _kernels.split4(
            mag, h.static_diagonal, h.params.r / 2, float(h.params.g), h.n, psi, times, float(dt), pops
        )
    elif method == "rk4":
        _kernels.rk4(h.sweep_diagonal, np.ascontiguousarray(h.C), psi, times, float(dt), pops)
    else:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    if not np.all(np.isfinite(pops)):
        raise IntegrationError(f"non-finite amplitudes during evolution (dt={dt} too large?)")
    return pops, psi


def evolve(h, cfg, t_start=-30.0, t_end=30.0):
    """Integrate from ``t_start`` to ``t_end`` and sample the flip probabilities.

    Does not renormalise; raises NormDriftError if the norm leaves
    ``1 +- cfg.norm_tol`` at any sample.
    """
    if not (math.isfinite(t_start) and math.isfinite(t_end)) or t_start >= t_end:
        raise ValueError(f"need finite t_start < t_end, got [{t_start}, {t_end}]")
    if (t_end - t_start) / cfg.dt < cfg.sample_count:
        raise ValueError(
            f"window {t_end - t_start:g} / dt {cfg.dt:g} gives fewer steps than "
            f"sample_count={cfg.sample_count}"
        )
    psi0, ref = initial_state(h, t_start, cfg.init_mode)
    times = sample_times(t_start, t_end, cfg.sample_count)
    times[-1] = t_end
    pops, _ = propagate(h, psi0, times, cfg.dt, cfg.method)

    norm = np.sqrt(pops.sum(axis=1))
    drift = float(np.max(np.abs(norm - 1.0)))
    if drift > cfg.norm_tol:
        raise NormDriftError(drift, cfg.norm_tol, cfg.dt)

    flips = observables.flip_probabilities(pops, ref, h.n)
    es = observables.excited_series(flips)
    return Trajectory(
        times=times,
        site_flip_prob=flips,
        es_mean=es,
        gs_mean=1.0 - es,
        norm=norm,
        reference_config=ref,
        n=h.n,
    )


def lz_closed_form(g, r):
    """Infinite-window Landau-Zener flip probability ``1 - exp(-2 pi g^2 / r)``."""
    if g <= 0 or r <= 0:
        raise ValueError(f"need g > 0 and r > 0, got g={g}, r={r}")
    return -math.expm1(-2.0 * math.pi * g * g / r)
