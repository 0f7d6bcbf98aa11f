"""Time-stepping kernels.

Every kernel exists twice: a numba-compiled loop version and a vectorised
numpy version with the same signature.  The numba path is used when numba
imports and ``LZRING_PURE_NUMPY`` is unset (or "0"); set the variable to
"1" to force numpy everywhere.

All kernels advance ``psi`` in place through the sample times ``times`` and
write ``|psi|**2`` at every sample into ``pops[s, :]``.  Each interval
between consecutive samples is cut into ``ceil(length/dt)`` equal steps, so
the step never exceeds ``dt`` and every sample time is hit exactly.

Two integrators are provided:

split4
    Fourth-order symmetric splitting (Yoshida triple jump of Strang steps).
    The diagonal part ``t*K + diag(C)`` is integrated exactly as phases and
    the transverse part ``g * sum_k X_k`` exactly as one 2x2 rotation per
    site, so each step is unitary.  Requires the off-diagonal part of C to
    be ``g * sum_k X_k``, which holds for every ``build_hamiltonian`` result.

rk4
    Classical Runge-Kutta on ``dpsi/dt = -i H(t) psi`` with dense C.
"""

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

PURE_NUMPY = os.environ.get("LZRING_PURE_NUMPY", "0").strip().lower() not in ("", "0", "false", "no")
USE_NUMBA = numba is not None and not PURE_NUMPY

YOSHIDA_OUTER = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
YOSHIDA_INNER = 1.0 - 2.0 * YOSHIDA_OUTER


def _jit(func):
    if numba is None:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def _substeps(length, dt):
    m = max(1, math.ceil(length / dt - 1e-9))
    return m, length / m


# ---------------------------------------------------------------- split4, numba

def _phase_table(cdiag, span, out):
    for b in range(cdiag.shape[0]):
        x = cdiag[b] * span
        out[b] = complex(math.cos(x), -math.sin(x))


def _diagonal_flow(mag, half_r, n, psi, ta, span, cph, zpow):
    """psi_b *= exp(-i * integral_{ta}^{ta+span} (t*K_b + C_bb) dt); K_b = half_r * mag_b."""
    x = half_r * span * (ta + 0.5 * span)
    z = complex(math.cos(x), -math.sin(x))
    zc = z.conjugate()
    zpow[n] = 1.0
    for k in range(1, n + 1):
        zpow[n + k] = zpow[n + k - 1] * z
        zpow[n - k] = zpow[n - k + 1] * zc
    for b in range(psi.shape[0]):
        psi[b] *= zpow[mag[b] + n] * cph[b]


def _transverse_flow(n, psi, cs, sn):
    """Apply (cs*I + sn*X) on every site; sn carries the factor -i."""
    dim = psi.shape[0]
    for k in range(n):
        mask = 1 << k
        for block in range(0, dim, 2 * mask):
            for b in range(block, block + mask):
                lo = psi[b]
                hi = psi[b + mask]
                psi[b] = cs * lo + sn * hi
                psi[b + mask] = sn * lo + cs * hi


def _split4_loop(mag, cdiag, half_r, g, n, psi, times, dt, pops):
    dim = psi.shape[0]
    w1 = YOSHIDA_OUTER
    w0 = YOSHIDA_INNER
    cph_edge = np.empty(dim, np.complex128)
    cph_mid = np.empty(dim, np.complex128)
    cph_join = np.empty(dim, np.complex128)
    zpow = np.empty(2 * n + 1, np.complex128)

    for b in range(dim):
        pops[0, b] = psi[b].real ** 2 + psi[b].imag ** 2

    for s in range(times.shape[0] - 1):
        t_seg = times[s]
        length = times[s + 1] - t_seg
        m = max(1, math.ceil(length / dt - 1e-9))
        h = length / m
        a1 = w1 * h
        a0 = w0 * h
        edge = 0.5 * a1
        mid = 0.5 * (a1 + a0)
        _phase_table(cdiag, edge, cph_edge)
        _phase_table(cdiag, mid, cph_mid)
        _phase_table(cdiag, 2.0 * edge, cph_join)
        c1 = math.cos(g * a1)
        s1 = -1j * math.sin(g * a1)
        c0 = math.cos(g * a0)
        s0 = -1j * math.sin(g * a0)

        # per step: D(edge) V(a1) D(mid) V(a0) D(mid) V(a1) D(edge); the closing
        # D(edge) of one step and the opening D(edge) of the next are merged
        _diagonal_flow(mag, half_r, n, psi, t_seg, edge, cph_edge, zpow)
        for i in range(m):
            t = t_seg + i * h
            _transverse_flow(n, psi, c1, s1)
            _diagonal_flow(mag, half_r, n, psi, t + edge, mid, cph_mid, zpow)
            _transverse_flow(n, psi, c0, s0)
            _diagonal_flow(mag, half_r, n, psi, t + edge + mid, mid, cph_mid, zpow)
            _transverse_flow(n, psi, c1, s1)
            if i < m - 1:
                _diagonal_flow(mag, half_r, n, psi, t + h - edge, 2.0 * edge, cph_join, zpow)
            else:
                _diagonal_flow(mag, half_r, n, psi, t + h - edge, edge, cph_edge, zpow)
        for b in range(dim):
            pops[s + 1, b] = psi[b].real ** 2 + psi[b].imag ** 2


# ------------------------------------------------------------------ rk4, numba

def _rk4_loop(kdiag, cmat, psi, times, dt, pops):
    dim = psi.shape[0]
    k1 = np.empty(dim, np.complex128)
    k2 = np.empty(dim, np.complex128)
    k3 = np.empty(dim, np.complex128)
    k4 = np.empty(dim, np.complex128)
    tmp = np.empty(dim, np.complex128)

    for b in range(dim):
        pops[0, b] = psi[b].real ** 2 + psi[b].imag ** 2

    for s in range(times.shape[0] - 1):
        t_seg = times[s]
        length = times[s + 1] - t_seg
        m = max(1, math.ceil(length / dt - 1e-9))
        h = length / m
        for i in range(m):
            t = t_seg + i * h
            _apply_h(kdiag, cmat, t, psi, k1)
            for b in range(dim):
                tmp[b] = psi[b] + 0.5 * h * k1[b]
            _apply_h(kdiag, cmat, t + 0.5 * h, tmp, k2)
            for b in range(dim):
                tmp[b] = psi[b] + 0.5 * h * k2[b]
            _apply_h(kdiag, cmat, t + 0.5 * h, tmp, k3)
            for b in range(dim):
                tmp[b] = psi[b] + h * k3[b]
            _apply_h(kdiag, cmat, t + h, tmp, k4)
            for b in range(dim):
                psi[b] += h / 6.0 * (k1[b] + 2.0 * k2[b] + 2.0 * k3[b] + k4[b])
        for b in range(dim):
            pops[s + 1, b] = psi[b].real ** 2 + psi[b].imag ** 2


def _apply_h(kdiag, cmat, t, psi, out):
    """out = -i * (t*K + C) @ psi"""
    dim = psi.shape[0]
    for b in range(dim):
        acc = t * kdiag[b] * psi[b]
        for c in range(dim):
            acc += cmat[b, c] * psi[c]
        out[b] = -1j * acc


_phase_table = _jit(_phase_table)
_diagonal_flow = _jit(_diagonal_flow)
_transverse_flow = _jit(_transverse_flow)
_apply_h = _jit(_apply_h)
split4_numba = _jit(_split4_loop)
rk4_numba = _jit(_rk4_loop)


# ---------------------------------------------------------------- numpy twins

def _rotation_product(n, angle):
    """Dense ``(cos a I - i sin a X)`` on every site, as one 2**n matrix."""
    c = math.cos(angle)
    s = -1j * math.sin(angle)
    rot = np.array([[c, s], [s, c]], dtype=np.complex128)
    out = np.ones((1, 1), dtype=np.complex128)
    for _ in range(n):
        out = np.kron(out, rot)
    return out


def split4_numpy(mag, cdiag, half_r, g, n, psi, times, dt, pops):
    pops[0] = np.abs(psi) ** 2
    powers = np.arange(-n, n + 1)
    zidx = mag + n
    for s in range(len(times) - 1):
        m, h = _substeps(times[s + 1] - times[s], dt)
        a1 = YOSHIDA_OUTER * h
        a0 = YOSHIDA_INNER * h
        spans = (0.5 * a1, 0.5 * (a1 + a0), 0.5 * (a0 + a1), 0.5 * a1)
        cph = [np.exp(-1j * cdiag * sp) for sp in spans]
        rots = (_rotation_product(n, g * a1), _rotation_product(n, g * a0), _rotation_product(n, g * a1))
        for i in range(m):
            ta = times[s] + i * h
            for stage, span in enumerate(spans):
                tb = ta + span
                z = np.exp(-1j * half_r * span * (ta + tb) * 0.5)
                psi *= (z ** powers)[zidx] * cph[stage]
                ta = tb
                if stage < 3:
                    psi[:] = rots[stage] @ psi
        pops[s + 1] = np.abs(psi) ** 2


def rk4_numpy(kdiag, cmat, psi, times, dt, pops):
    pops[0] = np.abs(psi) ** 2

    def rhs(t, y):
        return -1j * (t * kdiag * y + cmat @ y)

    for s in range(len(times) - 1):
        m, h = _substeps(times[s + 1] - times[s], dt)
        for i in range(m):
            t = times[s] + i * h
            k1 = rhs(t, psi)
            k2 = rhs(t + 0.5 * h, psi + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, psi + 0.5 * h * k2)
            k4 = rhs(t + h, psi + h * k3)
            psi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        pops[s + 1] = np.abs(psi) ** 2


if USE_NUMBA:
    split4 = split4_numba
    rk4 = rk4_numba
else:
    split4 = split4_numpy
    rk4 = rk4_numpy
