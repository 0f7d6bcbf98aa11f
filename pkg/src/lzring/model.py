"""Ring topology and the time-dependent Landau-Zener Hamiltonian.

Units are dimensionless with hbar = 1: energies in units of the tunneling
energy g, times in units of 1/g.  The Hamiltonian is split as

    H(t) = t * K + C

with ``K = (r/2) * sum_k Z_k`` the diagonal sweep part and

    C = g * sum_k X_k + j1 * sum_first Z_i Z_j + j2 * sum_second Z_i Z_j

the static part.  Positive couplings are antiferromagnetic, negative ones
ferromagnetic.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import operators as ops
from .errors import CapacityError

BRUTE_FORCE_MAX_SITES = 6


@dataclass(frozen=True)
class RingTopology:
    n: int
    first_pairs: tuple
    second_pairs: tuple


@dataclass(frozen=True)
class CouplingParams:
    j1: float = 0.0
    j2: float = 0.0
    r: float = 1.0
    g: float = 1.0

    def __post_init__(self):
        for name in ("j1", "j2", "r", "g"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        # g = 0 is allowed: it switches tunneling off (diagonal limit)
        if self.g < 0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        if self.r <= 0:
            raise ValueError(f"r must be > 0, got {self.r}")


@dataclass(frozen=True, eq=False)
class LzHamiltonian:
    """H(t) = t*K + C with both parts precomputed (read-only arrays)."""

    n: int
    K: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)
    params: CouplingParams

    @property
    def dim(self):
        return 1 << self.n

    @property
    def sweep_diagonal(self):
        return self.K.diagonal().real.copy()

    @property
    def static_diagonal(self):
        return self.C.diagonal().real.copy()


def _pairs(n, offset):
    return {tuple(sorted((k, (k + offset) % n))) for k in range(n)}


def ring_topology(n, max_sites=ops.MAX_SITES):
    """Nearest and next-nearest neighbour pairs of an n-site periodic ring.

    Pairs are unordered and deduplicated; second-neighbour pairs that coincide
    with a site or a first-neighbour pair are dropped.  A single site has no
    pairs at all.
    """
    if not 1 <= n <= max_sites:
        raise CapacityError(f"ring size n={n} outside 1..{max_sites}")
    if n == 1:
        return RingTopology(1, (), ())
    first = _pairs(n, 1)
    second = {p for p in _pairs(n, 2) if p[0] != p[1]} - first
    return RingTopology(n, tuple(sorted(first)), tuple(sorted(second)))


def build_hamiltonian(params, topo, max_sites=ops.MAX_SITES):
    n = topo.n
    dim = 1 << n
    z = ops.pauli("z")
    x = ops.pauli("x")

    # integer-valued sums first, scaled once, so entries match the oracle bit for bit
    z_sum = np.zeros((dim, dim), dtype=np.complex128)
    x_sum = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(n):
        z_sum += ops.embed(z, k, n, max_sites)
        x_sum += ops.embed(x, k, n, max_sites)
    zz = []
    for pairs in (topo.first_pairs, topo.second_pairs):
        acc = np.zeros((dim, dim), dtype=np.complex128)
        for i, j in pairs:
            acc += ops.two_site_zz(i, j, n, max_sites)
        zz.append(acc)

    K = (params.r / 2) * z_sum
    C = params.g * x_sum + params.j1 * zz[0] + params.j2 * zz[1]
    K.setflags(write=False)
    C.setflags(write=False)
    return LzHamiltonian(n=n, K=K, C=C, params=params)


def hamiltonian_at(h, t):
    """Dense H(t) = t*K + C."""
    return t * h.K + h.C


def brute_force_hamiltonian(params, topo, t):
    """Entry-by-entry construction of H(t) over basis bitstrings.

    Independent of the Kronecker path; intended as a test oracle.
    """
    n = topo.n
    if n > BRUTE_FORCE_MAX_SITES:
        raise CapacityError(f"oracle limited to n <= {BRUTE_FORCE_MAX_SITES}, got {n}")
    dim = 1 << n
    H = np.zeros((dim, dim), dtype=np.complex128)
    for b in range(dim):
        spins = [-1 if (b >> (n - 1 - k)) & 1 else 1 for k in range(n)]
        first = sum(spins[i] * spins[j] for i, j in topo.first_pairs)
        second = sum(spins[i] * spins[j] for i, j in topo.second_pairs)
        H[b, b] = t * (params.r / 2 * sum(spins)) + (params.j1 * first + params.j2 * second)
        for c in range(dim):
            if bin(b ^ c).count("1") == 1:
                H[b, c] = params.g
    return H
