"""Pauli matrices and their Kronecker embedding into the 2**n site space.

Conventions
-----------
Tensor slot 0 is the leftmost factor of a product ``A0 ⊗ A1 ⊗ ... ⊗ A(n-1)``
and maps to the most significant bit of the basis index.  A bit value of 0
is spin up (sigma_z eigenvalue +1), 1 is spin down.
"""

import numpy as np

from .errors import CapacityError

MAX_SITES = 12

_PAULI = {
    "x": ((0, 1), (1, 0)),
    "z": ((1, 0), (0, -1)),
    "identity": ((1, 0), (0, 1)),
}


def pauli(kind):
    """Return the 2x2 complex matrix for ``kind`` in {"x", "z", "identity"}."""
    try:
        rows = _PAULI[kind]
    except KeyError:
        raise ValueError(f"unknown Pauli kind {kind!r}; expected one of {sorted(_PAULI)}") from None
    return np.array(rows, dtype=np.complex128)


def kron(a, b, max_sites=MAX_SITES):
    """Kronecker product of two square matrices.

    Raises CapacityError when the result would be larger than ``2**max_sites``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    for m in (a, b):
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"kron expects square matrices, got shape {m.shape}")
    dim = a.shape[0] * b.shape[0]
    if dim > 1 << max_sites:
        raise CapacityError(f"operator dimension {dim} exceeds 2**{max_sites}")
    return np.kron(a, b).astype(np.complex128, copy=False)


def _check_sites(n, max_sites):
    if not 1 <= n <= max_sites:
        raise CapacityError(f"site count n={n} outside 1..{max_sites}")


def embed(op, site, n, max_sites=MAX_SITES):
    """Place a single-site operator in tensor slot ``site`` of an n-site product."""
    _check_sites(n, max_sites)
    if not 0 <= site < n:
        raise IndexError(f"site {site} out of range for n={n}")
    op = np.asarray(op, dtype=np.complex128)
    if op.shape != (2, 2):
        raise ValueError(f"embed expects a 2x2 operator, got shape {op.shape}")
    eye = pauli("identity")
    out = np.ones((1, 1), dtype=np.complex128)
    for k in range(n):
        out = kron(out, op if k == site else eye, max_sites)
    return out


def two_site_zz(i, j, n, max_sites=MAX_SITES):
    """sigma_z on slot i times sigma_z on slot j, as a 2**n matrix."""
    _check_sites(n, max_sites)
    for idx in (i, j):
        if not 0 <= idx < n:
            raise IndexError(f"site {idx} out of range for n={n}")
    if i == j:
        raise ValueError("two_site_zz needs two distinct sites")
    # same as embed(z, i) @ embed(z, j) without the dense matrix product
    z = pauli("z")
    eye = pauli("identity")
    out = np.ones((1, 1), dtype=np.complex128)
    for k in range(n):
        out = kron(out, z if k in (i, j) else eye, max_sites)
    return out


def spin_signs(n):
    """Integer array ``s[k, b]`` = +1 if bit for slot k of basis index b is 0, else -1."""
    b = np.arange(1 << n)
    bits = (b[None, :] >> (n - 1 - np.arange(n))[:, None]) & 1
    return 1 - 2 * bits


def slot_mask(site, n):
    """Bit mask of tensor slot ``site`` inside an n-site basis index."""
    return 1 << (n - 1 - site)


def format_config(index, n):
    """Render a basis index as an up/down string, slot 0 first (e.g. ``'udu'``)."""
    return "".join("d" if index & slot_mask(k, n) else "u" for k in range(n))
