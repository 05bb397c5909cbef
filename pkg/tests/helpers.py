"""Shared test utilities and independent brute-force oracles.

The oracles here deliberately avoid the package's code paths for the
operations they check: Kraus sandwiches are spelled out with plain numpy,
superoperator powers use numpy matrix powers, and pairings evaluate both
sides of the defining identities directly.
"""

import numpy as np


def random_matrix(dim, rng, rows=None):
    rows = dim if rows is None else rows
    return rng.standard_normal((rows, dim)) + 1j * rng.standard_normal((rows, dim))


def random_hermitian(dim, rng):
    g = random_matrix(dim, rng)
    return 0.5 * (g + g.conj().T)


def random_density(dim, rng):
    g = random_matrix(dim, rng)
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_isometry(rows, cols, rng):
    q, _ = np.linalg.qr(random_matrix(cols, rng, rows=rows))
    return q


def kraus_apply(kraus, a, coefficients=None):
    """Direct Schroedinger sandwich sum_i c_i K_i a K_i^dag."""
    coefficients = coefficients or [1.0] * len(kraus)
    return sum(c * (k @ a @ k.conj().T) for c, k in zip(coefficients, kraus))


def kraus_apply_dual(kraus, b, coefficients=None):
    """Direct Heisenberg sandwich sum_i c_i K_i^dag b K_i."""
    coefficients = coefficients or [1.0] * len(kraus)
    return sum(c * (k.conj().T @ b @ k) for c, k in zip(coefficients, kraus))


def channel_matrix_oracle(kraus, coefficients=None):
    """Column-stacking superoperator assembled entry by entry from the
    action on matrix units (never via the kron identity the package uses)."""
    d_out, d_in = kraus[0].shape
    m = np.zeros((d_out * d_out, d_in * d_in), dtype=np.complex128)
    col = 0
    for j in range(d_in):
        for i in range(d_in):
            e = np.zeros((d_in, d_in), dtype=np.complex128)
            e[i, j] = 1.0
            m[:, col] = kraus_apply(kraus, e, coefficients).flatten(order="F")
            col += 1
    return m


def fro(a):
    return float(np.linalg.norm(a))


def tn(a):
    """Trace norm via singular values, local to the tests."""
    return float(np.linalg.svd(a, compute_uv=False).sum())
