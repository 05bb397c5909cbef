"""First-order unitary dilations of a single channel.

A square channel T gets a unitary U on H (x) K with a fixed pure ancilla
state omega = |e_0><e_0| such that

    T(A) == tr_K(U (A (x) omega) U^dag).

The ancilla dimension is always d^2, one universal size for every channel
on a d-dimensional system (Kraus lists are zero padded), which is what
lets the semigroup module stack the dilations of all powers T^n over a
single ancilla.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import (
    CPTP_ATOL,
    HEISENBERG,
    SCHROEDINGER,
    ChoiMatrix,
    KrausChannel,
    _choi_of,
    dual,
    kraus_from_choi,
    require_accepted,
)
from .linalg import (
    as_complex_matrix,
    basis_state,
    complete_isometry_to_unitary,
    frozen_matrix,
    is_pure_state,
    is_unitary,
    kron,
    partial_trace,
    partial_trace_state,
)


@dataclass(frozen=True)
class UnitaryDilation:
    """Unitary U on H (x) K with pure ancilla omega; shape == (dim, ancilla_dim)."""

    unitary: np.ndarray
    dim: int
    ancilla_dim: int
    omega: np.ndarray

    def __post_init__(self):
        u = frozen_matrix(self.unitary)
        w = frozen_matrix(self.omega)
        n = self.dim * self.ancilla_dim
        if u.shape != (n, n):
            raise ValueError(f"unitary of shape {u.shape}, expected {(n, n)}")
        if not is_unitary(u):
            raise ValueError("dilation operator is not unitary within 1e-10")
        if w.shape != (self.ancilla_dim, self.ancilla_dim) or not is_pure_state(w):
            raise ValueError("ancilla state must be a pure state on K")
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "omega", w)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.dim, self.ancilla_dim)

    def apply(self, a) -> np.ndarray:
        """tr_K(U (a (x) omega) U^dag); reproduces the source channel."""
        m = as_complex_matrix(a)
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"operator of shape {m.shape} does not match system dim {self.dim}")
        big = self.unitary @ kron(m, self.omega) @ self.unitary.conj().T
        return partial_trace(big, [self.dim, self.ancilla_dim], keep=0)

    def apply_heisenberg(self, b) -> np.ndarray:
        """tr_omega(U^dag (b (x) id_K) U); reproduces the dual channel."""
        m = as_complex_matrix(b)
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"operator of shape {m.shape} does not match system dim {self.dim}")
        lifted = kron(m, np.eye(self.ancilla_dim, dtype=np.complex128))
        big = self.unitary.conj().T @ lifted @ self.unitary
        return partial_trace_state(big, [self.dim, self.ancilla_dim], self.omega)


def _plain_kraus(ch: KrausChannel) -> tuple[np.ndarray, ...]:
    """A coefficient-free Kraus list for an accepted (hence CP) channel."""
    if ch.coefficients is None:
        return ch.kraus
    if all(c >= 0 for c in ch.coefficients):
        return tuple(np.sqrt(c) * k for c, k in zip(ch.coefficients, ch.kraus))
    fresh = kraus_from_choi(ChoiMatrix(_choi_of(ch.kraus, ch.coeffs()), ch.dim_in, ch.dim_out))
    return fresh.kraus


def _spread_embedding_columns(completed: np.ndarray, dim: int, ancilla_dim: int) -> np.ndarray:
    # complete_isometry_to_unitary leaves the isometry in the first `dim`
    # columns; on H (x) K those images belong to the basis vectors
    # x (x) e_0 at composite index h * ancilla_dim.  Shuffle the columns so
    # the unitary acts on the composite indices, completion columns
    # filling the remaining slots in order.
    n = dim * ancilla_dim
    targets = [h * ancilla_dim for h in range(dim)]
    targets += [j for j in range(n) if j % ancilla_dim != 0]
    u = np.empty((n, n), dtype=np.complex128)
    u[:, targets] = completed
    return u


def stinespring_unitary(ch: KrausChannel, tol: float = CPTP_ATOL) -> UnitaryDilation:
    """Dilate an accepted square Schroedinger channel to a unitary on H (x) K.

    The isometry x (x) e_0 -> sum_i (K_i x) (x) e_i (Kraus list zero padded
    to length d^2) is extended by the deterministic completion rule of
    linalg.complete_isometry_to_unitary, so repeated builds give identical
    matrices.
    """
    if ch.picture != SCHROEDINGER:
        raise ValueError("stinespring_unitary dilates schroedinger channels")
    if not ch.is_square:
        raise ValueError("stinespring_unitary needs a square channel")
    require_accepted(ch, tol)

    d = ch.dim_in
    ancilla_dim = d * d
    ops = _plain_kraus(ch)
    if len(ops) > ancilla_dim:
        fresh = kraus_from_choi(ChoiMatrix(_choi_of(ops, (1.0,) * len(ops)), d, d))
        ops = fresh.kraus

    iso = np.zeros((d, ancilla_dim, d), dtype=np.complex128)
    for i, k in enumerate(ops):
        iso[:, i, :] = k
    completed = complete_isometry_to_unitary(iso.reshape(d * ancilla_dim, d))
    unitary = _spread_embedding_columns(completed, d, ancilla_dim)
    return UnitaryDilation(unitary, d, ancilla_dim, basis_state(0, ancilla_dim))


@dataclass(frozen=True)
class GeneralDilation:
    """Dilation of a rectangular channel on H (x) G (x) K.

    Reconstruction: T(A) == (tr_H o tr_K)(U (A (x) omega_out (x) omega_anc) U^dag).
    """

    unitary: np.ndarray
    dim_in: int
    dim_out: int
    ancilla_dim: int
    omega_out: np.ndarray
    omega_anc: np.ndarray

    def __post_init__(self):
        u = frozen_matrix(self.unitary)
        n = self.dim_in * self.dim_out * self.ancilla_dim
        if u.shape != (n, n):
            raise ValueError(f"unitary of shape {u.shape}, expected {(n, n)}")
        if not is_unitary(u):
            raise ValueError("dilation operator is not unitary within 1e-10")
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "omega_out", frozen_matrix(self.omega_out))
        object.__setattr__(self, "omega_anc", frozen_matrix(self.omega_anc))

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.dim_in, self.dim_out, self.ancilla_dim)

    def apply(self, a) -> np.ndarray:
        m = as_complex_matrix(a)
        if m.shape != (self.dim_in, self.dim_in):
            raise ValueError(f"operator of shape {m.shape} does not match input dim {self.dim_in}")
        big = kron(m, kron(self.omega_out, self.omega_anc))
        rotated = self.unitary @ big @ self.unitary.conj().T
        return partial_trace(rotated, list(self.shape), keep=1)


def general_stinespring(ch: KrausChannel, tol: float = CPTP_ATOL) -> GeneralDilation:
    """Dilation of a rectangular Schroedinger channel T : B^1(H) -> B^1(G).

    Follows the composite X(.) := omega_H (x) T(tr_G(.)) on H (x) G, which
    is itself a square channel and is dilated by stinespring_unitary; the
    reconstruction then discards the H and K factors.
    """
    if ch.picture != SCHROEDINGER:
        raise ValueError("general_stinespring dilates schroedinger channels")
    require_accepted(ch, tol)

    d_in, d_out = ch.dim_in, ch.dim_out
    ops = _plain_kraus(ch)

    # tr_G as Kraus family id_H (x) <g|, then T, then the embedding |e_0>_H (x) id_G
    eye_in = np.eye(d_in, dtype=np.complex128)
    eye_out = np.eye(d_out, dtype=np.complex128)
    embed = np.kron(np.eye(d_in, 1, dtype=np.complex128), eye_out)
    composite = []
    for k in ops:
        lifted = embed @ k
        for g in range(d_out):
            bra = np.zeros((1, d_out), dtype=np.complex128)
            bra[0, g] = 1.0
            composite.append(lifted @ np.kron(eye_in, bra))
    square = KrausChannel(d_in * d_out, d_in * d_out, tuple(composite))
    inner = stinespring_unitary(square, tol)
    return GeneralDilation(
        unitary=inner.unitary,
        dim_in=d_in,
        dim_out=d_out,
        ancilla_dim=inner.ancilla_dim,
        omega_out=basis_state(0, d_out),
        omega_anc=inner.omega,
    )


def heisenberg_dilation(ch: KrausChannel, tol: float = CPTP_ATOL) -> UnitaryDilation:
    """Dilation of a unital Heisenberg channel S in the form
    S(B) == tr_omega(U^dag (B (x) id_K) U).

    Built on the unique Schroedinger pre-dual (same Kraus family, flipped
    picture); apply_heisenberg evaluates the reconstruction.
    """
    if ch.picture != HEISENBERG:
        raise ValueError("heisenberg_dilation expects a heisenberg channel")
    if not ch.is_square:
        raise ValueError("heisenberg_dilation needs a square channel")
    require_accepted(ch, tol)
    return stinespring_unitary(dual(ch), tol)
