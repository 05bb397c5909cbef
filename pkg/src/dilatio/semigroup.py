"""One unitary V reproducing every power of a channel up to a horizon.

V acts on H (x) K~ (x) Z_L where K~ is the d^2 stinespring ancilla and
Z_L a cyclic shift register of length L = N + 1.  For 0 <= n <= N,

    T^n(A) == tr_K(V^n (A (x) omega) (V^dag)^n),

with omega pure on K~ (x) Z_L.  The bi-infinite shift of the underlying
construction is truncated to the cyclic group Z_L; powers up to the
horizon never wrap, so the truncation is exact there, and anything past
the horizon is refused instead of silently wrapping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import (
    CPTP_ATOL,
    SCHROEDINGER,
    KrausChannel,
    power,
    require_accepted,
    superoperator_matrix,
    unvec,
    vec,
)
from .errors import HorizonError, MemoryGuardError
from .linalg import (
    as_complex_matrix,
    basis_state,
    check_density_matrix,
    cyclic_shift,
    frozen_matrix,
    hermitize,
    is_pure_state,
    is_unitary,
    kron,
    matrix_units,
    partial_trace,
    partial_trace_state,
    trace_norm,
)
from .stinespring import stinespring_unitary

# Builders refuse a total dimension d * d^2 * L beyond this unless overridden.
DEFAULT_MAX_TOTAL_DIM = 4096
# Default tolerance for dilation-identity verification.
DILATION_ATOL = 1e-9


@dataclass(frozen=True)
class VerificationReport:
    """Labelled residual table from a dilation verification sweep."""

    tolerance: float
    residuals: tuple[float, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.residuals) != len(self.labels):
            raise ValueError("residuals and labels differ in length")

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


@dataclass(frozen=True)
class DilationBundle:
    """V, omega and the validity horizon of a semigroup dilation."""

    dim: int
    ancilla_dim: int
    shift_dim: int
    unitary: np.ndarray
    omega: np.ndarray
    horizon: int

    def __post_init__(self):
        if self.horizon != self.shift_dim - 1:
            raise ValueError("horizon must equal shift_dim - 1")
        n = self.dim * self.ancilla_dim * self.shift_dim
        u = frozen_matrix(self.unitary)
        w = frozen_matrix(self.omega)
        if u.shape != (n, n):
            raise ValueError(f"unitary of shape {u.shape}, expected {(n, n)}")
        if not is_unitary(u):
            raise ValueError("bundle operator is not unitary within 1e-10")
        anc = self.ancilla_dim * self.shift_dim
        if w.shape != (anc, anc) or not is_pure_state(w):
            raise ValueError("bundle ancilla state must be pure on K~ (x) Z_L")
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "omega", w)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.dim, self.ancilla_dim, self.shift_dim)


def _step_unitaries(ch: KrausChannel, count: int, tol: float) -> list[np.ndarray]:
    """Dilation unitaries of T^0 .. T^count on the common H (x) K~ space."""
    d = ch.dim_in
    steps = [np.eye(d * d * d, dtype=np.complex128)]
    for n in range(1, count + 1):
        steps.append(stinespring_unitary(power(ch, n), tol).unitary)
    return steps


def build_semigroup_dilation(
    ch: KrausChannel,
    n_steps: int,
    tol: float = CPTP_ATOL,
    max_total_dim: int = DEFAULT_MAX_TOTAL_DIM,
) -> DilationBundle:
    """Assemble V = U W for the first n_steps powers of an accepted channel.

    U carries the per-power blocks U_n U_(n-1)^dag on the shift cells
    1..N (identity on cell 0), W shifts the register cyclically, and
    omega sits at shift cell 0, so V^n walks the register to cell n while
    accumulating exactly the dilation of T^n.
    """
    if ch.picture != SCHROEDINGER or not ch.is_square:
        raise ValueError("semigroup dilation needs a square schroedinger channel")
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    require_accepted(ch, tol)

    d = ch.dim_in
    shift_dim = n_steps + 1
    total = d * d * d * shift_dim
    if total > max_total_dim:
        raise MemoryGuardError(
            f"total dimension {total} exceeds the guard {max_total_dim}; "
            f"raise the limit to proceed"
        )

    steps = _step_unitaries(ch, n_steps, tol)
    block_dim = d * d * d
    blocks = kron(np.eye(block_dim, dtype=np.complex128), basis_state(0, shift_dim))
    for n in range(1, shift_dim):
        blocks += kron(steps[n] @ steps[n - 1].conj().T, basis_state(n, shift_dim))
    shift = kron(np.eye(block_dim, dtype=np.complex128), cyclic_shift(shift_dim))
    omega = kron(basis_state(0, d * d), basis_state(0, shift_dim))
    return DilationBundle(
        dim=d,
        ancilla_dim=d * d,
        shift_dim=shift_dim,
        unitary=blocks @ shift,
        omega=omega,
        horizon=n_steps,
    )


def _check_step(bundle: DilationBundle, n: int) -> None:
    if not 0 <= n <= bundle.horizon:
        raise HorizonError(
            f"step {n} outside the bundle horizon {bundle.horizon}; "
            f"wraparound would corrupt the reconstruction"
        )


def evolve(bundle: DilationBundle, rho0, n: int) -> np.ndarray:
    """tr_K(V^n (rho0 (x) omega) (V^dag)^n) for 0 <= n <= horizon."""
    _check_step(bundle, n)
    rho = check_density_matrix(rho0)
    if rho.shape != (bundle.dim, bundle.dim):
        raise ValueError(f"state of shape {rho.shape} does not match system dim {bundle.dim}")
    vn = np.linalg.matrix_power(bundle.unitary, n)
    big = vn @ kron(rho, bundle.omega) @ vn.conj().T
    out = partial_trace(big, list(bundle.shape), keep=0)
    return hermitize(out)


def heisenberg_evolve(bundle: DilationBundle, b, n: int) -> np.ndarray:
    """tr_omega((V^dag)^n (B (x) id) V^n); the dual power S^n(B)."""
    _check_step(bundle, n)
    m = as_complex_matrix(b)
    if m.shape != (bundle.dim, bundle.dim):
        raise ValueError(f"operator of shape {m.shape} does not match system dim {bundle.dim}")
    env = bundle.ancilla_dim * bundle.shift_dim
    vn = np.linalg.matrix_power(bundle.unitary, n)
    big = vn.conj().T @ kron(m, np.eye(env, dtype=np.complex128)) @ vn
    return partial_trace_state(big, [bundle.dim, env], bundle.omega)


def verify_dilation(
    bundle: DilationBundle, ch: KrausChannel, tol: float = DILATION_ATOL
) -> VerificationReport:
    """Residual table of the reconstruction identity over a full operator
    basis, per power n = 0..horizon, against superoperator matrix powers."""
    if ch.picture != SCHROEDINGER or not ch.is_square:
        raise ValueError("verification needs a square schroedinger channel")
    if ch.dim_in != bundle.dim:
        raise ValueError(
            f"channel dimension {ch.dim_in} does not match bundle dimension {bundle.dim}"
        )
    units = matrix_units(bundle.dim)
    m = superoperator_matrix(ch)
    m_power = np.eye(m.shape[0], dtype=np.complex128)
    v_power = np.eye(bundle.unitary.shape[0], dtype=np.complex128)
    residuals = []
    labels = []
    for n in range(bundle.horizon + 1):
        worst = 0.0
        for e in units:
            expected = unvec(m_power @ vec(e))
            big = v_power @ kron(e, bundle.omega) @ v_power.conj().T
            actual = partial_trace(big, list(bundle.shape), keep=0)
            worst = max(worst, trace_norm(actual - expected))
        residuals.append(worst)
        labels.append(f"n={n}")
        m_power = m_power @ m
        v_power = v_power @ bundle.unitary
    return VerificationReport(tolerance=tol, residuals=tuple(residuals), labels=tuple(labels))


def shift_marginal(bundle: DilationBundle, rho0, n: int) -> np.ndarray:
    """Marginal of V^n (rho0 (x) omega) (V^dag)^n on the shift register.

    The construction keeps the walker sharp: the marginal is |e_n><e_n|
    for every n up to the horizon.
    """
    _check_step(bundle, n)
    rho = check_density_matrix(rho0)
    vn = np.linalg.matrix_power(bundle.unitary, n)
    big = vn @ kron(rho, bundle.omega) @ vn.conj().T
    return partial_trace(big, list(bundle.shape), keep=2)
