"""Cyclic channels (T^m == T) and their fully finite dilations.

The exponent of a cyclic channel reduces modulo the cycle: with

    reduced_exponent(m, n) = (n - 1) mod (m - 1) + 1
    wrap_count(m, n)       = (n - reduced_exponent(m, n)) / (m - 1)

one has n == reduced + wraps * (m - 1) and T^n == T^reduced.  The shift
register of the semigroup construction then closes into the cycle: a
single unitary V on H (x) K~ (x) C^m reproduces

    T^n(A) == tr_K(V^(n + wrap_count(m, n)) (A (x) omega) (V^dag)^(...))

for every n >= 1, with no horizon.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import (
    CPTP_ATOL,
    SCHROEDINGER,
    KrausChannel,
    require_accepted,
    superoperator_matrix,
    unvec,
    vec,
)
from .errors import MemoryGuardError, NotCyclicError
from .linalg import (
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
    trace_norm,
)
from .semigroup import DEFAULT_MAX_TOTAL_DIM, DILATION_ATOL, VerificationReport, _step_unitaries

# Frobenius tolerance for detecting T^m == T on superoperators.
CYCLE_DETECTION_ATOL = 1e-8


@dataclass(frozen=True)
class CyclePeriod:
    """A period m >= 2 with T^m == T within detection tolerance."""

    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("a cycle period must be at least 2")


def reduced_exponent(m: int, n: int) -> int:
    """(n - 1) mod (m - 1) + 1, the surviving exponent in range 1..m-1."""
    m, n = int(m), int(n)
    if m < 2 or n < 1:
        raise ValueError(f"need m >= 2 and n >= 1, got m={m}, n={n}")
    return (n - 1) % (m - 1) + 1


def wrap_count(m: int, n: int) -> int:
    """How many times the cycle is unwound: (n - reduced_exponent) / (m - 1)."""
    return (n - reduced_exponent(m, n)) // (m - 1)


def detect_cycle(
    ch: KrausChannel, m_max: int = 16, tol: float = CYCLE_DETECTION_ATOL
) -> CyclePeriod | None:
    """Smallest m in 2..m_max with ||M(T^m) - M(T)||_F <= tol, else None."""
    if not ch.is_square:
        raise ValueError("cycle detection needs a square channel")
    require_accepted(ch)
    m1 = superoperator_matrix(ch)
    accumulated = m1.copy()
    for m in range(2, m_max + 1):
        accumulated = accumulated @ m1
        if np.linalg.norm(accumulated - m1) <= tol:
            return CyclePeriod(m)
    return None


def reduce_power(period: CyclePeriod, n: int) -> int:
    """The equivalent exponent: T^n == T^reduced for a channel of this period."""
    return reduced_exponent(period.m, n)


@dataclass(frozen=True)
class CyclicDilationBundle:
    """V and omega on H (x) K~ (x) C^m; valid for unbounded n."""

    dim: int
    ancilla_dim: int
    period: int
    unitary: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        if self.period < 2:
            raise ValueError("period must be at least 2")
        n = self.dim * self.ancilla_dim * self.period
        u = frozen_matrix(self.unitary)
        w = frozen_matrix(self.omega)
        if u.shape != (n, n):
            raise ValueError(f"unitary of shape {u.shape}, expected {(n, n)}")
        if not is_unitary(u):
            raise ValueError("bundle operator is not unitary within 1e-10")
        anc = self.ancilla_dim * self.period
        if w.shape != (anc, anc) or not is_pure_state(w):
            raise ValueError("bundle ancilla state must be pure on K~ (x) C^m")
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "omega", w)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.dim, self.ancilla_dim, self.period)


def build_cyclic_dilation(
    ch: KrausChannel,
    period: CyclePeriod,
    tol: float = CPTP_ATOL,
    cycle_tol: float = CYCLE_DETECTION_ATOL,
    max_total_dim: int = DEFAULT_MAX_TOTAL_DIM,
) -> CyclicDilationBundle:
    """Assemble the finite dilation of a cyclic channel.

    The cycle basis e_1..e_m of the underlying construction maps to
    zero-based register cells 0..m-1.  Cell i-1 carries the block
    U_i U_(i-1)^dag with U_0 = U_m = id, the register shifts cyclically
    with the wrap e_m -> e_1, and omega sits at cell m-1 so the first
    shift lands on the dilation of T^1.
    """
    if ch.picture != SCHROEDINGER or not ch.is_square:
        raise ValueError("cyclic dilation needs a square schroedinger channel")
    require_accepted(ch, tol)
    m = period.m
    m1 = superoperator_matrix(ch)
    drift = np.linalg.norm(np.linalg.matrix_power(m1, m) - m1)
    if drift > cycle_tol:
        raise NotCyclicError(
            f"channel is not cyclic with period {m}: ||M(T^{m}) - M(T)||_F = {drift:.3e}"
        )

    d = ch.dim_in
    total = d * d * d * m
    if total > max_total_dim:
        raise MemoryGuardError(
            f"total dimension {total} exceeds the guard {max_total_dim}; "
            f"raise the limit to proceed"
        )

    steps = _step_unitaries(ch, m - 1, tol)
    steps.append(steps[0])  # U_m := id
    blocks = np.zeros((d * d * d * m,) * 2, dtype=np.complex128)
    for i in range(1, m + 1):
        blocks += kron(steps[i] @ steps[i - 1].conj().T, basis_state(i - 1, m))
    shift = kron(np.eye(d * d * d, dtype=np.complex128), cyclic_shift(m))
    omega = kron(basis_state(0, d * d), basis_state(m - 1, m))
    return CyclicDilationBundle(
        dim=d,
        ancilla_dim=d * d,
        period=m,
        unitary=blocks @ shift,
        omega=omega,
    )


def evolve_cyclic(bundle: CyclicDilationBundle, rho0, n: int) -> np.ndarray:
    """T^n(rho0) through the dilation with exponent n + wrap_count; any n >= 0.

    n == 0 returns the state unchanged (the dilation axiom E o J == id),
    matching the construction whose exponent formula starts at n == 1.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    rho = check_density_matrix(rho0)
    if rho.shape != (bundle.dim, bundle.dim):
        raise ValueError(f"state of shape {rho.shape} does not match system dim {bundle.dim}")
    if n == 0:
        return rho
    exponent = n + wrap_count(bundle.period, n)
    vn = np.linalg.matrix_power(bundle.unitary, exponent)
    big = vn @ kron(rho, bundle.omega) @ vn.conj().T
    return hermitize(partial_trace(big, list(bundle.shape), keep=0))


def verify_cyclic_dilation(
    bundle: CyclicDilationBundle,
    ch: KrausChannel,
    n_max: int = 50,
    tol: float = DILATION_ATOL,
) -> VerificationReport:
    """Residuals of the unbounded reconstruction for n = 0..n_max over a
    full operator basis, against superoperator matrix powers."""
    if ch.picture != SCHROEDINGER or not ch.is_square:
        raise ValueError("verification needs a square schroedinger channel")
    if ch.dim_in != bundle.dim:
        raise ValueError(
            f"channel dimension {ch.dim_in} does not match bundle dimension {bundle.dim}"
        )
    units = matrix_units(bundle.dim)
    m = superoperator_matrix(ch)
    m_power = np.eye(m.shape[0], dtype=np.complex128)
    residuals = []
    labels = []
    for n in range(n_max + 1):
        if n == 0:
            vn = np.eye(bundle.unitary.shape[0], dtype=np.complex128)
        else:
            vn = np.linalg.matrix_power(bundle.unitary, n + wrap_count(bundle.period, n))
        worst = 0.0
        for e in units:
            expected = unvec(m_power @ vec(e))
            big = vn @ kron(e, bundle.omega) @ vn.conj().T
            actual = partial_trace(big, list(bundle.shape), keep=0)
            worst = max(worst, trace_norm(actual - expected))
        residuals.append(worst)
        labels.append(f"n={n}")
        m_power = m_power @ m
    return VerificationReport(tolerance=tol, residuals=tuple(residuals), labels=tuple(labels))
