"""Two commuting channels driven by a control sequence, and their dilation.

Because T and S commute, every length-N control word collapses to
T^k S^(N-k) with k the number of T steps, so the reachable set after N
steps is the string of states {T^k S^(N-k) rho0 | k = 0..N}.  The
dilation carries two unitaries U, V on H (x) K~ (x) Z_L (x) Z_L with

    T^k S^(N-k)(A) == tr_K(U^k V^(N-k) (A (x) omega) (V^dag)^(N-k) (U^dag)^k)

for N <= horizon.  U and V need not commute; only these reconstruction
words are claimed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .channels import (
    CPTP_ATOL,
    SCHROEDINGER,
    KrausChannel,
    apply_channel,
    compose,
    power,
    require_accepted,
    superoperator_matrix,
    unvec,
    vec,
)
from .errors import HorizonError, MemoryGuardError, NotCommutingError
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
    trace_distance,
    trace_norm,
)
from .semigroup import DILATION_ATOL, VerificationReport
from .stinespring import stinespring_unitary

# Control dilations live on L^2 shift cells; guard the total dimension.
DEFAULT_MAX_TOTAL_DIM = 8192
COMMUTATION_ATOL = 1e-9


def check_commuting(t: KrausChannel, s: KrausChannel, tol: float = COMMUTATION_ATOL) -> bool:
    """True iff the superoperator commutator vanishes within tol (Frobenius)."""
    if t.dim_in != s.dim_in or t.dim_out != s.dim_out or t.picture != s.picture:
        raise ValueError("commutation check needs channels of equal shape and picture")
    require_accepted(t)
    require_accepted(s)
    mt = superoperator_matrix(t)
    ms = superoperator_matrix(s)
    return float(np.linalg.norm(mt @ ms - ms @ mt)) <= tol


def _require_commuting_pair(t: KrausChannel, s: KrausChannel, tol: float) -> None:
    if t.picture != SCHROEDINGER or not t.is_square:
        raise ValueError("control systems need square schroedinger channels")
    if not check_commuting(t, s, tol):
        raise NotCommutingError("the control channels do not commute within tolerance")


def reachable_set(
    t: KrausChannel,
    s: KrausChannel,
    rho0,
    n_steps: int,
    commute_tol: float = COMMUTATION_ATOL,
    dedup_tol: float = 1e-9,
) -> list[tuple[int, np.ndarray]]:
    """States T^k S^(N-k)(rho0), k = 0..N, deduplicated by trace distance.

    Every length-N word over {T, S} lands on one of these because the
    generators commute; non-commuting input is refused since the collapse
    would be wrong.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    _require_commuting_pair(t, s, commute_tol)
    rho = check_density_matrix(rho0)
    states: list[tuple[int, np.ndarray]] = []
    for k in range(n_steps + 1):
        out = rho
        for _ in range(n_steps - k):
            out = apply_channel(s, out)
        for _ in range(k):
            out = apply_channel(t, out)
        out = hermitize(out)
        if all(trace_distance(out, seen) > dedup_tol for _, seen in states):
            states.append((k, out))
    return states


@dataclass(frozen=True)
class ControlDilation:
    """Unitaries U (for T) and V (for S) over two shift registers."""

    dim: int
    ancilla_dim: int
    shift_dim: int
    unitary_t: np.ndarray
    unitary_s: np.ndarray
    omega: np.ndarray
    horizon: int

    def __post_init__(self):
        if self.horizon != self.shift_dim - 1:
            raise ValueError("horizon must equal shift_dim - 1")
        n = self.dim * self.ancilla_dim * self.shift_dim * self.shift_dim
        u = frozen_matrix(self.unitary_t)
        v = frozen_matrix(self.unitary_s)
        w = frozen_matrix(self.omega)
        if u.shape != (n, n) or v.shape != (n, n):
            raise ValueError("control unitaries have inconsistent shape")
        if not (is_unitary(u) and is_unitary(v)):
            raise ValueError("control operators are not unitary within 1e-10")
        anc = self.ancilla_dim * self.shift_dim * self.shift_dim
        if w.shape != (anc, anc) or not is_pure_state(w):
            raise ValueError("ancilla state must be pure on K~ (x) Z_L (x) Z_L")
        object.__setattr__(self, "unitary_t", u)
        object.__setattr__(self, "unitary_s", v)
        object.__setattr__(self, "omega", w)

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (self.dim, self.ancilla_dim, self.shift_dim, self.shift_dim)


def _word_unitaries(t: KrausChannel, s: KrausChannel, n_steps: int, tol: float):
    """U_(M,k) dilating T^k S^(M-k) for 1 <= M <= N, 0 <= k <= M; the
    underlying construction sets every out-of-range index to the identity."""
    d = t.dim_in
    eye = np.eye(d * d * d, dtype=np.complex128)
    table: dict[tuple[int, int], np.ndarray] = {}
    for total in range(1, n_steps + 1):
        for k in range(total + 1):
            word = compose(power(t, k), power(s, total - k))
            table[(total, k)] = stinespring_unitary(word, tol).unitary

    def u_word(total: int, k: int) -> np.ndarray:
        if total < 1 or k < 0 or k > total:
            return eye
        return table[(total, k)]

    return u_word


def build_control_dilation(
    t: KrausChannel,
    s: KrausChannel,
    n_steps: int,
    tol: float = CPTP_ATOL,
    commute_tol: float = COMMUTATION_ATOL,
    max_total_dim: int = DEFAULT_MAX_TOTAL_DIM,
) -> ControlDilation:
    """Assemble U and V over Z_L (x) Z_L, L = N + 1.

    U shifts both registers and applies the diagonal blocks
    U_(m,n) U_(m-1,n-1)^dag; V shifts only the first register with
    blocks U_(n,0) U_(n-1,0)^dag.  Nonnegative words starting from cell
    (0, 0) stay inside the L x L window, so the cyclic truncation is
    exact up to the horizon.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    _require_commuting_pair(t, s, commute_tol)
    require_accepted(t, tol)
    require_accepted(s, tol)

    d = t.dim_in
    shift_dim = n_steps + 1
    total_dim = d * d * d * shift_dim * shift_dim
    if total_dim > max_total_dim:
        raise MemoryGuardError(
            f"total dimension {total_dim} exceeds the guard {max_total_dim}; "
            f"raise the limit to proceed"
        )

    u_word = _word_unitaries(t, s, n_steps, tol)
    block_dim = d * d * d
    eye_block = np.eye(block_dim, dtype=np.complex128)
    eye_shift = np.eye(shift_dim, dtype=np.complex128)

    blocks_t = np.zeros((total_dim, total_dim), dtype=np.complex128)
    for m in range(shift_dim):
        for n in range(shift_dim):
            cell = kron(basis_state(m, shift_dim), basis_state(n, shift_dim))
            blocks_t += kron(u_word(m, n) @ u_word(m - 1, n - 1).conj().T, cell)
    shift_both = kron(eye_block, kron(cyclic_shift(shift_dim), cyclic_shift(shift_dim)))

    blocks_s = np.zeros((total_dim, total_dim), dtype=np.complex128)
    for n in range(shift_dim):
        cell = kron(basis_state(n, shift_dim), eye_shift)
        blocks_s += kron(u_word(n, 0) @ u_word(n - 1, 0).conj().T, cell)
    shift_first = kron(eye_block, kron(cyclic_shift(shift_dim), eye_shift))

    omega = kron(basis_state(0, d * d), kron(basis_state(0, shift_dim), basis_state(0, shift_dim)))
    return ControlDilation(
        dim=d,
        ancilla_dim=d * d,
        shift_dim=shift_dim,
        unitary_t=blocks_t @ shift_both,
        unitary_s=blocks_s @ shift_first,
        omega=omega,
        horizon=n_steps,
    )


def _normalize_sequence(sequence: str | Iterable[str]) -> list[str]:
    steps = list(sequence)
    if any(step not in ("T", "S") for step in steps):
        raise ValueError(f"control sequence must use the alphabet T/S, got {steps!r}")
    return steps


def _word_state(bundle: ControlDilation, rho: np.ndarray, k: int, n_total: int) -> np.ndarray:
    uk = np.linalg.matrix_power(bundle.unitary_t, k)
    vr = np.linalg.matrix_power(bundle.unitary_s, n_total - k)
    word = uk @ vr
    return word @ kron(rho, bundle.omega) @ word.conj().T


def evolve_control(bundle: ControlDilation, rho0, sequence: str | Iterable[str]) -> np.ndarray:
    """Run a control word through the dilation.

    Only the number of T steps matters (the generators commute), so the
    word U^k V^(N-k) reproduces any ordering of the same letters.
    """
    steps = _normalize_sequence(sequence)
    n_total = len(steps)
    if n_total > bundle.horizon:
        raise HorizonError(
            f"sequence of length {n_total} exceeds the bundle horizon {bundle.horizon}"
        )
    rho = check_density_matrix(rho0)
    if rho.shape != (bundle.dim, bundle.dim):
        raise ValueError(f"state of shape {rho.shape} does not match system dim {bundle.dim}")
    k = steps.count("T")
    big = _word_state(bundle, rho, k, n_total)
    return hermitize(partial_trace(big, list(bundle.shape), keep=0))


def verify_control_dilation(
    bundle: ControlDilation,
    t: KrausChannel,
    s: KrausChannel,
    tol: float = DILATION_ATOL,
) -> VerificationReport:
    """Residuals of the word reconstruction for every (N, k) with
    N <= horizon, k <= N, over a full operator basis."""
    for ch in (t, s):
        if ch.picture != SCHROEDINGER or not ch.is_square:
            raise ValueError("verification needs square schroedinger channels")
        if ch.dim_in != bundle.dim:
            raise ValueError(
                f"channel dimension {ch.dim_in} does not match bundle dimension {bundle.dim}"
            )
    units = matrix_units(bundle.dim)
    mt = superoperator_matrix(t)
    ms = superoperator_matrix(s)
    residuals = []
    labels = []
    for n_total in range(bundle.horizon + 1):
        for k in range(n_total + 1):
            oracle = np.linalg.matrix_power(mt, k) @ np.linalg.matrix_power(ms, n_total - k)
            uk = np.linalg.matrix_power(bundle.unitary_t, k)
            vr = np.linalg.matrix_power(bundle.unitary_s, n_total - k)
            word = uk @ vr
            worst = 0.0
            for e in units:
                expected = unvec(oracle @ vec(e))
                big = word @ kron(e, bundle.omega) @ word.conj().T
                actual = partial_trace(big, list(bundle.shape), keep=0)
                worst = max(worst, trace_norm(actual - expected))
            residuals.append(worst)
            labels.append(f"N={n_total},k={k}")
    return VerificationReport(tolerance=tol, residuals=tuple(residuals), labels=tuple(labels))


def word_shift_marginal(bundle: ControlDilation, rho0, k: int, n_total: int) -> np.ndarray:
    """Marginal of the dilated word state on the two shift registers;
    the construction pins it to |e_N><e_N| (x) |e_k><e_k|."""
    if not 0 <= k <= n_total <= bundle.horizon:
        raise HorizonError(f"word (N={n_total}, k={k}) outside the horizon {bundle.horizon}")
    rho = check_density_matrix(rho0)
    big = _word_state(bundle, rho, k, n_total)
    return partial_trace(big, list(bundle.shape), keep=(2, 3))


def verify_reachable_inclusion(
    bundle: ControlDilation,
    t: KrausChannel,
    s: KrausChannel,
    rho0,
    n_steps: int,
    tol: float = DILATION_ATOL,
) -> VerificationReport:
    """Check R_N(rho0) against the projected closed-system words.

    For each k, T^k S^(N-k)(rho0) must match the partial trace of
    U^k V^(N-k) applied to rho0 (x) omega.  Only this inclusion direction
    holds; the closed system reaches strictly more for N > 1.
    """
    if not 0 <= n_steps <= bundle.horizon:
        raise HorizonError(f"N={n_steps} outside the bundle horizon {bundle.horizon}")
    rho = check_density_matrix(rho0)
    residuals = []
    labels = []
    for k in range(n_steps + 1):
        expected = rho
        for _ in range(n_steps - k):
            expected = apply_channel(s, expected)
        for _ in range(k):
            expected = apply_channel(t, expected)
        big = _word_state(bundle, rho, k, n_steps)
        actual = partial_trace(big, list(bundle.shape), keep=0)
        residuals.append(trace_norm(actual - expected))
        labels.append(f"N={n_steps},k={k}")
    return VerificationReport(tolerance=tol, residuals=tuple(residuals), labels=tuple(labels))


def apply_word(t: KrausChannel, s: KrausChannel, rho0, sequence: Sequence[str]) -> np.ndarray:
    """Sequential application of a control word directly to a state
    (the brute-force oracle for the dilation path)."""
    steps = _normalize_sequence(sequence)
    out = check_density_matrix(rho0)
    for step in steps:
        out = apply_channel(t if step == "T" else s, out)
    return hermitize(out)
