"""Canonical channel corpus used by the tests and the fixtures command."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .channels import (
    KrausChannel,
    convex_combine,
    identity_channel,
    power,
    random_channel,
    unitary_channel,
)
from .linalg import basis_state

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

# Seed for the deterministic commuting-pair fixture.
COMMUTING_FIXTURE_SEED = 271828


def amplitude_damping(gamma: float) -> KrausChannel:
    """K0 = diag(1, sqrt(1-gamma)), K1 = sqrt(gamma) |0><1|."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    k0 = np.diag([1.0, math.sqrt(1.0 - gamma)]).astype(np.complex128)
    k1 = np.zeros((2, 2), dtype=np.complex128)
    k1[0, 1] = math.sqrt(gamma)
    return KrausChannel(2, 2, (k0, k1))


def transpose_channel() -> KrausChannel:
    """The qubit transpose map, (1/2)(I.I + X.X - Y.Y + Z.Z).

    Trace preserving but not completely positive: its Choi operator is the
    SWAP with eigenvalues +-1, the canonical rejection fixture."""
    eye = np.eye(2, dtype=np.complex128)
    return KrausChannel(
        2, 2, (eye, PAULI_X, PAULI_Y, PAULI_Z), coefficients=(0.5, 0.5, -0.5, 0.5)
    )


def rotation_channel(period: int) -> KrausChannel:
    """Conjugation by diag(1, exp(2 pi i / (period - 1))).

    The (period-1)-st power is the identity, so the channel satisfies
    T^period == T with no smaller cycle for period >= 3."""
    if period < 2:
        raise ValueError("period must be at least 2")
    if period == 2:
        return identity_channel(2)
    phase = np.exp(2j * np.pi / (period - 1))
    return unitary_channel(np.diag([1.0, phase]).astype(np.complex128))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with the phase convention fixed."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_commuting_pair(dim: int, seed: int, degree: int = 3) -> tuple[KrausChannel, KrausChannel]:
    """Two mixtures of powers of one random channel; polynomials in the
    same map commute exactly."""
    rng = np.random.default_rng(seed)
    base = random_channel(dim, rank=2, seed=seed)
    powers = [power(base, i) for i in range(degree + 1)]

    def mixture() -> KrausChannel:
        w = rng.random(degree + 1)
        w /= w.sum()
        return convex_combine(powers, w)

    return mixture(), mixture()


def pure_state(index: int, dim: int = 2) -> np.ndarray:
    return basis_state(index, dim)


def plus_state() -> np.ndarray:
    return np.full((2, 2), 0.5, dtype=np.complex128)


def fixture_channels() -> dict[str, KrausChannel]:
    """The deterministic corpus: name -> channel.  Everything except the
    transpose map passes certification."""
    corpus: dict[str, KrausChannel] = {
        "identity": identity_channel(2),
        "pauli_x": unitary_channel(PAULI_X),
        "pauli_y": unitary_channel(PAULI_Y),
        "pauli_z": unitary_channel(PAULI_Z),
        "transpose": transpose_channel(),
    }
    for gamma in (0.1, 0.3, 0.5):
        corpus[f"amplitude_damping_{gamma}"] = amplitude_damping(gamma)
    for period in (3, 4, 6):
        corpus[f"rotation_m{period}"] = rotation_channel(period)
    pair = random_commuting_pair(2, COMMUTING_FIXTURE_SEED)
    corpus["commuting_a"], corpus["commuting_b"] = pair
    return corpus


def fixture_states() -> dict[str, np.ndarray]:
    return {
        "ground": pure_state(0),
        "excited": pure_state(1),
        "plus": plus_state(),
    }


def write_fixture_corpus(out_dir: str | Path) -> list[Path]:
    """Write the corpus as channel_*.json / state_*.json; byte deterministic."""
    from .serialize import save_channel, save_state

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, ch in sorted(fixture_channels().items()):
        path = out / f"channel_{name}.json"
        save_channel(path, ch)
        written.append(path)
    for name, rho in sorted(fixture_states().items()):
        path = out / f"state_{name}.json"
        save_state(path, rho)
        written.append(path)
    return written
