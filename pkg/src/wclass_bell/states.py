"""W-class three-qubit states in the single- and double-excitation sectors.

A state is three complex amplitudes attached to a fixed basis triple.  For the
single-excitation sector the triple is ``(|001>, |010>, |100>)``.  The double
sector uses the bit-flipped triple ``(|110>, |101>, |011>)``, so the same
amplitude tuple describes mirror-image states in the two sectors and every
probability-level formula is shared between them.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from . import linalg
from .errors import ContractError, InvalidStateError, ValidationError

NORM_TOL = 1e-12
CHUNK_SIZE = 1 << 15
_MASK64 = (1 << 64) - 1


class Sector(str, enum.Enum):
    SINGLE = "single"
    DOUBLE = "double"

    @property
    def basis(self) -> tuple[int, int, int]:
        """Basis indices (binary, qubit 1 most significant) carrying the amplitudes."""
        return _BASIS[self]

    @property
    def mirror(self) -> "Sector":
        return Sector.DOUBLE if self is Sector.SINGLE else Sector.SINGLE


_BASIS = {
    Sector.SINGLE: (0b001, 0b010, 0b100),
    Sector.DOUBLE: (0b110, 0b101, 0b011),
}


class PairId(NamedTuple):
    i: int
    j: int

    @property
    def traced(self) -> int:
        """Label of the qubit that is traced out to obtain this pair."""
        return 6 - self.i - self.j

    def __str__(self) -> str:
        return f"{self.i}{self.j}"


PAIRS = (PairId(1, 2), PairId(1, 3), PairId(2, 3))


def as_pair(pair) -> PairId:
    i, j = sorted(int(x) for x in pair)
    if (i, j) not in PAIRS:
        raise ContractError(f"invalid qubit pair {pair!r}")
    return PairId(i, j)


@dataclass(frozen=True)
class Probabilities:
    """Occupation probabilities of the three basis kets, in basis-triple order."""

    p_a: float
    p_b: float
    p_c: float

    def __post_init__(self):
        vals = (self.p_a, self.p_b, self.p_c)
        if any(not np.isfinite(v) or v < -NORM_TOL or v > 1 + NORM_TOL for v in vals):
            raise ValidationError(f"probabilities out of [0, 1]: {vals}")
        if abs(sum(vals) - 1.0) > NORM_TOL:
            raise ValidationError(f"probabilities sum to {sum(vals)!r}, not 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.p_a, self.p_b, self.p_c])


@dataclass(frozen=True)
class WClassState:
    amps: tuple[complex, complex, complex]
    sector: Sector = Sector.SINGLE

    def ket(self) -> np.ndarray:
        psi = np.zeros(8, dtype=complex)
        psi[list(self.sector.basis)] = self.amps
        return psi


def make_state(amps, sector=Sector.SINGLE, renormalize: bool = False) -> WClassState:
    """Build a state from three amplitudes.

    Without ``renormalize`` the amplitudes must already have unit norm.
    """
    sector = Sector(sector)
    vec = np.asarray(amps, dtype=complex).reshape(-1)
    if vec.shape != (3,):
        raise ContractError(f"expected three amplitudes, got {vec.size}")
    if not np.all(np.isfinite(vec)):
        raise ValidationError("amplitudes must be finite")
    norm = float(np.sqrt(np.sum(np.abs(vec) ** 2)))
    if norm == 0.0:
        raise InvalidStateError("zero vector is not a state")
    if renormalize:
        vec = vec / norm
    elif abs(norm**2 - 1.0) > NORM_TOL:
        raise ValidationError(f"amplitudes have squared norm {norm**2!r}; pass renormalize=True")
    return WClassState(tuple(complex(z) for z in vec), sector)


def to_density(state: WClassState) -> np.ndarray:
    psi = state.ket()
    return np.outer(psi, np.conj(psi))


def reduce(state: WClassState, pair) -> np.ndarray:
    """Two-qubit reduced density matrix of ``pair``, the third qubit traced out."""
    pair = as_pair(pair)
    return linalg.partial_trace(to_density(state), pair.traced)


def probabilities(state: WClassState) -> Probabilities:
    p = np.abs(np.asarray(state.amps)) ** 2
    return Probabilities(*(float(x) for x in p))


def dual_state(state: WClassState) -> WClassState:
    """Carry the amplitudes to the other sector by exchanging 0 and 1 on every qubit."""
    return WClassState(state.amps, state.sector.mirror)


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def chunk_seed(seed: int, chunk: int) -> int:
    """Seed for chunk ``chunk`` of a run seeded with ``seed``."""
    return splitmix64((int(seed) & _MASK64) ^ int(chunk))


def chunk_bounds(n: int, chunk_size: int = CHUNK_SIZE) -> list[tuple[int, int, int]]:
    """``(chunk_index, start, stop)`` for a run of ``n`` samples."""
    return [(c, s, min(s + chunk_size, n)) for c, s in enumerate(range(0, n, chunk_size))]


def sample_chunk(seed: int, chunk: int, size: int) -> np.ndarray:
    """Amplitudes ``(size, 3)`` for one chunk.

    Probabilities are the spacings of two sorted uniforms (flat on the
    simplex); each amplitude gets an independent uniform phase.
    """
    rng = np.random.default_rng(chunk_seed(seed, chunk))
    u = np.sort(rng.random((size, 2)), axis=1)
    p = np.column_stack([u[:, 0], u[:, 1] - u[:, 0], 1.0 - u[:, 1]])
    phase = rng.random((size, 3)) * (2.0 * np.pi)
    return np.sqrt(p) * np.exp(1j * phase)


def sample_amplitudes(n: int, seed: int, chunk_size: int = CHUNK_SIZE) -> np.ndarray:
    """All ``n`` sampled amplitude triples, concatenated in chunk order."""
    if n <= 0:
        return np.zeros((0, 3), dtype=complex)
    return np.concatenate(
        [sample_chunk(seed, c, stop - start) for c, start, stop in chunk_bounds(n, chunk_size)]
    )


def sample_states(n: int, seed: int, sector=Sector.SINGLE) -> Iterator[WClassState]:
    sector = Sector(sector)
    for c, start, stop in chunk_bounds(max(n, 0)):
        for amps in sample_chunk(seed, c, stop - start):
            yield WClassState(tuple(complex(z) for z in amps), sector)


def kets(amps: np.ndarray, sector=Sector.SINGLE) -> np.ndarray:
    """Stack of 8-dim state vectors for an ``(m, 3)`` amplitude array."""
    amps = np.asarray(amps, dtype=complex)
    psi = np.zeros(amps.shape[:-1] + (8,), dtype=complex)
    psi[..., list(Sector(sector).basis)] = amps
    return psi


def densities(amps: np.ndarray, sector=Sector.SINGLE) -> np.ndarray:
    psi = kets(amps, sector)
    return psi[..., :, None] * np.conj(psi[..., None, :])


def reduced_densities(amps: np.ndarray, sector=Sector.SINGLE) -> np.ndarray:
    """Reduced matrices ``(m, 3, 4, 4)`` for pairs 12, 13, 23 of every state."""
    rho = densities(amps, sector)
    return np.stack([linalg.reduce_qubits(rho, pair) for pair in PAIRS], axis=-3)
