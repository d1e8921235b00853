"""DCP instances, phase vectors and the elementary measurements.

Phases are integer exponents of omega_N. A single-label vector with label k and
offset o is the qubit (|0> + w^(s*k + o)|1>)/sqrt(2). A vector with l >= 2 labels
is (1/sqrt(l)) * sum_i w^(s*k_i + o_i)|i>.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import cos, pi, sin
from typing import List, Optional, Sequence

import numpy as np

MIN_N = 4


def make_rng(seed) -> np.random.Generator:
    """Deterministic generator; accepts an int seed or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def bit_length(N: int) -> int:
    """n = ceil(log2 N)."""
    return (int(N) - 1).bit_length()


@dataclass
class PhaseVector:
    labels: List[int]
    phase_offsets: List[int]
    N: int

    def __post_init__(self):
        self.labels = [int(x) for x in self.labels]
        self.phase_offsets = [int(x) for x in self.phase_offsets]
        if not self.labels:
            raise ValueError("phase vector needs at least one label")
        if len(self.labels) != len(self.phase_offsets):
            raise ValueError("labels and phase_offsets differ in length")
        for x in self.labels + self.phase_offsets:
            if not 0 <= x < self.N:
                raise ValueError(f"value {x} outside [0, {self.N})")

    @classmethod
    def single(cls, k: int, N: int, offset: int = 0) -> "PhaseVector":
        return cls([k % N], [offset % N], N)

    def __len__(self):
        return len(self.labels)

    @property
    def is_qubit(self) -> bool:
        return len(self.labels) == 1

    def as_multilabel(self) -> "PhaseVector":
        """A qubit |psi_k> is the two-label vector with labels (0, k)."""
        if not self.is_qubit:
            return self
        return PhaseVector([0, self.labels[0]], [0, self.phase_offsets[0]], self.N)

    def normalized(self) -> "PhaseVector":
        """Rotate the global phase so that phase_offsets[0] == 0."""
        if self.is_qubit:
            return self
        o0 = self.phase_offsets[0]
        return PhaseVector(self.labels, [(o - o0) % self.N for o in self.phase_offsets], self.N)


@dataclass
class DcpInstance:
    N: int
    s: int = field(repr=False)
    rng_seed: int = 0
    query_counter: int = 0

    def __post_init__(self):
        if self.N < MIN_N:
            raise ValueError(f"N must be >= {MIN_N}")
        if not 0 <= self.s < self.N:
            raise ValueError("secret out of range")
        self._rng = np.random.default_rng(self.rng_seed)

    @property
    def n(self) -> int:
        return bit_length(self.N)

    def sample_phase_vector(self) -> PhaseVector:
        return sample_phase_vector(self)

    def reveal_secret(self) -> int:
        """Test-only accessor, used to check a recovered value."""
        return self.s


def new_instance(N: int, s: Optional[int] = None, seed: int = 0) -> DcpInstance:
    N = int(N)
    if N < MIN_N:
        raise ValueError(f"N must be >= {MIN_N}")
    if s is None:
        # secret drawn from a stream separate from the oracle stream
        s = int(np.random.default_rng([seed, 1]).integers(N))
    elif not 0 <= s < N:
        raise ValueError("secret out of range")
    return DcpInstance(N=N, s=int(s), rng_seed=seed)


def sample_phase_vector(inst: DcpInstance) -> PhaseVector:
    """One oracle query: QFT-and-measure on a coset state leaves |psi_k>, k uniform."""
    k = int(inst._rng.integers(inst.N))
    inst.query_counter += 1
    return PhaseVector([k], [0], inst.N)


def sample_labels(inst: DcpInstance, count: int) -> np.ndarray:
    """Vectorised form of `count` queries; returns the labels only."""
    ks = inst._rng.integers(inst.N, size=count)
    inst.query_counter += int(count)
    return ks.astype(np.int64)


# Device-side hooks. These are the only places where the secret enters, as it
# would on real hardware through the measured state.

def device_phase(inst: DcpInstance, label: int, offset: int = 0) -> int:
    return (inst.s * int(label) + int(offset)) % inst.N


def hadamard_zero_probability(inst: DcpInstance, pv: PhaseVector) -> float:
    if not pv.is_qubit:
        raise ValueError("Hadamard measurement needs a single-label vector")
    e = device_phase(inst, pv.labels[0], pv.phase_offsets[0])
    return cos(pi * e / inst.N) ** 2


def measure_hadamard(inst: DcpInstance, pv: PhaseVector, rng) -> int:
    """Hadamard then measure: 0 with probability cos^2(pi (k s + offset) / N)."""
    p0 = hadamard_zero_probability(inst, pv)
    return 0 if make_rng(rng).random() < p0 else 1


def measure_quarter_turn(inst: DcpInstance, pv: PhaseVector, rng) -> int:
    """Measure in the (|0> +- i|1>) basis: 0 with probability (1 + sin(2 pi (k s + offset) / N)) / 2."""
    if not pv.is_qubit:
        raise ValueError("basis measurement needs a single-label vector")
    e = device_phase(inst, pv.labels[0], pv.phase_offsets[0])
    p0 = 0.5 * (1.0 + sin(2 * pi * e / inst.N))
    return 0 if make_rng(rng).random() < p0 else 1


def correct_offset(pv: PhaseVector) -> PhaseVector:
    """Apply the known phase gate diag(1, w^-offset) to a qubit."""
    if not pv.is_qubit:
        raise ValueError("offset correction needs a single-label vector")
    return PhaseVector([pv.labels[0]], [0], pv.N)


def label_histogram(labels: Sequence[int], N: int) -> np.ndarray:
    return np.bincount(np.asarray(labels, dtype=np.int64), minlength=N)
