"""Error channels: sampling of actual errors, representation of assumed rates.

Two channel families are supported: independent X/Z flips with rates
(p_x, p_z), and the general single-qubit Pauli channel with rates
(q_x, q_y, q_z).  "Actual" and "assumed" rates are distinct instances of
the same types; nothing here conflates them.

Sampling is counter-based: each (master_seed, stream, trial) triple
deterministically selects an independent Philox stream, so parallel
trials reproduce bit-identically regardless of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import LatticeGeometry


@dataclass(frozen=True)
class IndependentXZModel:
    """Independent X and Z flips per qubit; rates must be in [0, 0.5).

    Rates >= 0.5 are rejected outright: the Ising coupling
    J = ln((1-p)/p)/2 would be non-positive and the whole threshold
    analysis assumes sub-half rates.
    """

    p_x: float
    p_z: float

    def __post_init__(self) -> None:
        for name, rate in (("p_x", self.p_x), ("p_z", self.p_z)):
            if not 0.0 <= rate < 0.5:
                raise ValueError(f"{name}={rate} outside [0, 0.5)")


@dataclass(frozen=True)
class GeneralPauliModel:
    """One of I, X, Y, Z per qubit with probabilities (1-sum, q_x, q_y, q_z)."""

    q_x: float
    q_y: float
    q_z: float

    def __post_init__(self) -> None:
        for name, rate in (("q_x", self.q_x), ("q_y", self.q_y), ("q_z", self.q_z)):
            if rate < 0.0:
                raise ValueError(f"{name}={rate} must be nonnegative")
        if self.q_x + self.q_y + self.q_z >= 1.0:
            raise ValueError("q_x + q_y + q_z must be < 1")

    @property
    def identity_rate(self) -> float:
        return 1.0 - self.q_x - self.q_y - self.q_z


@dataclass(frozen=True)
class RngSeedPolicy:
    """Deterministic per-trial stream selection.

    ``stream`` separates logically distinct consumers (e.g. sweep
    points) sharing one master seed; ``trial`` indexes repetitions.
    """

    master_seed: int
    stream: int = 0
    trial: int = 0

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(
            entropy=self.master_seed, spawn_key=(self.stream, self.trial)
        )
        return np.random.Generator(np.random.Philox(seq))


@dataclass
class PauliErrorPattern:
    """Per-qubit (x_flag, z_flag) pairs; a Y error is both flags at once."""

    x_flags: np.ndarray
    z_flags: np.ndarray

    def __post_init__(self) -> None:
        self.x_flags = np.asarray(self.x_flags, dtype=bool)
        self.z_flags = np.asarray(self.z_flags, dtype=bool)
        if self.x_flags.shape != self.z_flags.shape:
            raise ValueError("x and z flag arrays must have equal length")

    @classmethod
    def clear(cls, geometry: LatticeGeometry) -> "PauliErrorPattern":
        count = geometry.qubit_count
        return cls(np.zeros(count, dtype=bool), np.zeros(count, dtype=bool))

    def weight(self) -> int:
        """Number of qubits carrying any error."""
        return int(np.count_nonzero(self.x_flags | self.z_flags))


def sample_xz(
    model: IndependentXZModel,
    geometry: LatticeGeometry,
    seed_policy: RngSeedPolicy,
) -> PauliErrorPattern:
    """Independent Bernoulli(p_x) / Bernoulli(p_z) draws per qubit."""
    rng = seed_policy.generator()
    count = geometry.qubit_count
    x_flags = rng.random(count) < model.p_x
    z_flags = rng.random(count) < model.p_z
    return PauliErrorPattern(x_flags, z_flags)


def sample_general(
    model: GeneralPauliModel,
    geometry: LatticeGeometry,
    seed_policy: RngSeedPolicy,
) -> PauliErrorPattern:
    """Exactly one of I/X/Y/Z per qubit; Y sets both flags."""
    rng = seed_policy.generator()
    u = rng.random(geometry.qubit_count)
    x_flags = u < model.q_x + model.q_y
    z_flags = (u >= model.q_x) & (u < model.q_x + model.q_y + model.q_z)
    return PauliErrorPattern(x_flags, z_flags)


def xz_to_general(p_x: float, p_z: float) -> GeneralPauliModel:
    """Composition of independent X and Z channels as a general Pauli channel:
    q_x = p_x(1-p_z), q_z = p_z(1-p_x), q_y = p_x*p_z.
    """
    return GeneralPauliModel(
        q_x=p_x * (1.0 - p_z),
        q_y=p_x * p_z,
        q_z=p_z * (1.0 - p_x),
    )
