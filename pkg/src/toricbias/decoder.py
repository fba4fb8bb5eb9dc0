"""Minimum-weight perfect matching decoder for one or both decoding lattices.

The decoder sees a syndrome and an *assumed* independent-X/Z model; the
actual channel that produced the errors never enters here.  Horizontal
steps are charged ln((1-p_X)/p_X), vertical steps ln((1-p_Z)/p_Z), and
the minimum-total-weight pairing of anyons is realized as L-shaped
paths (horizontal run first, each run along its minimal wrap).

The log-likelihood weight l_H ln(p_X/(1-p_X)) + l_V ln(p_Z/(1-p_Z)) is
negative for sub-half rates; we use the equivalent positive form and
minimize, which selects the same (most probable) pairing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import (
    HORIZONTAL,
    VERTICAL,
    BondConfiguration,
    LatticeGeometry,
    LogicalClass,
    Syndrome,
    extract_syndrome,
    homology_class_unchecked,
    map_errors_to_bonds,
)
from .matching import min_weight_pairs_dense
from .noise import IndependentXZModel, PauliErrorPattern

# Assumed rate of exactly 0 would give an infinite weight and forbid
# moves the matching may need; substitute a tiny rate instead.
ZERO_RATE_EPSILON = 1e-12


@dataclass(frozen=True)
class AssumedWeights:
    """Per-step matching weights derived from the assumed rates."""

    w_h: float
    w_v: float

    @classmethod
    def from_model(cls, assumed: IndependentXZModel) -> "AssumedWeights":
        p_x = max(assumed.p_x, ZERO_RATE_EPSILON)
        p_z = max(assumed.p_z, ZERO_RATE_EPSILON)
        return cls(w_h=math.log((1.0 - p_x) / p_x), w_v=math.log((1.0 - p_z) / p_z))


@dataclass
class Correction:
    """Set of bonds to flip on one lattice (bool per bond, flat layout)."""

    lattice_id: str
    n: int
    flips: np.ndarray

    def as_configuration(self) -> BondConfiguration:
        tau = np.where(self.flips.reshape(-1), -1, 1).astype(np.int8)
        return BondConfiguration(self.lattice_id, self.n, tau)


@dataclass
class DecodeOutcome:
    classes: tuple[LogicalClass, LogicalClass]
    success: bool


def pair_weight(weights: AssumedWeights, l_h: int, l_v: int) -> float:
    """Matching weight of an anyon pair separated by (l_h, l_v)."""
    return l_h * weights.w_h + l_v * weights.w_v


def _pairwise_weights(
    anyons: np.ndarray, n: int, weights: AssumedWeights
) -> np.ndarray:
    d_col = np.abs(anyons[:, 1][:, None] - anyons[:, 1][None, :])
    d_row = np.abs(anyons[:, 0][:, None] - anyons[:, 0][None, :])
    l_h = np.minimum(d_col, n - d_col)
    l_v = np.minimum(d_row, n - d_row)
    return l_h * weights.w_h + l_v * weights.w_v


def _l_path_flips(
    flips: np.ndarray, n: int, a: tuple[int, int], b: tuple[int, int]
) -> None:
    """XOR an L-shaped path (horizontal then vertical run) into ``flips``.

    Each run follows its minimal wrap direction, east/south on ties:
    homology does not depend on the realization, only the endpoints.
    """
    r1, c1 = int(a[0]), int(a[1])
    r2, c2 = int(b[0]), int(b[1])
    east = (c2 - c1) % n
    if east <= n - east:
        for k in range(east):
            flips[r1, (c1 + k) % n, HORIZONTAL] ^= True
    else:
        for k in range(n - east):
            flips[r1, (c1 - 1 - k) % n, HORIZONTAL] ^= True
    south = (r2 - r1) % n
    if south <= n - south:
        for k in range(south):
            flips[(r1 + k) % n, c2, VERTICAL] ^= True
    else:
        for k in range(n - south):
            flips[(r1 - 1 - k) % n, c2, VERTICAL] ^= True


def decode_lattice(
    syndrome: Syndrome,
    assumed: IndependentXZModel,
    geometry: LatticeGeometry,
) -> Correction:
    """MWPM correction for one lattice's syndrome under the assumed model.

    The returned correction annihilates the syndrome: composing it with
    the error configuration yields a closed loop configuration.
    """
    n = geometry.n
    weights = AssumedWeights.from_model(assumed)
    flips = np.zeros((n, n, 2), dtype=bool)
    anyons = syndrome.anyons
    if len(anyons):
        matrix = _pairwise_weights(anyons, n, weights)
        for i, j in min_weight_pairs_dense(matrix):
            _l_path_flips(flips, n, anyons[i], anyons[j])
    return Correction(syndrome.lattice_id, n, flips.reshape(-1))


def decode_and_classify(
    errors: PauliErrorPattern,
    assumed: IndependentXZModel,
    geometry: LatticeGeometry,
) -> DecodeOutcome:
    """Full decoding round: errors -> both lattices -> corrections -> classes.

    Both lattices use the same assumed weights (X errors land on
    horizontal bonds and Z errors on vertical bonds on each lattice).
    Success means the residual loop configuration is trivial on both.
    """
    classes = []
    for config in map_errors_to_bonds(geometry, errors):
        syndrome = extract_syndrome(config)
        correction = decode_lattice(syndrome, assumed, geometry)
        residual = config.compose(correction.as_configuration())
        classes.append(homology_class_unchecked(residual))
    outcome_classes = (classes[0], classes[1])
    return DecodeOutcome(
        classes=outcome_classes,
        success=all(c is LogicalClass.IDENTITY for c in outcome_classes),
    )
