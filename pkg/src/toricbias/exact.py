"""Brute-force oracles at toy lattice sizes.

Exact Ising partition functions by full spin enumeration, a numerical
check of the Kramers-Wannier duality identity (spin sum versus the
closed-loop sum with swapped couplings), and an exact maximum-likelihood
decoder that enumerates every bond configuration consistent with a
syndrome.  Everything here trades cleverness for directness; hard size
caps keep the enumerations honest.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .analytic import CouplingsXZ
from .lattice import (
    HORIZONTAL,
    VERTICAL,
    BondConfiguration,
    LatticeGeometry,
    LogicalClass,
    dual_neighbours,
    extract_syndrome,
    map_errors_to_bonds,
    plaquette_bonds,
    qubit_index,
)
from .noise import IndependentXZModel, PauliErrorPattern

PARTITION_SIZE_LIMIT = 4
MLE_SIZE_LIMIT = 3


class OracleSizeLimitError(ValueError):
    """Lattice too large for exhaustive enumeration."""


def _spin_matrix(count: int) -> np.ndarray:
    """All 2^count spin configurations as a (2^count, count) array of +-1."""
    states = np.arange(1 << count, dtype=np.uint32)
    bits = (states[:, None] >> np.arange(count, dtype=np.uint32)[None, :]) & 1
    return bits.astype(np.float64) * 2.0 - 1.0


def partition_function(config: BondConfiguration, couplings: CouplingsXZ) -> float:
    """Exact Z_0 = sum over spins of exp(sum_q tau_q J_q s_i s_j).

    Spins live on the n^2 dual vertices; each bond couples the spins of
    the two plaquettes it separates, with J_H on horizontal and J_V on
    vertical bonds.
    """
    n = config.n
    if n > PARTITION_SIZE_LIMIT:
        raise OracleSizeLimitError(
            f"partition function capped at n <= {PARTITION_SIZE_LIMIT}, got {n}"
        )
    geometry = LatticeGeometry(n)
    spins = _spin_matrix(geometry.vertex_count)
    energy = np.zeros(len(spins))
    for q in range(geometry.qubit_count):
        a, b = dual_neighbours(geometry, q)
        j = couplings.j_h if q % 2 == HORIZONTAL else couplings.j_v
        energy += float(config.tau[q]) * j * spins[:, a] * spins[:, b]
    return float(np.sum(np.exp(energy)))


def _cycle_space(geometry: LatticeGeometry) -> np.ndarray:
    """All closed bond configurations, as bond-set bitmasks.

    The cycle space of the torus graph has dimension n^2 + 1: all but
    one plaquette boundary, plus one loop winding each way.  Spanning it
    gives every even-parity-at-every-vertex assignment (2^(n^2+1) of
    them) without filtering 2^(2n^2) candidates.
    """
    n = geometry.n
    basis: list[int] = []
    for row in range(n):
        for col in range(n):
            if row == n - 1 and col == n - 1:
                continue
            mask = 0
            for q in plaquette_bonds(geometry, row, col):
                mask |= 1 << q
            basis.append(mask)
    basis.append(sum(1 << qubit_index(geometry, 0, c, HORIZONTAL) for c in range(n)))
    basis.append(sum(1 << qubit_index(geometry, r, 0, VERTICAL) for r in range(n)))

    configs = np.zeros(1, dtype=np.uint64)
    for mask in basis:
        configs = np.concatenate([configs, configs ^ np.uint64(mask)])
    return configs


def duality_identity_check(couplings: CouplingsXZ, n: int) -> float:
    """Relative discrepancy between Z_0 and its dual-form evaluation.

    The direct side is the spin sum with all tau = +1.  The dual side
    sums over closed loop assignments s with couplings swapped between
    the two directions:

        D = sum_{closed s} prod_{H bonds} e^(J_V (1-2 s_q))
                           prod_{V bonds} e^(J_H (1-2 s_q))

    The two agree exactly (normalization factors of 2 cancel) precisely
    when (1 + e^(-2 J_H))(1 + e^(-2 J_V)) = 2, i.e. on the self-dual
    curve sinh(2 J_H) sinh(2 J_V) = 1; away from it they differ.
    """
    if n > PARTITION_SIZE_LIMIT:
        raise OracleSizeLimitError(
            f"duality check capped at n <= {PARTITION_SIZE_LIMIT}, got {n}"
        )
    geometry = LatticeGeometry(n)
    direct = partition_function(BondConfiguration.all_plus("L1", n), couplings)

    h_mask = 0
    v_mask = 0
    for q in range(geometry.qubit_count):
        if q % 2 == HORIZONTAL:
            h_mask |= 1 << q
        else:
            v_mask |= 1 << q
    loops = _cycle_space(geometry)
    h_flips = np.bitwise_count(loops & np.uint64(h_mask)).astype(np.float64)
    v_flips = np.bitwise_count(loops & np.uint64(v_mask)).astype(np.float64)
    n_each = float(geometry.vertex_count)
    dual = float(
        np.sum(
            np.exp(
                couplings.j_v * (n_each - 2.0 * h_flips)
                + couplings.j_h * (n_each - 2.0 * v_flips)
            )
        )
    )
    return abs(direct - dual) / abs(direct)


@dataclass
class ClassProbabilities:
    """Posterior over the four homology classes of the error, one lattice."""

    lattice_id: str
    probabilities: np.ndarray  # shape (4,), indexed by LogicalClass

    def __post_init__(self) -> None:
        self.probabilities = np.asarray(self.probabilities, dtype=float)
        if self.probabilities.shape != (4,):
            raise ValueError("need one probability per homology class")
        if np.any(self.probabilities < 0.0):
            raise ValueError("class probabilities must be nonnegative")
        if abs(float(self.probabilities.sum()) - 1.0) > 1e-12:
            raise ValueError("class probabilities must sum to 1")

    def most_likely(self) -> LogicalClass:
        return LogicalClass(int(np.argmax(self.probabilities)))


@dataclass(frozen=True)
class _MleTables:
    """Per-(n, rates) tables over all 2^(2n^2) bond configurations,
    pre-sorted by syndrome key for O(log) lookup per decode."""

    order: np.ndarray  # config ids sorted by syndrome key
    sorted_keys: np.ndarray
    cut_bits: np.ndarray  # 2-bit homology cut parity per config
    log_prob: np.ndarray  # log p(tau) per config (common offset dropped)


def _config_syndrome_masks(geometry: LatticeGeometry) -> list[int]:
    """Per-bond masks over vertices: which stabilizer parities a flip toggles."""
    n = geometry.n
    masks = []
    for q in range(geometry.qubit_count):
        row, col = (q >> 1) // n, (q >> 1) % n
        if q % 2 == HORIZONTAL:
            ends = ((row, col), (row, (col + 1) % n))
        else:
            ends = ((row, col), ((row + 1) % n, col))
        masks.append(sum(1 << (r * n + c) for r, c in ends))
    return masks


@lru_cache(maxsize=8)
def _mle_tables(n: int, p_x: float, p_z: float) -> _MleTables:
    geometry = LatticeGeometry(n)
    m = geometry.qubit_count
    count = 1 << m
    syn_masks = _config_syndrome_masks(geometry)

    keys = np.zeros(count, dtype=np.uint32)
    cuts = np.zeros(count, dtype=np.uint8)
    log_prob = np.zeros(count)
    ids = np.arange(count, dtype=np.uint32)
    for q in range(m):
        has_bit = (ids >> np.uint32(q)) & 1 == 1
        keys[has_bit] ^= np.uint32(syn_masks[q])
        row, col = (q >> 1) // n, (q >> 1) % n
        cut = 0
        if q % 2 == HORIZONTAL and col == n - 1:
            cut = 1
        elif q % 2 == VERTICAL and row == n - 1:
            cut = 2
        if cut:
            cuts[has_bit] ^= np.uint8(cut)
        p = p_x if q % 2 == HORIZONTAL else p_z
        log_prob[has_bit] += np.log(p) - np.log1p(-p)

    order = np.argsort(keys, kind="stable").astype(np.uint32)
    return _MleTables(
        order=order,
        sorted_keys=keys[order.astype(np.intp)],
        cut_bits=cuts,
        log_prob=log_prob,
    )


def _lattice_class_probabilities(
    config: BondConfiguration, assumed: IndependentXZModel
) -> ClassProbabilities:
    n = config.n
    p_x = max(assumed.p_x, 1e-300)
    p_z = max(assumed.p_z, 1e-300)
    tables = _mle_tables(n, p_x, p_z)

    flips = config.tau < 0
    ref_id = 0
    for q in np.nonzero(flips)[0]:
        ref_id |= 1 << int(q)
    ref_key = np.uint32(0)
    syn_masks = _config_syndrome_masks(LatticeGeometry(n))
    for q in np.nonzero(flips)[0]:
        ref_key ^= np.uint32(syn_masks[int(q)])
    ref_cut = tables.cut_bits[ref_id]

    lo = int(np.searchsorted(tables.sorted_keys, ref_key, side="left"))
    hi = int(np.searchsorted(tables.sorted_keys, ref_key, side="right"))
    candidates = tables.order[lo:hi].astype(np.intp)
    classes = tables.cut_bits[candidates] ^ ref_cut
    logs = tables.log_prob[candidates]

    peak = float(np.max(logs))
    weights = np.exp(logs - peak)
    totals = np.bincount(classes, weights=weights, minlength=4)
    return ClassProbabilities(config.lattice_id, totals / totals.sum())


def mle_class_probabilities(
    errors: PauliErrorPattern,
    assumed: IndependentXZModel,
    geometry: LatticeGeometry,
) -> tuple[ClassProbabilities, ClassProbabilities]:
    """Exact posterior over homology classes, per decoding lattice.

    Enumerates every bond configuration with the observed syndrome,
    weights each by prod_q (1-p_q)^((1+tau)/2) p_q^((1-tau)/2) under the
    assumed rates (accumulated in log space), and buckets by the class
    of its difference from the actual error configuration — so index
    IDENTITY is the probability that correction succeeds.
    """
    if geometry.n > MLE_SIZE_LIMIT:
        raise OracleSizeLimitError(
            f"exact MLE capped at n <= {MLE_SIZE_LIMIT}, got {geometry.n}"
        )
    config1, config2 = map_errors_to_bonds(geometry, errors)
    return (
        _lattice_class_probabilities(config1, assumed),
        _lattice_class_probabilities(config2, assumed),
    )


def mle_decode_success(
    errors: PauliErrorPattern,
    assumed: IndependentXZModel,
    geometry: LatticeGeometry,
) -> bool:
    """True when the most likely class is the trivial one on both lattices."""
    probs1, probs2 = mle_class_probabilities(errors, assumed, geometry)
    return (
        probs1.most_likely() is LogicalClass.IDENTITY
        and probs2.most_likely() is LogicalClass.IDENTITY
    )
