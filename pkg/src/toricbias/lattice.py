"""Geometry of the n x n periodic rotated toric code.

Qubits sit on the edges of an n x n square lattice with periodic
boundaries (2n^2 qubits).  Decoding happens independently on two square
lattices L1 and L2 carrying +-1 bond variables; anyons live on lattice
vertices and logical content is read off from two fixed torus cuts.

Linear bond/qubit index layout: ``2*(row*n + col) + edge_type`` with
edge_type 0 = horizontal, 1 = vertical.  A horizontal bond at (r, c)
joins vertices (r, c)-(r, c+1); a vertical bond joins (r, c)-(r+1, c).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import IO, Iterable, TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .noise import PauliErrorPattern

HORIZONTAL = 0
VERTICAL = 1

L1 = "L1"
L2 = "L2"


class InvalidPatternError(ValueError):
    """Error pattern indexed inconsistently with the lattice geometry."""


class OpenConfigurationError(ValueError):
    """Operation requires a closed (syndrome-free) bond configuration."""


class LogicalClass(IntEnum):
    """Homology class of a closed bond configuration on one lattice.

    Encoded as two cut-parity bits: bit 0 is the parity of flipped
    horizontal bonds crossing the vertical cut (between columns n-1 and
    0), bit 1 the parity of flipped vertical bonds crossing the
    horizontal cut (between rows n-1 and 0).  Composition is XOR, so the
    classes form the group Z2 x Z2.
    """

    IDENTITY = 0
    LOGICAL1 = 1
    LOGICAL2 = 2
    BOTH = 3

    def compose(self, other: "LogicalClass") -> "LogicalClass":
        return LogicalClass(int(self) ^ int(other))


@dataclass(frozen=True)
class LatticeGeometry:
    """An n x n periodic lattice; one of these is shared by L1 and L2."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"lattice size must be >= 2, got {self.n}")

    @property
    def qubit_count(self) -> int:
        return 2 * self.n * self.n

    @property
    def vertex_count(self) -> int:
        return self.n * self.n


def qubit_index(geometry: LatticeGeometry, row: int, col: int, edge_type: int) -> int:
    """Linear index of the qubit/bond at (row, col) with the given edge type."""
    n = geometry.n
    return 2 * ((row % n) * n + (col % n)) + edge_type


def qubit_coords(geometry: LatticeGeometry, index: int) -> tuple[int, int, int]:
    """Inverse of :func:`qubit_index`: (row, col, edge_type)."""
    if not 0 <= index < geometry.qubit_count:
        raise InvalidPatternError(f"qubit index {index} out of range for n={geometry.n}")
    edge_type = index & 1
    cell = index >> 1
    return cell // geometry.n, cell % geometry.n, edge_type


@dataclass
class BondConfiguration:
    """+-1 bond variables tau on one decoding lattice.

    ``tau`` is a flat int8 array of length 2n^2 following the linear
    bond index layout; all +1 is the no-error configuration.
    """

    lattice_id: str
    n: int
    tau: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.tau = np.asarray(self.tau, dtype=np.int8)
        if self.tau.shape != (2 * self.n * self.n,):
            raise ValueError("tau must have one entry per bond (2n^2)")
        if not np.all(np.abs(self.tau) == 1):
            raise ValueError("tau entries must be exactly +-1")

    @classmethod
    def all_plus(cls, lattice_id: str, n: int) -> "BondConfiguration":
        return cls(lattice_id, n, np.ones(2 * n * n, dtype=np.int8))

    def flips(self) -> np.ndarray:
        """Boolean (n, n, 2) view: True where tau = -1."""
        return (self.tau < 0).reshape(self.n, self.n, 2)

    def compose(self, other: "BondConfiguration") -> "BondConfiguration":
        """Elementwise product (XOR of flip sets)."""
        if other.n != self.n or other.lattice_id != self.lattice_id:
            raise ValueError("configurations live on different lattices")
        return BondConfiguration(self.lattice_id, self.n, self.tau * other.tau)


@dataclass
class Syndrome:
    """Anyon positions (vertices with -1 stabilizer parity) on one lattice."""

    lattice_id: str
    n: int
    anyons: np.ndarray  # (k, 2) int array of (row, col), lexicographically sorted

    def __post_init__(self) -> None:
        self.anyons = np.asarray(self.anyons, dtype=np.int64).reshape(-1, 2)
        if len(self.anyons) % 2 != 0:
            raise ValueError("anyon count must be even on a torus")

    def __len__(self) -> int:
        return len(self.anyons)


def map_errors_to_bonds(
    geometry: LatticeGeometry, errors: "PauliErrorPattern"
) -> tuple[BondConfiguration, BondConfiguration]:
    """Translate a Pauli error pattern into bond flips on L1 and L2.

    Assignment per qubit: a vertical-edge qubit sends X to L2 and Z to
    L1; a horizontal-edge qubit sends X to L1 and Z to L2.  On each
    decoding lattice every X-induced flip lands on a horizontal bond and
    every Z-induced flip on a vertical bond, at the qubit's (row, col).
    """
    n = geometry.n
    x_flags = np.asarray(errors.x_flags, dtype=bool)
    z_flags = np.asarray(errors.z_flags, dtype=bool)
    if x_flags.shape != (geometry.qubit_count,) or z_flags.shape != (geometry.qubit_count,):
        raise InvalidPatternError(
            f"pattern has wrong length for n={n} (expected {geometry.qubit_count})"
        )

    x_q = x_flags.reshape(n, n, 2)
    z_q = z_flags.reshape(n, n, 2)

    flips1 = np.zeros((n, n, 2), dtype=bool)
    flips2 = np.zeros((n, n, 2), dtype=bool)
    # horizontal-edge qubits
    flips1[:, :, HORIZONTAL] ^= x_q[:, :, HORIZONTAL]
    flips2[:, :, VERTICAL] ^= z_q[:, :, HORIZONTAL]
    # vertical-edge qubits
    flips2[:, :, HORIZONTAL] ^= x_q[:, :, VERTICAL]
    flips1[:, :, VERTICAL] ^= z_q[:, :, VERTICAL]

    tau1 = np.where(flips1.reshape(-1), -1, 1).astype(np.int8)
    tau2 = np.where(flips2.reshape(-1), -1, 1).astype(np.int8)
    return (
        BondConfiguration(L1, n, tau1),
        BondConfiguration(L2, n, tau2),
    )


def extract_syndrome(config: BondConfiguration) -> Syndrome:
    """Anyons are the vertices with an odd number of incident -1 bonds."""
    n = config.n
    flips = config.flips()
    h = flips[:, :, HORIZONTAL]
    v = flips[:, :, VERTICAL]
    # vertex (r, c) touches H(r, c), H(r, c-1), V(r, c), V(r-1, c)
    parity = h ^ np.roll(h, 1, axis=1) ^ v ^ np.roll(v, 1, axis=0)
    rows, cols = np.nonzero(parity)
    anyons = np.stack([rows, cols], axis=1)
    return Syndrome(config.lattice_id, n, anyons)


def torus_separation(
    geometry: LatticeGeometry, a: tuple[int, int], b: tuple[int, int]
) -> tuple[int, int]:
    """Minimal (horizontal, vertical) distances between two vertices."""
    n = geometry.n
    d_col = abs(a[1] - b[1]) % n
    d_row = abs(a[0] - b[0]) % n
    return min(d_col, n - d_col), min(d_row, n - d_row)


def homology_class(config: BondConfiguration) -> LogicalClass:
    """Classify a closed bond configuration by its two torus cut parities.

    Raises :class:`OpenConfigurationError` if the configuration has a
    non-empty syndrome (the class is only defined for closed loops).
    """
    syndrome = extract_syndrome(config)
    if len(syndrome) != 0:
        raise OpenConfigurationError(
            f"configuration on {config.lattice_id} has {len(syndrome)} anyons"
        )
    return homology_class_unchecked(config)


def homology_class_unchecked(config: BondConfiguration) -> LogicalClass:
    """Cut parities without the closedness check (caller guarantees it)."""
    n = config.n
    flips = config.flips()
    c_vertical = int(np.count_nonzero(flips[:, n - 1, HORIZONTAL])) & 1
    c_horizontal = int(np.count_nonzero(flips[n - 1, :, VERTICAL])) & 1
    return LogicalClass(c_vertical | (c_horizontal << 1))


def plaquette_bonds(geometry: LatticeGeometry, row: int, col: int) -> list[int]:
    """Bond indices of the stabilizer loop around dual vertex (row, col).

    These are the four bonds bounding the plaquette with corners
    (row, col) .. (row+1, col+1); every lattice vertex touches 0 or 2 of
    them, so flipping all four preserves both syndrome and homology.
    """
    n = geometry.n
    return [
        qubit_index(geometry, row, col, HORIZONTAL),
        qubit_index(geometry, row + 1, col, HORIZONTAL),
        qubit_index(geometry, row, col, VERTICAL),
        qubit_index(geometry, row, col + 1, VERTICAL),
    ]


def bond_endpoints(geometry: LatticeGeometry, index: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """The two lattice vertices joined by a bond."""
    n = geometry.n
    row, col, edge_type = qubit_coords(geometry, index)
    if edge_type == HORIZONTAL:
        return (row, col), (row, (col + 1) % n)
    return (row, col), ((row + 1) % n, col)


def dual_neighbours(geometry: LatticeGeometry, index: int) -> tuple[int, int]:
    """The two dual vertices (plaquette centres, as row*n+col) flanking a bond."""
    n = geometry.n
    row, col, edge_type = qubit_coords(geometry, index)
    if edge_type == HORIZONTAL:
        return ((row - 1) % n) * n + col, row * n + col
    return row * n + (col - 1) % n, row * n + col


def dump_configuration(config: BondConfiguration, stream: IO[str]) -> None:
    """Write the text dump format: a header line, then one tau per line."""
    stream.write(f"# toricbias bond configuration n={config.n} lattice={config.lattice_id}\n")
    for value in config.tau:
        stream.write(f"{int(value)}\n")


def load_configuration(stream: IO[str]) -> BondConfiguration:
    """Read the format written by :func:`dump_configuration`."""
    header = stream.readline().strip()
    fields = dict(
        part.split("=", 1) for part in header.lstrip("# ").split() if "=" in part
    )
    try:
        n = int(fields["n"])
        lattice_id = fields["lattice"]
    except KeyError as exc:
        raise ValueError(f"malformed dump header: {header!r}") from exc
    values = [int(line) for line in stream if line.strip()]
    return BondConfiguration(lattice_id, n, np.array(values, dtype=np.int8))
