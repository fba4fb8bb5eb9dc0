"""Closed-form machinery for the random-bond Ising model critical surface.

Couplings from rates, Kramers-Wannier self-duality, replica vectors and
the factorized critical-point ansatz, its n -> 0 limit (an entropy
equation), the homogeneous reduction for mismatched decoding, the
nearest-neighbour renormalization correction, and the generalized
X/Y/Z-channel analogues.  Everything here is a pure function; all roots
are found by bisection on verified sign-change brackets.

Throughout, 0*log(0) is taken as 0 (entropy convention), and base-2
logarithms are used for the entropy equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .noise import GeneralPauliModel

# Literature value for the RBIM multicritical point (optimal symmetric
# threshold).  Reference only: the zero-order ansatz root is ~0.110028
# and deliberately not this number.
P_C_MULTICRITICAL = 0.1092

BISECTION_TOLERANCE = 1e-10


class CouplingDomainError(ValueError):
    """Rates outside the domain where couplings are finite and positive."""


class InfiniteCouplingError(CouplingDomainError):
    """A zero channel probability makes a generalized coupling infinite."""


def _xlog2(x: float) -> float:
    if x < 0.0:
        raise CouplingDomainError(f"log2 of negative value {x}")
    if x == 0.0:
        return 0.0
    return x * math.log2(x)


@dataclass(frozen=True)
class CouplingsXZ:
    """Anisotropic Ising couplings; J = ln((1-p)/p)/2 per direction."""

    j_h: float
    j_v: float


@dataclass(frozen=True)
class CouplingsXYZ:
    """Couplings of the generalized model, including the 4-spin J_Y term."""

    j_h: float
    j_v: float
    j_y: float


def couplings_from_rates_xz(p_x: float, p_z: float) -> CouplingsXZ:
    for name, p in (("p_x", p_x), ("p_z", p_z)):
        if not 0.0 < p < 0.5:
            raise CouplingDomainError(f"{name}={p} outside (0, 0.5)")
    return CouplingsXZ(
        j_h=0.5 * math.log((1.0 - p_x) / p_x),
        j_v=0.5 * math.log((1.0 - p_z) / p_z),
    )


def rates_from_couplings_xz(couplings: CouplingsXZ) -> tuple[float, float]:
    """Inverse map: p = 1 / (1 + e^(2J))."""
    return (
        1.0 / (1.0 + math.exp(2.0 * couplings.j_h)),
        1.0 / (1.0 + math.exp(2.0 * couplings.j_v)),
    )


def self_dual_check_xz(couplings: CouplingsXZ) -> float:
    """Residual of the self-duality condition e^(-2J_H) = tanh(J_V).

    Zero exactly on the anisotropic critical curve
    sinh(2J_H) sinh(2J_V) = 1.
    """
    return math.exp(-2.0 * couplings.j_h) - math.tanh(couplings.j_v)


def self_dual_component_residuals(couplings: CouplingsXZ) -> tuple[float, ...]:
    """The four componentwise conditions pairing u with the dual u*.

    A horizontal edge of the lattice is a vertical edge of its dual, so
    u_H is compared against the starred vertical weights and vice versa.
    All four vanish together only at the isotropic self-dual point.
    """
    j_h, j_v = couplings.j_h, couplings.j_v
    sqrt2 = math.sqrt(2.0)
    return (
        math.exp(j_h) - sqrt2 * math.cosh(j_v),
        math.exp(-j_h) - sqrt2 * math.sinh(j_v),
        math.exp(j_v) - sqrt2 * math.cosh(j_h),
        math.exp(-j_v) - sqrt2 * math.sinh(j_h),
    )


@dataclass(frozen=True)
class ReplicaVector:
    """Disorder-averaged n-copy bond weights for one lattice direction.

    ``x[k]`` is the average of the direct weight over the bond sign when
    k of the n copies carry a -1, ``x_star[k]`` the average of the dual
    weight.  The bond is clean with probability 1 - p_actual and flipped
    with probability p_actual:

        x[k]      = (1-p) e^((n-2k)J) + p e^(-(n-2k)J)
        x_star[k] = 2^(n/2) cosh(J)^n tanh(J)^k ((1-p) + (-1)^k p)
    """

    n: int
    x: np.ndarray
    x_star: np.ndarray


def replica_vectors(n: int, p_actual: float, j: float) -> ReplicaVector:
    if n < 1:
        raise ValueError(f"replica count must be >= 1, got {n}")
    k = np.arange(n + 1, dtype=float)
    exponent = (n - 2.0 * k) * j
    x = (1.0 - p_actual) * np.exp(exponent) + p_actual * np.exp(-exponent)
    signs = np.where(k.astype(int) % 2 == 0, 1.0, -1.0)
    x_star = (
        2.0 ** (n / 2.0)
        * math.cosh(j) ** n
        * np.tanh(j) ** k
        * ((1.0 - p_actual) + signs * p_actual)
    )
    return ReplicaVector(n=n, x=x, x_star=x_star)


def replica_conjecture_residual(
    n: int,
    actual: tuple[float, float],
    assumed: tuple[float, float],
) -> float:
    """Finite-n residual of the factorized criticality ansatz
    x0^H x0^V = x0*^H x0*^V, with couplings from the assumed rates and
    disorder from the actual rates.
    """
    couplings = couplings_from_rates_xz(*assumed)
    vec_h = replica_vectors(n, actual[0], couplings.j_h)
    vec_v = replica_vectors(n, actual[1], couplings.j_v)
    return float(
        vec_h.x[0] * vec_v.x[0] - vec_h.x_star[0] * vec_v.x_star[0]
    )


def zero_order_critical(
    actual: tuple[float, float], assumed: tuple[float, float]
) -> float:
    """Residual of the n -> 0 criticality equation.

    The critical surface is the zero set of

        pt_H log2 p_H + (1-pt_H) log2(1-p_H)
      + pt_V log2 p_V + (1-pt_V) log2(1-p_V) + 1

    where pt are actual and p assumed rates.  In the matched case this
    is the quantum Hamming bound.  A vanishing actual rate zeroes the
    corresponding log term even when the assumed rate is also 0
    (0 * log 0 = 0, so the p_tilde = 0 boundary slice is well defined).
    """

    def direction(pt: float, p: float) -> float:
        if not 0.0 <= p < 1.0:
            raise CouplingDomainError(f"assumed rate {p} outside [0, 1)")
        term = 0.0
        if pt > 0.0:
            if p == 0.0:
                raise CouplingDomainError("assumed rate 0 with nonzero actual rate")
            term += pt * math.log2(p)
        return term + (1.0 - pt) * math.log2(1.0 - p)

    pt_h, pt_v = actual
    p_h, p_v = assumed
    return direction(pt_h, p_h) + direction(pt_v, p_v) + 1.0


def homogeneous_reduction(actual: tuple[float, float]) -> tuple[float, float]:
    """Effective homogeneous system for a symmetric-assumption decoder.

    Returns (p_tilde, p) with 2 p_tilde = pt_X + pt_Z and
    (1-2p)^2 = (1-2 pt_X)(1-2 pt_Z).  By AM-GM the coupling-side rate
    always satisfies p >= p_tilde (equality only when pt_X = pt_Z), so
    the effective system sits on or above the Nishimori line: the
    coupling is weaker than matched knowledge of the averaged disorder
    would dictate.
    """
    pt_x, pt_z = actual
    p_tilde = 0.5 * (pt_x + pt_z)
    p = 0.5 * (1.0 - math.sqrt((1.0 - 2.0 * pt_x) * (1.0 - 2.0 * pt_z)))
    return p_tilde, p


def symmetric_assumption_threshold() -> float:
    """Sum-rate bound pt_X + pt_Z < 2 p_C for the symmetric assumption
    (report overlay; uses the literature multicritical constant)."""
    return 2.0 * P_C_MULTICRITICAL


def first_order_a(r: float, s: float, n: int, m: int) -> float:
    """Nearest-neighbour expansion coefficient a_nm(r, s)."""
    value = (
        r**n * s**m * (1.0 - r) ** (2 - n) * (1.0 - s) ** (2 - m)
        + (1.0 - r) ** n * (1.0 - s) ** m * r ** (2 - n) * s ** (2 - m)
    )
    if value <= 0.0:
        raise CouplingDomainError(f"a_{n}{m}({r}, {s}) = {value} <= 0")
    return value


def first_order_critical(
    actual: tuple[float, float], assumed: tuple[float, float]
) -> float:
    """Residual of the first-order (nearest-neighbour) corrected equation.

    The single effective parameter p in the (1-2p)^4 term is taken from
    the homogeneous reduction of the actual rates (the equation does not
    define it separately in the mismatched setting).
    """
    _, p = homogeneous_reduction(actual)
    t = (1.0 - 2.0 * p) ** 4
    spin_term = 0.5 * (_xlog2(1.0 + t) + _xlog2(1.0 - t))
    cross = 0.0
    for n in range(2):
        for m in range(3):
            cross += (
                math.comb(2, m)
                * first_order_a(actual[0], actual[1], n, m)
                * math.log2(first_order_a(assumed[0], assumed[1], n, m))
            )
    return 2.0 - spin_term + cross


def couplings_from_rates_xyz(model: GeneralPauliModel) -> CouplingsXYZ:
    q_x, q_y, q_z = model.q_x, model.q_y, model.q_z
    q_i = model.identity_rate
    for name, q in (("q_x", q_x), ("q_y", q_y), ("q_z", q_z), ("1-sum", q_i)):
        if q <= 0.0:
            raise InfiniteCouplingError(
                f"{name}={q} gives an infinite generalized coupling"
            )
    return CouplingsXYZ(
        j_h=0.25 * math.log(q_i * q_z / (q_y * q_x)),
        j_v=0.25 * math.log(q_i * q_x / (q_y * q_z)),
        j_y=0.25 * math.log(q_i * q_y / (q_x * q_z)),
    )


_DUALITY_MATRIX = 0.5 * np.array(
    [
        [1, 1, 1, 1],
        [1, -1, 1, -1],
        [1, 1, -1, -1],
        [1, -1, -1, 1],
    ],
    dtype=float,
)


def coupling_u_vector(couplings: CouplingsXYZ) -> np.ndarray:
    """Boltzmann 4-vector (one entry per sign pattern of the two bonds)."""
    j_h, j_v, j_y = couplings.j_h, couplings.j_v, couplings.j_y
    return np.array(
        [
            math.exp(j_h + j_v + j_y),
            math.exp(j_h - j_v - j_y),
            math.exp(-j_h + j_v - j_y),
            math.exp(-j_h - j_v + j_y),
        ]
    )


def generalized_duality_transform(u: np.ndarray) -> np.ndarray:
    """Dual weight vector u* = (1/2) M u; applying it twice is the identity."""
    u = np.asarray(u, dtype=float)
    if u.shape != (4,):
        raise ValueError("u must be a 4-vector")
    return _DUALITY_MATRIX @ u


def generalized_zero_order(actual: GeneralPauliModel) -> float:
    """Residual of the generalized n -> 0 criticality equation:
    the 4-outcome entropy of the channel equals one bit at criticality.
    """
    q_i = actual.identity_rate
    if q_i <= 0.0:
        raise CouplingDomainError("total error rate must stay below 1")
    total = (
        _xlog2(q_i) + _xlog2(actual.q_x) + _xlog2(actual.q_y) + _xlog2(actual.q_z)
    )
    return total + 1.0


def bisect(func, lo: float, hi: float, tolerance: float = BISECTION_TOLERANCE):
    """Bisection with a verified sign change; returns (root, residual) or
    None when the bracket does not change sign."""
    f_lo = func(lo)
    f_hi = func(hi)
    if f_lo == 0.0:
        return lo, f_lo
    if f_hi == 0.0:
        return hi, f_hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = func(mid)
        if abs(f_mid) <= tolerance * 1e-2 or hi - lo <= 4.0 * math.ulp(mid):
            return mid, f_mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    mid = 0.5 * (lo + hi)
    return mid, func(mid)


def depolarizing_optimal_estimate() -> float:
    """Total depolarizing rate 3q solving the generalized zero-order
    equation on the depolarizing slice q_x = q_y = q_z."""

    def residual(q: float) -> float:
        return generalized_zero_order(GeneralPauliModel(q, q, q))

    result = bisect(residual, 1e-9, 1.0 / 3.0 - 1e-9)
    assert result is not None
    return 3.0 * result[0]


def mwpm_depolarizing_estimate() -> float:
    """Total depolarizing rate 3q at the matching-decoder critical point.

    Matching ignores the X/Z correlations of Y errors; modelling it as
    independent rates with p = 2q gives the scalar equation
    -1/2 = (1-2q) log2(1-2q) + 2q log2(2q), solved here by bisection.
    """

    def residual(q: float) -> float:
        return _xlog2(1.0 - 2.0 * q) + 2.0 * q * math.log2(2.0 * q) + 0.5

    result = bisect(residual, 1e-9, 0.25 - 1e-9)
    assert result is not None
    root, res = result
    if abs(res) > BISECTION_TOLERANCE:
        raise ArithmeticError(f"bisection residual {res} above tolerance")
    return 3.0 * root


@dataclass
class CriticalPoint:
    """One solved point of a critical curve slice."""

    equation: str
    slice_param: float
    actual: tuple[float, float]
    assumed: tuple[float, float]
    root: float  # total actual rate pt_X + pt_Z at criticality; NaN if none
    residual: float

    @property
    def found(self) -> bool:
        return math.isfinite(self.root)


def _slice_models(
    kind: str, ratio: float, total: float, fixed_assumed: tuple[float, float] | None
) -> tuple[tuple[float, float], tuple[float, float]]:
    pt_z = total / (1.0 + ratio)
    pt_x = total - pt_z
    actual = (pt_x, pt_z)
    if kind == "matched":
        assumed = actual
    elif kind == "symmetric_assumption":
        _, p = homogeneous_reduction(actual)
        p = max(p, 1e-12)
        assumed = (p, p)
    elif kind == "fixed_assumed":
        if fixed_assumed is None:
            raise ValueError("fixed_assumed slice requires assumed rates")
        assumed = fixed_assumed
    else:
        raise ValueError(f"unknown slice kind {kind!r}")
    return actual, assumed


def solve_critical_curve(
    equation: str,
    ratios,
    assumption: str = "matched",
    fixed_assumed: tuple[float, float] | None = None,
    tolerance: float = BISECTION_TOLERANCE,
) -> list[CriticalPoint]:
    """Solve a criticality equation along fixed-ratio slices.

    ``equation`` is ``zero_order``, ``first_order``, or ``generalized``;
    each slice fixes a bias parameter and bisects over the total rate.
    For the X/Z equations the parameter is the ratio pt_X / pt_Z; for
    ``generalized`` it is the q_Y fraction f of the total (q_X = q_Z
    share the rest), so f = 1/3 is the depolarizing ray.  Slices whose
    bracket has no sign change are reported with root = NaN rather than
    raising.
    """
    if equation == "generalized":
        return _solve_generalized_curve(ratios, tolerance)
    if equation == "zero_order":
        residual_of = zero_order_critical
    elif equation == "first_order":
        residual_of = first_order_critical
    else:
        raise ValueError(f"unknown equation {equation!r}")

    points: list[CriticalPoint] = []
    for ratio in ratios:
        # keep both channel rates below 1/2 along the slice (ratio may
        # be math.inf for the single-channel boundary slice)
        if ratio >= 1.0:
            upper = 0.999 * 0.5 * (1.0 + 1.0 / ratio)
        else:
            upper = 0.999 * 0.5 * (1.0 + ratio)

        def slice_residual(total: float) -> float:
            actual, assumed = _slice_models(assumption, ratio, total, fixed_assumed)
            return residual_of(actual, assumed)

        result = bisect(slice_residual, 1e-6, upper, tolerance)
        if result is None:
            points.append(
                CriticalPoint(equation, ratio, (math.nan, math.nan),
                              (math.nan, math.nan), math.nan, math.nan)
            )
            continue
        root, residual = result
        actual, assumed = _slice_models(assumption, ratio, root, fixed_assumed)
        points.append(
            CriticalPoint(equation, ratio, actual, assumed, root, residual)
        )
    return points


def _solve_generalized_curve(fractions, tolerance) -> list[CriticalPoint]:
    """Generalized zero-order slices: bisect the total rate along rays of
    fixed q_Y fraction (q_X = q_Z splitting the remainder)."""
    points: list[CriticalPoint] = []
    for fraction in fractions:
        if not 0.0 <= fraction < 1.0:
            raise ValueError(f"q_Y fraction {fraction} outside [0, 1)")

        def model_of(total: float) -> GeneralPauliModel:
            q_y = fraction * total
            q_xz = 0.5 * (total - q_y)
            return GeneralPauliModel(q_xz, q_y, q_xz)

        def residual_at(total: float) -> float:
            return generalized_zero_order(model_of(total))

        result = bisect(residual_at, 1e-9, 1.0 - 1e-9, tolerance)
        if result is None:
            points.append(
                CriticalPoint("generalized", fraction, (math.nan, math.nan),
                              (math.nan, math.nan), math.nan, math.nan)
            )
            continue
        root, residual = result
        model = model_of(root)
        points.append(
            CriticalPoint(
                "generalized",
                fraction,
                (model.q_x, model.q_z),
                (model.q_x, model.q_z),
                root,
                residual,
            )
        )
    return points
