"""Quasi-coherent states built from the bounded creation operator.

``Psi_L(z)`` is the normalized finite combination
``sum_{k=0}^{L+1} z^k / sqrt(x_k!) Phi_k``. It is an exact eigenvector of
nothing, but ``A_L Psi_L(z)`` is proportional to ``z Psi_{L-1}(z)`` and the
family reproduces ``Q_{L+1}`` under a radial measure solving the moment
problem ``int r^{2k} dlambda = x_k! / (2 pi)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _quadrature
from .errors import BadParams, DegenerateState, MarginTooSmall, MomentMismatch, NormalizationOverflow
from .fock import expectation, op_norm, projector_QL
from .ladder import make_AL
from .weights import WeightSequence, factorials, log_factorials

# above these, coefficients are formed from log-magnitudes
_LOG_PATH_Z = 1.0
_LOG_PATH_L = 30


@dataclass(frozen=True, eq=False)
class QuasiCoherentState:
    z: complex
    L: int
    coeffs: np.ndarray
    normalization: float
    variant: str = "psi"


def normalization_N(x: WeightSequence, z: complex, L: int) -> float:
    """``N_{Psi_L}(|z|^2) = sum_{k=0}^{L+1} |z|^{2k} / x_k!``.

    ``L = -1`` gives 1 (the vacuum alone).
    """
    if L < -1:
        raise BadParams("L must be >= -1")
    x.require(L + 2)
    r2 = abs(z) ** 2
    term = 1.0
    total = 1.0
    for k in range(1, L + 2):
        term = term * r2 / x.values[k]
        total += term
        if not math.isfinite(total):
            raise NormalizationOverflow(k)
    return total


def _raw_coefficients(x: WeightSequence, z: complex, L: int):
    """Return ``(coeffs, log_norm)`` with coeffs already normalized."""
    x.require(L + 2)
    k = np.arange(L + 2)
    if abs(z) > _LOG_PATH_Z and L > _LOG_PATH_L:
        logmag = k * math.log(abs(z)) - 0.5 * log_factorials(x)[: L + 2]
        shift = logmag.max()
        log_norm = 2 * shift + math.log(float(np.sum(np.exp(2 * (logmag - shift)))))
        coeffs = np.exp(logmag - 0.5 * log_norm) * np.exp(1j * k * cmath.phase(z))
        return coeffs, log_norm
    N = normalization_N(x, z, L)
    with np.errstate(over="raise"):
        try:
            coeffs = np.power(complex(z), k) / np.sqrt(factorials(x)[: L + 2])
        except FloatingPointError:
            raise NormalizationOverflow(L + 1) from None
    return coeffs / math.sqrt(N), math.log(N)


def psi_state(x: WeightSequence, z: complex, L: int, D: int) -> QuasiCoherentState:
    if D < L + 3:
        raise MarginTooSmall(f"D={D} too small for L={L}; need D >= L+3")
    coeffs, log_norm = _raw_coefficients(x, z, L)
    vec = np.zeros(D, dtype=complex)
    vec[: L + 2] = coeffs
    return QuasiCoherentState(complex(z), L, vec, math.exp(log_norm) if log_norm < 709 else math.inf)


def psi_state_operator_route(x: WeightSequence, z: complex, L: int, D: int) -> np.ndarray:
    """``N^{-1/2} F(z A_L^+) Phi_0`` with ``F(w) = sum w^k / x_k!``.

    The series stops by itself because ``(A_L^+)^{L+2} = 0``.
    """
    Ad = make_AL(x, L, D).A_dag
    fact = factorials(x)
    vec = np.zeros(D, dtype=complex)
    vec[0] = 1.0
    out = vec.copy()
    power = vec
    for k in range(1, L + 3):
        power = z * (Ad @ power)
        if k <= L + 1:
            out += power / fact[k]
        elif np.any(power):
            raise AssertionError("creation operator is not nilpotent")
    return out / math.sqrt(normalization_N(x, z, L))


def xi_truncated(x: WeightSequence, z: complex, D: int) -> QuasiCoherentState:
    """The reference state Xi(z) cut at the ambient dimension (L = D-2)."""
    coeffs, log_norm = _raw_coefficients(x, z, D - 2)
    return QuasiCoherentState(complex(z), D - 2, coeffs, math.exp(log_norm), "xi_truncated")


@dataclass(frozen=True)
class EigenResidual:
    exact_relation: float
    limit_gap: float


def eigen_residual(x: WeightSequence, z: complex, L: int, D: int) -> EigenResidual:
    """Check ``A_L Psi_L = z sqrt(N_{L-1}/N_L) Psi_{L-1}`` and ``||A_L Psi_L - z Psi_L||``.

    ``A_L Psi_L - z Psi_L`` has a single non-zero entry, ``-z c_{L+1}`` at
    index L+1, so the gap is taken from that entry. Forming the full
    difference would add a rounding floor near 1e-16 that hides the decay.
    """
    if L < 1:
        raise BadParams("L must be >= 1")
    A = make_AL(x, L, D).A
    psi = psi_state(x, z, L, D).coeffs
    prev = psi_state(x, z, L - 1, D).coeffs
    lhs = A @ psi
    ratio = math.sqrt(normalization_N(x, z, L - 1) / normalization_N(x, z, L))
    return EigenResidual(
        float(np.linalg.norm(lhs - z * ratio * prev)),
        abs(z) * abs(psi[L + 1]),
    )


@dataclass(frozen=True)
class B0Strategy:
    """Choice of the free coefficients ``b_0^{(j)}(z)``.

    ``constant`` (all ones), ``z_power`` (``z^j / sqrt(x_j!)``),
    ``sqrt_ratio`` (``sqrt(x_j! / j!)``) or ``custom`` with a table.
    """

    tag: str = "constant"
    values: Sequence[complex] | None = None

    def __post_init__(self):
        if self.tag not in ("constant", "z_power", "sqrt_ratio", "custom"):
            raise BadParams(f"unknown b0 strategy {self.tag!r}")
        if self.tag == "custom" and self.values is None:
            raise BadParams("custom strategy needs a table of values")

    def table(self, x: WeightSequence, z: complex, count: int) -> np.ndarray:
        j = np.arange(count)
        if self.tag == "constant":
            return np.ones(count, dtype=complex)
        if self.tag == "z_power":
            return np.power(complex(z), j) / np.sqrt(factorials(x)[:count])
        if self.tag == "sqrt_ratio":
            log_jfact = np.array([math.lgamma(n + 1) for n in j])
            return np.exp(0.5 * (log_factorials(x)[:count] - log_jfact)).astype(complex)
        values = np.asarray(self.values, dtype=complex)
        if values.size < count:
            raise BadParams(f"custom b0 table needs {count} entries, has {values.size}")
        return values[:count]


def upsilon_raw(x: WeightSequence, z: complex, L: int, strategy: B0Strategy, D: int) -> np.ndarray:
    """Unnormalized ``sum_{k=0}^{L+1} b_0^{(L+1-k)} z^k / sqrt(x_k!) Phi_k``."""
    if D < L + 2:
        raise MarginTooSmall(f"D={D} too small for L={L}")
    x.require(L + 2)
    b0 = strategy.table(x, z, L + 2)
    k = np.arange(L + 2)
    out = np.zeros(D, dtype=complex)
    out[: L + 2] = b0[L + 1 - k] * np.power(complex(z), k) / np.sqrt(factorials(x)[: L + 2])
    return out


@dataclass(frozen=True, eq=False)
class UpsilonResult:
    raw: np.ndarray
    state: QuasiCoherentState
    ratio: float  # sqrt(N_{L-1} / N_L)


def upsilon_state(x: WeightSequence, z: complex, L: int, strategy: B0Strategy,
                  D: int | None = None) -> UpsilonResult:
    if D is None:
        D = L + 3
    raw = upsilon_raw(x, z, L, strategy, D)
    prev = upsilon_raw(x, z, L - 1, strategy, D)
    N = float(np.vdot(raw, raw).real)
    if N == 0:
        raise DegenerateState(f"Upsilon_{L}({z}) vanishes for strategy {strategy.tag!r}")
    N_prev = float(np.vdot(prev, prev).real)
    state = QuasiCoherentState(complex(z), L, raw / math.sqrt(N), N, f"upsilon:{strategy.tag}")
    return UpsilonResult(raw, state, math.sqrt(N_prev / N))


@dataclass(frozen=True)
class UncertaintyReport:
    dQ: float
    dP: float
    product: float
    robertson_bound: float
    gamma1: float
    gamma2: float
    gamma_product: float


def quadrature_spreads(A: np.ndarray, psi: np.ndarray) -> tuple[float, float, float]:
    """``(dQ, dP, 1/2 |<[A, A^+]>|)`` for ``Q = (A + A^+)/sqrt2``, ``P = (A - A^+)/(i sqrt2)``."""
    Ad = A.conj().T
    Q = (A + Ad) / math.sqrt(2)
    P = (A - Ad) / (1j * math.sqrt(2))

    def spread(X):
        mean = expectation(X, psi).real
        return math.sqrt(max(expectation(X @ X, psi).real - mean ** 2, 0.0))

    bound = 0.5 * abs(expectation(A @ Ad - Ad @ A, psi))
    return spread(Q), spread(P), bound


def gamma_terms(x: WeightSequence, z: complex, L: int, D: int) -> tuple[float, float]:
    """The auxiliary quantities Gamma_1, Gamma_2 of the closed-form uncertainty product."""
    pair = make_AL(x, L, D)
    psi = psi_state(x, z, L, D).coeffs
    aad = expectation(pair.A @ pair.A_dag, psi).real
    n1 = normalization_N(x, z, L - 1)
    n2 = normalization_N(x, z, L - 2)
    r = n2 / n1
    z = complex(z)
    g1 = aad + abs(z) ** 2 * r * (1 - 2 * r)
    g2 = ((z * z + z.conjugate() ** 2).real / n1) * (n1 - r)
    return g1, g2


def uncertainty_report(x: WeightSequence, z: complex, L: int, D: int,
                       state: np.ndarray | None = None) -> UncertaintyReport:
    """Position/momentum spreads of ``Psi_L(z)`` (or of ``state``, if given).

    The spreads come from direct moments; the Gamma values and the product
    built from them are reported alongside as diagnostics.
    """
    if L < 2:
        raise BadParams("L must be >= 2")
    A = make_AL(x, L, D).A
    psi = psi_state(x, z, L, D).coeffs if state is None else state
    dQ, dP, bound = quadrature_spreads(A, psi)
    g1, g2 = gamma_terms(x, z, L, D)
    return UncertaintyReport(dQ, dP, dQ * dP, bound, g1, g2, 0.5 * math.sqrt(abs(g2 ** 2 - g1 ** 2)))


@dataclass(frozen=True)
class RadialMeasure:
    """Radial density ``lambda'(r)`` on [0, R_cut] with a Gauss-Legendre rule."""

    weight: Callable[[np.ndarray], np.ndarray]
    R_cut: float
    nodes: int = 200


def harmonic_measure(R_cut: float = 10.0, nodes: int = 200) -> RadialMeasure:
    """``lambda'(r) = r exp(-r^2) / pi``, whose even moments are ``k! / (2 pi)``."""
    return RadialMeasure(lambda r: r * np.exp(-r * r) / math.pi, R_cut, nodes)


def measure_moments(measure: RadialMeasure, kmax: int) -> np.ndarray:
    """``int lambda'(r) r^{2k} dr`` for k = 0..kmax."""
    return _quadrature.moments(measure.weight, [2 * k for k in range(kmax + 1)],
                               measure.R_cut, measure.nodes)


@dataclass(frozen=True, eq=False)
class ResolutionCheck:
    assembled: np.ndarray
    residual_vs_QL1: float


def resolution_check(x: WeightSequence, L: int, D: int, measure: RadialMeasure,
                     moment_tol: float = 1e-6, check_moments: bool = True) -> ResolutionCheck:
    """Assemble ``int N_{Psi_L} |Psi_L><Psi_L| dnu`` and compare with ``Q_{L+1}``.

    The angular integral is done analytically: averaging over the phase of z
    keeps only the diagonal ``|c_k|^2``. The radial integral uses the
    measure's quadrature rule. Moments are validated first (relative
    tolerance ``moment_tol``) unless ``check_moments`` is False.
    """
    if D < L + 3:
        raise MarginTooSmall(f"D={D} too small for L={L}")
    if check_moments:
        target = factorials(x)[: L + 2] / (2 * math.pi)
        got = measure_moments(measure, L + 1)
        failing = [k for k in range(L + 2) if not abs(got[k] - target[k]) <= moment_tol * target[k]]
        if failing:
            raise MomentMismatch(failing)
    r, w = _quadrature.nodes_weights(measure.R_cut, measure.nodes)
    dens = w * np.asarray(measure.weight(r), dtype=float)
    diag = np.zeros(D)
    for ri, di in zip(r, dens):
        if di == 0:
            continue
        state = psi_state(x, ri, L, D)
        diag += 2 * math.pi * di * state.normalization * np.abs(state.coeffs) ** 2
    assembled = np.diag(diag).astype(complex)
    return ResolutionCheck(assembled, op_norm(assembled - projector_QL(D, L + 1)))
