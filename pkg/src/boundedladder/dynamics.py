"""Regularized Heisenberg dynamics generated by the diagonal H_L.

Everything lives at a finite ambient dimension D: the seminorms of the
operator topology are evaluated directly, next to their analytic bounds, and
convergence in the cutoff is reported as tables over increasing L.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadCutoffs, DimensionError, NotDiagonal, ZeroWeight
from .fock import identity, op_norm, projector_QL
from .ladder import ambient_hamiltonian, hamiltonian_HL
from .weights import WeightSequence, radius_estimate

_OFFDIAG_TOL = 1e-14


@dataclass(frozen=True)
class SeminormSpec:
    """Test function ``f(x) = exp(-beta x)`` and power ``k`` of H."""

    beta: float = 1.0
    k: int = 0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.k < 0 or int(self.k) != self.k:
            raise ValueError("k must be a non-negative integer")

    def f(self, h):
        return np.exp(-self.beta * np.asarray(h, dtype=float))


def _diagonal(H) -> np.ndarray:
    H = np.asarray(H)
    off = H - np.diag(np.diag(H))
    if np.abs(off).sum() > _OFFDIAG_TOL:
        raise NotDiagonal("operator must be diagonal in the number basis")
    return np.diag(H)


def evolve(HL, t: float) -> np.ndarray:
    """``exp(i H_L t)`` for diagonal ``H_L``."""
    h = _diagonal(HL)
    return np.diag(np.exp(1j * t * h))


def decomposition_residual(x: WeightSequence, L: int, D: int, t: float) -> float:
    """``|| e^{iH_L t} - (I - Q_{L+1} + Q_{L+1} e^{iHt} Q_{L+1}) ||``."""
    U_L = evolve(hamiltonian_HL(x, L, D), t)
    U = evolve(ambient_hamiltonian(x, D), t)
    Q = projector_QL(D, L + 1)
    return op_norm(U_L - (identity(D) - Q + Q @ U @ Q))


def heisenberg(X, HL, t: float) -> np.ndarray:
    """``alpha_L^t(X) = e^{iH_L t} X e^{-iH_L t}``."""
    if np.shape(X) != np.shape(HL):
        raise DimensionError("X and H_L must have the same shape")
    phase = np.exp(1j * t * _diagonal(HL))
    return phase[:, None] * X * phase.conj()[None, :]


@dataclass(frozen=True)
class Seminorm:
    direct: float
    upper_bound: float


def seminorm(X, spec: SeminormSpec, H) -> Seminorm:
    """``max(||f(H) X H^k||, ||H^k X f(H)||)`` and its entrywise bound.

    The bound sums ``f(h_l) h_s^k |X_ls|`` over every ambient index pair
    (including the kernel slot Phi_0) and takes the larger ordering, so it
    dominates both terms of the maximum.
    """
    h = _diagonal(H).real
    if np.any(h < 0):
        raise ValueError("H must have a non-negative spectrum")
    if np.shape(X) != np.shape(H):
        raise DimensionError("X and H must have the same shape")
    fh = spec.f(h)
    hk = h ** spec.k
    left = fh[:, None] * X * hk[None, :]
    right = hk[:, None] * X * fh[None, :]
    absX = np.abs(X)
    bound = max(float(fh @ absX @ hk), float(hk @ absX @ fh))
    return Seminorm(max(op_norm(left), op_norm(right)), bound)


def satisfies_cauchy_hypothesis(x: WeightSequence) -> bool:
    """Heuristic: weights increase and diverge, so some inverse power is summable."""
    increasing = bool(np.all(np.diff(x.values[1:]) > 0))
    return increasing and math.isinf(radius_estimate(x)[0])


@dataclass(frozen=True)
class CauchyGap:
    """``I_LM`` with two bounds.

    ``bound`` sums ``2 f(x_s) x_s^k`` over the support of ``H_M - H_L``
    (``s = L+2..M+1``); ``alt_bound`` uses ``s = L+1..M``.
    """

    direct: float
    bound: float
    alt_bound: float
    hypothesis_ok: bool


def cauchy_gap(x: WeightSequence, L: int, M: int, t: float,
               spec: SeminormSpec, D: int) -> CauchyGap:
    if not 0 <= L <= M or M > D - 3:
        raise BadCutoffs(f"need 0 <= L <= M <= D-3, got L={L}, M={M}, D={D}")
    H = ambient_hamiltonian(x, D)
    h = np.diag(H).real
    diff = evolve(hamiltonian_HL(x, L, D), t) - evolve(hamiltonian_HL(x, M, D), t)
    direct = op_norm(spec.f(h)[:, None] * diff * (h ** spec.k)[None, :])
    xs = x.values
    terms = lambda lo, hi: float(np.sum(spec.f(xs[lo:hi + 1]) * xs[lo:hi + 1] ** spec.k))  # noqa: E731
    return CauchyGap(direct, 2 * terms(L + 2, M + 1), 2 * terms(L + 1, M),
                     satisfies_cauchy_hypothesis(x))


def cauchy_gap_sine_form(x: WeightSequence, L: int, M: int, t: float,
                         spec: SeminormSpec, D: int) -> float:
    """``2 ||f(H) sin(H_{ML} t / 2) H^k||`` with ``H_{ML} = H_M - H_L``."""
    h = np.diag(ambient_hamiltonian(x, D)).real
    hml = np.diag(hamiltonian_HL(x, M, D) - hamiltonian_HL(x, L, D)).real
    return 2 * float(np.max(np.abs(spec.f(h) * np.sin(hml * t / 2) * h ** spec.k)))


def derivation(X, HL, k: int) -> np.ndarray:
    """k-fold ``delta_L(X) = i [H_L, X]``."""
    if np.shape(X) != np.shape(HL):
        raise DimensionError("X and H_L must have the same shape")
    if k < 0:
        raise ValueError("k must be non-negative")
    out = np.array(X, dtype=complex)
    for _ in range(k):
        out = 1j * (HL @ out - out @ HL)
    return out


@dataclass(frozen=True)
class SeriesResult:
    residual: float
    terms_used: int


def series_vs_exact(X, HL, t: float, K: int) -> SeriesResult:
    """Compare ``alpha_L^t(X)`` with ``sum_{k<=K} t^k/k! delta_L^k(X)``."""
    if K < 0:
        raise ValueError("K must be non-negative")
    term = np.array(X, dtype=complex)
    total = term.copy()
    for k in range(1, K + 1):
        term = (t / k) * 1j * (HL @ term - term @ HL)
        total += term
    return SeriesResult(op_norm(heisenberg(X, HL, t) - total), K + 1)


def inverse_tail_norm(x: WeightSequence, l: int, L: int, D: int) -> float:
    """``||H^{-l} (I - Q_L)||`` on the ambient space, i.e. ``max_{L<s<D} x_s^{-l}``.

    ``H^{-l}`` acts on span{Phi_1..Phi_{D-1}}; Phi_0 is the kernel of H.
    """
    x.require(D)
    if not 0 <= L < D - 1:
        raise BadCutoffs(f"need 0 <= L < D-1, got L={L}, D={D}")
    tail = x.values[L + 1:D]
    if np.any(tail == 0):
        raise ZeroWeight("H is not invertible on the tail")
    if l == 0:
        return 1.0
    # pick the extreme slot, then take a single scalar power so the value is
    # bit-identical to x_s ** -l
    s = tail.min() if l > 0 else tail.max()
    return math.pow(float(s), -l)
