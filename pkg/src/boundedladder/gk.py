"""Truncated Gazeau-Klauder states |J, gamma; L>.

Built on energies ``omega * eps_n`` and moments ``rho_n``. Truncation keeps
temporal stability exact; the action identity and the resolution of the
identity hold in cutoff-corrected form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _quadrature
from .errors import BadSpec, MarginTooSmall, MomentMismatch, RhoMismatch
from .fock import op_norm, projector_QL


@dataclass(frozen=True, eq=False)
class GKSpec:
    eps: np.ndarray
    rho: np.ndarray
    omega: float = 1.0

    def __post_init__(self):
        eps = np.array(self.eps, dtype=float)
        rho = np.array(self.rho, dtype=float)
        if eps.ndim != 1 or rho.ndim != 1 or eps.size < 2:
            raise BadSpec("eps and rho must be one-dimensional with at least two entries")
        if eps.size != rho.size:
            raise BadSpec(f"eps has {eps.size} entries but rho has {rho.size}")
        if eps[0] != 0 or not np.all(np.diff(eps) > 0):
            raise BadSpec("eps must start at 0 and be strictly increasing")
        if not np.all(rho > 0) or rho[0] != 1:
            raise BadSpec("rho must be positive with rho_0 = 1")
        if not self.omega > 0:
            raise BadSpec("omega must be positive")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "rho", rho)

    @property
    def size(self) -> int:
        return self.eps.size

    def require(self, count: int):
        if self.size < count:
            raise BadSpec(f"spec has {self.size} levels, {count} required")


def harmonic_spec(n_max: int, omega: float = 1.0) -> GKSpec:
    """``eps_n = n``, ``rho_n = n!``."""
    n = np.arange(n_max + 1)
    rho = np.exp([math.lgamma(k + 1) for k in n])
    rho[0] = 1.0
    return GKSpec(n.astype(float), rho, omega)


@dataclass(frozen=True, eq=False)
class GKState:
    J: float
    gamma: float
    L: int
    coeffs: np.ndarray
    normalization: float  # N_L(J)


def _norm_sq(spec: GKSpec, J: float, last: int) -> float:
    """``sum_{n=0}^{last} J^n / rho_n``."""
    n = np.arange(last + 1)
    return float(np.sum(J ** n / spec.rho[: last + 1]))


def gk_norm(spec: GKSpec, J: float, L: int) -> float:
    """``N_L(J)``, summing ``J^n / rho_n`` up to ``n = L+1``."""
    return math.sqrt(_norm_sq(spec, J, L + 1))


def _amplitudes(spec: GKSpec, J: float, gamma: float, last: int) -> np.ndarray:
    n = np.arange(last + 1)
    return J ** (n / 2) * np.exp(-1j * spec.eps[: last + 1] * gamma) / np.sqrt(spec.rho[: last + 1])


def gk_truncated(spec: GKSpec, J: float, gamma: float, L: int, D: int) -> GKState:
    if J < 0:
        raise BadSpec("J must be non-negative")
    if D < L + 2:
        raise MarginTooSmall(f"D={D} too small for L={L}; need D >= L+2")
    spec.require(L + 2)
    N = gk_norm(spec, J, L)
    vec = np.zeros(D, dtype=complex)
    vec[: L + 2] = _amplitudes(spec, J, gamma, L + 1) / N
    return GKState(float(J), float(gamma), L, vec, N)


def gk_full(spec: GKSpec, J: float, gamma: float, D: int) -> np.ndarray:
    """Un-truncated state cut at the ambient dimension, ``N(J)`` over n < D."""
    spec.require(D)
    return _amplitudes(spec, J, gamma, D - 1) / math.sqrt(_norm_sq(spec, J, D - 1))


def a_gamma_op(spec: GKSpec, gamma: float, D: int) -> np.ndarray:
    """``a_gamma |n> = sqrt(eps_n) e^{i (eps_n - eps_{n-1}) gamma} |n-1>``."""
    spec.require(D)
    a = np.zeros((D, D), dtype=complex)
    n = np.arange(1, D)
    a[n - 1, n] = np.sqrt(spec.eps[n]) * np.exp(1j * (spec.eps[n] - spec.eps[n - 1]) * gamma)
    return a


def energy_op(spec: GKSpec, D: int) -> np.ndarray:
    spec.require(D)
    return np.diag(spec.omega * spec.eps[:D]).astype(complex)


def temporal_stability_residual(spec: GKSpec, J: float, gamma: float, L: int,
                                t: float, D: int) -> float:
    """``|| e^{-iHt} |J,gamma;L> - |J, gamma + omega t; L> ||``."""
    state = gk_truncated(spec, J, gamma, L, D).coeffs
    evolved = np.exp(-1j * spec.omega * spec.eps[:D] * t) * state
    target = gk_truncated(spec, J, gamma + spec.omega * t, L, D).coeffs
    return float(np.linalg.norm(evolved - target))


@dataclass(frozen=True)
class ActionIdentity:
    lhs: float
    rhs: float


def action_identity_value(spec: GKSpec, J: float, gamma: float, L: int,
                          rtol: float = 1e-12) -> ActionIdentity:
    """``<J,gamma;L| H_L |J,gamma;L>`` against ``J omega (N_{L-1}/N_L)^2``.

    H_L is built from the weights ``x_n = eps_n``, so ``rho_n`` must equal
    ``eps_1 ... eps_n``; otherwise :class:`RhoMismatch` is raised.
    """
    spec.require(L + 2)
    products = np.concatenate([[1.0], np.cumprod(spec.eps[1: L + 2])])
    if not np.allclose(spec.rho[: L + 2], products, rtol=rtol, atol=0):
        raise RhoMismatch("rho_n must equal eps_1 * ... * eps_n for the action identity")
    state = gk_truncated(spec, J, gamma, L, L + 2).coeffs
    h_L = spec.omega * spec.eps[: L + 2]
    lhs = float(np.sum(h_L * np.abs(state) ** 2))
    rhs = J * spec.omega * (gk_norm(spec, J, L - 1) / gk_norm(spec, J, L)) ** 2
    return ActionIdentity(lhs, rhs)


@dataclass(frozen=True, eq=False)
class GKResolution:
    assembled: np.ndarray
    residual_vs_QL1: float


def gk_moments(weight: Callable, R: float, nodes: int, nmax: int) -> np.ndarray:
    return _quadrature.moments(weight, range(nmax + 1), R, nodes)


def gk_resolution_check(spec: GKSpec, L: int, weight: Callable, R: float = math.inf,
                        nodes: int = 200, moment_tol: float = 1e-6,
                        check_moments: bool = True) -> GKResolution:
    """Assemble ``int N_L(J)^2 rho(J) dJ <|J,gamma;L><J,gamma;L|>_gamma``.

    The gamma average is a Kronecker delta on distinct energies, leaving the
    diagonal ``|c_n(J)|^2``; the J integral is Gauss-Legendre on [0, R]
    (``R = inf`` is mapped onto [0, 1)).
    """
    spec.require(L + 2)
    if check_moments:
        got = gk_moments(weight, R, nodes, L + 1)
        target = spec.rho[: L + 2]
        failing = [n for n in range(L + 2) if not abs(got[n] - target[n]) <= moment_tol * target[n]]
        if failing:
            raise MomentMismatch(failing)
    D = L + 3
    u, w = _quadrature.nodes_weights(R, nodes)
    dens = w * np.asarray(weight(u), dtype=float)
    diag = np.zeros(D)
    for J, d in zip(u, dens):
        if d == 0:
            continue
        state = gk_truncated(spec, J, 0.0, L, D)
        diag += d * state.normalization ** 2 * np.abs(state.coeffs) ** 2
    assembled = np.diag(diag).astype(complex)
    return GKResolution(assembled, op_norm(assembled - projector_QL(D, L + 1)))


def continuity_profile(spec: GKSpec, J0: float, gamma0: float, L: int,
                       steps: int = 8, D: int | None = None) -> list[tuple[float, float]]:
    """Distances ``|| |J0+h, gamma0+h; L> - |J0, gamma0; L> ||`` for ``h = 10^-1 .. 10^-steps``."""
    D = L + 2 if D is None else D
    base = gk_truncated(spec, J0, gamma0, L, D).coeffs
    out = []
    for i in range(1, steps + 1):
        h = 10.0 ** -i
        moved = gk_truncated(spec, J0 + h, gamma0 + h, L, D).coeffs
        out.append((h, float(np.linalg.norm(moved - base))))
    return out
