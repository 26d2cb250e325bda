"""Bounded ladder operators A_L, A_L^+ and their identity catalogue.

``A_L = sum_{l=0}^{L} sqrt(x_{l+1}) |Phi_l><Phi_{l+1}|`` is a finite weighted
shift. The unbounded ``A`` is represented by its D-dimensional truncation;
identities mixing it with cutoff-L objects are checked on the interior
span{Phi_0..Phi_{D-2}}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MarginTooSmall
from .fock import identity, interior, op_norm, projector_QL, projector_p, projector_pij
from .weights import WeightSequence


def chi(n: int) -> int:
    """Step sequence: 1 for ``n >= 0``, else 0."""
    return 1 if n >= 0 else 0


@dataclass(frozen=True, eq=False)
class LadderPair:
    A: np.ndarray
    A_dag: np.ndarray
    L: int
    x: WeightSequence
    D: int


def _check_cutoff(x: WeightSequence, L: int, D: int, margin: int = 3):
    if L < 0:
        raise ValueError("cutoff L must be non-negative")
    if D < L + margin:
        raise MarginTooSmall(f"D={D} too small for L={L}; need D >= L+{margin}")
    x.require(L + 2)


def make_AL(x: WeightSequence, L: int, D: int) -> LadderPair:
    _check_cutoff(x, L, D)
    A = np.zeros((D, D), dtype=complex)
    l = np.arange(L + 1)
    A[l, l + 1] = np.sqrt(x.values[1: L + 2])
    A_dag = np.zeros((D, D), dtype=complex)
    A_dag[l + 1, l] = np.sqrt(x.values[1: L + 2])
    return LadderPair(A, A_dag, L, x, D)


def make_A_ambient(x: WeightSequence, D: int) -> np.ndarray:
    """D-dimensional truncation of the unbounded annihilation operator."""
    x.require(D)
    A = np.zeros((D, D), dtype=complex)
    k = np.arange(1, D)
    A[k - 1, k] = np.sqrt(x.values[1:D])
    return A


def ambient_hamiltonian(x: WeightSequence, D: int) -> np.ndarray:
    """``H = A^+ A = diag(0, x_1, ..., x_{D-1})``."""
    x.require(D)
    h = np.array(x.values[:D], dtype=complex)
    h[0] = 0.0
    return np.diag(h)


def hamiltonian_HL(x: WeightSequence, L: int, D: int) -> np.ndarray:
    """``H_L = A_L^+ A_L = sum_{l=1}^{L+1} x_l P_l``."""
    _check_cutoff(x, L, D)
    h = np.zeros(D, dtype=complex)
    h[1: L + 2] = x.values[1: L + 2]
    return np.diag(h)


def commutator_pair(x: WeightSequence, L: int, D: int) -> np.ndarray:
    pair = make_AL(x, L, D)
    return pair.A @ pair.A_dag - pair.A_dag @ pair.A


def commutator_spectrum(x: WeightSequence, L: int) -> np.ndarray:
    """Diagonal of ``[A_L, A_L^+]`` on Phi_0..Phi_{L+1} from the chi formula."""
    xs = x.values
    out = np.empty(L + 2)
    out[0] = xs[1]
    for k in range(1, L + 2):
        up = xs[k + 1] if chi(L - k) else 0.0
        out[k] = up - chi(L + 1 - k) * xs[k]
    return out


def power_ALdag(x: WeightSequence, L: int, D: int, n: int) -> np.ndarray:
    if n < 0:
        raise ValueError("power must be non-negative")
    return np.linalg.matrix_power(make_AL(x, L, D).A_dag, n)


def power_ALdag_closed(x: WeightSequence, L: int, D: int, n: int) -> np.ndarray:
    """``sum_{l=0}^{L+1-n} sqrt(x_{l+1}...x_{l+n}) P_{l+n,l}``; zero for n > L+1."""
    _check_cutoff(x, L, D)
    if n == 0:
        return identity(D)
    out = np.zeros((D, D), dtype=complex)
    for l in range(0, L + 2 - n):
        out[l + n, l] = math.sqrt(float(np.prod(x.values[l + 1: l + n + 1])))
    return out


@dataclass(frozen=True)
class NormReport:
    lower: float
    upper_dL: float
    upper_l1: float | None
    exact: float


def norm_report(x: WeightSequence, L: int) -> NormReport:
    """Lower/upper bounds on ``||A_L||`` next to its exact value.

    ``lower`` is ``max ||A_L Phi_j|| = max_{1<=j<=L+1} sqrt(x_j)``.
    ``upper_l1`` needs a known full-sequence l1 norm (``params["l1_norm"]``).
    """
    x.require(L + 2)
    active = x.values[1: L + 2]
    l1 = x.params.get("l1_norm")
    exact = op_norm(make_AL(x, L, L + 3).A)
    return NormReport(
        lower=float(np.sqrt(active.max())),
        upper_dL=math.sqrt(float(active.sum())),
        upper_l1=math.sqrt(l1) if l1 is not None else None,
        exact=exact,
    )


def identity_suite(x: WeightSequence, L: int, D: int) -> dict[str, float]:
    """Residual norms of the algebraic identities linking A, A_L and Q_L.

    Every residual is taken on the interior span{Phi_0..Phi_{D-2}}.
    """
    _check_cutoff(x, L, D, margin=4)
    pair = make_AL(x, L, D)
    A = make_A_ambient(x, D)
    Ad = A.conj().T
    Q = lambda n: projector_QL(D, n)  # noqa: E731
    P = lambda n: projector_p(D, n)  # noqa: E731

    def res(lhs, rhs):
        return op_norm(interior(lhs - rhs))

    out = {
        "A_L = Q_{L+1} A Q_{L+1}": res(pair.A, Q(L + 1) @ A @ Q(L + 1)),
        "A_L^+ = Q_{L+1} A^+ Q_{L+1}": res(pair.A_dag, Q(L + 1) @ Ad @ Q(L + 1)),
        "A Q_{L+1} = Q_L A": res(A @ Q(L + 1), Q(L) @ A),
        "Q_{L+1} A^+ = A^+ Q_L": res(Q(L + 1) @ Ad, Ad @ Q(L)),
        "A P_l = P_{l-1} A": max(res(A @ P(l), P(l - 1) @ A) for l in range(D)),
        "P_l A^+ = A^+ P_{l-1}": max(res(P(l) @ Ad, Ad @ P(l - 1)) for l in range(D)),
        "A_L^+ A_L = Q_{L+1} A^+ A Q_{L+1}": res(pair.A_dag @ pair.A, Q(L + 1) @ Ad @ A @ Q(L + 1)),
        "A_L A_L^+ = Q_L A A^+ Q_{L+1}": res(pair.A @ pair.A_dag, Q(L) @ A @ Ad @ Q(L + 1)),
        "[Q_L, A] = P_L A": res(Q(L) @ A - A @ Q(L), P(L) @ A),
        "P_L A = A P_{L+1}": res(P(L) @ A, A @ P(L + 1)),
        "[Q_L, A^+] = -P_{L+1} A^+": res(Q(L) @ Ad - Ad @ Q(L), -P(L + 1) @ Ad),
        "P_{L+1} A^+ = A^+ P_L": res(P(L + 1) @ Ad, Ad @ P(L)),
        "[Q_L, A^+ A] = 0": res(Q(L) @ Ad @ A, Ad @ A @ Q(L)),
        "[Q_L, A A^+] = 0": res(Q(L) @ A @ Ad, A @ Ad @ Q(L)),
    }
    worst = 0.0
    for l in range(D):
        for s in range(D):
            expected = math.sqrt(x.values[s]) if s == l + 1 else 0.0
            block = projector_pij(D, l, l) @ A @ projector_pij(D, s, s)
            worst = max(worst, abs(op_norm(block) - expected))
    out["||P_l A P_s|| = sqrt(x_s) delta_{l+1,s}"] = worst
    return out


def bounded_commutator_norm(x: WeightSequence, D: int) -> float:
    """``|| x_1 P_0 + sum_{l=1}^{D-2} (x_{l+1} - x_l) P_l ||`` on the ambient space."""
    x.require(D)
    diag = np.empty(D - 1)
    diag[0] = x.values[1]
    diag[1:] = np.diff(x.values[1:D])
    return op_norm(np.diag(diag))
