"""Truncated Fock space of dimension D.

Vectors are complex arrays of shape ``(D,)`` and operators complex arrays
of shape ``(D, D)`` over the basis Phi_0..Phi_{D-1}.
"""
from __future__ import annotations

import json

import numpy as np

from .errors import DimensionError, IndexOutOfRange

# algebraically exact identities
EXACT = 1e-12
# iterative or decomposition-based quantities
NUM = 1e-8


def _check_index(D, *idx):
    for i in idx:
        if not 0 <= i < D:
            raise IndexOutOfRange(f"index {i} outside 0..{D - 1}")


def basis_vector(D: int, n: int) -> np.ndarray:
    _check_index(D, n)
    v = np.zeros(D, dtype=complex)
    v[n] = 1.0
    return v


def projector_pij(D: int, i: int, j: int) -> np.ndarray:
    """Rank-one map ``|Phi_i><Phi_j|``."""
    _check_index(D, i, j)
    P = np.zeros((D, D), dtype=complex)
    P[i, j] = 1.0
    return P


def projector_p(D: int, i: int) -> np.ndarray:
    """``P_i``; the zero operator for ``i = -1`` (used by shifted identities)."""
    if i == -1:
        return np.zeros((D, D), dtype=complex)
    return projector_pij(D, i, i)


def projector_QL(D: int, L: int) -> np.ndarray:
    """Projector onto span{Phi_0..Phi_L}; ``L = -1`` gives zero."""
    if L + 1 > D or L < -1:
        raise IndexOutOfRange(f"Q_{L} needs dimension at least {L + 1}, got {D}")
    diag = np.zeros(D, dtype=complex)
    diag[: L + 1] = 1.0
    return np.diag(diag)


def identity(D: int) -> np.ndarray:
    return np.eye(D, dtype=complex)


def op_norm(X: np.ndarray) -> float:
    """Largest singular value."""
    X = np.asarray(X)
    if X.size == 0:
        return 0.0
    return float(np.linalg.norm(X, 2))


def _same_shape(*ops):
    shapes = {np.shape(op) for op in ops}
    if len(shapes) != 1:
        raise DimensionError(f"operator shapes differ: {sorted(shapes)}")


def multiply(X, Y):
    _same_shape(X, Y)
    return X @ Y


def add(X, Y):
    _same_shape(X, Y)
    return X + Y


def adjoint(X):
    return np.conj(X).T


def commutator(X, Y):
    _same_shape(X, Y)
    return X @ Y - Y @ X


def apply(X, v):
    if np.shape(X)[1] != np.shape(v)[0]:
        raise DimensionError(f"cannot apply {np.shape(X)} operator to {np.shape(v)} vector")
    return X @ v


def inner(u, v) -> complex:
    """``<u, v>``, antilinear in the first argument."""
    if np.shape(u) != np.shape(v):
        raise DimensionError("vector dimensions differ")
    return complex(np.vdot(u, v))


def expectation(X, psi) -> complex:
    return inner(psi, apply(X, psi))


def interior(X: np.ndarray) -> np.ndarray:
    """Compression onto span{Phi_0..Phi_{D-2}}, where an ambient
    truncation of an unbounded operator is still faithful."""
    D = X.shape[0]
    return X[: D - 1, : D - 1]


def to_json(X: np.ndarray) -> str:
    X = np.asarray(X, dtype=complex)
    return json.dumps({"D": X.shape[0], "real": X.real.tolist(), "imag": X.imag.tolist()})


def from_json(text: str) -> np.ndarray:
    obj = json.loads(text)
    X = np.asarray(obj["real"], dtype=float) + 1j * np.asarray(obj["imag"], dtype=float)
    if X.shape != (obj["D"], obj["D"]):
        raise DimensionError(f"serialized shape {X.shape} does not match D={obj['D']}")
    return X
