"""Gauss-Legendre moments of radial weights on [0, R] or [0, inf)."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def _legendre(nodes: int):
    return np.polynomial.legendre.leggauss(nodes)


def nodes_weights(R: float, nodes: int):
    """Nodes and weights for integrals over [0, R].

    ``R = inf`` maps ``u = s / (1 - s)`` onto [0, 1), so no tail is cut.
    """
    s, w = _legendre(nodes)
    if math.isinf(R):
        s = 0.5 * (s + 1.0)
        w = 0.5 * w
        u = s / (1.0 - s)
        return u, w / (1.0 - s) ** 2
    return 0.5 * R * (s + 1.0), 0.5 * R * w


def moments(weight, powers, R: float, nodes: int) -> np.ndarray:
    """``int_0^R weight(u) u^p du`` for each p in ``powers``."""
    u, w = nodes_weights(R, nodes)
    wu = w * np.asarray(weight(u), dtype=float)
    return np.array([float(np.sum(wu * u ** p)) for p in powers])
