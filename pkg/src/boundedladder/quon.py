"""Quon weight sequences from q-mutation relations.

A relation ``a a^+ - q a^+ a = f(q, N)`` fixes the weights through the
recursion ``x_{n+1} = q x_n + f(q, n)`` with ``x_0 = 0``. ``f = 1`` gives
first-kind quons, ``f = q**(-2n)`` second-kind quons.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import BadParams, DivergentBranchWarning, NotMonotone, OutOfRange
from .weights import WeightSequence

# |q - 1| below this uses the q = 1 limit
Q_ONE_THRESHOLD = 1e-10
# |q - 1| below this (but above the threshold) uses the recursion instead of
# the closed form, whose 1 - q**n cancels badly
Q_NEAR_ONE = 1e-3

BISECTION_TOL = 1e-12


def _f_one(q, n):
    return 1.0


def _f_q_pow_neg2n(q, n):
    return q ** (-2 * n)


def _f_q_pow_neg4n(q, n):
    return q ** (-4 * n)


def _f_exp_q2m1(q, n):
    return math.exp((q * q - 1.0) * n)


BUILTIN_F: dict[str, Callable[[float, int], float]] = {
    "one": _f_one,
    "q_pow_neg2n": _f_q_pow_neg2n,
    "q_pow_neg4n": _f_q_pow_neg4n,
    "exp_q2m1": _f_exp_q2m1,
}


@dataclass(frozen=True)
class QMutatorSpec:
    """Deformation parameter ``q`` and right-hand side ``f(q, n)``.

    ``f`` is a built-in name from :data:`BUILTIN_F` or a table indexed by n.
    """

    q: float
    f: str | Sequence[float] = "one"

    def __post_init__(self):
        if isinstance(self.f, str):
            if self.f not in BUILTIN_F:
                raise BadParams(f"unknown f family {self.f!r}; choose from {sorted(BUILTIN_F)}")
        else:
            table = tuple(float(v) for v in self.f)
            if not all(math.isfinite(v) for v in table):
                raise BadParams("tabulated f values must be finite")
            object.__setattr__(self, "f", table)

    @classmethod
    def from_params(cls, params: Mapping) -> "QMutatorSpec":
        return cls(float(params["q"]), params.get("f", "one"))

    def __call__(self, n: int) -> float:
        if isinstance(self.f, str):
            return BUILTIN_F[self.f](self.q, n)
        if n >= len(self.f):
            raise BadParams(f"tabulated f has no entry for n={n}")
        return self.f[n]

    def values(self, count: int) -> np.ndarray:
        return np.array([self(n) for n in range(count)], dtype=float)


def general_sequence(spec: QMutatorSpec, n_max: int) -> np.ndarray:
    """``x_0..x_{n_max}`` from the recursion ``x_{n+1} = q x_n + f(q, n)``."""
    x = np.zeros(n_max + 1)
    for n in range(n_max):
        x[n + 1] = spec.q * x[n] + spec(n)
    return x


def xn_general(spec: QMutatorSpec, n: int) -> float:
    if n < 0:
        raise BadParams("n must be non-negative")
    return float(general_sequence(spec, n)[n]) if n else 0.0


def xn_first_kind(q: float, n: int) -> float:
    """``x_n = 1 + q + ... + q**(n-1)``; ``n`` at ``q = 1``."""
    if n < 0:
        raise BadParams("n must be non-negative")
    if n == 0:
        return 0.0
    gap = abs(q - 1.0)
    if gap < Q_ONE_THRESHOLD:
        return float(n)
    if gap < Q_NEAR_ONE:
        return xn_general(QMutatorSpec(q, "one"), n)
    return (1.0 - q ** n) / (1.0 - q)


def xn_second_kind(q: float, n: int, warn: bool = True) -> float:
    """Closed form ``x_n = q**(n-1) (1 - q**(-3n)) / (1 - q**(-3))``.

    Emits :class:`DivergentBranchWarning` for ``|q| < 1`` where the weights
    blow up like ``q**(-2n)``; pass ``warn=False`` to silence it.
    """
    if n < 0:
        raise BadParams("n must be non-negative")
    if q == 0:
        raise BadParams("q must be non-zero")
    if warn and abs(q) < 1:
        warnings.warn(f"second-kind weights diverge for |q| < 1 (q={q})",
                      DivergentBranchWarning, stacklevel=2)
    if n == 0:
        return 0.0
    gap = abs(q - 1.0)
    if gap < Q_ONE_THRESHOLD:
        return float(n)
    if gap < Q_NEAR_ONE:
        return xn_general(QMutatorSpec(q, "q_pow_neg2n"), n)
    r = q ** -3
    return q ** (n - 1) * (1.0 - r ** n) / (1.0 - r)


def xn_fourth_power_closed(q: float, n: int) -> float:
    """Closed form for ``f = q**(-4n)``: ``q**(n-1) (1 - q**(-5n)) / (1 - q**(-5))``."""
    if n == 0:
        return 0.0
    if abs(q - 1.0) < Q_ONE_THRESHOLD:
        return float(n)
    r = q ** -5
    return q ** (n - 1) * (1.0 - r ** n) / (1.0 - r)


def xn_exp_closed(q: float, n: int) -> float:
    """Closed form for ``f = exp((q**2 - 1) n)``: ``(q**n - e**(n c)) / (q - e**c)``."""
    if n == 0:
        return 0.0
    if abs(q - 1.0) < Q_ONE_THRESHOLD:
        return float(n)
    c = q * q - 1.0
    return (q ** n - math.exp(n * c)) / (q - math.exp(c))


CLOSED_FORMS: dict[str, Callable[[float, int], float]] = {
    "one": xn_first_kind,
    "q_pow_neg2n": lambda q, n: xn_second_kind(q, n, warn=False),
    "q_pow_neg4n": xn_fourth_power_closed,
    "exp_q2m1": xn_exp_closed,
}


def classical_limit_deviation(name: str, n_values=range(11), eps: float = 1e-6) -> float:
    """Largest ``|f(q, n) - 1|`` at ``q = +-1 +- eps`` over ``n_values``."""
    f = BUILTIN_F[name]
    return max(abs(f(q, n) - 1.0)
               for q in (1 - eps, 1 + eps, -1 - eps, -1 + eps)
               for n in n_values)


def number_from_energy(x: WeightSequence, h: float) -> float:
    """Invert ``H_o = X(N)`` for the occupation number.

    ``X`` is the piecewise-linear interpolant of ``n -> x_n``; table hits
    return the exact integer.
    """
    values = x.values
    if not np.all(np.diff(values[1:]) > 0) or values[0] >= values[1]:
        raise NotMonotone("weights must be strictly increasing to invert X")
    if not values[0] <= h <= values[-1]:
        raise OutOfRange(f"h={h!r} outside [{values[0]!r}, {values[-1]!r}]")
    hits = np.nonzero(values == h)[0]
    if hits.size:
        return float(hits[0])
    k = int(np.searchsorted(values, h)) - 1
    lo, hi = float(k), float(k + 1)
    n = np.arange(values.size, dtype=float)
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if np.interp(mid, n, values) < h:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def number_first_kind_closed(q: float, h: float) -> float:
    """``N = log(1 - h (1 - q)) / log(q)`` for first-kind quons."""
    return math.log(1.0 - h * (1.0 - q)) / math.log(q)


def qmutator_residual(x: WeightSequence, spec: QMutatorSpec, D: int) -> float:
    """Norm of ``A A^+ - q A^+ A - f(q, N)`` on span{Phi_0..Phi_{D-2}}."""
    from .fock import op_norm
    from .ladder import make_A_ambient

    if D < 3:
        raise BadParams("D must be at least 3")
    A = make_A_ambient(x, D)
    Ad = A.conj().T
    M = A @ Ad - spec.q * (Ad @ A) - np.diag(spec.values(D))
    return op_norm(M[: D - 1, : D - 1])
