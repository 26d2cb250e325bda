"""Weight sequences {x_n} that parametrize the ladder operators and states.

A weight sequence replaces the harmonic-oscillator eigenvalues ``n`` with
an arbitrary non-negative sequence. Only ``x_0`` may vanish.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .errors import BadParams, NonPositiveWeight

KINDS = ("harmonic", "quon_first", "quon_second", "general_f", "custom")

# number of tail samples used by radius_estimate
_TAIL = 10


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Validated sequence ``values[0..n_max]``.

    Parameters
    ----------
    values : ndarray
        Non-negative weights, ``values[n] > 0`` for ``n >= 1``.
    kind : str
        One of :data:`KINDS`.
    params : dict
        Kind-specific parameters (``q``, ``f``, ``l1_norm`` ...).
    """

    values: np.ndarray
    kind: str = "custom"
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            raise BadParams("weights must be a one-dimensional sequence")
        if values.size < 3:
            raise BadParams("n_max must be at least 2")
        if self.kind not in KINDS:
            raise BadParams(f"unknown sequence kind {self.kind!r}")
        if not np.all(np.isfinite(values)):
            raise NonPositiveWeight("weights must be finite")
        if values[0] < 0:
            raise NonPositiveWeight("x_0 must be non-negative")
        bad = np.nonzero(values[1:] <= 0)[0]
        if bad.size:
            raise NonPositiveWeight(f"x_{bad[0] + 1} = {values[bad[0] + 1]!r} is not positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "params", dict(self.params))

    @property
    def n_max(self) -> int:
        return self.values.size - 1

    def __len__(self):
        return self.values.size

    def __getitem__(self, n):
        return self.values[n]

    def require(self, count: int) -> None:
        """Raise BadParams unless at least ``count`` entries are stored."""
        if self.values.size < count:
            raise BadParams(
                f"sequence has {self.values.size} entries, {count} required; increase n_max"
            )

    def to_json(self) -> dict:
        out = {"kind": self.kind, "n_max": self.n_max}
        if self.kind == "custom":
            out["values"] = self.values.tolist()
        out.update({k: v for k, v in self.params.items() if k != "values"})
        return out


def make_sequence(kind: str, params: Mapping[str, Any] | None = None,
                  n_max: int | None = None) -> WeightSequence:
    """Build a validated weight sequence.

    ``harmonic`` gives ``x_n = n``. The quon kinds need ``params["q"]``;
    ``general_f`` additionally takes ``params["f"]``, either the name of a
    built-in deformation function or a table ``f(q, n)`` for ``n = 0..``.
    ``custom`` takes ``params["values"]`` and an optional ``l1_norm`` for
    the full (untruncated) sequence when it is known to be summable.
    """
    from . import quon

    params = dict(params or {})
    if kind not in KINDS:
        raise BadParams(f"unknown sequence kind {kind!r}")

    if kind == "custom":
        if "values" not in params:
            raise BadParams("custom sequences need 'values'")
        values = np.asarray(params.pop("values"), dtype=float)
        if n_max is not None:
            if values.size < n_max + 1:
                raise BadParams(f"custom sequence has {values.size} entries, n_max={n_max}")
            values = values[: n_max + 1]
        return WeightSequence(values, "custom", params)

    if n_max is None or int(n_max) != n_max:
        raise BadParams("n_max must be an integer")
    n_max = int(n_max)
    if n_max < 2:
        raise BadParams("n_max must be at least 2")

    if kind == "harmonic":
        return WeightSequence(np.arange(n_max + 1, dtype=float), "harmonic", {})

    if "q" not in params:
        raise BadParams(f"{kind} sequences need 'q'")
    try:
        q = float(params["q"])
    except (TypeError, ValueError):
        raise BadParams(f"q must be a real number, got {params['q']!r}") from None
    if q == 0 or not math.isfinite(q):
        raise BadParams("q must be finite and non-zero")
    params["q"] = q

    if kind == "quon_first":
        values = [quon.xn_first_kind(q, n) for n in range(n_max + 1)]
    elif kind == "quon_second":
        values = [quon.xn_second_kind(q, n, warn=False) for n in range(n_max + 1)]
    else:
        spec = quon.QMutatorSpec.from_params(params)
        values = quon.general_sequence(spec, n_max)
    return WeightSequence(np.asarray(values, dtype=float), kind, params)


def from_json(obj: Mapping[str, Any], n_max: int | None = None) -> WeightSequence:
    """Parse the JSON sequence schema.

    ``{"kind": "custom", "values": [...]}`` or
    ``{"kind": "quon_first", "q": 0.5, "n_max": 20}`` (same for the other
    kinds). Parameters may also sit in a nested ``"params"`` object. An explicit ``n_max`` argument raises the stored length when the
    JSON one is smaller; custom sequences cannot be extended.
    """
    if not isinstance(obj, Mapping) or "kind" not in obj:
        raise BadParams("sequence JSON must be an object with a 'kind' field")
    params = {k: v for k, v in obj.items() if k not in ("kind", "n_max", "params")}
    nested = obj.get("params", {})
    if not isinstance(nested, Mapping):
        raise BadParams("'params' must be an object")
    params.update(nested)
    kind = obj["kind"]
    if kind == "custom":
        return make_sequence(kind, params, n_max)
    stored = obj.get("n_max")
    if stored is None and n_max is None:
        raise BadParams("n_max is required")
    target = max(v for v in (stored, n_max) if v is not None)
    return make_sequence(kind, params, target)


def inverse_square(n_max: int) -> WeightSequence:
    """The summable sequence ``x_0 = 0``, ``x_n = 1/n**2``."""
    values = np.zeros(n_max + 1)
    values[1:] = 1.0 / np.arange(1, n_max + 1, dtype=float) ** 2
    return WeightSequence(values, "custom", {"l1_norm": math.pi ** 2 / 6})


def factorials(x: WeightSequence) -> np.ndarray:
    """Running products ``x_n! = x_1 x_2 ... x_n`` with ``x_0! = 1``."""
    products = np.empty_like(x.values)
    products[0] = 1.0
    products[1:] = np.cumprod(x.values[1:])
    return products


def log_factorials(x: WeightSequence) -> np.ndarray:
    """``log(x_n!)``, safe where the products themselves overflow."""
    logs = np.zeros_like(x.values)
    logs[1:] = np.cumsum(np.log(x.values[1:]))
    return logs


def radius_estimate(x: WeightSequence) -> tuple[float, bool]:
    """Estimate the convergence radius of ``sum z**n / sqrt(x_n!)``.

    The ratio test gives ``lim sqrt(x_n)``. The limit is taken from the last
    ten increments of the sequence: increments that do not shrink mean the
    weights diverge (radius infinity); otherwise the tail is extrapolated as
    a geometric series.

    Returns
    -------
    radius : float
        Estimated radius, possibly ``inf``.
    reliable : bool
        False when the tail is non-monotone or its increment ratios are
        erratic.
    """
    tail = x.values[max(1, x.values.size - _TAIL - 1):]
    diffs = np.diff(tail)
    monotone = bool(np.all(diffs > 0) or np.all(diffs < 0) or np.all(diffs == 0))
    if np.all(diffs == 0):
        return math.sqrt(tail[-1]), True
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = diffs[1:] / diffs[:-1]
    ratios = ratios[np.isfinite(ratios)]
    if ratios.size == 0:
        return math.sqrt(max(tail[-1], 0.0)), False
    r = float(np.median(ratios))
    erratic = bool(np.ptp(ratios) > 0.5)
    if diffs[-1] > 0 and r >= 1.0 - 1e-3:
        return math.inf, monotone and not erratic
    if diffs[-1] > 0 and r >= 0.9:
        # slow, power-law-like growth; cannot tell bounded from unbounded
        return math.inf, False
    r = min(max(r, 0.0), 0.999)
    limit = tail[-1] + diffs[-1] * r / (1.0 - r)
    return math.sqrt(max(limit, 0.0)), monotone and not erratic
