"""Set-valued proximal operator of the scaled ramp loss.

For a penalty C and step gamma, the prox at s minimizes

    phi(v) = C * ramp_loss(v) + (v - s)^2 / (2 * gamma)

over v.  The ramp loss is nonconvex, so phi can have two global minimizers;
the closed form returns both at the (single) tie point of each regime.  The
shape of the solution depends only on the product gamma*C:

* gamma*C < 2 ("shift" regime): inputs in the linear band are shifted left
  by gamma*C, small positive inputs collapse to 0, and everything at or
  below 0 or above 1 + gamma*C/2 is left alone.  Tie at s = 1 + gamma*C/2.
* gamma*C >= 2 ("threshold" regime): positive inputs below sqrt(2*gamma*C)
  collapse to 0, larger ones are left alone.  Tie at s = sqrt(2*gamma*C).

Both regimes coincide at gamma*C = 2.  Threshold comparisons are exact
floating-point comparisons; callers wanting fuzzy tie detection must snap
s themselves before calling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .losses import ramp_loss

__all__ = [
    "ProxParams",
    "ProxSet",
    "prox_scalar",
    "prox_vector",
    "prox_objective",
    "prox_oracle",
]


@dataclass(frozen=True)
class ProxParams:
    """Prox step gamma and loss penalty C, both strictly positive."""

    gamma: float
    C: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"gamma must be finite and positive, got {self.gamma}")
        if not (math.isfinite(self.C) and self.C > 0):
            raise ValueError(f"C must be finite and positive, got {self.C}")

    @property
    def gammaC(self) -> float:
        """The product gamma*C that selects the prox regime."""
        return self.gamma * self.C


@dataclass(frozen=True)
class ProxSet:
    """One or two global minimizers of the prox objective.

    ``values`` has two entries only at the regime's tie point, where both
    attain the same objective; ``tie`` records that case.  Order follows
    the closed form: the untouched input s first, then the shifted or
    zeroed alternative.
    """

    values: tuple[float, ...]
    tie: bool

    def distance(self, x: float) -> float:
        """Distance from x to the set, min over members of |x - v|."""
        return min(abs(x - v) for v in self.values)


def _prox_shift_regime(s: float, params: ProxParams) -> ProxSet:
    """Closed form valid for 0 < gamma*C <= 2."""
    gc = params.gammaC
    thr = 1.0 + gc / 2.0
    if s > thr:
        return ProxSet((s,), False)
    if s == thr:
        return ProxSet((s, s - gc), True)
    if s >= gc:
        return ProxSet((s - gc,), False)
    if s > 0.0:
        return ProxSet((0.0,), False)
    return ProxSet((s,), False)


def _prox_threshold_regime(s: float, params: ProxParams) -> ProxSet:
    """Closed form valid for gamma*C >= 2."""
    thr = math.sqrt(2.0 * params.gammaC)
    if s > thr:
        return ProxSet((s,), False)
    if s == thr:
        return ProxSet((s, 0.0), True)
    if s > 0.0:
        return ProxSet((0.0,), False)
    return ProxSet((s,), False)


def prox_scalar(s: float, params: ProxParams) -> ProxSet:
    """All global minimizers of C*ramp_loss(v) + (v-s)^2/(2*gamma)."""
    s = float(s)
    if not math.isfinite(s):
        raise ValueError(f"prox needs a finite argument, got {s}")
    if params.gammaC < 2.0:
        return _prox_shift_regime(s, params)
    return _prox_threshold_regime(s, params)


def prox_vector(s, params: ProxParams) -> list[ProxSet]:
    """Componentwise prox of a vector; the sum objective separates."""
    s = np.asarray(s, dtype=float)
    if s.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {s.shape}")
    return [prox_scalar(si, params) for si in s]


def prox_objective(v: float, s: float, params: ProxParams) -> float:
    """The prox objective C*ramp_loss(v) + (v-s)^2/(2*gamma) at v."""
    v = float(v)
    s = float(s)
    return params.C * ramp_loss(v) + (v - s) ** 2 / (2.0 * params.gamma)


def prox_oracle(s: float, params: ProxParams) -> float:
    """Brute-force minimizer of the prox objective, independent of the
    closed form.

    Evaluates the exact candidate points {s, s - gamma*C, 0} plus a uniform
    grid of step 1e-4 spanning [min(s,-1)-1, max(s,2)+1], and returns the
    best point found.  The candidates make the oracle exact at the kinks
    that the coarse grid would otherwise straddle.
    """
    s = float(s)
    if not math.isfinite(s):
        raise ValueError(f"prox oracle needs a finite argument, got {s}")
    gc = params.gammaC
    lo = min(s, -1.0) - 1.0
    hi = max(s, 2.0) + 1.0
    step = 1e-4
    grid = np.arange(lo, hi + 0.5 * step, step)
    v = np.concatenate((np.array([s, s - gc, 0.0]), grid))
    obj = params.C * np.clip(v, 0.0, 1.0) + (v - s) ** 2 / (2.0 * params.gamma)
    return float(v[int(np.argmin(obj))])
