"""ICRT parameters and the weight vectors that approximate them."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..ptree import ProbWeights

NORM_TOL = 1e-12
RENORM_TOL = 1e-6


@dataclass(frozen=True)
class ThetaParam:
    """theta0 > 0 plus a finite nonincreasing list of positive atoms.

    The squares must sum to one.
    """

    theta0: float
    thetas: tuple = ()

    def __post_init__(self):
        t0 = float(self.theta0)
        ts = tuple(float(t) for t in self.thetas)
        object.__setattr__(self, "theta0", t0)
        object.__setattr__(self, "thetas", ts)
        if not t0 > 0:
            raise ValueError("parameter outside supported class: theta0 must be positive")
        if any(not (t > 0 and math.isfinite(t)) for t in ts):
            raise ValueError("atoms must be positive and finite")
        if any(a < b for a, b in zip(ts, ts[1:])):
            raise ValueError("atoms must be nonincreasing")
        if abs(self.norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"squares sum to {self.norm2!r}, not 1")

    @property
    def norm2(self):
        return math.fsum([self.theta0 ** 2] + [t * t for t in self.thetas])

    @property
    def I(self):
        return len(self.thetas)

    @classmethod
    def parse(cls, values):
        """Build from ``[theta0, theta1, ...]``, sorting the atoms.

        Vectors whose squares miss 1 by less than 1e-6 are rescaled with a
        warning; anything further off is rejected.
        """
        if isinstance(values, (int, float)):
            values = [values]
        vals = [float(x) for x in values]
        if not vals:
            raise ValueError("empty parameter")
        t0, ts = vals[0], sorted(vals[1:], reverse=True)
        s = math.fsum(x * x for x in vals)
        dev = abs(s - 1.0)
        if dev > RENORM_TOL:
            raise ValueError(f"squares sum to {s!r}; must be 1")
        if dev > NORM_TOL:
            warnings.warn(f"rescaling parameter whose squares sum to {s!r}", stacklevel=2)
            r = math.sqrt(s)
            t0 /= r
            ts = [x / r for x in ts]
        return cls(t0, tuple(ts))

    def to_list(self):
        return [self.theta0, *self.thetas]


def survival_eta1(theta: ThetaParam, r):
    """P(first cutpoint > r) = exp(-theta0^2 r^2 / 2) prod (1 + theta_i r) exp(-theta_i r)."""
    r_arr = np.asarray(r, dtype=np.float64)
    if np.any(r_arr < 0):
        raise ValueError("r must be nonnegative")
    logs = -0.5 * theta.theta0 ** 2 * r_arr ** 2
    for t in theta.thetas:
        logs = logs + np.log1p(t * r_arr) - t * r_arr
    out = np.exp(logs)
    return float(out) if out.ndim == 0 else out


def cdf_eta1(theta: ThetaParam, r):
    return 1.0 - survival_eta1(theta, r)


def build_pn(theta: ThetaParam, n: int) -> ProbWeights:
    """Weights on n labels with p_i / sigma_n = theta_i for the first atoms.

    The remaining mass is spread evenly over the other labels, whose share
    plays the role of theta0.
    """
    I = theta.I
    n = int(n)
    if n <= I:
        raise ValueError(f"need n > {I}; minimal n is {_minimal_n(theta)}")
    rest = n - I
    if I and theta.thetas[-1] < theta.theta0 / math.sqrt(rest):
        raise ValueError(f"weights would not be sorted; minimal n is {_minimal_n(theta)}")
    sigma = 1.0 / (theta.theta0 * math.sqrt(rest) + math.fsum(theta.thetas))
    p = np.empty(n, dtype=np.float64)
    p[:I] = [sigma * t for t in theta.thetas]
    p[I:] = sigma * theta.theta0 / math.sqrt(rest)
    return ProbWeights(p)


def _minimal_n(theta):
    I = theta.I
    if not I:
        return 1
    need = (theta.theta0 / theta.thetas[-1]) ** 2
    rest = max(1, math.ceil(need - 1e-9))
    while theta.thetas[-1] < theta.theta0 / math.sqrt(rest):
        rest += 1
    return I + rest
