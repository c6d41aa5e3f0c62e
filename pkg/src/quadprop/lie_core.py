"""Normal-ordered factorization of quadratic-Hamiltonian evolution operators.

A quadratic generator (alpha, beta, gamma) defines the unitary

    U = exp[-(i/2) * (alpha p^2 + beta (qp + pq) + gamma q^2)]

in natural units (hbar = 1, dimensionless q and p). Rewritten on the
su(1,1) basis built from a = (q + ip)/sqrt(2), the same operator is a
single exponential with parameters (tau, sigma), and it factorizes into
a normal-ordered product governed by a complex pair (s, r) obeying
|s|^2 - |r|^2 = 1. This module computes (tau, sigma), the discriminant
delta_sq = |tau|^2 - sigma^2/4 = beta^2 - alpha*gamma, and (s, r),
handling both signs of delta_sq through the entire functions gc and gs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuadraticGenerator",
    "SU11Params",
    "NormalOrderFactors",
    "to_su11",
    "gc",
    "gs",
    "normal_order",
]

# Below this |x| the direct cosh/cos and sinh/sin expressions for gc/gs are
# replaced by their Taylor series (series truncation error < 1e-15 there).
_SERIES_CUTOFF = 1e-4

_LD = np.longdouble


@dataclass(frozen=True)
class QuadraticGenerator:
    """Coefficient triple of the quadratic exponent.

    Parameters
    ----------
    alpha : float
        Coefficient of p^2.
    beta : float
        Coefficient of the symmetrized cross term qp + pq.
    gamma : float
        Coefficient of q^2.

    All three must be finite; physical mass/frequency/time enter only
    through these dimensionless combinations (e.g. the harmonic
    oscillator uses alpha = t/m, beta = 0, gamma = m w^2 t).
    """

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"generator coefficient {name} must be finite, got {v!r}")


@dataclass(frozen=True)
class SU11Params:
    """su(1,1) form of a quadratic generator.

    tau is the complex raising/lowering coefficient, sigma the real
    coefficient along the compact direction, and delta_sq the invariant
    |tau|^2 - sigma^2/4 (= beta^2 - alpha*gamma) whose sign selects the
    hyperbolic / trigonometric character of the flow.
    """

    tau: complex
    sigma: float
    delta_sq: float


@dataclass(frozen=True)
class NormalOrderFactors:
    """Complex pair (s, r) of the normal-ordered factorization.

    Satisfies |s|^2 - |r|^2 = 1, hence |s| >= 1; s plays the role of a
    generalized cosh of the flow, r the generalized sinh along tau.
    """

    s: complex
    r: complex

    def unitarity_residual(self) -> float:
        """|s|^2 - |r|^2 - 1, which is zero for factors of a unitary."""
        return abs(self.s) ** 2 - abs(self.r) ** 2 - 1.0


def to_su11(g: QuadraticGenerator) -> SU11Params:
    """Map a generator to its su(1,1) parameters.

    tau = beta + i(alpha - gamma)/2, sigma = -(alpha + gamma), and
    delta_sq = beta^2 - alpha*gamma. Total on finite inputs.
    """
    a, b, c = _LD(g.alpha), _LD(g.beta), _LD(g.gamma)
    return SU11Params(
        tau=complex(g.beta, 0.5 * (g.alpha - g.gamma)),
        sigma=float(-(a + c)),
        delta_sq=float(b * b - a * c),
    )


def _gc_gs(x):
    """gc and gs at longdouble precision; x may be any real scalar type."""
    x = _LD(x)
    if abs(x) < _SERIES_CUTOFF:
        return 1 + x / 2 + x * x / 24, 1 + x / 6 + x * x / 120
    if x > 0:
        rt = np.sqrt(x)
        return np.cosh(rt), np.sinh(rt) / rt
    rt = np.sqrt(-x)
    return np.cos(rt), np.sin(rt) / rt


def gc(x: float) -> float:
    """Even entire function equal to cosh(sqrt(x)) for x >= 0 and cos(sqrt(-x)) for x < 0.

    Continuous through x = 0 (gc(0) = 1) via the Taylor series
    1 + x/2 + x^2/24 for |x| < 1e-4.
    """
    if not math.isfinite(x):
        raise ValueError(f"gc requires finite x, got {x!r}")
    return float(_gc_gs(x)[0])


def gs(x: float) -> float:
    """Entire function equal to sinh(sqrt(x))/sqrt(x) for x > 0 and sin(sqrt(-x))/sqrt(-x) for x < 0.

    Continuous through x = 0 (gs(0) = 1) via the Taylor series
    1 + x/6 + x^2/120 for |x| < 1e-4.
    """
    if not math.isfinite(x):
        raise ValueError(f"gs requires finite x, got {x!r}")
    return float(_gc_gs(x)[1])


def normal_order(g: QuadraticGenerator) -> NormalOrderFactors:
    """Normal-ordered factors (s, r) of the evolution operator.

    With (tau, sigma, delta_sq) from ``to_su11``:

        s = gc(delta_sq) - i (sigma/2) gs(delta_sq)
        r = -tau * gs(delta_sq)

    The pair satisfies |s|^2 - |r|^2 = 1 for every finite generator.
    Intermediates are carried in extended precision so the identity
    holds to ~1e-10 even where |s| is large (delta_sq up to ~50).
    """
    a, b, c = _LD(g.alpha), _LD(g.beta), _LD(g.gamma)
    sigma = -(a + c)
    delta_sq = b * b - a * c
    gcv, gsv = _gc_gs(delta_sq)
    s = complex(float(gcv), float(-0.5 * sigma * gsv))
    r = complex(float(-b * gsv), float(-0.5 * (a - c) * gsv))
    return NormalOrderFactors(s=s, r=r)
