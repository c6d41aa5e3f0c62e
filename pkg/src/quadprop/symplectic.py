"""Classical side of the evolution: 2x2 symplectic ABCD matrices.

The Heisenberg-picture map of a quadratic generator is linear,
(Q, P) = (Aq + Bp, Cq + Dp) with AD - BC = 1. This module builds the
matrix from a generator (through the same gc/gs functions as the
normal ordering), converts to and from the (s, r) factors, composes
and inverts maps, and provides an independent matrix-exponential
oracle for cross-checking. It also parses the step-schedule file
format used by the CLI for piecewise-constant time dependence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lie_core import NormalOrderFactors, QuadraticGenerator, _gc_gs

__all__ = [
    "AbcdMatrix",
    "ScheduleError",
    "abcd_from_generator",
    "matrix_exp_oracle",
    "abcd_from_sr",
    "sr_from_abcd",
    "compose",
    "invert",
    "load_schedule",
]

_LD = np.longdouble

# Pre-tolerance for the symplectic / unitarity checks of the dictionaries.
_DICT_TOL = 1e-8
# Composition drift policy: below _DRIFT_KEEP leave the product alone, up to
# _DRIFT_REPAIR renormalize by 1/sqrt(det), beyond that fail loudly.
_DRIFT_KEEP = 1e-9
_DRIFT_REPAIR = 1e-6


@dataclass(frozen=True)
class AbcdMatrix:
    """Real 2x2 symplectic matrix [[a, b], [c, d]] with a*d - b*c = 1."""

    a: float
    b: float
    c: float
    d: float

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def apply(self, q: float, p: float) -> tuple[float, float]:
        """Map a phase-space point: (Q, P) = (aq + bp, cq + dp)."""
        return self.a * q + self.b * p, self.c * q + self.d * p

    @staticmethod
    def identity() -> "AbcdMatrix":
        return AbcdMatrix(1.0, 0.0, 0.0, 1.0)


def abcd_from_generator(g: QuadraticGenerator) -> AbcdMatrix:
    """ABCD matrix of the generator's phase-space flow.

    A = gc + beta*gs, B = alpha*gs, C = -gamma*gs, D = gc - beta*gs,
    with gc, gs evaluated at delta_sq = beta^2 - alpha*gamma. The
    determinant is gc^2 - delta_sq*gs^2 = 1 identically.
    """
    a, b, c = _LD(g.alpha), _LD(g.beta), _LD(g.gamma)
    gcv, gsv = _gc_gs(b * b - a * c)
    return AbcdMatrix(
        a=float(gcv + b * gsv),
        b=float(a * gsv),
        c=float(-c * gsv),
        d=float(gcv - b * gsv),
    )


def matrix_exp_oracle(g: QuadraticGenerator, terms: int = 24) -> AbcdMatrix:
    """Brute-force flow matrix: exp of [[beta, alpha], [-gamma, -beta]].

    Scaling-and-squaring with a truncated Taylor series (>= 20 terms);
    deliberately independent of gc/gs so it can certify
    ``abcd_from_generator`` to 1e-10 componentwise.
    """
    G = np.array([[g.beta, g.alpha], [-g.gamma, -g.beta]], dtype=float)
    norm = np.abs(G).sum(axis=1).max()
    nsquare = max(0, int(np.ceil(np.log2(norm / 0.5)))) if norm > 0.5 else 0
    S = G / 2.0**nsquare
    E = np.eye(2)
    term = np.eye(2)
    for k in range(1, terms + 1):
        term = term @ S / k
        E = E + term
    for _ in range(nsquare):
        E = E @ E
    return AbcdMatrix(a=E[0, 0], b=E[0, 1], c=E[1, 0], d=E[1, 1])


def abcd_from_sr(f: NormalOrderFactors) -> AbcdMatrix:
    """Dictionary from normal-ordered factors to the ABCD matrix.

    A = Re s - Re r, B = Im s - Im r, C = -(Im s + Im r), D = Re s + Re r.
    Rejects factors violating |s|^2 - |r|^2 = 1 beyond 1e-8.
    """
    res = abs(f.s) ** 2 - abs(f.r) ** 2 - 1.0
    if abs(res) > _DICT_TOL:
        raise ValueError(f"factors are not unitary: |s|^2-|r|^2-1 = {res:.3e}")
    return AbcdMatrix(
        a=f.s.real - f.r.real,
        b=f.s.imag - f.r.imag,
        c=-(f.s.imag + f.r.imag),
        d=f.s.real + f.r.real,
    )


def sr_from_abcd(m: AbcdMatrix) -> NormalOrderFactors:
    """Inverse dictionary: s = (d+a)/2 + i(b-c)/2, r = (d-a)/2 - i(b+c)/2.

    Exact inverse of ``abcd_from_sr`` (round-trips to 1e-12); rejects
    matrices with determinant off 1 by more than 1e-8.
    """
    res = m.det() - 1.0
    if abs(res) > _DICT_TOL:
        raise ValueError(f"matrix is not symplectic: det-1 = {res:.3e}")
    return NormalOrderFactors(
        s=complex(0.5 * (m.d + m.a), 0.5 * (m.b - m.c)),
        r=complex(0.5 * (m.d - m.a), -0.5 * (m.b + m.c)),
    )


def compose(m2: AbcdMatrix, m1: AbcdMatrix) -> AbcdMatrix:
    """Matrix product m2 . m1 (the later step goes on the left).

    Long chains drift off det = 1 by rounding; drift up to 1e-6 is
    repaired by renormalizing with 1/sqrt(det), anything larger raises.
    """
    out = AbcdMatrix(
        a=m2.a * m1.a + m2.b * m1.c,
        b=m2.a * m1.b + m2.b * m1.d,
        c=m2.c * m1.a + m2.d * m1.c,
        d=m2.c * m1.b + m2.d * m1.d,
    )
    drift = abs(out.det() - 1.0)
    if drift <= _DRIFT_KEEP:
        return out
    if drift <= _DRIFT_REPAIR:
        scale = 1.0 / np.sqrt(out.det())
        return AbcdMatrix(out.a * scale, out.b * scale, out.c * scale, out.d * scale)
    raise ValueError(f"composition drifted off the symplectic group: |det-1| = {drift:.3e}")


def invert(m: AbcdMatrix) -> AbcdMatrix:
    """Symplectic inverse [[d, -b], [-c, a]] (no division needed; det = 1)."""
    return AbcdMatrix(a=m.d, b=-m.b, c=-m.c, d=m.a)


class ScheduleError(ValueError):
    """A step-schedule file failed to parse."""


def load_schedule(path) -> list[QuadraticGenerator]:
    """Parse a step-schedule file into an ordered list of generators.

    One step per line as three whitespace-separated decimal literals
    ``alpha beta gamma``; ``#`` starts a comment; blank lines are
    skipped. Steps are listed in the order they are applied.
    """
    steps = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ScheduleError(
                    f"{path}:{lineno}: expected 'alpha beta gamma', got {raw.strip()!r}"
                )
            try:
                alpha, beta, gamma = (float(p) for p in parts)
            except ValueError as exc:
                raise ScheduleError(f"{path}:{lineno}: {exc}") from exc
            try:
                steps.append(QuadraticGenerator(alpha, beta, gamma))
            except ValueError as exc:
                raise ScheduleError(f"{path}:{lineno}: {exc}") from exc
    return steps
