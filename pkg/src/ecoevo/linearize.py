"""Analytic Jacobians, higher derivative tensors, and planar stability classes."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ecoevo.model import ModelParams, State, SystemKind, clamp_state

TRACE_TOL = 1e-9
DET_TOL = 1e-12
DISC_TOL = 1e-12


@dataclass(frozen=True)
class Jacobian2:
    j11: float
    j12: float
    j21: float
    j22: float

    @property
    def trace(self) -> float:
        return self.j11 + self.j22

    @property
    def det(self) -> float:
        return self.j11 * self.j22 - self.j12 * self.j21

    @property
    def norm_inf(self) -> float:
        return max(abs(self.j11) + abs(self.j12), abs(self.j21) + abs(self.j22))

    def as_array(self) -> np.ndarray:
        return np.array([[self.j11, self.j12], [self.j21, self.j22]], dtype=float)

    @classmethod
    def from_array(cls, m) -> "Jacobian2":
        m = np.asarray(m, dtype=float)
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))


class StabilityType(enum.Enum):
    STABLE_NODE = "StableNode"
    STABLE_FOCUS = "StableFocus"
    UNSTABLE_NODE = "UnstableNode"
    UNSTABLE_FOCUS = "UnstableFocus"
    SADDLE = "Saddle"
    CENTER_CANDIDATE = "CenterCandidate"
    DEGENERATE = "Degenerate"

    @property
    def is_stable(self) -> bool:
        return self in (StabilityType.STABLE_NODE, StabilityType.STABLE_FOCUS)

    @property
    def is_unstable(self) -> bool:
        return self in (StabilityType.UNSTABLE_NODE, StabilityType.UNSTABLE_FOCUS, StabilityType.SADDLE)


@dataclass(frozen=True)
class StabilityClass:
    type: StabilityType
    eigenvalues: tuple[complex, complex]

    @property
    def mu(self) -> float:
        """Real part of the leading eigenvalue."""
        return max(self.eigenvalues[0].real, self.eigenvalues[1].real)

    @property
    def omega(self) -> float:
        return abs(self.eigenvalues[0].imag)


def _partials(kind: SystemKind, p: ModelParams, x: float, r: float):
    a, b, c, d = p.deltas.a, p.deltas.b, p.deltas.c, p.deltas.d
    g = (1.0 - r) * (b * (1.0 - x) + a * x) - r * (d * (1.0 - x) + c * x)
    gx = (a - b) * (1.0 - r) + (d - c) * r
    gr = -(b + d) * (1.0 - x) - (a + c) * x
    u = x - x * x
    fx = ((1.0 - 2.0 * x) * g + u * gx, u * gr)
    eps, q = p.epsilon, p.eco.q
    if kind is SystemKind.SELF_RENEWING:
        sigma = q * (p.eco.e2 - p.eco.e1)
        s = 1.0 - q * p.eco.e2 + sigma * r
        fr = (eps * s, eps * (sigma * (x - r) - s))
    else:
        k1 = q * p.eco.e1 + p.eco.w
        k2 = q * p.eco.e2 + p.eco.w
        fr = (eps * ((1.0 - r) * k1 + r * k2), -eps * (x * k1 + (1.0 - x) * k2))
    return fx, fr


def jacobian(kind: "SystemKind | str", p: ModelParams, s: "State | tuple[float, float]") -> Jacobian2:
    kind = SystemKind.parse(kind)
    s = clamp_state(s)
    (a11, a12), (a21, a22) = _partials(kind, p, s.x, s.r)
    return Jacobian2(a11, a12, a21, a22)


def trace_det(kind, p: ModelParams, s) -> tuple[float, float]:
    J = jacobian(kind, p, s)
    return J.trace, J.det


def derivative_tensors(kind: "SystemKind | str", p: ModelParams, s) -> tuple[np.ndarray, np.ndarray]:
    """Second and third derivative tensors B[i, j, k] and C[i, j, k, l] of the field.

    Index 0 is x, index 1 is r. Both fields are polynomial, so these are exact.
    """
    kind = SystemKind.parse(kind)
    s = clamp_state(s)
    x, r = s.x, s.r
    a, b, c, d = p.deltas.a, p.deltas.b, p.deltas.c, p.deltas.d
    delta = b - a + d - c
    g = (1.0 - r) * (b * (1.0 - x) + a * x) - r * (d * (1.0 - x) + c * x)
    gx = (a - b) * (1.0 - r) + (d - c) * r
    gr = -(b + d) * (1.0 - x) - (a + c) * x
    u = x - x * x
    B = np.zeros((2, 2, 2))
    C = np.zeros((2, 2, 2, 2))
    B[0, 0, 0] = -2.0 * g + 2.0 * (1.0 - 2.0 * x) * gx
    B[0, 0, 1] = B[0, 1, 0] = (1.0 - 2.0 * x) * gr + u * delta
    C[0, 0, 0, 0] = -6.0 * gx
    fxxr = -2.0 * gr + 2.0 * (1.0 - 2.0 * x) * delta
    C[0, 0, 0, 1] = C[0, 0, 1, 0] = C[0, 1, 0, 0] = fxxr
    eps, q = p.epsilon, p.eco.q
    if kind is SystemKind.SELF_RENEWING:
        sigma = q * (p.eco.e2 - p.eco.e1)
        B[1, 0, 1] = B[1, 1, 0] = eps * sigma
        B[1, 1, 1] = -2.0 * eps * sigma
    else:
        k1 = q * p.eco.e1 + p.eco.w
        k2 = q * p.eco.e2 + p.eco.w
        B[1, 0, 1] = B[1, 1, 0] = eps * (k2 - k1)
    return B, C


def eigenvalues(J: Jacobian2) -> tuple[complex, complex]:
    tr, det = J.trace, J.det
    disc = tr * tr - 4.0 * det
    if disc < 0:
        half = 0.5 * math.sqrt(-disc)
        return complex(0.5 * tr, half), complex(0.5 * tr, -half)
    # larger-magnitude root first, the other from the product: no cancellation
    big = 0.5 * (tr + math.copysign(math.sqrt(disc), tr))
    small = det / big if big != 0 else 0.0
    return complex(big), complex(small)


def classify(J: Jacobian2) -> StabilityClass:
    tr, det = J.trace, J.det
    n = J.norm_inf
    ev = eigenvalues(J)
    if abs(det) <= DET_TOL * (1.0 + n * n):
        kind = StabilityType.DEGENERATE
    elif det < 0:
        kind = StabilityType.SADDLE
    elif abs(tr) <= TRACE_TOL * (1.0 + n):
        kind = StabilityType.CENTER_CANDIDATE
    else:
        disc = tr * tr - 4.0 * det
        node = disc >= -DISC_TOL * max(1.0, tr * tr, 4.0 * abs(det))
        if tr < 0:
            kind = StabilityType.STABLE_NODE if node else StabilityType.STABLE_FOCUS
        else:
            kind = StabilityType.UNSTABLE_NODE if node else StabilityType.UNSTABLE_FOCUS
    return StabilityClass(kind, ev)


def classify_at(kind, p: ModelParams, s) -> StabilityClass:
    return classify(jacobian(kind, p, s))
