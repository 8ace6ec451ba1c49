"""Parameter and state types, the two normalized vector fields, and the
resource change of variables.

Both systems share the strategy equation

    x' = x (1 - x) (Delta x r + (a - b) x - (b + d) r + b),   Delta = b - a + d - c

and differ in the (slow) resource equation:

    self-renewing:        r' = eps (1 - q (e1 r + e2 (1 - r))) (x - r)
    externally supplied:  r' = eps (x (1 - r) (q e1 + w) - r (1 - x) (q e2 + w))
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from ecoevo.exceptions import DomainError, InvalidParameterError

#: States outside the unit square by at most this much are clamped.
CLAMP_TOL = 1e-9


class SystemKind(enum.Enum):
    SELF_RENEWING = "sr"
    EXTERNALLY_SUPPLIED = "es"

    @classmethod
    def parse(cls, value: "SystemKind | str") -> "SystemKind":
        if isinstance(value, cls):
            return value
        v = str(value).strip().lower()
        aliases = {
            "sr": cls.SELF_RENEWING,
            "s": cls.SELF_RENEWING,
            "self_renewing": cls.SELF_RENEWING,
            "selfrenewing": cls.SELF_RENEWING,
            "es": cls.EXTERNALLY_SUPPLIED,
            "e": cls.EXTERNALLY_SUPPLIED,
            "externally_supplied": cls.EXTERNALLY_SUPPLIED,
            "externallysupplied": cls.EXTERNALLY_SUPPLIED,
        }
        try:
            return aliases[v]
        except KeyError:
            raise InvalidParameterError(f"unknown system kind {value!r}; use 'sr' or 'es'") from None

    @property
    def code(self) -> int:
        """Integer tag used by the compiled integrator."""
        return 0 if self is SystemKind.SELF_RENEWING else 1


def _check_finite(**values: float) -> None:
    bad = [k for k, v in values.items() if not math.isfinite(v)]
    if bad:
        raise InvalidParameterError(f"non-finite parameter(s): {', '.join(bad)}")


@dataclass(frozen=True)
class RawPayoffs:
    """The two extreme-environment payoff matrices [[R, S], [T, P]] at r=0 and r=1."""

    R0: float
    S0: float
    T0: float
    P0: float
    R1: float
    S1: float
    T1: float
    P1: float

    def __post_init__(self):
        _check_finite(**{k: getattr(self, k) for k in ("R0", "S0", "T0", "P0", "R1", "S1", "T1", "P1")})

    @property
    def M0(self) -> np.ndarray:
        return np.array([[self.R0, self.S0], [self.T0, self.P0]], dtype=float)

    @property
    def M1(self) -> np.ndarray:
        return np.array([[self.R1, self.S1], [self.T1, self.P1]], dtype=float)


@dataclass(frozen=True)
class PayoffDeltas:
    """Payoff differences between the two strategies in the extreme environments."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        _check_finite(a=self.a, b=self.b, c=self.c, d=self.d)

    @property
    def delta(self) -> float:
        return self.b - self.a + self.d - self.c


@dataclass(frozen=True)
class Ecology:
    """Harvest efforts and resource constants.

    ``w`` is only used by the externally supplied system; ``K`` and ``kappa``
    only enter the raw resource change of variables.
    """

    q: float = 1.0
    e1: float = 0.2
    e2: float = 0.8
    w: float = 1.0
    K: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        _check_finite(q=self.q, e1=self.e1, e2=self.e2, w=self.w, K=self.K, kappa=self.kappa)
        problems = []
        if self.q <= 0:
            problems.append("q must be > 0")
        if not (0 < self.e1 < self.e2 < 1 / self.q if self.q > 0 else False):
            problems.append("harvest efforts must satisfy 0 < e1 < e2 < 1/q")
        for name in ("w", "K", "kappa"):
            if getattr(self, name) <= 0:
                problems.append(f"{name} must be > 0")
        if problems:
            raise InvalidParameterError("; ".join(problems))


@dataclass(frozen=True)
class ModelParams:
    deltas: PayoffDeltas
    eco: Ecology = field(default_factory=Ecology)
    epsilon: float = 1.0

    def __post_init__(self):
        _check_finite(epsilon=self.epsilon)
        if not 0 < self.epsilon <= 1:
            raise InvalidParameterError(f"epsilon must lie in (0, 1], got {self.epsilon}")

    @classmethod
    def from_values(cls, a, b, c, d, *, q=1.0, e1=0.2, e2=0.8, w=1.0, K=1.0, kappa=1.0, epsilon=1.0):
        return cls(PayoffDeltas(a, b, c, d), Ecology(q=q, e1=e1, e2=e2, w=w, K=K, kappa=kappa), epsilon)

    def with_(self, **changes) -> "ModelParams":
        """Copy with any of a, b, c, d, q, e1, e2, w, K, kappa, epsilon replaced."""
        d = {k: changes.pop(k) for k in ("a", "b", "c", "d") if k in changes}
        e = {k: changes.pop(k) for k in ("q", "e1", "e2", "w", "K", "kappa") if k in changes}
        eps = changes.pop("epsilon", self.epsilon)
        if changes:
            raise InvalidParameterError(f"unknown parameter(s): {sorted(changes)}")
        return ModelParams(replace(self.deltas, **d), replace(self.eco, **e), eps)

    def as_dict(self) -> dict[str, float]:
        return {
            "a": self.deltas.a,
            "b": self.deltas.b,
            "c": self.deltas.c,
            "d": self.deltas.d,
            "q": self.eco.q,
            "w": self.eco.w,
            "K": self.eco.K,
            "kappa": self.eco.kappa,
            "e1": self.eco.e1,
            "e2": self.eco.e2,
            "epsilon": self.epsilon,
        }

    def as_array(self) -> np.ndarray:
        """Packed layout consumed by the compiled kernels: a, b, c, d, q, w, e1, e2, eps."""
        return np.array(
            [
                self.deltas.a,
                self.deltas.b,
                self.deltas.c,
                self.deltas.d,
                self.eco.q,
                self.eco.w,
                self.eco.e1,
                self.eco.e2,
                self.epsilon,
            ],
            dtype=np.float64,
        )


@dataclass(frozen=True)
class State:
    x: float
    r: float

    def __post_init__(self):
        _check_finite(x=self.x, r=self.r)

    def __iter__(self):
        yield self.x
        yield self.r

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.r)


def benchmark_params(c: float = -0.05, epsilon: float = 1.0) -> ModelParams:
    """The fixed payoff/ecology setting in which only ``c`` and ``epsilon`` vary:
    q = w = 1, e1 = 0.2, e2 = 0.8, a = 0.2, b = 0.1, d = 0.4."""
    return ModelParams.from_values(0.2, 0.1, c, 0.4, q=1.0, w=1.0, e1=0.2, e2=0.8, epsilon=epsilon)


def clamp_state(s: "State | tuple[float, float]") -> State:
    """Clamp rounding-level excursions back into the unit square."""
    x, r = (s.x, s.r) if isinstance(s, State) else s
    for name, v in (("x", x), ("r", r)):
        if not math.isfinite(v) or v < -CLAMP_TOL or v > 1 + CLAMP_TOL:
            raise DomainError(f"state component {name}={v!r} lies outside the unit square")
    return State(min(max(x, 0.0), 1.0), min(max(r, 0.0), 1.0))


def payoff_deltas(raw: RawPayoffs) -> PayoffDeltas:
    return PayoffDeltas(raw.R0 - raw.T0, raw.S0 - raw.P0, raw.T1 - raw.R1, raw.P1 - raw.S1)


def payoff_matrix(r: float, raw: RawPayoffs) -> np.ndarray:
    """Environment-dependent payoff matrix ``(1 - r) M0 + r M1``."""
    if not (0.0 <= r <= 1.0):
        raise DomainError(f"r must lie in [0, 1], got {r}")
    if r == 0.0:
        return raw.M0
    if r == 1.0:
        return raw.M1
    return (1.0 - r) * raw.M0 + r * raw.M1


def strategy_rate(p: ModelParams, x: float, r: float) -> float:
    a, b, c, d = p.deltas.a, p.deltas.b, p.deltas.c, p.deltas.d
    # same polynomial as Delta x r + (a - b) x - (b + d) r + b, written to be exact at the corners
    g = (1.0 - r) * (b * (1.0 - x) + a * x) - r * (d * (1.0 - x) + c * x)
    return x * (1.0 - x) * g


def resource_rate(kind: SystemKind, p: ModelParams, x: float, r: float) -> float:
    eco = p.eco
    if kind is SystemKind.SELF_RENEWING:
        return p.epsilon * (1.0 - eco.q * (eco.e1 * r + eco.e2 * (1.0 - r))) * (x - r)
    k1 = eco.q * eco.e1 + eco.w
    k2 = eco.q * eco.e2 + eco.w
    return p.epsilon * (x * (1.0 - r) * k1 - r * (1.0 - x) * k2)


def vector_field(kind: "SystemKind | str", p: ModelParams, s: "State | tuple[float, float]") -> tuple[float, float]:
    """Return ``(x', r')`` at ``s``."""
    kind = SystemKind.parse(kind)
    s = clamp_state(s)
    return strategy_rate(p, s.x, s.r), resource_rate(kind, p, s.x, s.r)


def replicator_rate(raw: RawPayoffs, x: float, r: float) -> float:
    """x' written directly from the payoff matrices: x (1 - x) [(A x)_1 - (A x)_2]."""
    A = payoff_matrix(r, raw)
    fitness = A @ np.array([x, 1.0 - x])
    return x * (1.0 - x) * (fitness[0] - fitness[1])


def normalize_resource(kind: "SystemKind | str", m: float, eco: Ecology) -> float:
    """Map a raw resource amount ``m`` to the normalized coordinate ``r``.

    Emits a ``RuntimeWarning`` when the result falls outside [0, 1] by more
    than rounding.
    """
    kind = SystemKind.parse(kind)
    q, e1, e2 = eco.q, eco.e1, eco.e2
    if kind is SystemKind.SELF_RENEWING:
        r = (m - eco.kappa * (1.0 - q * e2)) / (q * eco.kappa * (e2 - e1))
    else:
        r = (q * e1 + eco.w) * (m * (q * e2 + eco.w) - eco.K) / (eco.K * q * (e2 - e1))
    if not (-CLAMP_TOL <= r <= 1.0 + CLAMP_TOL):
        warnings.warn(f"normalized resource r={r} lies outside [0, 1]", RuntimeWarning, stacklevel=2)
    return r


def denormalize_resource(kind: "SystemKind | str", r: float, eco: Ecology) -> float:
    kind = SystemKind.parse(kind)
    q, e1, e2 = eco.q, eco.e1, eco.e2
    if kind is SystemKind.SELF_RENEWING:
        return eco.kappa * (1.0 - q * e2) + r * q * eco.kappa * (e2 - e1)
    return (r * eco.K * q * (e2 - e1) / (q * e1 + eco.w) + eco.K) / (q * e2 + eco.w)
