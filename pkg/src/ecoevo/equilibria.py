"""Boundary and interior equilibria of the two systems.

Interior equilibria reduce to a quadratic in r. For the self-renewing system
the second equation forces x = r; for the externally supplied system it gives
x as a Moebius map of r.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from ecoevo.exceptions import DomainError
from ecoevo.model import ModelParams, State, SystemKind

COEF_ZERO_TOL = 1e-12
DISC_ZERO_TOL = 1e-12
INTERIOR_MARGIN = 1e-9


class BoundaryTag(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    DEGENERATE = "degenerate"


class InteriorKind(enum.Enum):
    EMPTY = "empty"
    ISOLATED = "isolated"
    CONTINUUM = "continuum"


@dataclass(frozen=True)
class QuadraticCoeffs:
    A2: float
    A1: float
    A0: float

    @property
    def disc(self) -> float:
        return self.A1 * self.A1 - 4.0 * self.A2 * self.A0

    @property
    def scale(self) -> float:
        return max(1.0, abs(self.A2), abs(self.A1), abs(self.A0))

    def __call__(self, r: float) -> float:
        return (self.A2 * r + self.A1) * r + self.A0


@dataclass(frozen=True)
class InteriorSet:
    kind: InteriorKind
    points: tuple[State, ...] = ()
    # "double" marks a tangential root; "excluded:<r>" notes a root dropped by the margin rule
    tags: tuple[str, ...] = ()
    curve: str | None = None
    notes: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def as_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.kind is InteriorKind.ISOLATED:
            d["points"] = [{"x": s.x, "r": s.r, "tag": t} for s, t in zip(self.points, self.tags)]
        if self.curve is not None:
            d["curve"] = self.curve
        if self.notes:
            d["notes"] = list(self.notes)
        return d


@dataclass(frozen=True)
class EquilibriumSet:
    boundary: tuple[tuple[State, BoundaryTag], ...]
    interior: InteriorSet = field(default_factory=lambda: InteriorSet(InteriorKind.EMPTY))

    def as_dict(self) -> dict:
        return {
            "boundary": [{"x": s.x, "r": s.r, "stability": t.value} for s, t in self.boundary],
            "interior": self.interior.as_dict(),
        }


def interior_quadratic(kind: "SystemKind | str", p: ModelParams) -> QuadraticCoeffs:
    """Coefficients of the quadratic in r whose roots locate interior equilibria."""
    kind = SystemKind.parse(kind)
    a, b, c, d = p.deltas.a, p.deltas.b, p.deltas.c, p.deltas.d
    delta = b - a + d - c
    if kind is SystemKind.SELF_RENEWING:
        return QuadraticCoeffs(delta, a - 2 * b - d, b)
    q, e1, e2, w = p.eco.q, p.eco.e1, p.eco.e2, p.eco.w
    return QuadraticCoeffs(
        delta * (q * e2 + w) - q * (b + d) * (e2 - e1),
        q * (a * e2 - 2 * b * e1 - d * e1) + w * (a - 2 * b - d),
        b * (q * e1 + w),
    )


def x_of_r(kind: "SystemKind | str", p: ModelParams, r: float) -> float:
    """x on the resource nullcline through an interior point with resource level r."""
    kind = SystemKind.parse(kind)
    if kind is SystemKind.SELF_RENEWING:
        return r
    q, e1, e2, w = p.eco.q, p.eco.e1, p.eco.e2, p.eco.w
    return (q * e2 + w) * r / ((q * e1 + w) + q * (e2 - e1) * r)


def _continuum_curve(kind: SystemKind) -> str:
    if kind is SystemKind.SELF_RENEWING:
        return "x=r"
    return "x = (q e2+w)r / ((q e1+w)+q(e2-e1)r)"


def quadratic_roots(qc: QuadraticCoeffs) -> tuple[str, tuple[float, ...]]:
    """Real roots of ``qc`` as (mode, roots).

    mode is one of "continuum", "none", "linear", "double", "two".
    """
    tol = COEF_ZERO_TOL * qc.scale
    A2 = 0.0 if abs(qc.A2) <= tol else qc.A2
    A1 = 0.0 if abs(qc.A1) <= tol else qc.A1
    A0 = 0.0 if abs(qc.A0) <= tol else qc.A0
    if A2 == 0.0 and A1 == 0.0:
        return ("continuum", ()) if A0 == 0.0 else ("none", ())
    if A2 == 0.0:
        return "linear", (-A0 / A1,)
    disc = A1 * A1 - 4.0 * A2 * A0
    dscale = max(1.0, A1 * A1, 4.0 * abs(A2 * A0))
    if abs(disc) <= DISC_ZERO_TOL * dscale:
        return "double", (-A1 / (2.0 * A2),)
    if disc < 0:
        return "none", ()
    # larger-magnitude root first, the other from the product of roots
    s = -0.5 * (A1 + math.copysign(math.sqrt(disc), A1))
    r1 = s / A2
    r2 = A0 / s if s != 0.0 else 0.0
    return "two", tuple(sorted((r1, r2)))


def solve_interior(kind: "SystemKind | str", p: ModelParams) -> InteriorSet:
    """Interior equilibria strictly inside the open unit square, sorted by r."""
    kind = SystemKind.parse(kind)
    qc = interior_quadratic(kind, p)
    mode, roots = quadratic_roots(qc)
    if mode == "continuum":
        return InteriorSet(InteriorKind.CONTINUUM, curve=_continuum_curve(kind))
    pts, tags, notes = [], [], []
    for r in roots:
        if not (INTERIOR_MARGIN < r < 1.0 - INTERIOR_MARGIN):
            if -INTERIOR_MARGIN <= r <= 1.0 + INTERIOR_MARGIN:
                notes.append(f"root r={r!r} within {INTERIOR_MARGIN} of the boundary excluded")
            continue
        x = x_of_r(kind, p, r)
        if not (INTERIOR_MARGIN < x < 1.0 - INTERIOR_MARGIN):
            notes.append(f"root r={r!r} maps to x={x!r} at the boundary; excluded")
            continue
        pts.append(State(x, r))
        tags.append("double" if mode == "double" else "simple")
    if not pts:
        return InteriorSet(InteriorKind.EMPTY, notes=tuple(notes))
    return InteriorSet(InteriorKind.ISOLATED, tuple(pts), tuple(tags), notes=tuple(notes))


def _tag(v: float) -> BoundaryTag:
    if v < 0:
        return BoundaryTag.STABLE
    if v > 0:
        return BoundaryTag.UNSTABLE
    return BoundaryTag.DEGENERATE


def boundary_stability(kind: "SystemKind | str", p: ModelParams) -> dict[tuple[int, int], BoundaryTag]:
    """Stability of the corners (0, 0) and (1, 1).

    Both Jacobians are lower triangular; the resource eigenvalue is always
    negative, so the strategy eigenvalue (b at the origin, c at (1, 1)) decides.
    """
    SystemKind.parse(kind)
    return {(0, 0): _tag(p.deltas.b), (1, 1): _tag(p.deltas.c)}


def equilibria(kind: "SystemKind | str", p: ModelParams) -> EquilibriumSet:
    tags = boundary_stability(kind, p)
    boundary = ((State(0.0, 0.0), tags[(0, 0)]), (State(1.0, 1.0), tags[(1, 1)]))
    return EquilibriumSet(boundary, solve_interior(kind, p))


def branch_s(c: float) -> tuple[State | None, State | None]:
    """Closed-form self-renewing interior branches for the benchmark setting
    (a=0.2, b=0.1, d=0.4, q=1, e1=0.2, e2=0.8).

    Returns (saddle branch, focus branch); the saddle branch exists only for
    -0.1 < c < 0 (it touches the focus branch at c = -0.1) and is None otherwise.
    The textbook form of the focus branch is 0/0 at c = 0.3; the rationalized
    form used here is regular there and gives the linear root r = 0.25.
    """
    if not math.isfinite(c) or c < -0.1:
        raise DomainError(f"no interior branch for c={c}; need c >= -0.1")
    root = math.sqrt(max(0.04 + 0.4 * c, 0.0))
    # (0.4 - root) / (2(0.3 - c)) multiplied through by (0.4 + root): no 0/0 at c = 0.3
    r2 = 0.2 / (0.4 + root)
    s2 = State(r2, r2)
    s1 = None
    if c < 0.0:
        r1 = (0.4 + root) / (2.0 * (0.3 - c))
        s1 = State(r1, r1)
    return s1, s2
