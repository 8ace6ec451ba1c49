"""Trace-zero curves, transversality, first Lyapunov coefficients, and the
generalized Hopf point.

Interior equilibria do not move with eps, and the trace of the Jacobian there
is affine in eps with a negative slope, so each equilibrium has at most one
critical eps. The first Lyapunov coefficient uses the invariant planar
formula with exact second and third derivatives:

    l1 = Re[<p, C(q,q,qb)> - 2 <p, B(q, A^-1 B(q,qb))> + <p, B(qb, (2iw - A)^-1 B(q,q))>] / (2w)

with A q = i w q, A^T p = -i w p, <p, q> = 1. Its magnitude scales with |q|^2;
see ``first_lyapunov`` for the normalizations on offer.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ecoevo import closed_forms
from ecoevo.equilibria import InteriorKind, solve_interior
from ecoevo.exceptions import DomainError, PreconditionError
from ecoevo.linearize import derivative_tensors, jacobian
from ecoevo.model import ModelParams, State, SystemKind, benchmark_params, resource_rate, strategy_rate

RESIDUAL_TOL = 1e-9
EIG_TOL = 1e-8
L1_ZERO_TOL = 1e-12
ENDPOINT_MARGIN = 1e-6
GH_TOL = 1e-6

#: Hopf c-intervals of the benchmark setting
HOPF_INTERVALS = {
    SystemKind.SELF_RENEWING: closed_forms.SR_HOPF_INTERVAL,
    SystemKind.EXTERNALLY_SUPPLIED: closed_forms.ES_HOPF_INTERVAL,
}


class Criticality(enum.Enum):
    SUPERCRITICAL = "Supercritical"
    SUBCRITICAL = "Subcritical"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class HopfPoint:
    c: float
    epsilon: float
    omega0: float
    l1: float
    transversality: float
    criticality: Criticality
    equilibrium: State

    def as_row(self) -> dict:
        return {
            "c": self.c,
            "epsilon": self.epsilon,
            "omega0": self.omega0,
            "l1": self.l1,
            "transversality": self.transversality,
            "criticality": self.criticality.value,
        }


@dataclass(frozen=True)
class GHPoint:
    c: float
    epsilon: float
    omega0: float
    width: float
    l1_bracket: tuple[float, float]
    equilibrium: State

    def as_dict(self) -> dict:
        return {
            "c": self.c,
            "epsilon": self.epsilon,
            "omega0": self.omega0,
            "width": self.width,
            "l1_bracket": list(self.l1_bracket),
            "equilibrium": {"x": self.equilibrium.x, "r": self.equilibrium.r},
        }


class HopfCurve(list):
    """List of HopfPoint ordered by c; ``skipped`` holds (c, reason) pairs."""

    def __init__(self, points=(), skipped=()):
        super().__init__(points)
        self.skipped: list[tuple[float, str]] = list(skipped)


def criticality_of(l1: float) -> Criticality:
    if l1 < -L1_ZERO_TOL:
        return Criticality.SUPERCRITICAL
    if l1 > L1_ZERO_TOL:
        return Criticality.SUBCRITICAL
    return Criticality.DEGENERATE


def focus_equilibria(kind: "SystemKind | str", p: ModelParams) -> list[State]:
    """Isolated interior equilibria with positive Jacobian determinant.

    The determinant is eps times an eps-free factor, so the selection does
    not depend on eps.
    """
    interior = solve_interior(kind, p)
    if interior.kind is not InteriorKind.ISOLATED:
        return []
    out = []
    for s in interior.points:
        J = jacobian(kind, p, s)
        if J.det > 1e-12 * (1.0 + J.norm_inf**2):
            out.append(s)
    return out


def _check_equilibrium(kind: SystemKind, p: ModelParams, s: State) -> None:
    p1 = p.with_(epsilon=1.0)
    fx = strategy_rate(p1, s.x, s.r)
    fr = resource_rate(kind, p1, s.x, s.r)
    if abs(fx) > RESIDUAL_TOL or abs(fr) > RESIDUAL_TOL:
        raise PreconditionError(f"({s.x}, {s.r}) is not an equilibrium: residuals {fx:.3e}, {fr:.3e}")


def _trace_parts(kind: SystemKind, p: ModelParams, s: State) -> tuple[float, float]:
    """Trace = t0 + eps * t1 at ``s``."""
    J = jacobian(kind, p.with_(epsilon=1.0), s)
    return J.j11, J.j22


def hopf_epsilon(kind: "SystemKind | str", p: ModelParams, equilibrium: State) -> float | None:
    """Critical eps in (0, 1] where the trace at ``equilibrium`` vanishes, else None.

    ``p.epsilon`` is ignored.
    """
    kind = SystemKind.parse(kind)
    equilibrium = State(*equilibrium)
    _check_equilibrium(kind, p, equilibrium)
    t0, t1 = _trace_parts(kind, p, equilibrium)
    if t1 >= 0:
        return None
    eps = -t0 / t1
    if not (0.0 < eps <= 1.0):
        return None
    return eps


def _critical_vectors(A: np.ndarray, omega: float, normalization: str):
    a11, a12, a21, a22 = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
    iw = 1j * omega
    cand = [np.array([a12, iw - a11]), np.array([iw - a22, a21])]
    q = max(cand, key=lambda v: np.linalg.norm(v))
    if normalization == "unit":
        q = q / np.linalg.norm(q)
    elif normalization == "resource":
        if abs(q[1]) == 0:
            raise PreconditionError("critical eigenvector has no resource component")
        q = q / q[1]
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    cand = [np.array([a21, -(a11 + iw)]), np.array([a22 + iw, -a12])]
    pv = max(cand, key=lambda v: np.linalg.norm(v))
    pv = pv / np.conj(np.vdot(pv, q))
    return q, pv


def first_lyapunov(
    kind: "SystemKind | str",
    p: ModelParams,
    hopf_equilibrium: State,
    omega0: float,
    normalization: str = "resource",
) -> float:
    """First Lyapunov coefficient at a Hopf point; negative means supercritical.

    ``normalization`` fixes the critical eigenvector q, to which the value is
    proportional through |q|^2: "resource" sets its r-component to 1 (the
    scale of the published closed forms), "unit" sets |q| = 1.
    """
    kind = SystemKind.parse(kind)
    s = State(*hopf_equilibrium)
    Jm = jacobian(kind, p, s)
    scale = 1.0 + Jm.norm_inf
    if omega0 <= 0 or abs(Jm.trace) > EIG_TOL * scale or abs(math.sqrt(max(Jm.det, 0.0)) - omega0) > EIG_TOL * max(1.0, omega0):
        raise PreconditionError(
            f"Jacobian eigenvalues are not +/- i*{omega0}: trace={Jm.trace:.3e}, det={Jm.det:.3e}"
        )
    A = Jm.as_array()
    B, C = derivative_tensors(kind, p, s)
    q, pv = _critical_vectors(A, omega0, normalization)
    qb = np.conj(q)

    def bil(u, v):
        return np.einsum("ijk,j,k->i", B, u, v)

    def tri(u, v, w):
        return np.einsum("ijkl,j,k,l->i", C, u, v, w)

    term = (
        np.vdot(pv, tri(q, q, qb))
        - 2.0 * np.vdot(pv, bil(q, np.linalg.solve(A, bil(q, qb))))
        + np.vdot(pv, bil(qb, np.linalg.solve(2j * omega0 * np.eye(2) - A, bil(q, q))))
    )
    return float(term.real / (2.0 * omega0))


def hopf_point(
    kind: "SystemKind | str",
    p: ModelParams,
    equilibrium: State | None = None,
    normalization: str = "resource",
) -> HopfPoint | None:
    """Hopf data at ``equilibrium`` (default: the first focus equilibrium)."""
    kind = SystemKind.parse(kind)
    if equilibrium is None:
        foci = focus_equilibria(kind, p)
        if not foci:
            return None
        equilibrium = foci[0]
    eps = hopf_epsilon(kind, p, equilibrium)
    if eps is None:
        return None
    pc = p.with_(epsilon=eps)
    J = jacobian(kind, pc, equilibrium)
    if J.det <= 0:
        return None
    omega0 = math.sqrt(J.det)
    l1 = first_lyapunov(kind, pc, equilibrium, omega0, normalization)
    _, t1 = _trace_parts(kind, p, equilibrium)
    return HopfPoint(p.deltas.c, eps, omega0, l1, 0.5 * t1, criticality_of(l1), State(*equilibrium))


def default_c_range(kind: "SystemKind | str") -> tuple[float, float]:
    lo, hi = HOPF_INTERVALS[SystemKind.parse(kind)]
    return lo + ENDPOINT_MARGIN, hi - ENDPOINT_MARGIN


def hopf_curve(
    kind: "SystemKind | str",
    p: ModelParams | None = None,
    c_range: tuple[float, float] | None = None,
    n_samples: int = 200,
    normalization: str = "resource",
) -> HopfCurve:
    kind = SystemKind.parse(kind)
    p = p or benchmark_params()
    lo, hi = c_range or default_c_range(kind)
    pts, skipped = [], []
    for c in np.linspace(lo, hi, n_samples):
        c = float(c)
        try:
            hp = hopf_point(kind, p.with_(c=c), normalization=normalization)
        except (PreconditionError, DomainError) as exc:
            skipped.append((c, str(exc)))
            continue
        if hp is None:
            skipped.append((c, "no interior focus with critical eps in (0, 1]"))
        else:
            pts.append(hp)
    return HopfCurve(pts, skipped)


def transversality(kind: "SystemKind | str", p: ModelParams, c: float | None = None) -> float:
    """d Re(lambda)/d eps at the critical eps; half the eps-slope of the trace."""
    kind = SystemKind.parse(kind)
    if c is not None:
        p = p.with_(c=c)
    hp = hopf_point(kind, p)
    if hp is None:
        raise DomainError(f"no Hopf point at c={p.deltas.c}")
    return hp.transversality


def _l1_at(kind: SystemKind, p: ModelParams, c: float, normalization: str) -> tuple[float, HopfPoint] | None:
    try:
        hp = hopf_point(kind, p.with_(c=c), normalization=normalization)
    except (PreconditionError, DomainError):
        return None
    return (hp.l1, hp) if hp is not None else None


def locate_gh(
    kind: "SystemKind | str",
    p: ModelParams | None = None,
    c_range: tuple[float, float] | None = None,
    n_samples: int = 200,
    tol: float = GH_TOL,
    normalization: str = "resource",
) -> GHPoint | None:
    """First sign change of l1 along the Hopf curve, refined by bisection in c.

    Every l1 evaluation sits exactly on the curve (eps set to its critical
    value for that c).
    """
    kind = SystemKind.parse(kind)
    p = p or benchmark_params()
    lo, hi = c_range or default_c_range(kind)
    prev = None
    for c in np.linspace(lo, hi, n_samples):
        c = float(c)
        cur = _l1_at(kind, p, c, normalization)
        if cur is None:
            prev = None
            continue
        if prev is not None and (prev[1] > 0) != (cur[0] > 0) and prev[1] != 0 and cur[0] != 0:
            return _bisect_gh(kind, p, prev[0], c, prev[1], tol, normalization)
        prev = (c, cur[0])
    return None


def _bisect_gh(kind, p, a, b, la, tol, normalization) -> GHPoint | None:
    lb = None
    while b - a > tol:
        m = 0.5 * (a + b)
        cur = _l1_at(kind, p, m, normalization)
        if cur is None:
            return None
        if (cur[0] > 0) == (la > 0):
            a, la = m, cur[0]
        else:
            b, lb = m, cur[0]
    if lb is None:
        lb = _l1_at(kind, p, b, normalization)[0]
    m = 0.5 * (a + b)
    hp = hopf_point(kind, p.with_(c=m), normalization=normalization)
    return GHPoint(m, hp.epsilon, hp.omega0, b - a, (la, lb), hp.equilibrium)


def appendix_l1_oracle(kind: "SystemKind | str", c: float) -> float:
    """Published closed-form l1 for the benchmark setting, in its repaired reading.

    Self-renewing: ``closed_forms.sr_l1_repaired``. Externally supplied: the
    printed expression with the true critical frequency substituted for the
    printed one, whose square is negative.
    """
    kind = SystemKind.parse(kind)
    lo, hi = HOPF_INTERVALS[kind]
    if not (lo < c < hi):
        raise DomainError(f"c={c} outside the Hopf interval ({lo}, {hi})")
    if kind is SystemKind.SELF_RENEWING:
        return closed_forms.sr_l1_repaired(c)
    hp = hopf_point(kind, benchmark_params(c))
    if hp is None:
        raise DomainError(f"no Hopf point at c={c}")
    v = closed_forms.es_l1(c, hp.omega0)
    return float(v.real)
