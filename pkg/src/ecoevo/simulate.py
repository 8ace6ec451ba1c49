"""Trajectories, limit cycles via a Poincare return map, and basin sampling.

All integration runs through the compiled Dormand-Prince kernel in
``ecoevo._kernel``. Backward time is the same field with its sign flipped.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ecoevo import _kernel as K
from ecoevo.exceptions import InvalidParameterError, PreconditionError, StiffnessError
from ecoevo.hopf import focus_equilibria
from ecoevo.equilibria import InteriorKind, solve_interior
from ecoevo.model import ModelParams, State, SystemKind, clamp_state
from ecoevo.parallel import parallel_map

CAUCHY_TOL = 1e-7
MIN_CYCLE_SIZE = 1e-6
FORWARD_SEED = 0.02
BACKWARD_SEED = 0.005
CHUNK = 1 << 16


class Direction(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"

    @property
    def sign(self) -> float:
        return 1.0 if self is Direction.FORWARD else -1.0

    @classmethod
    def parse(cls, v) -> "Direction":
        if isinstance(v, cls):
            return v
        try:
            return cls(str(v).lower())
        except ValueError:
            raise InvalidParameterError(f"direction must be 'forward' or 'backward', got {v!r}") from None


@dataclass(frozen=True)
class IntegratorOptions:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float = 1.0
    min_step: float = 1e-12
    t_max: float = 1e5
    direction: Direction = Direction.FORWARD

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction.parse(self.direction))
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InvalidParameterError("tolerances must be positive")
        if not (0 < self.min_step <= self.max_step):
            raise InvalidParameterError("need 0 < min_step <= max_step")
        if not self.t_max > 0:
            raise InvalidParameterError("t_max must be positive")


class Terminal(enum.Enum):
    HORIZON_REACHED = "HorizonReached"
    CONVERGED_TO_POINT = "ConvergedToPoint"
    CYCLE_HANDOFF = "CycleHandoff"
    # only reachable backward: the forward flow keeps the square invariant
    LEFT_DOMAIN = "LeftDomain"


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    r: np.ndarray
    terminal: Terminal
    final: State

    @property
    def converged_to(self) -> State | None:
        return self.final if self.terminal is Terminal.CONVERGED_TO_POINT else None

    @property
    def samples(self) -> list[tuple[float, State]]:
        return [(float(t), State(float(x), float(r))) for t, x, r in zip(self.t, self.x, self.r)]

    def __len__(self) -> int:
        return len(self.t)


class Stability(enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class LimitCycle:
    points: Trajectory
    period: float
    amplitude: float
    stability: Stability
    converged_crossings: int
    section_point: State
    seed: State

    def as_dict(self) -> dict:
        return {
            "period": self.period,
            "amplitude": self.amplitude,
            "stability": self.stability.value,
            "crossings": self.converged_crossings,
            "section_point": [self.section_point.x, self.section_point.r],
            "seed": [self.seed.x, self.seed.r],
        }


class CycleOutcome(enum.Enum):
    CYCLE = "cycle"
    TO_EQUILIBRIUM = "to_equilibrium"
    # left the neighbourhood of the equilibrium for another attractor or the edge
    TO_BOUNDARY = "to_boundary"
    HORIZON = "horizon"
    STIFF = "stiff"


@dataclass(frozen=True)
class CycleSearch:
    outcome: CycleOutcome
    cycle: LimitCycle | None
    returns: np.ndarray
    t_end: float


_TERMINAL = {
    K.STATUS_HORIZON: Terminal.HORIZON_REACHED,
    K.STATUS_CONVERGED: Terminal.CONVERGED_TO_POINT,
    K.STATUS_EXITED: Terminal.LEFT_DOMAIN,
    K.STATUS_CROSSING: Terminal.CYCLE_HANDOFF,
}


def _ctrl() -> np.ndarray:
    return np.array([0.0, 1e-4, 0.0])


def _record(kind, pa, sgn, x, r, t_end, opts, *, section=None, first=True):
    """Chunked recording run. Returns (t, x, r arrays, status, final x, r)."""
    ts, xs, rs = ([0.0], [x], [r]) if first else ([], [], [])
    chunks_t, chunks_x, chunks_r = [np.array(ts)], [np.array(xs)], [np.array(rs)]
    ctrl = _ctrl()
    t = 0.0
    sec_on = section is not None
    sx, sr = section if sec_on else (0.0, 0.0)
    while True:
        bt, bx, br = np.empty(CHUNK), np.empty(CHUNK), np.empty(CHUNK)
        n, st, t, x, r = K.run(
            kind, pa, sgn, t, x, r, t_end, opts.rel_tol, opts.abs_tol, opts.max_step, opts.min_step,
            ctrl, sec_on, sx, sr, bt, bx, br,
        )
        chunks_t.append(bt[:n])
        chunks_x.append(bx[:n])
        chunks_r.append(br[:n])
        if st != K.STATUS_BUFFER_FULL:
            break
    return np.concatenate(chunks_t), np.concatenate(chunks_x), np.concatenate(chunks_r), st, x, r


def integrate(
    kind: "SystemKind | str",
    p: ModelParams,
    s0: "State | tuple[float, float]",
    opts: IntegratorOptions | None = None,
) -> Trajectory:
    """Adaptive integration from ``s0`` up to ``opts.t_max`` (or earlier convergence).

    Times are signed: backward runs report t <= 0. Raises ``StiffnessError``
    with the partial trajectory when the step falls below ``min_step``.
    """
    kind = SystemKind.parse(kind)
    opts = opts or IntegratorOptions()
    s0 = clamp_state(s0)
    sgn = opts.direction.sign
    t, x, r, st, xf, rf = _record(kind.code, p.as_array(), sgn, s0.x, s0.r, opts.t_max, opts)
    t = sgn * t
    if st == K.STATUS_UNDERFLOW:
        partial = Trajectory(t, x, r, Terminal.HORIZON_REACHED, State(xf, rf))
        raise StiffnessError(f"step size fell below min_step={opts.min_step} at t={t[-1]}", partial)
    return Trajectory(t, x, r, _TERMINAL[st], State(min(max(xf, 0.0), 1.0), min(max(rf, 0.0), 1.0)))


def section_anchor(kind: "SystemKind | str", p: ModelParams) -> State:
    """Interior equilibrium used to anchor the Poincare section (a focus if there is one)."""
    foci = focus_equilibria(kind, p)
    if foci:
        return foci[0]
    interior = solve_interior(kind, p)
    if interior.kind is InteriorKind.ISOLATED:
        return interior.points[0]
    raise PreconditionError("no isolated interior equilibrium to anchor the section")


def _aitken_limit(d: np.ndarray) -> float:
    d0, d1, d2 = d[-3], d[-2], d[-1]
    den = (d2 - d1) - (d1 - d0)
    if abs(d2 - d1) < 1e-9 or den == 0.0:
        return d2
    return d2 - (d2 - d1) ** 2 / den


def search_limit_cycle(
    kind: "SystemKind | str",
    p: ModelParams,
    seed: "State | tuple[float, float] | None" = None,
    direction: "Direction | str" = Direction.FORWARD,
    opts: IntegratorOptions | None = None,
    *,
    equilibrium: State | None = None,
    max_returns: int = 20000,
    tol: float = CAUCHY_TOL,
) -> CycleSearch:
    """Poincare-map cycle search with the reason it stopped.

    The section is the line x = x_eq above the equilibrium (r > r_eq). The
    search stops once three consecutive returns agree to ``tol``; a sequence
    that is instead contracting onto the equilibrium is told apart by its
    Aitken-extrapolated limit.
    """
    kind = SystemKind.parse(kind)
    direction = Direction.parse(direction)
    opts = opts or IntegratorOptions()
    eq = State(*equilibrium) if equilibrium is not None else section_anchor(kind, p)
    if seed is None:
        off = FORWARD_SEED if direction is Direction.FORWARD else BACKWARD_SEED
        seed = State(min(eq.x + off, 1.0), eq.r)
    seed = clamp_state(seed)
    if seed.x == eq.x and seed.r == eq.r:
        raise PreconditionError("seed coincides with the equilibrium")
    pa = p.as_array()
    sgn = direction.sign
    rets_r = np.empty(max_returns)
    rets_t = np.empty(max_returns)
    n, st, t, x, r = K.poincare(
        kind.code, pa, sgn, seed.x, seed.r, eq.x, eq.r, opts.t_max,
        opts.rel_tol, opts.abs_tol, opts.max_step, opts.min_step, tol, _ctrl(), rets_r, rets_t,
    )
    d = rets_r[:n] - eq.r
    if st == K.STATUS_CAUCHY:
        if d[-1] < MIN_CYCLE_SIZE or _aitken_limit(d) < 0.5 * d[-1]:
            return CycleSearch(CycleOutcome.TO_EQUILIBRIUM, None, d, t)
        period = float(np.mean(np.diff(rets_t[n - 4 : n])))
        start = State(x, r)
        pts = _one_period(kind, pa, sgn, start, eq, period, opts)
        amp = float(pts.x.max() - pts.x.min())
        stab = Stability.STABLE if direction is Direction.FORWARD else Stability.UNSTABLE
        return CycleSearch(CycleOutcome.CYCLE, LimitCycle(pts, period, amp, stab, n, start, seed), d, t)
    if st == K.STATUS_CONVERGED:
        at_eq = math.hypot(x - eq.x, r - eq.r) < 1e-6
        return CycleSearch(CycleOutcome.TO_EQUILIBRIUM if at_eq else CycleOutcome.TO_BOUNDARY, None, d, t)
    if st == K.STATUS_EXITED:
        return CycleSearch(CycleOutcome.TO_BOUNDARY, None, d, t)
    if st == K.STATUS_UNDERFLOW:
        return CycleSearch(CycleOutcome.STIFF, None, d, t)
    if st == K.STATUS_HORIZON and n == 0:
        # no crossing at all before the horizon: the orbit settled elsewhere
        near_corner = min(math.hypot(x, r), math.hypot(1 - x, 1 - r)) < 1e-3
        return CycleSearch(CycleOutcome.TO_BOUNDARY if near_corner else CycleOutcome.HORIZON, None, d, t)
    return CycleSearch(CycleOutcome.HORIZON, None, d, t)


def _one_period(kind, pa, sgn, start: State, eq: State, period: float, opts) -> Trajectory:
    t, x, r, st, xf, rf = _record(kind.code, pa, sgn, start.x, start.r, 1.5 * period + 1.0, opts, section=(eq.x, eq.r))
    return Trajectory(sgn * t, x, r, _TERMINAL.get(st, Terminal.HORIZON_REACHED), State(xf, rf))


def find_limit_cycle(
    kind: "SystemKind | str",
    p: ModelParams,
    seed: "State | tuple[float, float] | None" = None,
    direction: "Direction | str" = Direction.FORWARD,
    opts: IntegratorOptions | None = None,
    **kw,
) -> LimitCycle | None:
    """Stable cycle (forward) or unstable cycle (backward) reached from ``seed``, or None."""
    return search_limit_cycle(kind, p, seed, direction, opts, **kw).cycle


# -- basins -----------------------------------------------------------------

BOUNDARY_00 = "BoundaryEq(0,0)"
BOUNDARY_11 = "BoundaryEq(1,1)"
INTERIOR_EQ = "InteriorEq"
CYCLE = "Cycle"
UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class BasinGrid:
    axis: np.ndarray
    labels: tuple[tuple[str, ...], ...]  # labels[i][j] for x = axis[i], r = axis[j]

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for row in self.labels:
            for v in row:
                out[v] = out.get(v, 0) + 1
        return out

    def fraction(self, label: str) -> float:
        n = len(self.axis) ** 2
        return self.counts().get(label, 0) / n


def _label_cell(args) -> str:
    kind, pa, x0, r0, eqs, opts, tail = args
    ctrl = _ctrl()
    e = np.empty(0)
    _, st, t, x, r = K.run(kind, pa, 1.0, 0.0, x0, r0, opts.t_max, opts.rel_tol, opts.abs_tol, opts.max_step,
                           opts.min_step, ctrl, False, 0.0, 0.0, e, e, e)
    if st == K.STATUS_UNDERFLOW:
        return UNDETERMINED

    def nearest(xx, rr, lim):
        best, lab = lim, None
        for (ex, er), name in eqs:
            dd = math.hypot(xx - ex, rr - er)
            if dd < best:
                best, lab = dd, name
        return lab

    if st == K.STATUS_CONVERGED:
        return nearest(x, r, 1e-6) or UNDETERMINED
    n = int(tail / opts.max_step) * 4 + 16
    bt, bx, br = np.empty(n), np.empty(n), np.empty(n)
    k, st, _, x, r = K.run(kind, pa, 1.0, t, x, r, t + tail, opts.rel_tol, opts.abs_tol, opts.max_step,
                           opts.min_step, ctrl, False, 0.0, 0.0, bt, bx, br)
    if st == K.STATUS_CONVERGED:
        return nearest(x, r, 1e-6) or UNDETERMINED
    if k and bx[:k].max() - bx[:k].min() > 1e-4:
        return CYCLE
    return nearest(x, r, 1e-4) or UNDETERMINED


def basin_sample(
    kind: "SystemKind | str",
    p: ModelParams,
    grid_n: int,
    opts: IntegratorOptions | None = None,
    *,
    tail: float = 2000.0,
    threads: int | None = None,
) -> BasinGrid:
    """Label the omega-limit of each point of a grid_n x grid_n interior lattice.

    Forward runs go to ``opts.t_max`` (default 1e4 here); an unconverged run
    is followed for ``tail`` more time units and called a Cycle when x still
    oscillates by more than 1e-4.
    """
    kind = SystemKind.parse(kind)
    if grid_n < 2:
        raise InvalidParameterError("grid_n must be >= 2")
    opts = opts or IntegratorOptions(t_max=1e4)
    axis = (np.arange(grid_n) + 0.5) / grid_n
    eqs = [((0.0, 0.0), BOUNDARY_00), ((1.0, 1.0), BOUNDARY_11)]
    interior = solve_interior(kind, p)
    if interior.kind is InteriorKind.ISOLATED:
        eqs += [((s.x, s.r), INTERIOR_EQ) for s in interior.points]
    pa = p.as_array()
    jobs = [(kind.code, pa, float(x0), float(r0), eqs, opts, tail) for x0 in axis for r0 in axis]
    flat = parallel_map(_label_cell, jobs, threads)
    labels = tuple(tuple(flat[i * grid_n : (i + 1) * grid_n]) for i in range(grid_n))
    return BasinGrid(axis, labels)


def seed_grid(n: int) -> Sequence[State]:
    axis = (np.arange(n) + 0.5) / n
    return [State(float(x), float(r)) for x in axis for r in axis]
