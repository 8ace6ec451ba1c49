"""Regime classification over the (c, eps) plane and critical-eps surfaces.

Decision tree for one cell:

    continuum of equilibria              -> DegenerateContinuum
    no interior equilibrium              -> NoInterior
    only saddles inside                  -> SaddlePlusOther
    focus/node stable                    -> StableInterior
        ... l1 > 0 upstream on the curve, a backward unstable cycle and a
            larger forward stable cycle around it -> BistableTwoCycles
    focus/node unstable                  -> UnstableInteriorWithCycle
        ... a forward search that leaves for the boundary -> UnstableInteriorNoCycle
    trace within tolerance of zero       -> Undetermined (flag "center")

Equilibria and the Hopf point depend on c only, so they are computed once
per c column.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ecoevo.equilibria import InteriorKind, solve_interior
from ecoevo.exceptions import EcoEvoError, InvalidParameterError
from ecoevo.hopf import GHPoint, HopfPoint, focus_equilibria, hopf_epsilon, hopf_point, locate_gh
from ecoevo.linearize import StabilityType, classify_at
from ecoevo.model import ModelParams, State, SystemKind
from ecoevo.parallel import parallel_map
from ecoevo.simulate import CycleOutcome, Direction, IntegratorOptions, search_limit_cycle

SCAN_T_MAX = 2e4
BISTABLE_WINDOW = 0.02


class RegimeLabel(enum.Enum):
    NO_INTERIOR = "NoInterior"
    STABLE_INTERIOR = "StableInterior"
    UNSTABLE_INTERIOR_WITH_CYCLE = "UnstableInteriorWithCycle"
    UNSTABLE_INTERIOR_NO_CYCLE = "UnstableInteriorNoCycle"
    BISTABLE_TWO_CYCLES = "BistableTwoCycles"
    SADDLE_PLUS_OTHER = "SaddlePlusOther"
    DEGENERATE_CONTINUUM = "DegenerateContinuum"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class ScanCell:
    label: RegimeLabel
    eq_count: int
    l1_sign: int  # 0 when there is no Hopf point for this c
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScanGrid:
    kind: SystemKind
    c_axis: np.ndarray
    epsilon_axis: np.ndarray
    cells: tuple[tuple[ScanCell, ...], ...]  # cells[i][j] at (c_axis[i], epsilon_axis[j])
    hopf_overlay: tuple[HopfPoint, ...]
    gh_overlay: GHPoint | None
    metadata: dict = field(default_factory=dict)

    def labels(self) -> np.ndarray:
        return np.array([[cell.label.value for cell in row] for row in self.cells], dtype=object)

    def rows(self):
        for i, c in enumerate(self.c_axis):
            for j, e in enumerate(self.epsilon_axis):
                cell = self.cells[i][j]
                yield float(c), float(e), cell.label.value, cell.eq_count, cell.l1_sign, "|".join(cell.flags)

    def cell_of(self, c: float, eps: float) -> tuple[int, int]:
        return int(np.argmin(np.abs(self.c_axis - c))), int(np.argmin(np.abs(self.epsilon_axis - eps)))

    def labels_near(self, c: float, eps: float, radius: int = 1) -> set[str]:
        i0, j0 = self.cell_of(c, eps)
        out = set()
        for i in range(max(0, i0 - radius), min(len(self.c_axis), i0 + radius + 1)):
            for j in range(max(0, j0 - radius), min(len(self.epsilon_axis), j0 + radius + 1)):
                out.add(self.cells[i][j].label.value)
        return out


@dataclass(frozen=True)
class _Column:
    c: float
    kind: str  # "continuum", "empty", "saddles", "focus"
    eq_count: int
    focus: State | None
    hopf: HopfPoint | None


def _column(kind: SystemKind, p: ModelParams, c: float) -> _Column:
    pc = p.with_(c=c)
    interior = solve_interior(kind, pc)
    if interior.kind is InteriorKind.CONTINUUM:
        return _Column(c, "continuum", 0, None, None)
    if interior.kind is InteriorKind.EMPTY:
        return _Column(c, "empty", 0, None, None)
    foci = focus_equilibria(kind, pc)
    if not foci:
        return _Column(c, "saddles", len(interior), None, None)
    try:
        hp = hopf_point(kind, pc, foci[0])
    except EcoEvoError:
        hp = None
    return _Column(c, "focus", len(interior), foci[0], hp)


def _cell(args) -> ScanCell:
    kind, p, col, eps, simulate_cycles, t_max = args
    l1_sign = 0 if col.hopf is None else int(np.sign(col.hopf.l1))
    if col.kind == "continuum":
        return ScanCell(RegimeLabel.DEGENERATE_CONTINUUM, 0, 0)
    if col.kind == "empty":
        return ScanCell(RegimeLabel.NO_INTERIOR, 0, 0)
    if col.kind == "saddles":
        return ScanCell(RegimeLabel.SADDLE_PLUS_OTHER, col.eq_count, 0)
    pe = p.with_(c=col.c, epsilon=eps)
    sc = classify_at(kind, pe, col.focus)
    n = col.eq_count
    if sc.type in (StabilityType.CENTER_CANDIDATE, StabilityType.DEGENERATE):
        return ScanCell(RegimeLabel.UNDETERMINED, n, l1_sign, ("center",))
    opts = IntegratorOptions(t_max=t_max)
    if sc.type.is_stable:
        if not simulate_cycles or col.hopf is None or l1_sign <= 0 or not (col.hopf.epsilon < eps <= col.hopf.epsilon + BISTABLE_WINDOW):
            return ScanCell(RegimeLabel.STABLE_INTERIOR, n, l1_sign)
        back = search_limit_cycle(kind, pe, None, Direction.BACKWARD, opts, equilibrium=col.focus)
        if back.cycle is None:
            return ScanCell(RegimeLabel.STABLE_INTERIOR, n, l1_sign, ("no-unstable-cycle",))
        du = back.cycle.section_point.r - col.focus.r
        seed = State(col.focus.x, min(col.focus.r + du + max(1e-3, 0.1 * du), 1.0))
        fwd = search_limit_cycle(kind, pe, seed, Direction.FORWARD, opts, equilibrium=col.focus)
        if fwd.cycle is not None and fwd.cycle.amplitude > back.cycle.amplitude:
            return ScanCell(RegimeLabel.BISTABLE_TWO_CYCLES, n, l1_sign)
        return ScanCell(RegimeLabel.STABLE_INTERIOR, n, l1_sign, ("unstable-cycle-only",))
    # unstable focus or node
    if not simulate_cycles:
        return ScanCell(RegimeLabel.UNSTABLE_INTERIOR_WITH_CYCLE, n, l1_sign, ("linear-only",))
    res = search_limit_cycle(kind, pe, None, Direction.FORWARD, opts, equilibrium=col.focus)
    if res.outcome is CycleOutcome.CYCLE:
        return ScanCell(RegimeLabel.UNSTABLE_INTERIOR_WITH_CYCLE, n, l1_sign)
    if res.outcome is CycleOutcome.TO_BOUNDARY:
        return ScanCell(RegimeLabel.UNSTABLE_INTERIOR_NO_CYCLE, n, l1_sign)
    return ScanCell(RegimeLabel.UNSTABLE_INTERIOR_WITH_CYCLE, n, l1_sign, ("unrefined",))


def two_param_scan(
    kind: "SystemKind | str",
    p: ModelParams,
    c_range: tuple[float, float],
    eps_range: tuple[float, float],
    resolution: "int | tuple[int, int]" = 100,
    simulate_cycles: bool = True,
    *,
    threads: int | None = None,
    t_max: float = SCAN_T_MAX,
) -> ScanGrid:
    kind = SystemKind.parse(kind)
    nc, ne = (resolution, resolution) if isinstance(resolution, int) else resolution
    if nc < 2 or ne < 2:
        raise InvalidParameterError("resolution must be >= 2 per axis")
    if not (c_range[0] < c_range[1] and 0 < eps_range[0] < eps_range[1] <= 1):
        raise InvalidParameterError("invalid scan ranges")
    c_axis = np.linspace(c_range[0], c_range[1], nc)
    e_axis = np.linspace(eps_range[0], eps_range[1], ne)
    cols = [_column(kind, p, float(c)) for c in c_axis]
    jobs = [(kind, p, col, float(e), simulate_cycles, t_max) for col in cols for e in e_axis]
    flat = parallel_map(_cell, jobs, threads)
    cells = tuple(tuple(flat[i * ne : (i + 1) * ne]) for i in range(nc))
    overlay = tuple(
        col.hopf for col in cols if col.hopf is not None and eps_range[0] <= col.hopf.epsilon <= eps_range[1]
    )
    gh = locate_gh(kind, p, c_range, n_samples=max(nc, 50))
    if gh is not None and not (eps_range[0] <= gh.epsilon <= eps_range[1]):
        gh = None
    meta = {
        "kind": kind.value,
        "c_range": list(c_range),
        "eps_range": list(eps_range),
        "resolution": [nc, ne],
        "simulate_cycles": simulate_cycles,
        "t_max": t_max,
        "bistable_window": BISTABLE_WINDOW,
    }
    return ScanGrid(kind, c_axis, e_axis, cells, overlay, gh, meta)


# -- critical-eps surfaces ----------------------------------------------------

SURFACE_AXES = ("b", "c", "e1")


@dataclass(frozen=True)
class EpsilonSurface:
    axes: tuple[str, str]
    u: np.ndarray
    v: np.ndarray
    values: np.ndarray  # values[i, j] at (u[i], v[j]); NaN where masked
    mask: np.ndarray  # True where a valid critical eps in (0, 1) exists

    def rows(self):
        for i, a in enumerate(self.u):
            for j, b in enumerate(self.v):
                yield float(a), float(b), float(self.values[i, j]), bool(self.mask[i, j])


def _surface_value(kind: SystemKind, p: ModelParams) -> float:
    for s in focus_equilibria(kind, p):
        eps = hopf_epsilon(kind, p, s)
        if eps is not None and eps < 1.0:
            return eps
    return math.nan


def epsilon_surface(
    kind: "SystemKind | str",
    p: ModelParams,
    free_axes: tuple[str, str],
    ranges: tuple[tuple[float, float], tuple[float, float]],
    resolution: "int | tuple[int, int]" = 50,
) -> EpsilonSurface:
    """Critical eps over two of (b, c, e1) with the rest held at ``p``."""
    kind = SystemKind.parse(kind)
    a1, a2 = free_axes
    if a1 not in SURFACE_AXES or a2 not in SURFACE_AXES or a1 == a2:
        raise InvalidParameterError(f"free_axes must be two distinct names from {SURFACE_AXES}")
    n1, n2 = (resolution, resolution) if isinstance(resolution, int) else resolution
    u = np.linspace(*ranges[0], n1)
    v = np.linspace(*ranges[1], n2)
    vals = np.full((n1, n2), math.nan)
    for i, x in enumerate(u):
        for j, y in enumerate(v):
            try:
                pij = p.with_(**{a1: float(x), a2: float(y)})
            except InvalidParameterError:
                continue
            vals[i, j] = _surface_value(kind, pij)
    mask = np.isfinite(vals)
    return EpsilonSurface((a1, a2), u, v, vals, mask)
