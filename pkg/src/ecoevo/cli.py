"""Command-line front end.

Every command accepts the parameter flags (--kind, --a ... --epsilon) and an
optional ``--config`` file of ``key = value`` lines; flags override the file.
Each run writes ``<out>.cfg`` that replays it. Exit status: 0 success,
1 computation error, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from ecoevo import io
from ecoevo.equilibria import equilibria
from ecoevo.exceptions import EcoEvoError, InvalidParameterError
from ecoevo.hopf import appendix_l1_oracle, default_c_range, hopf_curve, hopf_point, locate_gh
from ecoevo.linearize import classify, jacobian
from ecoevo.model import Ecology, ModelParams, State, SystemKind
from ecoevo.scan import epsilon_surface, two_param_scan
from ecoevo.simulate import Direction, IntegratorOptions, integrate, search_limit_cycle, seed_grid

PARAM_DEFAULTS = {
    "kind": "sr",
    "a": 0.2,
    "b": 0.1,
    "c": -0.05,
    "d": 0.4,
    "q": 1.0,
    "w": 1.0,
    "K": 1.0,
    "kappa": 1.0,
    "e1": 0.2,
    "e2": 0.8,
    "epsilon": 1.0,
}
FLOAT_KEYS = [k for k in PARAM_DEFAULTS if k != "kind"]

REPRO_TARGETS = ("fig2", "fig3a", "fig3b", "fig3c", "fig3d", "fig3e", "fig3f", "fig4", "fig5", "fig6")
LABEL_COLOURS = {
    "NoInterior": "#dddddd",
    "StableInterior": "#9ecae1",
    "UnstableInteriorWithCycle": "#fdae6b",
    "UnstableInteriorNoCycle": "#fee6ce",
    "BistableTwoCycles": "#a1d99b",
    "SaddlePlusOther": "#bcbddc",
    "DegenerateContinuum": "#636363",
    "Undetermined": "#ffffff",
}


class UsageError(Exception):
    """Aggregated validation failure (exit status 2)."""


# -- parser -------------------------------------------------------------------


def _common(sp: argparse.ArgumentParser) -> None:
    g = sp.add_argument_group("model parameters")
    g.add_argument("--kind", choices=["sr", "es"], default=None)
    for k in FLOAT_KEYS:
        g.add_argument(f"--{k}", type=float, default=None)
    sp.add_argument("--config", type=Path, default=None, help="key = value parameter file")
    sp.add_argument("--out", default=None, help="output path prefix")
    sp.add_argument("--threads", type=int, default=None, help="worker threads (overrides ECOEVO_THREADS)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ecoevo", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="integrate one trajectory")
    sp.add_argument("--x0", type=float, default=0.3)
    sp.add_argument("--r0", type=float, default=0.7)
    sp.add_argument("--t-max", dest="t_max", type=float, default=1e4)
    sp.add_argument("--backward", action="store_true")
    sp.add_argument("--rtol", type=float, default=1e-9)
    sp.add_argument("--atol", type=float, default=1e-12)
    sp.add_argument("--max-step", dest="max_step", type=float, default=1.0)
    sp.add_argument("--min-step", dest="min_step", type=float, default=1e-12)

    sp = sub.add_parser("equilibria", help="boundary and interior equilibria")

    sp = sub.add_parser("jacobian", help="Jacobian, trace, determinant and class at a point")
    sp.add_argument("--x", type=float, required=False, default=None)
    sp.add_argument("--r", type=float, required=False, default=None)

    sp = sub.add_parser("hopf-curve", help="trace-zero curve with l1 and transversality")
    sp.add_argument("--c-min", dest="c_min", type=float, default=None)
    sp.add_argument("--c-max", dest="c_max", type=float, default=None)
    sp.add_argument("--n", type=int, default=200)

    sp = sub.add_parser("lyapunov", help="first Lyapunov coefficient at the Hopf point for --c")
    sp.add_argument("--normalization", choices=["resource", "unit"], default="resource")

    sp = sub.add_parser("gh", help="locate the generalized Hopf point")
    sp.add_argument("--c-min", dest="c_min", type=float, default=None)
    sp.add_argument("--c-max", dest="c_max", type=float, default=None)

    sp = sub.add_parser("scan", help="two-parameter (c, eps) regime scan")
    sp.add_argument("--c-min", dest="c_min", type=float, default=-0.12)
    sp.add_argument("--c-max", dest="c_max", type=float, default=0.0)
    sp.add_argument("--eps-min", dest="eps_min", type=float, default=0.01)
    sp.add_argument("--eps-max", dest="eps_max", type=float, default=0.3)
    sp.add_argument("--nc", type=int, default=100)
    sp.add_argument("--neps", type=int, default=100)
    sp.add_argument("--no-cycles", dest="no_cycles", action="store_true")

    sp = sub.add_parser("surface", help="critical-eps surface over two of b, c, e1")
    sp.add_argument("--axes", default="b,c")
    sp.add_argument("--u-range", dest="u_range", default="0.0,0.3", help="lo,hi (use --u-range=-0.1,0 for negative lo)")
    sp.add_argument("--v-range", dest="v_range", default="-0.12,0.0")
    sp.add_argument("--n", type=int, default=50)

    sp = sub.add_parser("portrait", help="trajectory bundle and nullclines for phase portraits")
    sp.add_argument("--seeds", default=None, help='"x,r;x,r;..."')
    sp.add_argument("--grid", type=int, default=3)
    sp.add_argument("--t-max", dest="t_max", type=float, default=3000.0)

    sp = sub.add_parser("repro", help="regenerate the data behind a figure")
    sp.add_argument("target", choices=REPRO_TARGETS)
    sp.add_argument("--resolution", type=int, default=100, help="scan resolution for fig3f")

    for sp in sub.choices.values():
        _common(sp)
    return ap


# -- configuration ---------------------------------------------------------------


def _resolve(args: argparse.Namespace, sub: argparse.ArgumentParser) -> tuple[SystemKind, ModelParams, dict]:
    """Merge defaults, config file and flags; collect every problem before failing."""
    errors: list[str] = []
    values = dict(PARAM_DEFAULTS)
    options = {}
    if args.config is not None:
        try:
            cfg = io.parse_config(args.config.read_text(encoding="utf-8"))
        except (OSError, InvalidParameterError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        dests = {a.dest: a for a in sub._actions}
        for k, v in cfg.items():
            if k == "command":
                if v != args.command:
                    errors.append(f"config is for command {v!r}, not {args.command!r}")
            elif k in values:
                values[k] = v
            elif k in dests and k not in ("config", "out", "help"):
                options[k] = v
            else:
                errors.append(f"unknown config key {k!r}")
    for k in PARAM_DEFAULTS:
        flag = getattr(args, k, None)
        if flag is not None:
            values[k] = flag
    try:
        kind = SystemKind.parse(values["kind"])
    except InvalidParameterError as exc:
        errors.append(str(exc))
        kind = SystemKind.SELF_RENEWING
    nums = {}
    for k in FLOAT_KEYS:
        try:
            nums[k] = float(values[k])
            if not math.isfinite(nums[k]):
                errors.append(f"{k} must be finite")
        except (TypeError, ValueError):
            errors.append(f"{k}={values[k]!r} is not a number")
    p = None
    if len(nums) == len(FLOAT_KEYS):
        if not 0 < nums["epsilon"] <= 1:
            errors.append(f"epsilon must lie in (0, 1], got {nums['epsilon']}")
        try:
            Ecology(q=nums["q"], e1=nums["e1"], e2=nums["e2"], w=nums["w"], K=nums["K"], kappa=nums["kappa"])
        except InvalidParameterError as exc:
            errors.append(str(exc))
    if not errors:
        p = ModelParams.from_values(
            nums["a"], nums["b"], nums["c"], nums["d"], q=nums["q"], e1=nums["e1"], e2=nums["e2"],
            w=nums["w"], K=nums["K"], kappa=nums["kappa"], epsilon=nums["epsilon"],
        )
    # command options: config values apply unless the flag differs from its default
    for k, v in options.items():
        act = next(a for a in sub._actions if a.dest == k)
        if getattr(args, k) == act.default:
            try:
                if act.const is True:  # store_true
                    setattr(args, k, str(v).strip().lower() in ("1", "true", "yes"))
                else:
                    setattr(args, k, act.type(v) if act.type else v)
            except (TypeError, ValueError):
                errors.append(f"bad value for {k}: {v!r}")
    errors += _check_options(args)
    if errors:
        raise UsageError("; ".join(errors))
    return kind, p, {"kind": kind.value, **nums}


def _check_options(a: argparse.Namespace) -> list[str]:
    e = []
    for name in ("n", "nc", "neps", "grid", "resolution"):
        v = getattr(a, name, None)
        if v is not None and v < 2:
            e.append(f"--{name} must be >= 2")
    for name in ("t_max", "rtol", "atol", "max_step", "min_step"):
        v = getattr(a, name, None)
        if v is not None and not v > 0:
            e.append(f"--{name.replace('_', '-')} must be positive")
    if a.command == "simulate" and not (0 <= a.x0 <= 1 and 0 <= a.r0 <= 1):
        e.append("--x0 and --r0 must lie in [0, 1]")
    if a.command == "jacobian":
        if a.x is None or a.r is None:
            e.append("jacobian needs --x and --r")
        elif not (0 <= a.x <= 1 and 0 <= a.r <= 1):
            e.append("--x and --r must lie in [0, 1]")
    if a.command == "surface":
        axes = a.axes.split(",")
        if len(axes) != 2 or any(x not in ("b", "c", "e1") for x in axes) or axes[0] == axes[1]:
            e.append("--axes must name two of b, c, e1")
        for nm in ("u_range", "v_range"):
            try:
                lo, hi = (float(s) for s in getattr(a, nm).split(","))
                if not lo < hi:
                    e.append(f"--{nm.replace('_', '-')} needs lo < hi")
            except ValueError:
                e.append(f"--{nm.replace('_', '-')} must be 'lo,hi'")
    if a.command == "portrait" and a.seeds:
        try:
            for s in _parse_seeds(a.seeds):
                if not (0 <= s.x <= 1 and 0 <= s.r <= 1):
                    e.append(f"seed {s.x},{s.r} outside the unit square")
        except (ValueError, EcoEvoError):
            e.append("--seeds must look like 'x,r;x,r'")
    if a.command == "scan" and not (a.c_min < a.c_max and 0 < a.eps_min < a.eps_max <= 1):
        e.append("scan ranges need c-min < c-max and 0 < eps-min < eps-max <= 1")
    return e


def _parse_seeds(text: str) -> list[State]:
    out = []
    for part in text.split(";"):
        if part.strip():
            x, r = (float(v) for v in part.split(","))
            out.append(State(x, r))
    return out


def _write_replay(out: str, args: argparse.Namespace, sub: argparse.ArgumentParser, values: dict) -> None:
    skip = {"config", "out", "help", "threads", "command"} | set(PARAM_DEFAULTS)
    opts = {a.dest: getattr(args, a.dest) for a in sub._actions if a.dest not in skip and hasattr(args, a.dest)}
    body = {"command": args.command, **values, **{k: v for k, v in opts.items() if v is not None}}
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    Path(out + ".cfg").write_text(io.format_config(body), encoding="utf-8")


# -- commands -------------------------------------------------------------------


class Ctx:
    def __init__(self, kind, p, out, threads, started):
        self.kind, self.p, self.out, self.threads, self.started = kind, p, out, threads, started
        self.written: list[str] = []

    def csv(self, suffix, header, rows, extra=None):
        path = io.write_csv(self.out + suffix, header, rows)
        io.write_sidecar(path, self.kind, self.p, self.started, extra)
        self.written.append(str(path))
        return path

    def json(self, suffix, obj, p=None):
        path = io.write_json(self.out + suffix, obj)
        io.write_sidecar(path, self.kind, p or self.p, self.started)
        self.written.append(str(path))
        return path

    def svg(self, suffix, text):
        path = Path(self.out + suffix)
        path.write_text(text, encoding="utf-8")
        io.write_sidecar(path, self.kind, self.p, self.started)
        self.written.append(str(path))


def cmd_simulate(ctx: Ctx, a) -> dict:
    opts = IntegratorOptions(a.rtol, a.atol, a.max_step, a.min_step, a.t_max, Direction.BACKWARD if a.backward else Direction.FORWARD)
    tr = integrate(ctx.kind, ctx.p, State(a.x0, a.r0), opts)
    ctx.csv(".csv", ["t", "x", "r"], zip(tr.t, tr.x, tr.r), {"terminal": tr.terminal.value})
    return {"terminal": tr.terminal.value, "final": [tr.final.x, tr.final.r], "samples": len(tr)}


def cmd_equilibria(ctx: Ctx, a) -> dict:
    rec = {"kind": ctx.kind.value, "params": ctx.p.as_dict(), **equilibria(ctx.kind, ctx.p).as_dict()}
    ctx.json(".json", rec)
    return rec


def cmd_jacobian(ctx: Ctx, a) -> dict:
    J = jacobian(ctx.kind, ctx.p, State(a.x, a.r))
    sc = classify(J)
    rec = {
        "point": [a.x, a.r],
        "matrix": J.as_array().tolist(),
        "trace": J.trace,
        "det": J.det,
        "class": sc.type.value,
        "eigenvalues": [[z.real, z.imag] for z in sc.eigenvalues],
    }
    ctx.json(".json", rec)
    return rec


HOPF_HEADER = ["c", "epsilon", "omega0", "l1", "transversality", "criticality"]


def _hopf_rows(curve):
    return ([hp.c, hp.epsilon, hp.omega0, hp.l1, hp.transversality, hp.criticality.value] for hp in curve)


def _c_range(kind, a):
    lo, hi = default_c_range(kind)
    return (a.c_min if a.c_min is not None else lo, a.c_max if a.c_max is not None else hi)


def cmd_hopf_curve(ctx: Ctx, a) -> dict:
    curve = hopf_curve(ctx.kind, ctx.p, _c_range(ctx.kind, a), a.n)
    ctx.csv(".csv", HOPF_HEADER, _hopf_rows(curve), {"skipped": len(curve.skipped)})
    if curve:
        cs = [hp.c for hp in curve]
        es = [hp.epsilon for hp in curve]
        ctx.svg(".svg", io.svg_document((min(cs), max(cs)), (0.0, max(es) * 1.05), polylines=[list(zip(cs, es))], labels=("c", "eps")))
    return {"points": len(curve), "skipped": len(curve.skipped)}


def cmd_lyapunov(ctx: Ctx, a) -> dict:
    hp = hopf_point(ctx.kind, ctx.p, normalization=a.normalization)
    if hp is None:
        raise EcoEvoError(f"no Hopf point at c={ctx.p.deltas.c}")
    rec = {**hp.as_row(), "normalization": a.normalization, "equilibrium": [hp.equilibrium.x, hp.equilibrium.r]}
    try:
        rec["closed_form_l1"] = appendix_l1_oracle(ctx.kind, hp.c)
    except EcoEvoError:
        rec["closed_form_l1"] = None
    ctx.json(".json", rec)
    return rec


def cmd_gh(ctx: Ctx, a) -> dict:
    gh = locate_gh(ctx.kind, ctx.p, _c_range(ctx.kind, a))
    rec = {"result": "none"} if gh is None else {"result": "found", **gh.as_dict()}
    ctx.json(".json", rec)
    return rec


def _write_scan(ctx: Ctx, grid) -> None:
    ctx.csv(".csv", ["c", "epsilon", "label", "eq_count", "l1_sign", "flags"], grid.rows(), grid.metadata)
    ctx.csv("_hopf.csv", HOPF_HEADER, _hopf_rows(grid.hopf_overlay))
    gh = grid.gh_overlay
    ctx.csv("_gh.csv", ["c", "epsilon", "omega0", "width"], [[gh.c, gh.epsilon, gh.omega0, gh.width]] if gh else [])
    dc = (grid.c_axis[1] - grid.c_axis[0]) / 2
    de = (grid.epsilon_axis[1] - grid.epsilon_axis[0]) / 2
    cells = [
        (c - dc, e - de, c + dc, e + de, LABEL_COLOURS[lab])
        for c, e, lab, *_ in grid.rows()
    ]
    line = [(hp.c, hp.epsilon) for hp in grid.hopf_overlay]
    ctx.svg(
        ".svg",
        io.svg_document(
            (grid.c_axis[0] - dc, grid.c_axis[-1] + dc),
            (grid.epsilon_axis[0] - de, grid.epsilon_axis[-1] + de),
            cells=cells,
            polylines=[line] if line else [],
            points=[(gh.c, gh.epsilon)] if gh else [],
            labels=("c", "eps"),
        ),
    )


def cmd_scan(ctx: Ctx, a) -> dict:
    grid = two_param_scan(
        ctx.kind, ctx.p, (a.c_min, a.c_max), (a.eps_min, a.eps_max), (a.nc, a.neps), not a.no_cycles, threads=ctx.threads
    )
    _write_scan(ctx, grid)
    counts: dict[str, int] = {}
    for row in grid.cells:
        for cell in row:
            counts[cell.label.value] = counts.get(cell.label.value, 0) + 1
    return {"counts": counts, "gh": None if grid.gh_overlay is None else grid.gh_overlay.as_dict()}


def _surface(ctx: Ctx, axes, u_range, v_range, n, suffix=".csv") -> dict:
    s = epsilon_surface(ctx.kind, ctx.p, axes, (u_range, v_range), n)
    ctx.csv(suffix, [axes[0], axes[1], "epsilon", "valid"], s.rows(), {"axes": list(axes)})
    return {"axes": list(axes), "valid_fraction": float(s.mask.mean())}


def cmd_surface(ctx: Ctx, a) -> dict:
    axes = tuple(a.axes.split(","))
    u = tuple(float(v) for v in a.u_range.split(","))
    v = tuple(float(x) for x in a.v_range.split(","))
    return _surface(ctx, axes, u, v, a.n)


def nullclines(kind: SystemKind, p: ModelParams, n: int = 400):
    """Interior x' = 0 and r' = 0 loci sampled at n points each."""
    a_, b, c, d = p.deltas.a, p.deltas.b, p.deltas.c, p.deltas.d
    delta = b - a_ + d - c
    xs = np.linspace(0.0, 1.0, n)
    strat = []
    for x in xs:
        den = (b + d) - delta * x
        if den != 0:
            r = ((a_ - b) * x + b) / den
            if 0.0 <= r <= 1.0:
                strat.append((float(x), float(r)))
    rs = np.linspace(0.0, 1.0, n)
    if kind is SystemKind.SELF_RENEWING:
        res = [(float(r), float(r)) for r in rs]
    else:
        q, e1, e2, w = p.eco.q, p.eco.e1, p.eco.e2, p.eco.w
        res = [(float((q * e2 + w) * r / ((q * e1 + w) + q * (e2 - e1) * r)), float(r)) for r in rs]
    return strat, res


def _portrait(ctx: Ctx, seeds, t_max) -> dict:
    opts = IntegratorOptions(t_max=t_max)
    index = []
    finals = []
    for i, s in enumerate(seeds):
        tr = integrate(ctx.kind, ctx.p, s, opts)
        name = f"_traj{i:03d}.csv"
        ctx.csv(name, ["t", "x", "r"], zip(tr.t, tr.x, tr.r))
        index.append([i, s.x, s.r, tr.final.x, tr.final.r, tr.terminal.value, Path(ctx.out + name).name])
        finals.append([tr.final.x, tr.final.r])
    ctx.csv("_index.csv", ["id", "x0", "r0", "x_end", "r_end", "terminal", "file"], index)
    strat, res = nullclines(ctx.kind, ctx.p)
    rows = [["strategy", x, r] for x, r in strat] + [["resource", x, r] for x, r in res]
    ctx.csv("_nullclines.csv", ["curve", "x", "r"], rows)
    return {"trajectories": len(seeds), "finals": finals}


def cmd_portrait(ctx: Ctx, a) -> dict:
    seeds = _parse_seeds(a.seeds) if a.seeds else seed_grid(a.grid)
    return _portrait(ctx, seeds, a.t_max)


def _cycle_files(ctx: Ctx, res, suffix: str) -> dict:
    rec = {"outcome": res.outcome.value, "returns": len(res.returns)}
    if res.cycle is not None:
        cy = res.cycle
        ctx.csv(suffix + ".csv", ["t", "x", "r"], zip(cy.points.t, cy.points.x, cy.points.r))
        rec.update(cy.as_dict())
    ctx.json(suffix + "_summary.json", rec)
    return rec


def cmd_repro(ctx: Ctx, a) -> dict:
    t = a.target
    sr, es = SystemKind.SELF_RENEWING, SystemKind.EXTERNALLY_SUPPLIED
    base = ctx.p

    def with_(kind, **kw):
        ctx.kind = kind
        ctx.p = base.with_(**kw)

    if t == "fig2":
        out = {}
        root = ctx.out
        for kind in (sr, es):
            with_(kind)
            ctx.out = f"{root}_{kind.value}"
            curve = hopf_curve(kind, ctx.p, default_c_range(kind), 200)
            ctx.csv(".csv", HOPF_HEADER, _hopf_rows(curve))
            out[kind.value] = len(curve)
        return out
    if t in ("fig3a", "fig3b"):
        kind, c = (sr, -0.15) if t == "fig3a" else (es, -0.05)
        with_(kind, c=c, epsilon=0.2)
        return _portrait(ctx, seed_grid(5), 5000.0)
    if t in ("fig3c", "fig3d"):
        kind, c, eps = (sr, -0.05, 0.125) if t == "fig3c" else (es, 0.2, 0.02)
        with_(kind, c=c, epsilon=eps)
        res = search_limit_cycle(kind, ctx.p)
        seed = res.cycle.seed if res.cycle else State(0.0, 0.0)
        if res.cycle is None:
            from ecoevo.simulate import section_anchor

            eq = section_anchor(kind, ctx.p)
            seed = State(eq.x + 0.02, eq.r)
        tr = integrate(kind, ctx.p, seed, IntegratorOptions(t_max=5000.0))
        ctx.csv("_trajectory.csv", ["t", "x", "r"], zip(tr.t, tr.x, tr.r))
        return _cycle_files(ctx, res, "_cycle")
    if t == "fig3e":
        with_(sr, c=-0.091, epsilon=0.145)
        fwd = search_limit_cycle(sr, ctx.p, None, Direction.FORWARD)
        back = search_limit_cycle(sr, ctx.p, None, Direction.BACKWARD)
        out = {"forward": _cycle_files(ctx, fwd, "_forward"), "backward": _cycle_files(ctx, back, "_backward")}
        from ecoevo.simulate import section_anchor

        eq = section_anchor(sr, ctx.p)
        seeds = [State(eq.x + dx, eq.r) for dx in (0.005, 0.01, 0.02, 0.03, 0.05, 0.08)]
        out["portrait"] = _portrait(ctx, seeds, 5000.0)
        return out
    if t == "fig3f":
        with_(sr)
        grid = two_param_scan(sr, ctx.p, (-0.12, 0.0), (0.01, 0.3), a.resolution, True, threads=ctx.threads)
        _write_scan(ctx, grid)
        return {"gh": None if grid.gh_overlay is None else grid.gh_overlay.as_dict()}
    if t in ("fig4", "fig5"):
        kind = sr if t == "fig4" else es
        with_(kind)
        c_rng = (-0.12, 0.0) if kind is sr else (-1 / 60, 0.8)
        out = {}
        out["b_c"] = _surface(ctx, ("b", "c"), (0.0, 0.3), c_rng, 60, "_b_c.csv")
        out["c_e1"] = _surface(ctx, ("c", "e1"), c_rng, (0.05, 0.75), 60, "_c_e1.csv")
        return out
    if t == "fig6":
        out = {}
        for kind in (sr, es):
            with_(kind)
            curve = hopf_curve(kind, ctx.p, default_c_range(kind), 200)
            rows = []
            for hp in curve:
                try:
                    orc = appendix_l1_oracle(kind, hp.c)
                except EcoEvoError:
                    orc = math.nan
                rows.append([hp.c, hp.l1, orc])
            ctx.csv(f"_{kind.value}.csv", ["c", "l1", "closed_form_l1"], rows)
            out[kind.value] = len(rows)
        return out
    raise UsageError(f"unknown target {t}")


COMMANDS = {
    "simulate": cmd_simulate,
    "equilibria": cmd_equilibria,
    "jacobian": cmd_jacobian,
    "hopf-curve": cmd_hopf_curve,
    "lyapunov": cmd_lyapunov,
    "gh": cmd_gh,
    "scan": cmd_scan,
    "surface": cmd_surface,
    "portrait": cmd_portrait,
    "repro": cmd_repro,
}


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    sub = ap._subparsers._group_actions[0].choices[args.command]
    started = time.perf_counter()
    try:
        kind, p, values = _resolve(args, sub)
    except UsageError as exc:
        print(f"ecoevo: error: {exc}", file=sys.stderr)
        return 2
    name = args.command if args.command != "repro" else f"repro_{args.target}"
    out = args.out or str(Path("ecoevo_out") / name)
    ctx = Ctx(kind, p, out, args.threads, started)
    try:
        _write_replay(out, args, sub, values)
        result = COMMANDS[args.command](ctx, args)
    except UsageError as exc:
        print(f"ecoevo: error: {exc}", file=sys.stderr)
        return 2
    except (EcoEvoError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"ecoevo: computation failed: {exc}", file=sys.stderr)
        return 1
    print(json.dumps({"command": name, "result": result, "files": ctx.written}, default=io._json_default, sort_keys=True), file=stdout)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
