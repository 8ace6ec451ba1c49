"""CSV/JSON/SVG writers and the flat key=value parameter format."""

from __future__ import annotations

import json
import math
import time
from pathlib import Path
from typing import Iterable, Sequence

from ecoevo import __version__
from ecoevo.exceptions import InvalidParameterError
from ecoevo.model import ModelParams, SystemKind

PARAM_KEYS = ("kind", "a", "b", "c", "d", "q", "w", "K", "kappa", "e1", "e2", "epsilon")


def fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float) or hasattr(v, "dtype"):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(v)


def write_csv(path: "str | Path", header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def read_csv(path: "str | Path") -> tuple[list[str], list[list[str]]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


def write_json(path: "str | Path", obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n", encoding="utf-8")
    return path


def _json_default(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    if hasattr(o, "value"):
        return o.value
    raise TypeError(f"not serializable: {type(o)}")


def write_sidecar(data_path: "str | Path", kind: SystemKind, p: ModelParams, started: float, extra: dict | None = None) -> Path:
    """Metadata next to ``data_path``: parameters, tool version, wall time.

    Wall time is the one field that differs between otherwise identical runs.
    """
    meta = {
        "file": Path(data_path).name,
        "kind": kind.value,
        "params": p.as_dict(),
        "tool": "ecoevo",
        "version": __version__,
        "wall_time_s": time.perf_counter() - started,
    }
    if extra:
        meta.update(extra)
    return write_json(str(data_path) + ".json", meta)


# -- parameter files ----------------------------------------------------------


def parse_config(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment. Unknown keys are kept
    so that the caller can report them together with other problems."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameterError(f"line {lineno}: expected key=value, got {raw!r}")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k] = v
    return out


def format_config(values: dict) -> str:
    return "".join(f"{k} = {fmt(v)}\n" for k, v in values.items())


# -- SVG ------------------------------------------------------------------------


def _sx(v, lo, hi, size, pad, flip=False):
    f = (v - lo) / (hi - lo) if hi > lo else 0.5
    return pad + (1 - f if flip else f) * (size - 2 * pad)


def svg_document(
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    *,
    polylines: Sequence[Sequence[tuple[float, float]]] = (),
    cells: Sequence[tuple[float, float, float, float, str]] = (),
    points: Sequence[tuple[float, float]] = (),
    size: int = 480,
    labels: tuple[str, str] = ("", ""),
) -> str:
    """Minimal SVG: coloured rectangles (x0, y0, x1, y1, colour), polylines, and marker points."""
    pad = 40
    X = lambda v: _sx(v, *x_range, size, pad)  # noqa: E731
    Y = lambda v: _sx(v, *y_range, size, pad, flip=True)  # noqa: E731
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">']
    for x0, y0, x1, y1, col in cells:
        out.append(
            f'<rect x="{X(x0):.2f}" y="{Y(y1):.2f}" width="{X(x1) - X(x0):.2f}" height="{Y(y0) - Y(y1):.2f}" fill="{col}"/>'
        )
    for line in polylines:
        pts = " ".join(f"{X(a):.2f},{Y(b):.2f}" for a, b in line)
        out.append(f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="1"/>')
    for a, b in points:
        out.append(f'<circle cx="{X(a):.2f}" cy="{Y(b):.2f}" r="3" fill="red"/>')
    lo, hi = pad, size - pad
    out.append(f'<line x1="{lo}" y1="{hi}" x2="{hi}" y2="{hi}" stroke="black"/>')
    out.append(f'<line x1="{lo}" y1="{lo}" x2="{lo}" y2="{hi}" stroke="black"/>')
    out.append(f'<text x="{lo}" y="{size - 8}" font-size="11">{x_range[0]:g}</text>')
    out.append(f'<text x="{hi - 30}" y="{size - 8}" font-size="11">{x_range[1]:g}</text>')
    out.append(f'<text x="2" y="{hi}" font-size="11">{y_range[0]:g}</text>')
    out.append(f'<text x="2" y="{lo + 4}" font-size="11">{y_range[1]:g}</text>')
    out.append(f'<text x="{size / 2:.0f}" y="{size - 8}" font-size="12">{labels[0]}</text>')
    out.append(f'<text x="4" y="{size / 2:.0f}" font-size="12">{labels[1]}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
