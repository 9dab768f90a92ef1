"""Figure output: request, server and offline polylines as deterministic SVG.

Every render also drops a CSV next to the figure with the numeric polyline
data, so downstream tooling never has to scrape the SVG.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .engine import BISHOP, Trace
from .model import AlignedTrajectory
from .potential import _event_offset_vec

__all__ = ["render_trace", "write_trace_csv"]

_PHASE_COLORS = {BISHOP: "tab:blue", "rook": "tab:red"}


def _float_xy(points):
    return [float(p.x) for p in points], [float(p.y) for p in points]


def render_trace(trace: Trace, out_path, opt: AlignedTrajectory | None = None):
    """Write an SVG figure (and a sibling CSV) for one engine trace.

    The request polyline is gray, the server polyline is phase-colored
    (blue while diagonal, red while axis-bound), the optional offline
    polyline is dashed green, and each phase switch gets an offset arrow.
    """
    out_path = Path(out_path)
    plt.rcParams["svg.hashsalt"] = "trace-render"
    fig, ax = plt.subplots(figsize=(6, 6))

    rx, ry = _float_xy(trace.instance.points())
    ax.plot(rx, ry, color="0.6", linewidth=1.2, label="request", zorder=1)

    events = trace.events
    seen_phases = set()
    for e0, e1 in zip(events, events[1:]):
        if e0.server == e1.server:
            continue
        color = _PHASE_COLORS[e0.phase]
        label = e0.phase if e0.phase not in seen_phases else None
        seen_phases.add(e0.phase)
        ax.plot(
            [float(e0.server.x), float(e1.server.x)],
            [float(e0.server.y), float(e1.server.y)],
            color=color,
            linewidth=2.0,
            label=label,
            zorder=3,
        )

    for e in events:
        if e.kind != "phase-switch":
            continue
        o = _event_offset_vec(e)
        if o.l1_norm() == 0:
            continue
        ax.annotate(
            "",
            xy=(float(e.server.x + o.dx), float(e.server.y + o.dy)),
            xytext=(float(e.server.x), float(e.server.y)),
            arrowprops={"arrowstyle": "->", "color": "tab:purple", "lw": 1.0},
            zorder=4,
        )

    if opt is not None:
        ox, oy = _float_xy([p for _, p in opt.breakpoints])
        ax.plot(ox, oy, color="tab:green", linestyle="--", linewidth=1.5,
                label="offline", zorder=2)

    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    write_trace_csv(trace, out_path.with_suffix(".csv"), opt)
    return out_path


def write_trace_csv(trace: Trace, csv_path, opt: AlignedTrajectory | None = None):
    """Delimited dump of the trace events (and the offline polyline)."""
    csv_path = Path(csv_path)
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "server_x", "server_y", "phase", "offset_mag",
                    "cost_on", "kind"])
        for e in trace.events:
            w.writerow([
                float(e.s), float(e.server.x), float(e.server.y), e.phase,
                float(e.offset_mag), float(e.cost_on), e.kind,
            ])
        if opt is not None:
            w.writerow([])
            w.writerow(["s", "opt_x", "opt_y"])
            for s, p in opt.breakpoints:
                w.writerow([float(s), float(p.x), float(p.y)])
    return csv_path
