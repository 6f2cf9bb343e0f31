"""Pictures: graph drawings and fuzzing statistics (matplotlib, loaded lazily)."""

from __future__ import annotations

import json
import math
import os


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def draw_graph(g, path: str, title: str | None = None) -> str:
    """Circle layout; reserved nodes dashed, parallel edges bent apart."""
    plt = _pyplot()
    from matplotlib.patches import Circle

    nodes = list(g.universe)
    k = max(len(nodes), 1)
    pos = {n: (math.cos(2 * math.pi * x / k), math.sin(2 * math.pi * x / k))
           for x, n in enumerate(nodes)}
    fig, ax = plt.subplots(figsize=(6, 6))
    seen: dict = {}
    for e, (s, t, r) in sorted(g.edges.items()):
        pair = (s, t)
        nth = seen[pair] = seen.get(pair, -1) + 1
        (x0, y0), (x1, y1) = pos[s], pos[t]
        if s == t:
            ax.add_patch(Circle((x0 * 1.18, y0 * 1.18), 0.1 + 0.04 * nth, fill=False))
            ax.text(x0 * 1.38, y0 * 1.38, r, ha="center", va="center", fontsize=8)
            continue
        rad = 0.15 + 0.15 * nth
        ax.annotate("", xy=(x1, y1), xytext=(x0, y0),
                    arrowprops=dict(arrowstyle="-|>", shrinkA=14, shrinkB=14,
                                    connectionstyle=f"arc3,rad={rad}"))
        mx, my = (x0 + x1) / 2, (y0 + y1) / 2
        nx_, ny_ = y1 - y0, -(x1 - x0)   # arc3 bends towards (dy, -dx)
        ax.text(mx + nx_ * rad * 0.6, my + ny_ * rad * 0.6, r, fontsize=8,
                ha="center", va="center", bbox=dict(fc="white", ec="none", pad=0.5))
    for n, (x, y) in pos.items():
        active = n in g.active
        ax.add_patch(Circle((x, y), 0.12, fill=active, facecolor="#dde8f5" if active else "none",
                            edgecolor="black", linestyle="-" if active else "--"))
        labs = ",".join(sorted(g.labels.get(n, ()))) if active else ""
        ax.text(x, y, n, ha="center", va="center", fontsize=9)
        if labs:
            ax.text(x, y - 0.2, labs, ha="center", va="top", fontsize=8, color="#444")
    ax.set_xlim(-1.6, 1.6)
    ax.set_ylim(-1.6, 1.6)
    ax.set_aspect("equal")
    ax.axis("off")
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def fuzz_chart(stats, path: str) -> str:
    """Cases and failures per action kind, one panel per logic."""
    plt = _pyplot()
    logics = sorted({s.logic for s in stats})
    fig, axes = plt.subplots(1, len(logics), figsize=(6 * len(logics), 4), squeeze=False)
    for ax, logic in zip(axes[0], logics):
        rows = [s for s in stats if s.logic == logic]
        xs = range(len(rows))
        ax.bar([x - 0.2 for x in xs], [s.cases for s in rows], width=0.4, label="cases")
        ax.bar([x + 0.2 for x in xs], [s.failures for s in rows], width=0.4,
               color="crimson", label="failures")
        ax.set_xticks(list(xs))
        ax.set_xticklabels([s.kind for s in rows], rotation=45, ha="right")
        ax.set_title(f"{logic.upper()}: {sum(s.seconds for s in rows):.1f} s")
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_fuzz_report(stats, out_dir: str, chart: bool = True) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    summary = [{"logic": s.logic, "kind": s.kind, "cases": s.cases,
                "failures": s.failures, "seconds": round(s.seconds, 3)} for s in stats]
    path = os.path.join(out_dir, "fuzz.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    out = [path]
    if chart:
        out.append(fuzz_chart(stats, os.path.join(out_dir, "fuzz.png")))
    return out
