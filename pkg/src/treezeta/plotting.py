"""Report figures rendered next to the delimited output files."""

from __future__ import annotations

import math

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

_RC = {
    "figure.figsize": (7.0, 4.2),
    "figure.dpi": 130,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
}


def _styled():
    return plt.rc_context(_RC)


def save_euler_figure(report, path):
    """Relative error of det vs the inverse closed-form factor per grid point."""
    rows = [r for r in report["rows"] if r.get("relative_error") is not None]
    if not rows:
        return None
    with _styled():
        fig, ax = plt.subplots()
        xs = range(len(rows))
        errs = [max(r["relative_error"], 1e-18) for r in rows]
        ax.semilogy(list(xs), errs, "o-", label="|det - 1/L| / |1/L|")
        ax.axhline(rows[0]["tolerance"], color="crimson", ls="--", lw=1,
                   label=f"tolerance {rows[0]['tolerance']:g}")
        ax.set_xticks(list(xs))
        ax.set_xticklabels([r["s"] for r in rows], rotation=30, ha="right")
        ax.set_xlabel("s")
        ax.set_ylabel("relative error")
        ax.set_title(f"{report['mode']} local factor check, q = {report['q']}")
        ax.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def save_theta_figure(thetas, path, title="admissible word counts"):
    with _styled():
        fig, ax = plt.subplots()
        ax.semilogy(range(len(thetas)), thetas, "s-")
        ax.set_xlabel("n")
        ax.set_ylabel("theta_n")
        ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def save_spectrum_figure(dirac, path):
    with _styled():
        fig, ax = plt.subplots()
        plus = [(n, e) for sign, n, e in dirac.levels if sign > 0]
        minus = [(n, e) for sign, n, e in dirac.levels if sign < 0]
        ax.plot([n for n, _ in plus], [e for _, e in plus], "o", label="Gr_+ levels")
        ax.plot([n for n, _ in minus], [e for _, e in minus], "x", label="Gr_- levels")
        ax.set_xlabel("level n")
        ax.set_ylabel("eigenvalue")
        ax.set_title(f"Dirac spectrum ({dirac.variant}, ell={dirac.ell}, q={dirac.q})")
        ax.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def save_graph_figure(g, path, title=None):
    """Circular layout; parallel edges and loops drawn with small arcs."""
    n = len(g.vertices)
    pos = {}
    for i, v in enumerate(g.vertices):
        ang = 2 * math.pi * i / max(n, 1)
        pos[v] = (math.cos(ang), math.sin(ang))
    with _styled():
        fig, ax = plt.subplots(figsize=(5.2, 5.2))
        seen = {}
        for k in range(g.n_pos):
            a, b = g.pos_src[k], g.pos_dst[k]
            (x1, y1), (x2, y2) = pos[a], pos[b]
            if a == b:
                ax.add_patch(plt.Circle((x1 * 1.12, y1 * 1.12), 0.09, fill=False,
                                        color="tab:blue", lw=1.2))
                continue
            key = frozenset((a, b))
            bend = 0.12 * seen.get(key, 0)
            seen[key] = seen.get(key, 0) + 1
            mx, my = (x1 + x2) / 2 - bend * (y2 - y1), (y1 + y2) / 2 + bend * (x2 - x1)
            ax.plot([x1, mx, x2], [y1, my, y2], "-", color="tab:blue", lw=1.2)
        for v, (x, y) in pos.items():
            frontier = v in g.frontier
            ax.plot([x], [y], "o", ms=11,
                    color="lightcoral" if frontier else "navajowhite",
                    mec="black", mew=0.6, zorder=3)
            ax.annotate(str(v), (x, y), ha="center", va="center", fontsize=7, zorder=4)
        ax.set_aspect("equal")
        ax.set_axis_off()
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path
