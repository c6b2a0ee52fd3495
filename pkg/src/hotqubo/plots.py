"""Figures written next to the CSV reports.

Uses ``matplotlib.figure.Figure`` directly so no global pyplot state or
interactive backend is involved.
"""

from __future__ import annotations

from matplotlib.figure import Figure

PNG_METADATA = {"Software": None}


def _save(fig, path):
    fig.savefig(path, dpi=120, metadata=PNG_METADATA)


def scaling_figure(rows, path, k=10):
    """Qubit totals against universe size for both constructions."""
    fig = Figure(figsize=(6.0, 3.8))
    ax = fig.add_subplot()
    sizes = [r["n"] for r in rows]
    ax.plot(sizes, [r["hotstart_qubits"] for r in rows], "o-", color="tab:blue", label="Hot-start")
    ax.plot(sizes, [r["baseline_qubits"] for r in rows], "s-", color="tab:red", label=f"k={k} bits per asset")
    ax.set_xlabel("Number of assets")
    ax.set_ylabel("Number of qubits")
    ax.set_ylim(bottom=0)
    ax.grid(True, alpha=0.4)
    ax.legend(loc="upper left")
    fig.tight_layout()
    _save(fig, path)


def box_figure(rows, path):
    """Per-asset integer interval relative to the rounded continuous optimum."""
    fig = Figure(figsize=(6.0, 0.6 * len(rows) + 1.6))
    ax = fig.add_subplot()
    for y, r in enumerate(rows):
        centre = r["rounded"]
        ax.plot([r["lower"] - centre, r["upper"] - centre], [y, y], "-", color="0.6", lw=6, solid_capstyle="butt")
        ax.plot([r["x_star"] - centre], [y], "o", color="tab:red")
        ax.plot([r["x0"] - centre], [y], "x", color="black")
        ax.annotate(f'{r["qubits"]} q', (r["upper"] - centre, y), xytext=(6, -3), textcoords="offset points")
    ax.set_yticks(range(len(rows)), [r["ticker"] for r in rows])
    ax.axvline(0.0, color="0.3", lw=0.8, ls=":")
    ax.set_xlabel("Units relative to rounded continuous optimum")
    ax.invert_yaxis()
    fig.tight_layout()
    _save(fig, path)
