"""Figure builders for the three supported layouts.

State curves are drawn per tier with the reference run solid and the
approximations dashed/dotted; multiplier magnitudes go on a log axis.
All rendering is deterministic: fixed styles, no timestamps in the
output metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "figplots"  # deterministic ids
import matplotlib.pyplot as plt  # noqa: E402

from .reader import SeriesTable, read_series, read_spectrum  # noqa: E402

KINDS = ("spectrum3d", "state_xy", "multipliers")

TIER_STYLES = {
    "exact": {"linestyle": "-", "color": "black", "linewidth": 1.6, "zorder": 3},
    "leading": {"linestyle": ":", "color": "tab:green", "linewidth": 1.3},
    "subleading": {"linestyle": "--", "color": "tab:red", "linewidth": 1.3},
    "full": {"linestyle": "-.", "color": "tab:blue", "linewidth": 1.3},
}
FALLBACK_STYLE = {"linestyle": "--", "linewidth": 1.2}

MULTIPLIER_COLORS = {
    "abs_d11": "tab:blue",
    "abs_d12": "tab:orange",
    "abs_d21": "tab:green",
    "abs_d22": "tab:red",
}


@dataclass
class FigureSpec:
    """What to draw, from which files, to which path."""

    kind: str
    inputs: list
    output: str
    x_range: tuple | None = None
    y_range: tuple | None = None
    tier_styles: dict = field(default_factory=dict)
    dpi: int = 150

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input file is required")
        for p in self.inputs:
            if not Path(p).exists():
                raise FileNotFoundError(p)

    def style_for(self, label: str) -> dict:
        if label in self.tier_styles:
            return self.tier_styles[label]
        return TIER_STYLES.get(label, FALLBACK_STYLE)


def _save(fig, spec: FigureSpec):
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    kwargs = {"dpi": spec.dpi}
    if out.suffix.lower() == ".svg":
        kwargs["metadata"] = {"Date": None}
    elif out.suffix.lower() == ".pdf":
        kwargs["metadata"] = {"CreationDate": None}
    fig.savefig(out, **kwargs)
    plt.close(fig)
    return out


def render(spec: FigureSpec) -> Path:
    """Render one figure and return the written path."""
    if spec.kind == "state_xy":
        return _render_state_xy(spec)
    if spec.kind == "multipliers":
        return _render_multipliers(spec)
    return _render_spectrum3d(spec)


def _render_state_xy(spec: FigureSpec) -> Path:
    tables = [read_series(p) for p in spec.inputs]
    fig, (ax_x, ax_y) = plt.subplots(2, 1, figsize=(6.4, 6.4), sharex=True)
    first = tables[0]
    if first.n_rows:
        for ax, col in ((ax_x, "x_eig1"), (ax_y, "y_eig1")):
            ax.plot(first["t"], first[col], color="tab:red", alpha=0.45,
                    linewidth=2.4, label="amplifying eigenstate")
        for ax, col in ((ax_x, "x_eig2"), (ax_y, "y_eig2")):
            ax.plot(first["t"], first[col], color="tab:cyan", alpha=0.45,
                    linewidth=2.4, label="decaying eigenstate")
    for table in tables:
        if not table.n_rows:
            continue
        style = spec.style_for(table.label)
        ax_x.plot(table["t"], table["x_state"], label=table.label, **style)
        ax_y.plot(table["t"], table["y_state"], **style)
    ax_x.set_ylabel("x")
    ax_y.set_ylabel("y")
    ax_y.set_xlabel("t")
    if spec.x_range:
        ax_x.set_xlim(*spec.x_range)
    if spec.y_range:
        ax_x.set_ylim(*spec.y_range)
        ax_y.set_ylim(*spec.y_range)
    if ax_x.get_legend_handles_labels()[0]:
        ax_x.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _save(fig, spec)


def _render_multipliers(spec: FigureSpec) -> Path:
    tables = [read_series(p) for p in spec.inputs]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for table in tables:
        if not table.n_rows:
            continue
        solid = table.label == "exact"
        for col, color in MULTIPLIER_COLORS.items():
            label = f"|{col[4:]}|" + ("" if solid else f" ({table.label})")
            ax.plot(table["t"], table[col],
                    linestyle="-" if solid else "--",
                    linewidth=1.6 if solid else 1.2,
                    color=color, label=label)
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("multiplier magnitude")
    if spec.x_range:
        ax.set_xlim(*spec.x_range)
    if spec.y_range:
        ax.set_ylim(*spec.y_range)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="best", fontsize=7, ncol=2)
    fig.tight_layout()
    return _save(fig, spec)


def _render_spectrum3d(spec: FigureSpec) -> Path:
    surface = read_spectrum(spec.inputs[0])
    overlay = read_spectrum(spec.inputs[1]) if len(spec.inputs) > 1 else None
    fig = plt.figure(figsize=(9.0, 4.2))
    for panel, part, title in ((1, "re", "Re eigenvalues"), (2, "im", "Im eigenvalues")):
        ax = fig.add_subplot(1, 2, panel, projection="3d")
        if surface.n_rows:
            om = surface["omega"]
            nu = surface["nu"]
            m = int(round(len(om) ** 0.5))
            grid_om = om.reshape(m, m)
            grid_nu = nu.reshape(m, m)
            for band, cmap in ((1, "Reds"), (2, "Blues")):
                z = surface[f"{part}_lambda{band}"].reshape(m, m)
                ax.plot_surface(grid_om, grid_nu, z, cmap=cmap, alpha=0.6,
                                linewidth=0, antialiased=False)
        if overlay is not None and overlay.n_rows:
            for band in (1, 2):
                ax.plot(overlay["omega"], overlay["nu"],
                        overlay[f"{part}_lambda{band}"],
                        color="black", linewidth=1.4)
        ax.set_xlabel("omega")
        ax.set_ylabel("nu")
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    return _save(fig, spec)
