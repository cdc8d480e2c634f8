"""Static SVG figure emission for benchmark reports and diversity bundles.

All output is deterministic: a fixed hash salt for element ids and no
embedded timestamps, so re-emitting the same report is byte-identical.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "qready"

import matplotlib.pyplot as plt

from .analytics import Dendrogram, DistanceMatrix, PairHistogram

CLASS_COLORS = {"win": "tab:blue", "tie": "tab:green", "loss": "tab:red", "unknown": "0.6"}


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_relative_delta_energy(rows: list[dict], path: Path, sort_label: str) -> None:
    """Signed relative gaps on a symmetric log axis, one point per instance.

    Wins sit in the upper half, losses in the lower half, ties on the
    axis; magnitudes down to 1e-13 stay visible on the symlog scale.
    """
    fig, ax = plt.subplots(figsize=(max(6.0, 0.22 * len(rows) + 2), 4.0))
    for idx, row in enumerate(rows):
        rde = row.get("relative_delta_energy")
        color = CLASS_COLORS.get(row.get("classification", "unknown"), "0.6")
        ax.plot([idx], [rde if rde is not None else 0.0],
                marker="o", markersize=4, color=color, linestyle="none")
    ax.set_yscale("symlog", linthresh=1e-14)
    ax.axhline(0.0, color="0.8", linewidth=0.8, zorder=0)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels([r["name"] for r in rows], rotation=90, fontsize=6)
    ax.set_ylabel("relative delta energy")
    ax.set_xlabel(f"instances sorted by {sort_label}")
    fig.tight_layout()
    _save(fig, path)


def plot_time_markers(rows: list[dict], path: Path, sort_label: str, time_limit: float) -> None:
    """Per instance, a vertical line from first-found time up to end time."""
    fig, ax = plt.subplots(figsize=(max(6.0, 0.22 * len(rows) + 2), 4.0))
    for idx, row in enumerate(rows):
        color = CLASS_COLORS.get(row.get("classification", "unknown"), "0.6")
        t_first = row["first_found_time"]
        t_end = row["end_time"]
        ax.plot([idx, idx], [t_first, t_end], color=color, linewidth=1.2)
        ax.plot([idx], [t_first], marker="^", color=color, markersize=5)
        ax.plot([idx], [t_end], marker="v", color=color, markersize=5)
    ax.axhline(time_limit, color="0.8", linestyle="--", linewidth=0.8, zorder=0)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels([r["name"] for r in rows], rotation=90, fontsize=6)
    ax.set_ylabel("seconds")
    ax.set_xlabel(f"instances sorted by {sort_label}")
    fig.tight_layout()
    _save(fig, path)


def _dendrogram_segments(d: Dendrogram):
    """Line segments for the classic bracket rendering."""
    k = d.num_leaves
    x_of = {leaf: float(pos) for pos, leaf in enumerate(d.leaf_order)}
    h_of = {leaf: 0.0 for leaf in d.leaf_order}
    segments = []
    for t, m in enumerate(d.merges):
        a, b = m.cluster_a, m.cluster_b
        xa, xb = x_of[a], x_of[b]
        segments.append(((xa, h_of[a]), (xa, m.height)))
        segments.append(((xb, h_of[b]), (xb, m.height)))
        segments.append(((xa, m.height), (xb, m.height)))
        node = k + t
        x_of[node] = 0.5 * (xa + xb)
        h_of[node] = m.height
    return segments


def plot_dendrogram(d: Dendrogram, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(max(4.0, 0.12 * d.num_leaves + 2), 3.0))
    _draw_dendrogram(ax, d)
    ax.set_ylabel("Hamming distance")
    fig.tight_layout()
    _save(fig, path)


def _draw_dendrogram(ax, d: Dendrogram) -> None:
    for (x0, y0), (x1, y1) in _dendrogram_segments(d):
        ax.plot([x0, x1], [y0, y1], color="tab:blue", linewidth=0.9)
    ax.set_xticks([])
    ax.set_xlim(-0.5, d.num_leaves - 0.5)


def plot_diversity_panel(
    dm: DistanceMatrix, hist: PairHistogram, d: Dendrogram, path: Path
) -> None:
    """Clustering-sorted distance matrix with dendrogram and inset histogram."""
    order = d.leaf_order
    sorted_matrix = dm.matrix[order][:, order]

    fig = plt.figure(figsize=(6.0, 7.2))
    ax_dendro = fig.add_axes([0.1, 0.78, 0.72, 0.18])
    _draw_dendrogram(ax_dendro, d)
    ax_dendro.set_yticks([])
    for side in ("top", "right", "left"):
        ax_dendro.spines[side].set_visible(False)

    ax_mat = fig.add_axes([0.1, 0.1, 0.72, 0.64])
    im = ax_mat.imshow(sorted_matrix, cmap="viridis", aspect="auto", interpolation="nearest")
    ax_mat.set_xticks([])
    ax_mat.set_yticks([])

    cax = fig.add_axes([0.86, 0.1, 0.03, 0.64])
    cbar = fig.colorbar(im, cax=cax)
    cbar.set_label("Hamming distance, normalized (raw)")
    ticks = list(cbar.get_ticks())
    cbar.set_ticks(ticks)
    cbar.ax.set_yticklabels(
        [f"{v / dm.num_variables:.3f} ({int(v)})" for v in ticks], fontsize=6
    )

    if hist.counts:
        ax_hist = ax_mat.inset_axes([0.62, 0.72, 0.36, 0.26])
        dists = sorted(hist.counts)
        ax_hist.bar(dists, [hist.counts[v] for v in dists],
                    width=max(1.0, (max(dists) - min(dists)) / 50 or 1.0),
                    color="tab:blue")
        ax_hist.tick_params(labelsize=5)
        ax_hist.set_title("pairs per distance", fontsize=6)
    _save(fig, path)
