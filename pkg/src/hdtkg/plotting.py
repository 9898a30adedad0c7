"""Figures for the CLI report paths (flood assessment, KB statistics)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

# Fixed metadata keeps PNG/SVG output byte-stable between runs.
_SAVE_META = {"png": {"Software": None}, "svg": {"Date": None}, "pdf": {"CreationDate": None}}

_COLORS = {"BelowLevel": "#c0392b", "AboveLevel": "#2e86c1",
           "NoElevationData": "#7f8c8d", "OutsideRegion": "#b7b7b7"}


def _save(fig, path) -> None:
    path = str(path)
    ext = path.rsplit(".", 1)[-1].lower() if "." in path else "png"
    fig.savefig(path, metadata=_SAVE_META.get(ext))
    plt.close(fig)


def flood_figure(report, path) -> None:
    """Bar per assessed asset: elevation against the expected water level."""
    rows = report.assessed
    fig, ax = plt.subplots(figsize=(8, 1.2 + 0.45 * max(len(rows), 1)))
    labels = [f"{r.asset} @ {r.location}" for r in rows]
    heights = [r.elevation if r.elevation is not None else 0.0 for r in rows]
    colors = [_COLORS[r.reason.value] for r in rows]
    ax.barh(range(len(rows)), heights, color=colors)
    ax.set_yticks(range(len(rows)), labels=labels, fontsize=7)
    ax.invert_yaxis()
    ax.axvline(report.expected_water_level, color="black", linestyle="--",
               label=f"expected water level {report.expected_water_level:g} m")
    for i, r in enumerate(rows):
        if r.elevation is None:
            ax.text(0, i, " no elevation data", va="center", fontsize=7)
    ax.set_xlabel("elevation (m above sea level)")
    ax.set_title(f"Flood alert {report.alert_id}: {report.region}")
    ax.legend(loc="lower right", fontsize=7)
    fig.tight_layout()
    _save(fig, path)


def stats_figure(stats: dict, path) -> None:
    """Statement counts per property, asserted and inferred stacked."""
    props = sorted(stats["properties"])
    asserted = [stats["properties"][p]["asserted"] for p in props]
    inferred = [stats["properties"][p]["inferred"] for p in props]
    fig, ax = plt.subplots(figsize=(max(6, 0.4 * len(props) + 2), 4))
    ax.bar(props, asserted, label="asserted", color="#2e86c1")
    ax.bar(props, inferred, bottom=asserted, label="inferred", color="#f5b041")
    ax.set_ylabel("statements")
    ax.tick_params(axis="x", labelrotation=90, labelsize=7)
    ax.set_title(f"{stats['instances']} instances, {stats['statements']['asserted']} asserted statements")
    ax.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, path)
