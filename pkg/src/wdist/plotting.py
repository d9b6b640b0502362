"""Figures for the CLI reports. Everything renders off-screen to files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

FIGSIZE = (7.0, 4.0)


def _style(ax, xlabel, ylabel, title):
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title, fontsize=11)
    ax.tick_params(direction="in", top=True, right=True)
    for side in ("top", "right"):
        ax.spines[side].set_linewidth(0.6)


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # no timestamps in the file, so reruns produce the same bytes
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    return path


def plot_weight_distribution(rows: list[dict], path, title: str) -> Path:
    """Closed-form frequencies as bars, enumerated ones as markers (log scale).

    ``rows`` are dicts with ``weight`` and ``freq`` and optionally ``observed``.
    """
    w = [int(r["weight"]) for r in rows]
    closed = [int(r["freq"]) for r in rows]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    width = max(1.0, (max(w) - min(w)) / (3 * max(len(w), 1)))
    ax.bar(w, closed, width=width, color="#4c72b0", label="closed form")
    if any("observed" in r for r in rows):
        obs = [int(r.get("observed", 0)) for r in rows]
        ax.plot(w, obs, "o", mfc="none", mec="#dd8452", mew=1.5, label="enumerated")
        ax.legend(frameon=False)
    ax.set_yscale("log")
    _style(ax, "weight", "number of codewords", title)
    return _save(fig, path)


def plot_class_distribution(labels: list[str], expected: list[int], observed: list[int], path, title: str,
                            xlabel: str = "class") -> Path:
    x = range(len(labels))
    fig, ax = plt.subplots(figsize=(max(FIGSIZE[0], 0.45 * len(labels)), FIGSIZE[1]))
    ax.bar([i - 0.2 for i in x], expected, width=0.4, color="#4c72b0", label="closed form")
    ax.bar([i + 0.2 for i in x], observed, width=0.4, color="#dd8452", label="enumerated")
    ax.set_xticks(list(x))
    crowded = len(labels) > 3 and max(map(len, labels), default=0) > 8
    ax.set_xticklabels(labels, rotation=45 if crowded else 0, ha="right" if crowded else "center", fontsize=8)
    if max(expected + observed, default=1) / max(1, min([v for v in expected + observed if v] or [1])) > 100:
        ax.set_yscale("log")
    ax.legend(frameon=False)
    _style(ax, xlabel, "frequency", title)
    return _save(fig, path)
