"""Plain SVG line plots with reproducible bytes."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

SALT = "frac-dhk"


def line_plot(x, y, path: str | Path, title: str = "", xlabel: str = "x", ylabel: str = "") -> Path:
    """One polyline with axes, written as SVG.

    The hash salt and the absent date make repeated runs byte-identical.
    """
    path = Path(path)
    with matplotlib.rc_context({"svg.hashsalt": SALT, "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(np.asarray(x, dtype=float), np.asarray(y, dtype=float), color="black", linewidth=1.0)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
