import logging
from typing import Optional, Sequence

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402

from .file_io import PathManager  # noqa: E402

__all__ = ["plot_decay", "plot_histogram"]

logger = logging.getLogger(__name__)


def _save(fig, path: str):
    with PathManager.open(path, "w") as f:
        fig.savefig(f, format="svg")
    plt.close(fig)
    logger.info("figure written to {}".format(path))


def plot_decay(
    horizons: Sequence[int],
    estimates: Sequence[float],
    path: str,
    bound: Optional[Sequence[Optional[float]]] = None,
):
    """Estimated ``delta_n`` against ``n``, with the certified bound if any."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(horizons, estimates, marker="o", label="estimate")
    if bound is not None and any(b is not None for b in bound):
        pts = [(n, b) for n, b in zip(horizons, bound) if b is not None]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], linestyle="--", label="certified bound")
    ax.set_xlabel("n")
    ax.set_ylabel("delta_n")
    ax.set_ylim(bottom=0.0, top=2.05)
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def plot_histogram(values: Sequence[float], path: str, bins: int = 40, xlabel: str = "delta_1"):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.hist(values, bins=bins, range=(0.0, 2.0))
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    fig.tight_layout()
    _save(fig, path)
