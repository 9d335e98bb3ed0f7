"""Figure output for embedding reports.

matplotlib is an optional dependency (``pip install artifact[plot]``); it is
imported only when a figure is requested.
"""

import numpy as np

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.dpi": 150,
    "savefig.bbox": "tight",
}


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def scatter_embedding(Y, labels, path, title=None, extra=None):
    """Write a scatter plot of a 2-D (or the first two axes of a) embedding.

    ``extra`` is an optional ``(m, 2)`` array drawn as crosses, e.g. the
    embedded cluster centers.
    """
    plt = _pyplot()
    Y = np.asarray(Y, dtype=float)
    if Y.shape[1] == 1:
        Y = np.column_stack([Y[:, 0], np.zeros(len(Y))])
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.5, 4.5 * 0.75))
        if labels is None:
            ax.scatter(Y[:, 0], Y[:, 1], s=3, lw=0)
        else:
            for lab in np.unique(labels):
                sel = labels == lab
                ax.scatter(Y[sel, 0], Y[sel, 1], s=3, lw=0, label=f"manifold {lab}")
            ax.legend(markerscale=3, frameon=False)
        if extra is not None and len(extra):
            extra = np.asarray(extra, dtype=float)
            ax.scatter(extra[:, 0], extra[:, 1], marker="x", c="k", s=25)
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("y1")
        ax.set_ylabel("y2")
        if title:
            ax.set_title(title)
        fig.savefig(path)
        plt.close(fig)
    return path
