# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


from typing import Optional, Sequence

import numpy as np

from dtnres.utils import check_modules

# Try importing optional libraries.
missing_modules = []
try:
    import matplotlib
    from matplotlib.figure import Figure
    from matplotlib.lines import Line2D
except ImportError:
    missing_modules.append("matplotlib")


#: rc settings making the SVG output identical for identical inputs.
SVG_RC = {"svg.hashsalt": "dtnres", "svg.fonttype": "none", "path.simplify": False}


def plot_poles(computed: Sequence[complex], reference: Sequence[complex] = (),
               region: Optional[Sequence[float]] = None, title: str = "") -> "Figure":
    """
    Scatter plot of computed poles (dots) and reference poles (circles).

    Args:
        computed: Computed resonances.
        reference: Exact resonances, if known.
        region: (re_min, re_max, im_min, im_max) used as the axes limits.
        title: Title of the figure.
    """
    check_modules(["matplotlib"], missing_modules)

    fig = Figure(figsize=(6, 5))
    ax = fig.add_subplot(1, 1, 1)
    computed = np.asarray(computed, dtype=complex)
    reference = np.asarray(reference, dtype=complex)

    ax.plot(reference.real, reference.imag, linestyle="none", marker="o", markersize=9,
            markerfacecolor="none", markeredgecolor="tab:red", gid="reference")
    ax.plot(computed.real, computed.imag, linestyle="none", marker=".", markersize=6,
            color="tab:blue", gid="computed")

    if region is not None:
        re_min, re_max, im_min, im_max = region
        ax.set_xlim(re_min, re_max)
        ax.set_ylim(im_min, im_max)

    ax.set_xlabel("Re k")
    ax.set_ylabel("Im k")
    if title:
        ax.set_title(title)

    handles = [Line2D([], [], linestyle="none", marker=".", color="tab:blue", label="computed")]
    if len(reference) > 0:
        handles.append(Line2D([], [], linestyle="none", marker="o", markerfacecolor="none",
                              markeredgecolor="tab:red", label="exact"))

    ax.legend(handles=handles, loc="lower right")
    return fig


def save_svg(fig: "Figure", path: str) -> str:
    """ Write `fig` as SVG without timestamps or random ids. """
    check_modules(["matplotlib"], missing_modules)
    with matplotlib.rc_context(SVG_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})

    return path
