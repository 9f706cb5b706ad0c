"""Optional SVG emission for paths and hitting fields (matplotlib)."""

from __future__ import annotations

from .hitting import HittingField
from .lattice import DomainState


def path_svg(state: DomainState, filename: str) -> None:
    """Draw the domain, boundary labels, and the exploration polyline."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    c = state.config
    fig, ax = plt.subplots(figsize=(6, 6 * c.height / c.width))
    for i in range(c.width + 1):
        for j in range(c.height + 1):
            lab = state.labels[i, j]
            if lab == -1:
                continue
            x, y = c.phys(i, j)
            ax.plot(x, y, "s", ms=3, color="dimgray" if lab == 0 else "lightgray")
    xs, ys = zip(*(c.phys(mx / 2.0, my / 2.0) for mx, my in state.path.medial_vertices))
    ax.plot(xs, ys, "-", lw=1.2, color="crimson")
    ax.set_aspect("equal")
    ax.set_title(f"{len(state.path)} steps, {state.path.terminated}")
    fig.savefig(filename, format="svg", metadata={"Date": None})
    plt.close(fig)


def field_svg(field: HittingField, state: DomainState, filename: str) -> None:
    """Heatmap of the hitting field over the rectangle."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    c = state.config
    fig, ax = plt.subplots(figsize=(6, 6 * c.height / c.width))
    x0, y0 = c.phys(0, 0)
    x1, y1 = c.phys(c.width, c.height)
    im = ax.imshow(
        field.grid.T,
        origin="lower",
        extent=(x0, x1, y0, y1),
        vmin=0.0,
        vmax=1.0,
        cmap="coolwarm",
    )
    fig.colorbar(im, ax=ax, label="exit-through-1 probability")
    fig.savefig(filename, format="svg", metadata={"Date": None})
    plt.close(fig)
