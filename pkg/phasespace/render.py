"""False-colour PNG heatmaps of real phase-space fields."""

import logging
from pathlib import Path
from typing import Optional, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import ParameterError  # noqa: E402
from .grid import Field2D  # noqa: E402
from .settings import get_settings  # noqa: E402
from .transforms import HusimiFunction, WignerFunction  # noqa: E402

logger = logging.getLogger(__name__)


def color_range(values: np.ndarray) -> tuple[float, float]:
    """Symmetric about zero when anything is negative, otherwise [0, max]"""
    lo, hi = float(values.min()), float(values.max())
    if lo < 0:
        bound = max(abs(lo), abs(hi)) or 1.0
        return -bound, bound
    return 0.0, hi if hi > 0 else 1.0


def colorbar_label(field: Field2D) -> str:
    if isinstance(field, HusimiFunction):
        return "Q(x, p)"
    if isinstance(field, WignerFunction):
        return "W(x, p)"
    return "f(x, p)"


def render_heatmap(
    field: Field2D,
    path: Union[str, Path],
    colormap: Optional[str] = None,
    title: Optional[str] = None,
    dpi: Optional[int] = None,
    label: Optional[str] = None,
) -> Path:
    """
    Write a PNG with x horizontal and p vertical; identical inputs give identical bytes.
    The colorbar label defaults to the symbol of the field type.
    """
    if field.is_complex:
        raise ParameterError("render_heatmap needs a real-valued field")
    out = get_settings().output
    colormap = colormap or out.colormap
    dpi = dpi or out.dpi
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    values = np.asarray(field.values, dtype=float)
    vmin, vmax = color_range(values)
    gx, gp = field.grid.gx, field.grid.gp
    extent = (gx.x_min - 0.5 * gx.dx, gx.last + 0.5 * gx.dx, gp.x_min - 0.5 * gp.dx, gp.last + 0.5 * gp.dx)

    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    try:
        image = ax.imshow(
            values.T, origin="lower", extent=extent, aspect="auto", cmap=colormap, vmin=vmin, vmax=vmax,
            interpolation="nearest",
        )
        fig.colorbar(image, ax=ax, label=label or colorbar_label(field))
        ax.set_xlabel("x")
        ax.set_ylabel("p")
        if title:
            ax.set_title(title)
        fig.savefig(path, dpi=dpi, metadata={"Software": None})
    finally:
        plt.close(fig)
    logger.debug(f"rendered {field.grid.shape} heatmap to {path} (range {vmin:.3g}..{vmax:.3g})")
    return path
