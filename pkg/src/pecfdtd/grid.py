from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid2D:
    """Uniform node-centred grid; node (i, j) sits at (x0 + i*dx, y0 + j*dy).

    Field arrays on this grid have shape ``(nx, ny)`` and are indexed ``[i, j]``.
    """

    x0: float
    y0: float
    dx: float
    dy: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError("grid spacing must be positive")
        if self.nx < 5 or self.ny < 5:
            raise ValueError("grid needs at least 5 nodes per axis")

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def x(self):
        return self.x0 + np.arange(self.nx) * self.dx

    @property
    def y(self):
        return self.y0 + np.arange(self.ny) * self.dy

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="ij")

    def zeros(self):
        return np.zeros(self.shape)

    def subgrid(self, i0, j0, nx, ny):
        return Grid2D(self.x0 + i0 * self.dx, self.y0 + j0 * self.dy, self.dx, self.dy, nx, ny)


def unit_grid(n, xmin=0.0, xmax=1.0, ymin=0.0, ymax=1.0, pad=0, periodic=False):
    """Grid with spacing ``1/n`` covering the rectangle, plus ``pad`` extra cells per side.

    A periodic grid drops the duplicated last node on each axis and takes no padding.
    """
    dx = 1.0 / n
    mx = int(round((xmax - xmin) * n))
    my = int(round((ymax - ymin) * n))
    if periodic:
        return Grid2D(xmin, ymin, dx, dx, mx, my)
    return Grid2D(xmin - pad * dx, ymin - pad * dx, dx, dx, mx + 1 + 2 * pad, my + 1 + 2 * pad)
