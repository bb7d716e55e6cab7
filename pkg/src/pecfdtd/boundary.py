"""Outer-boundary closure: incident waves, CPML collar, and TF/SF bookkeeping.

The collar surrounding the physical rectangle evolves the *scattered* field
(total minus incident) while the rectangle itself holds the total field. The
incident wave is analytic everywhere, so crossing the interface is a
pointwise add or subtract of ``incident_eval``; only nodes with a neighbour
on the other side ever need it.
"""

from dataclasses import dataclass

import numpy as np


# --------------------------------------------------------------------------
# incident waves


@dataclass(frozen=True)
class GaussianPulse:
    sigma: float = 0.1
    gamma: float = -0.1

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    def fields(self, x, y, t):
        s = (np.asarray(x, dtype=float) - self.gamma - t) / self.sigma
        ez = (s / self.sigma) * np.exp(-(s * s))
        ez = ez + np.zeros_like(np.asarray(y, dtype=float))
        return np.zeros_like(ez), -ez, ez


@dataclass(frozen=True)
class PlaneSine:
    """Sine wave travelling along +x, switched on behind its front.

    ``window='causal'`` multiplies by H(t - x) so the front sits at x = t and
    the field vanishes ahead of it; ``window='literal'`` uses H(x - t).
    """

    omega: float = 2.0 * np.pi / 0.3
    window: str = "causal"

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.window not in ("causal", "literal"):
            raise ValueError("window must be 'causal' or 'literal'")

    def fields(self, x, y, t):
        xi = np.asarray(x, dtype=float) - t
        on = (-xi if self.window == "causal" else xi) >= 0
        ez = np.where(on, np.sin(self.omega * xi), 0.0)
        ez = ez + np.zeros_like(np.asarray(y, dtype=float))
        return np.zeros_like(ez), -ez, ez


@dataclass(frozen=True)
class NoWave:
    def fields(self, x, y, t):
        z = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
        return z, z.copy(), z.copy()


def incident_eval(wave, x, y, t):
    """Return ``(Hx, Hy, Ez)`` of the incident wave at points ``(x, y)`` and time ``t``."""
    return wave.fields(x, y, t)


# --------------------------------------------------------------------------
# CPML


@dataclass(frozen=True)
class PmlParams:
    thickness: int = 10
    order: int = 3
    r0: float = 1e-6

    def __post_init__(self):
        if self.thickness < 5:
            raise ValueError("PML thickness must be at least 5 cells")
        if self.order < 2:
            raise ValueError("PML grading order must be at least 2")
        if not 0 < self.r0 < 1:
            raise ValueError("PML target reflection must lie in (0, 1)")

    def sigma_max(self, dx):
        return -(self.order + 1) * np.log(self.r0) / (2.0 * self.thickness * dx)


def _profile_1d(coord, lo, hi, params, h):
    depth = np.maximum(lo - coord, 0.0) + np.maximum(coord - hi, 0.0)
    delta = params.thickness * h
    ratio = np.clip(depth / delta, 0.0, 1.0)
    # node coordinates carry rounding; snap the inner interface to exactly zero
    ratio[depth < 1e-9 * h] = 0.0
    return params.sigma_max(h) * ratio**params.order


def pml_profiles(params, grid, domain=None):
    """Graded conductivities ``(sigma_x, sigma_y)`` as full-grid arrays.

    ``domain`` is the physical rectangle ``(xmin, xmax, ymin, ymax)``; by
    default the grid is assumed to be padded by ``params.thickness`` cells.
    """
    if domain is None:
        pad = params.thickness
        domain = (grid.x[pad], grid.x[-1 - pad], grid.y[pad], grid.y[-1 - pad])
    sx = _profile_1d(grid.x, domain[0], domain[1], params, grid.dx)
    sy = _profile_1d(grid.y, domain[2], domain[3], params, grid.dy)
    return sx[:, None] * np.ones(grid.ny)[None, :], np.ones(grid.nx)[:, None] * sy[None, :]


@dataclass
class PmlState:
    """Recursive-convolution memory, one array per derivative the collar touches."""

    ezx: np.ndarray
    ezy: np.ndarray
    hxy: np.ndarray
    hyx: np.ndarray

    @classmethod
    def zeros(cls, shape):
        return cls(*(np.zeros(shape) for _ in range(4)))

    def copy(self):
        return PmlState(self.ezx.copy(), self.ezy.copy(), self.hxy.copy(), self.hyx.copy())

    def arrays(self):
        return self.ezx, self.ezy, self.hxy, self.hyx


# --------------------------------------------------------------------------
# closure


class Closure:
    """Everything a sweep needs to know about the outer boundary.

    Two kinds: ``periodic`` (wrap-around, no collar, every node updated) and
    ``pml`` (padded grid, CPML collar evolving the scattered field, outermost
    ring held at zero).
    """

    def __init__(self, grid, kind="pml", params=None, wave=None, domain=None):
        self.grid = grid
        self.kind = kind
        self.wave = wave if wave is not None else NoWave()
        shape = grid.shape
        if kind == "periodic":
            self.params = None
            self.pml = np.zeros(shape, dtype=bool)
            self.edge = np.zeros(shape, dtype=bool)
            self.sigma_x = np.zeros(grid.nx)
            self.sigma_y = np.zeros(grid.ny)
        elif kind == "pml":
            self.params = params if params is not None else PmlParams()
            sx, sy = pml_profiles(self.params, grid, domain)
            self.sigma_x = sx[:, 0].copy()
            self.sigma_y = sy[0, :].copy()
            if domain is None:
                pad = self.params.thickness
                domain = (grid.x[pad], grid.x[-1 - pad], grid.y[pad], grid.y[-1 - pad])
            X, Y = grid.mesh()
            tol = 1e-9 * grid.dx
            inside = ((X >= domain[0] - tol) & (X <= domain[1] + tol)
                      & (Y >= domain[2] - tol) & (Y <= domain[3] + tol))
            self.pml = ~inside
            self.edge = np.zeros(shape, dtype=bool)
            self.edge[0, :] = self.edge[-1, :] = True
            self.edge[:, 0] = self.edge[:, -1] = True
        else:
            raise ValueError(f"unknown closure kind {kind!r}")
        self.domain = domain
        self.periodic = kind == "periodic"

        # nodes with a 4-neighbour on the other side of the TF/SF interface
        p = np.pad(self.pml, 1, mode="wrap" if self.periodic else "edge")
        differs = ((p[:-2, 1:-1] != self.pml) | (p[2:, 1:-1] != self.pml)
                   | (p[1:-1, :-2] != self.pml) | (p[1:-1, 2:] != self.pml))
        self.ring = np.argwhere(differs)
        X, Y = grid.mesh()
        self._ring_x = X[differs]
        self._ring_y = Y[differs]
        self._ring_flat = np.flatnonzero(differs)
        self._inc = [np.zeros(shape) for _ in range(3)]

    def coefficients(self, dt):
        bx = np.exp(-self.sigma_x * dt)
        by = np.exp(-self.sigma_y * dt)
        return bx, bx - 1.0, by, by - 1.0

    def incident_ring(self, t):
        """Full-grid incident arrays, populated only on TF/SF interface nodes."""
        if len(self._ring_flat):
            hx, hy, ez = incident_eval(self.wave, self._ring_x, self._ring_y, t)
            for arr, vals in zip(self._inc, (hx, hy, ez)):
                arr.ravel()[self._ring_flat] = vals
        return self._inc


def tfsf_init(grid, wave, mask, closure):
    """Initial state at t = 0: incident total field in the physical region,
    zero in the conductor, zero scattered field in the collar."""
    X, Y = grid.mesh()
    hx, hy, ez = incident_eval(wave, X, Y, 0.0)
    dead = mask.inside | closure.pml
    for a in (hx, hy, ez):
        a[dead] = 0.0
    return hx, hy, ez
