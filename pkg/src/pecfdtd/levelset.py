"""Signed distances for PEC cross-sections, normals, and layer classification.

Sign convention: ``phi > 0`` inside the conductor, ``phi < 0`` outside, and a
node with ``phi == 0`` counts as inside. The normal ``grad(phi)/|grad(phi)|``
therefore points *into* the conductor.
"""

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import GeometryResolutionError, RedistanceError

# Stand-in for "infinitely far from any conductor".
FAR = -1.0e6

NORMAL_EPS = 1e-10
DEMOTE_FRACTION = 0.1
SNAP_FRACTION = 1e-9


class Layer(IntEnum):
    EXTERIOR = 0
    SECOND_BOUNDARY = 1
    FIRST_BOUNDARY = 2
    FIRST_GHOST = 3
    DEEP_PEC = 4


# --------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class Disk:
    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("disk radius must be positive")

    def sdf(self, x, y):
        return sdf_disk(self.center, self.radius, x, y)

    def bbox(self):
        cx, cy = self.center
        r = self.radius
        return (cx - r, cx + r, cy - r, cy + r)


@dataclass(frozen=True)
class Wedge:
    """Disk with a quarter-sector notch removed (3/4 disk).

    ``bisector`` is the direction (radians) the notch opens toward.
    """

    center: tuple
    radius: float
    bisector: float = np.pi

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("wedge radius must be positive")

    def sdf(self, x, y):
        return sdf_wedge(self.center, self.radius, self.bisector, x, y)

    def bbox(self):
        cx, cy = self.center
        r = self.radius
        return (cx - r, cx + r, cy - r, cy + r)


@dataclass(frozen=True)
class Union:
    members: tuple

    def __post_init__(self):
        if not self.members:
            raise ValueError("union needs at least one member")

    def sdf(self, x, y):
        return sdf_union(self.members, x, y)

    def bbox(self):
        boxes = np.array([m.bbox() for m in self.members])
        return (boxes[:, 0].min(), boxes[:, 1].max(), boxes[:, 2].min(), boxes[:, 3].max())


@dataclass(frozen=True)
class NoShape:
    def sdf(self, x, y):
        return np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, FAR)

    def bbox(self):
        return None


def sdf_disk(center, radius, x, y):
    cx, cy = center
    return radius - np.hypot(np.asarray(x, dtype=float) - cx, np.asarray(y, dtype=float) - cy)


def _segment_distance(px, py, ex, ey, length):
    # segment from the origin along the unit vector (ex, ey)
    s = np.clip(px * ex + py * ey, 0.0, length)
    return np.hypot(px - s * ex, py - s * ey)


def _in_notch(px, py, bisector):
    rel = np.arctan2(py, px) - bisector
    rel = (rel + np.pi) % (2.0 * np.pi) - np.pi
    return np.abs(rel) < np.pi / 4


def sdf_wedge(center, radius, bisector, x, y):
    px = np.asarray(x, dtype=float) - center[0]
    py = np.asarray(y, dtype=float) - center[1]
    r = np.hypot(px, py)
    notch = _in_notch(px, py, bisector)

    # the arc only exists outside the notch; its endpoints belong to the edges
    d_arc = np.where(notch, np.inf, np.abs(r - radius))
    a1 = bisector + np.pi / 4
    a2 = bisector - np.pi / 4
    d1 = _segment_distance(px, py, np.cos(a1), np.sin(a1), radius)
    d2 = _segment_distance(px, py, np.cos(a2), np.sin(a2), radius)
    d = np.minimum(d_arc, np.minimum(d1, d2))

    inside = (r < radius) & ~notch
    return np.where(inside, d, -d)


def sdf_union(shapes, x, y):
    values = [s.sdf(x, y) for s in shapes]
    return np.maximum.reduce(values) if len(values) > 1 else values[0]


def sample_sdf(shape, grid):
    """Level set on the grid nodes.

    Values within ``SNAP_FRACTION * dx`` of zero are set to exactly zero so a
    node lying on the interface is classified the same way as its mirror
    image, whatever the rounding of its coordinates.
    """
    X, Y = grid.mesh()
    phi = np.array(shape.sdf(X, Y), dtype=float)
    phi[np.abs(phi) < SNAP_FRACTION * grid.dx] = 0.0
    return phi


# --------------------------------------------------------------------------
# normals and redistancing


def gradient(phi, grid):
    """Centred differences inside, second-order one-sided on the outer ring."""
    gx, gy = np.gradient(phi, grid.dx, grid.dy, edge_order=2)
    return gx, gy


def normals(phi, grid):
    """Return ``(nx, ny, tx, ty)`` with ``t`` the clockwise rotation of ``n``."""
    gx, gy = gradient(phi, grid)
    mag = np.maximum(np.hypot(gx, gy), NORMAL_EPS)
    n_x = gx / mag
    n_y = gy / mag
    return n_x, n_y, n_y.copy(), -n_x


def redistance(phi0, grid, iterations):
    """Relax ``phi`` toward a signed distance with the same zero level set.

    First-order Godunov discretisation of ``phi_t = S(phi0) (1 - |grad phi|)``
    with smoothed sign ``phi0 / sqrt(phi0**2 + dx**2)`` and pseudo-time step
    ``dx / 2``. The grid is padded by linear extrapolation, so planar data stay
    exact up to the outer ring.
    """
    dx, dy = grid.dx, grid.dy
    sgn = phi0 / np.sqrt(phi0**2 + dx**2)
    dtau = 0.5 * min(dx, dy)
    phi = np.array(phi0, dtype=float)
    for it in range(iterations):
        p = np.pad(phi, 1, mode="reflect", reflect_type="odd")
        c = p[1:-1, 1:-1]
        a = (c - p[:-2, 1:-1]) / dx   # backward x
        b = (p[2:, 1:-1] - c) / dx    # forward x
        cc = (c - p[1:-1, :-2]) / dy  # backward y
        d = (p[1:-1, 2:] - c) / dy    # forward y
        pos = sgn > 0
        gpos = np.sqrt(
            np.maximum(np.maximum(a, 0) ** 2, np.minimum(b, 0) ** 2)
            + np.maximum(np.maximum(cc, 0) ** 2, np.minimum(d, 0) ** 2)
        )
        gneg = np.sqrt(
            np.maximum(np.minimum(a, 0) ** 2, np.maximum(b, 0) ** 2)
            + np.maximum(np.minimum(cc, 0) ** 2, np.maximum(d, 0) ** 2)
        )
        grad = np.where(pos, gpos, gneg)
        phi = phi - dtau * sgn * (grad - 1.0)
        if not np.all(np.isfinite(phi)):
            raise RedistanceError(f"non-finite value after {it + 1} redistancing iterations")
    return phi


# --------------------------------------------------------------------------
# layer classification


@dataclass
class LayerMask:
    tags: np.ndarray
    pml: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.pml is None:
            self.pml = np.zeros(self.tags.shape, dtype=bool)

    def where(self, *layers):
        out = np.zeros(self.tags.shape, dtype=bool)
        for layer in layers:
            out |= self.tags == layer
        return out

    @property
    def inside(self):
        return self.tags >= Layer.FIRST_GHOST

    def count(self, layer):
        return int(np.count_nonzero(self.tags == layer))


def _neighbours(a, fill):
    p = np.pad(a, 1, mode="constant", constant_values=fill)
    return p[:-2, 1:-1], p[2:, 1:-1], p[1:-1, :-2], p[1:-1, 2:]


def classify_layers(phi, dx, pml=None):
    inside = phi >= 0
    nb_in = _neighbours(inside, False)
    any_in = nb_in[0] | nb_in[1] | nb_in[2] | nb_in[3]
    all_out = ~any_in

    ghost = inside & _any(_neighbours(~inside, False))
    first = ~inside & any_in
    second = ~inside & all_out & _any(_neighbours(first, False))
    second &= np.abs(phi) >= DEMOTE_FRACTION * dx

    tags = np.full(phi.shape, Layer.EXTERIOR, dtype=np.int8)
    tags[second] = Layer.SECOND_BOUNDARY
    tags[first] = Layer.FIRST_BOUNDARY
    tags[inside] = Layer.DEEP_PEC
    tags[ghost] = Layer.FIRST_GHOST

    if ghost.any():
        # a ghost always touches a first-boundary node, so check for extension data instead
        orphan = ghost & ~_dilate(second, 2)
        if orphan.any():
            i, j = np.argwhere(orphan)[0]
            raise GeometryResolutionError(
                f"ghost node ({i}, {j}) has no second-boundary node within two cells; "
                "refine the grid"
            )
    return LayerMask(tags, np.zeros(phi.shape, dtype=bool) if pml is None else np.asarray(pml, dtype=bool))


def _any(arrs):
    out = arrs[0].copy()
    for a in arrs[1:]:
        out |= a
    return out


def _dilate(mask, radius):
    out = mask.copy()
    nx, ny = mask.shape
    p = np.pad(mask, radius)
    for di in range(-radius, radius + 1):
        for dj in range(-radius, radius + 1):
            out |= p[radius + di : radius + di + nx, radius + dj : radius + dj + ny]
    return out


@dataclass
class LevelSetBundle:
    grid: object
    phi: np.ndarray
    n_x: np.ndarray
    n_y: np.ndarray
    t_x: np.ndarray
    t_y: np.ndarray
    mask: LayerMask

    @property
    def has_pec(self):
        return bool(self.mask.inside.any())


def build_bundle(shape, grid, pml=None):
    phi = sample_sdf(shape, grid)
    n_x, n_y, t_x, t_y = normals(phi, grid)
    mask = classify_layers(phi, grid.dx, pml)
    return LevelSetBundle(grid, phi, n_x, n_y, t_x, t_y, mask)
