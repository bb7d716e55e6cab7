"""Plain-text field snapshots and PPM heatmaps.

Snapshot layout::

    # nx ny dx dy x0 y0 time field
    v(0,0) v(1,0) ... v(nx-1,0)
    ...
    v(0,ny-1) ... v(nx-1,ny-1)

one line per row ``j``, values with 17 significant digits so reading back
reproduces every finite double exactly.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SnapshotError


@dataclass(frozen=True)
class SnapshotHeader:
    nx: int
    ny: int
    dx: float
    dy: float
    x0: float
    y0: float
    time: float
    field: str

    @classmethod
    def for_grid(cls, grid, time, field):
        return cls(grid.nx, grid.ny, grid.dx, grid.dy, grid.x0, grid.y0, time, field)

    def render(self):
        return (f"# {self.nx} {self.ny} {self.dx!r} {self.dy!r} {self.x0!r} {self.y0!r} "
                f"{float(self.time)!r} {self.field}")


def _fmt(v):
    return "%.17g" % v


def write_snapshot(field, header, path):
    field = np.asarray(field, dtype=float)
    if field.shape != (header.nx, header.ny):
        raise SnapshotError(f"field shape {field.shape} does not match header ({header.nx}, {header.ny})")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header.render() + "\n")
        for j in range(header.ny):
            fh.write(" ".join(_fmt(v) for v in field[:, j]) + "\n")


def _parse_header(line):
    if not line.startswith("#"):
        raise SnapshotError("missing '#' header", line=1)
    parts = line[1:].split()
    if len(parts) != 8:
        raise SnapshotError(f"header needs 8 fields, found {len(parts)}", line=1)
    try:
        nx, ny = int(parts[0]), int(parts[1])
        dx, dy, x0, y0, t = (float(p) for p in parts[2:7])
    except ValueError as exc:
        raise SnapshotError(f"malformed header: {exc}", line=1) from None
    if nx < 1 or ny < 1:
        raise SnapshotError("header sizes must be positive", line=1)
    return SnapshotHeader(nx, ny, dx, dy, x0, y0, t, parts[7])


def read_snapshot(path):
    """Return ``(field, header)``; ``field`` has shape ``(nx, ny)``."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise SnapshotError("empty file", line=1)
    header = _parse_header(lines[0])
    rows = lines[1:]
    while rows and not rows[-1].strip():
        rows.pop()
    if len(rows) != header.ny:
        raise SnapshotError(f"expected {header.ny} data rows, found {len(rows)}",
                            line=min(len(rows), header.ny) + 2)
    out = np.empty((header.nx, header.ny))
    for j, text in enumerate(rows):
        parts = text.split()
        if len(parts) != header.nx:
            raise SnapshotError(f"expected {header.nx} values, found {len(parts)}", line=j + 2)
        try:
            out[:, j] = [float(p) for p in parts]
        except ValueError as exc:
            raise SnapshotError(f"bad value: {exc}", line=j + 2) from None
    return out, header


# --------------------------------------------------------------------------
# heatmaps

_BLUE = np.array([0.0, 0.0, 255.0])
_WHITE = np.array([255.0, 255.0, 255.0])
_RED = np.array([255.0, 0.0, 0.0])


def colormap(field, lo, hi):
    """Blue at ``lo``, white at the midpoint, red at ``hi``; RGB uint8 of shape ``field.shape + (3,)``."""
    if not lo < hi:
        raise ValueError("heatmap range needs lo < hi")
    s = (np.clip(np.asarray(field, dtype=float), lo, hi) - lo) / (hi - lo)
    s = np.nan_to_num(s, nan=0.5)[..., None]
    lower = _BLUE + (_WHITE - _BLUE) * (2.0 * s)
    upper = _WHITE + (_RED - _WHITE) * (2.0 * s - 1.0)
    rgb = np.where(s <= 0.5, lower, upper)
    return np.rint(rgb).astype(np.uint8)


def write_heatmap(field, path, value_range=None):
    """Binary PPM, one pixel per node, row ``j = 0`` at the bottom."""
    field = np.asarray(field, dtype=float)
    if value_range is None:
        m = float(np.max(np.abs(field[np.isfinite(field)]), initial=0.0))
        value_range = (-m, m) if m > 0 else (-1.0, 1.0)
    lo, hi = value_range
    rgb = colormap(field, lo, hi)
    nx, ny = field.shape
    # image rows run top to bottom: transpose to (j, i) and flip j
    img = rgb.transpose(1, 0, 2)[::-1]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{nx} {ny}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img).tobytes())


def snapshot_diff(path_a, path_b):
    """Max absolute and l1 (per node) difference of two compatible snapshots."""
    a, ha = read_snapshot(path_a)
    b, hb = read_snapshot(path_b)
    if (ha.nx, ha.ny) != (hb.nx, hb.ny):
        raise SnapshotError(f"size mismatch: {ha.nx}x{ha.ny} vs {hb.nx}x{hb.ny}")
    d = np.abs(a - b)
    return float(d.max()), float(d.mean())
