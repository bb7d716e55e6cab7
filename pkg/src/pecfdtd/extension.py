"""Ghost values inside the conductor via PDE extension along the normals.

``E_z`` and ``H.n`` get odd images (zero Dirichlet on the interface), ``H.t``
gets a quadratic even image (zero Neumann). Data sampled on the second
boundary layer is carried inward by iterating the averaged transport update

    u <- avg5(u) - dt_ext * n . grad(u),    dt_ext = ratio * dx

on a thin band: first boundary layer, first ghost layer and one more ring
of conductor nodes. Band neighbours that are neither band nodes nor sampled
data are closed off with a zero-gradient condition (the node's own value),
so the band's inner edge does not pin the extension.
"""

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import ExtensionDivergenceError, GeometryResolutionError
from .levelset import Layer


@dataclass(frozen=True)
class ExtensionParams:
    ratio: float = 0.2
    iterations: int = 300
    tol: float = 1e-12

    def __post_init__(self):
        if not 0 < self.ratio <= 0.5:
            raise ValueError("extension ratio must lie in (0, 0.5]")
        if self.iterations < int(np.ceil(4.0 / self.ratio)):
            raise ValueError(f"extension needs at least {int(np.ceil(4.0 / self.ratio))} iterations")
        if self.tol < 0:
            raise ValueError("extension tolerance must be non-negative")


def decompose_h(hx, hy, n_x, n_y, t_x, t_y):
    return hx * n_x + hy * n_y, hx * t_x + hy * t_y


def reassemble_h(hn, ht, n_x, n_y, t_x, t_y):
    return hn * n_x + ht * t_x, hn * n_y + ht * t_y


class _Band:
    """Compact index structure for one set of updated nodes and frozen sources."""

    def __init__(self, grid, n_x, n_y, update, source, ratio):
        nx, ny = grid.shape
        self.shape = grid.shape
        self.update_flat = np.flatnonzero(update)
        self.source_flat = np.flatnonzero(source & ~update)
        k = len(self.update_flat)
        row = np.full(nx * ny, -1, dtype=np.int64)
        row[self.update_flat] = np.arange(k)
        row[self.source_flat] = k + np.arange(len(self.source_flat))

        ii, jj = np.unravel_index(self.update_flat, grid.shape)
        own = np.arange(k)
        nbr = np.empty((k, 4), dtype=np.int64)
        for col, (di, dj) in enumerate(((-1, 0), (1, 0), (0, -1), (0, 1))):
            qi, qj = ii + di, jj + dj
            inside = (qi >= 0) & (qi < nx) & (qj >= 0) & (qj < ny)
            q = np.where(inside, np.clip(qi, 0, nx - 1) * ny + np.clip(qj, 0, ny - 1), 0)
            r = np.where(inside, row[q], -1)
            nbr[:, col] = np.where(r >= 0, r, own)
        self.nbr = nbr
        self.cx = ratio * n_x.ravel()[self.update_flat] / 2.0
        self.cy = ratio * (grid.dx / grid.dy) * n_y.ravel()[self.update_flat] / 2.0

    @property
    def size(self):
        return len(self.update_flat)

    def run(self, source_values, params):
        """Extend the given source columns; returns band values, shape (K, f)."""
        k = self.size
        f = source_values.shape[1]
        vals = np.zeros((k + len(self.source_flat), f))
        vals[k:] = source_values
        it, residual, bad = kernels.transport(vals, self.nbr, self.cx, self.cy,
                                              params.iterations, params.tol)
        if bad >= 0:
            node = tuple(int(v) for v in np.unravel_index(self.update_flat[bad], self.shape))
            raise ExtensionDivergenceError("non-finite value during extension", node)
        self.last_iterations = it
        self.last_residual = residual
        return vals[:k]


def transport_extend(field, n_x, n_y, grid, update, params=None, source=None):
    """Iterate the transport update on ``update`` nodes.

    Every other node is frozen. Frozen nodes in ``source`` (default: all of
    them) feed their values to updated neighbours; frozen nodes outside
    ``source`` are closed off with a zero-gradient condition. Updated nodes
    start from zero.
    """
    params = params if params is not None else ExtensionParams()
    update = np.asarray(update, dtype=bool)
    source = ~update if source is None else np.asarray(source, dtype=bool)
    band = _Band(grid, n_x, n_y, update, source, params.ratio)
    vals = band.run(np.asarray(field, dtype=float).ravel()[band.source_flat][:, None], params)
    out = np.array(field, dtype=float)
    out.ravel()[band.update_flat] = vals[:, 0]
    return out


class GhostBuilder:
    """Precomputed band for a fixed level-set bundle; applies all ghost rules."""

    def __init__(self, bundle, params=None):
        self.bundle = bundle
        self.params = params if params is not None else ExtensionParams()
        mask = bundle.mask
        tags = mask.tags
        self.active = bundle.has_pec
        self.first_ghost = tags == Layer.FIRST_GHOST
        self.first_boundary = tags == Layer.FIRST_BOUNDARY
        self.second = tags == Layer.SECOND_BOUNDARY
        self.deep = tags == Layer.DEEP_PEC
        self.interior = mask.inside
        if not self.active:
            return
        if not self.second.any():
            raise GeometryResolutionError("conductor present but the second boundary layer is empty")

        ghost_nb = _adjacent(self.first_ghost)
        first_nb = _adjacent(self.first_boundary)
        self.second_ring = self.deep & ghost_nb
        demoted = (tags == Layer.EXTERIOR) & first_nb
        self.update = self.first_boundary | self.first_ghost | self.second_ring | demoted
        self.band = _Band(bundle.grid, bundle.n_x, bundle.n_y, self.update, self.second, self.params.ratio)

        self.src = self.band.source_flat
        g = bundle.grid
        self.phi_src = bundle.phi.ravel()[self.src]
        nx_, ny_ = g.shape
        si, sj = np.unravel_index(self.src, g.shape)
        # neighbours for the centred gradient, replicated at the grid edge
        self._src_w = np.maximum(si - 1, 0) * ny_ + sj
        self._src_e = np.minimum(si + 1, nx_ - 1) * ny_ + sj
        self._src_s = si * ny_ + np.maximum(sj - 1, 0)
        self._src_n = si * ny_ + np.minimum(sj + 1, ny_ - 1)
        self._nx_src = bundle.n_x.ravel()[self.src]
        self._ny_src = bundle.n_y.ravel()[self.src]

        upd = self.band.update_flat
        self._phi_upd = bundle.phi.ravel()[upd]
        self._odd_sel = (self.first_ghost | self.first_boundary).ravel()[upd]
        self._even_sel = self.first_ghost.ravel()[upd]
        self._pec_sel = self.interior.ravel()[upd]

    # -- source sampling -------------------------------------------------

    def odd_source(self, u):
        return u.ravel()[self.src] / self.phi_src

    def even_source(self, u):
        flat = u.ravel()
        g = (self._nx_src * (flat[self._src_e] - flat[self._src_w]) / (2.0 * self.bundle.grid.dx)
             + self._ny_src * (flat[self._src_n] - flat[self._src_s]) / (2.0 * self.bundle.grid.dy))
        v = g / (2.0 * self.phi_src)
        z = flat[self.src] - (g / 2.0) * self.phi_src
        return v, z

    # -- assembly ----------------------------------------------------------

    def _finish_odd(self, u, w_tilde):
        out = np.array(u, dtype=float)
        upd = self.band.update_flat
        vals = np.where(self._odd_sel, w_tilde * self._phi_upd, out.ravel()[upd])
        out.ravel()[upd] = vals
        out[self.deep] = 0.0
        return out

    def _finish_even(self, u, v_tilde, z_tilde):
        out = np.array(u, dtype=float)
        upd = self.band.update_flat
        vals = np.where(self._even_sel, v_tilde * self._phi_upd**2 + z_tilde, out.ravel()[upd])
        out.ravel()[upd] = vals
        out[self.deep] = 0.0
        return out

    def odd_extend(self, u):
        if not self.active:
            return np.array(u, dtype=float)
        w = self.band.run(self.odd_source(u)[:, None], self.params)
        return self._finish_odd(u, w[:, 0])

    def even_extend(self, u):
        if not self.active:
            return np.array(u, dtype=float)
        v, z = self.even_source(u)
        vz = self.band.run(np.column_stack([v, z]), self.params)
        return self._finish_even(u, vz[:, 0], vz[:, 1])

    def apply(self, hx, hy, ez):
        """Ghost values for all three fields; returns new ``(hx, hy, ez)``."""
        if not self.active:
            return hx.copy(), hy.copy(), ez.copy()
        if not hasattr(self, "_touched"):
            self._prepare_apply()
        b = self.bundle
        fhx = hx.ravel()
        fhy = hy.ravel()
        fez = ez.ravel()

        # H.n on S, H.t on S and its four neighbours (for the centred gradient)
        s = self.src
        hn_src = fhx[s] * self._nx_src + fhy[s] * self._ny_src
        ht_full = np.empty(fhx.shape)
        st = self._ht_nodes
        ht_full[st] = fhx[st] * b.t_x.ravel()[st] + fhy[st] * b.t_y.ravel()[st]
        v, z = self.even_source(ht_full.reshape(hx.shape))
        src = np.column_stack([fez[s] / self.phi_src, hn_src / self.phi_src, v, z])
        ext = self.band.run(src, self.params)

        upd = self.band.update_flat
        sel = self._touched_rows
        nodes = upd[sel]
        phi = self._phi_upd[sel]
        ez_t = ext[sel, 0] * phi
        hn_t = ext[sel, 1] * phi
        ht_t = np.where(self._even_sel[sel], ext[sel, 2] * phi**2 + ext[sel, 3],
                        fhx[nodes] * self._tx_t + fhy[nodes] * self._ty_t)

        ez_new = ez.copy()
        hx_new = hx.copy()
        hy_new = hy.copy()
        fe, fx, fy = ez_new.ravel(), hx_new.ravel(), hy_new.ravel()
        fe[nodes] = ez_t
        fx[nodes] = hn_t * self._nx_t + ht_t * self._tx_t
        fy[nodes] = hn_t * self._ny_t + ht_t * self._ty_t
        d = self._deep_flat
        fe[d] = 0.0
        fx[d] = 0.0
        fy[d] = 0.0
        return hx_new, hy_new, ez_new

    def _prepare_apply(self):
        b = self.bundle
        upd = self.band.update_flat
        self._touched_rows = np.flatnonzero(self._odd_sel)
        nodes = upd[self._touched_rows]
        self._touched = nodes
        self._nx_t = b.n_x.ravel()[nodes]
        self._ny_t = b.n_y.ravel()[nodes]
        self._tx_t = b.t_x.ravel()[nodes]
        self._ty_t = b.t_y.ravel()[nodes]
        self._deep_flat = np.flatnonzero(self.deep)
        self._ht_nodes = np.unique(np.concatenate(
            [self.src, self._src_w, self._src_e, self._src_s, self._src_n]))


def _adjacent(mask):
    p = np.pad(mask, 1)
    return p[:-2, 1:-1] | p[2:, 1:-1] | p[1:-1, :-2] | p[1:-1, 2:]


def odd_extend(u, bundle, params=None):
    return GhostBuilder(bundle, params).odd_extend(u)


def even_extend(u, bundle, params=None):
    return GhostBuilder(bundle, params).even_extend(u)


def apply_ghost_conditions(state, bundle, params=None, builder=None):
    builder = builder if builder is not None else GhostBuilder(bundle, params)
    hx, hy, ez = builder.apply(state.hx, state.hy, state.ez)
    return state.replace(hx=hx, hy=hy, ez=ez)
