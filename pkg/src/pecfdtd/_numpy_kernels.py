"""Pure-numpy versions of the hot loops. Same signatures as ``_numba_kernels``."""

import numpy as np


def _shifted(a, periodic):
    p = np.pad(a, 1, mode="wrap" if periodic else "edge")
    # west, east, south, north
    return p[:-2, 1:-1], p[2:, 1:-1], p[1:-1, :-2], p[1:-1, 2:]


def theta_sweep(hx, hy, ez, update, pml, ihx, ihy, iez, bx, ax, by, ay,
                psi_ezx, psi_ezy, psi_hxy, psi_hyx, dt, inv2dx, inv2dy, sign, periodic):
    lam_x = dt * inv2dx
    lam_y = dt * inv2dy
    p = pml.astype(np.float64)
    pw, pe, ps, pn = _shifted(p, periodic)

    def conv(a, inc):
        w, e, s, n = _shifted(a, periodic)
        iw, ie, is_, in_ = _shifted(inc, periodic)
        return (w + (pw - p) * iw, e + (pe - p) * ie, s + (ps - p) * is_, n + (pn - p) * in_)

    hxw, hxe, hxs, hxn = conv(hx, ihx)
    hyw, hye, hys, hyn = conv(hy, ihy)
    ezw, eze, ezs, ezn = conv(ez, iez)

    in_pml = update & pml
    BX = bx[:, None] * np.ones_like(ez)
    AX = ax[:, None] * np.ones_like(ez)
    BY = by[None, :] * np.ones_like(ez)
    AY = ay[None, :] * np.ones_like(ez)
    psi_ezx[in_pml] = BX[in_pml] * psi_ezx[in_pml] + AX[in_pml] * ((hye - hyw) * inv2dx)[in_pml]
    psi_ezy[in_pml] = BY[in_pml] * psi_ezy[in_pml] + AY[in_pml] * ((hxn - hxs) * inv2dy)[in_pml]
    psi_hxy[in_pml] = BY[in_pml] * psi_hxy[in_pml] + AY[in_pml] * ((ezn - ezs) * inv2dy)[in_pml]
    psi_hyx[in_pml] = BX[in_pml] * psi_hyx[in_pml] + AX[in_pml] * ((eze - ezw) * inv2dx)[in_pml]

    d_ez = (lam_x * (hye - hyw) + dt * psi_ezx) - (lam_y * (hxn - hxs) + dt * psi_ezy)
    d_hx = lam_y * (ezn - ezs) + dt * psi_hxy
    d_hy = lam_x * (eze - ezw) + dt * psi_hyx

    new_ez = ((ezw + eze) + (ezs + ezn) + ez) / 5.0 + sign * d_ez
    new_hx = ((hxw + hxe) + (hxs + hxn) + hx) / 5.0 - sign * d_hx
    new_hy = ((hyw + hye) + (hys + hyn) + hy) / 5.0 + sign * d_hy

    out_ez = np.where(update, new_ez, ez)
    out_hx = np.where(update, new_hx, hx)
    out_hy = np.where(update, new_hy, hy)
    ok = bool(np.isfinite(out_ez[update]).all() and np.isfinite(out_hx[update]).all()
              and np.isfinite(out_hy[update]).all())
    return out_hx, out_hy, out_ez, ok


def transport(vals, nbr, cx, cy, iterations, tol):
    """Jacobi sweeps of the averaged upwind transport on a compact node list.

    ``vals`` has shape (m, f); rows ``0..K-1`` (K = len(nbr)) are updated,
    the remaining rows are frozen source data. ``nbr[k]`` holds the W, E, S, N
    row indices of node k (its own index where the neighbour is closed off).
    Returns ``(iterations_done, residual, bad_row)`` with ``bad_row = -1``
    when everything stayed finite.
    """
    k = nbr.shape[0]
    w, e, s, n = nbr[:, 0], nbr[:, 1], nbr[:, 2], nbr[:, 3]
    cxc = cx[:, None]
    cyc = cy[:, None]
    residual = np.inf
    it = 0
    for it in range(1, iterations + 1):
        new = ((vals[w] + vals[e]) + (vals[s] + vals[n]) + vals[:k]) / 5.0 \
            - cxc * (vals[e] - vals[w]) - cyc * (vals[n] - vals[s])
        finite = np.isfinite(new).all(axis=1)
        if not finite.all():
            return it, np.inf, int(np.argmin(finite))
        residual = float(np.max(np.abs(new - vals[:k]))) if k else 0.0
        vals[:k] = new
        if residual < tol:
            break
    return it, residual, -1
