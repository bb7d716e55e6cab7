"""numba-compiled versions of the hot loops. Same signatures as ``_numpy_kernels``."""

import numpy as np
from numba import njit


@njit(cache=True)
def _sweep(hx, hy, ez, update, pml, ihx, ihy, iez, bx, ax, by, ay,
           psi_ezx, psi_ezy, psi_hxy, psi_hyx, dt, inv2dx, inv2dy, sign, periodic,
           out_hx, out_hy, out_ez):
    nx, ny = ez.shape
    lam_x = dt * inv2dx
    lam_y = dt * inv2dy
    ok = True
    for i in range(nx):
        for j in range(ny):
            if not update[i, j]:
                out_hx[i, j] = hx[i, j]
                out_hy[i, j] = hy[i, j]
                out_ez[i, j] = ez[i, j]
                continue
            if periodic:
                im = i - 1 if i > 0 else nx - 1
                ip = i + 1 if i < nx - 1 else 0
                jm = j - 1 if j > 0 else ny - 1
                jp = j + 1 if j < ny - 1 else 0
            else:
                im = i - 1
                ip = i + 1
                jm = j - 1
                jp = j + 1
            here = pml[i, j]
            if here or pml[im, j] or pml[ip, j] or pml[i, jm] or pml[i, jp]:
                p = 1.0 if here else 0.0
                fw = (1.0 if pml[im, j] else 0.0) - p
                fe = (1.0 if pml[ip, j] else 0.0) - p
                fs = (1.0 if pml[i, jm] else 0.0) - p
                fn = (1.0 if pml[i, jp] else 0.0) - p
                hxw = hx[im, j] + fw * ihx[im, j]
                hxe = hx[ip, j] + fe * ihx[ip, j]
                hxs = hx[i, jm] + fs * ihx[i, jm]
                hxn = hx[i, jp] + fn * ihx[i, jp]
                hyw = hy[im, j] + fw * ihy[im, j]
                hye = hy[ip, j] + fe * ihy[ip, j]
                hys = hy[i, jm] + fs * ihy[i, jm]
                hyn = hy[i, jp] + fn * ihy[i, jp]
                ezw = ez[im, j] + fw * iez[im, j]
                eze = ez[ip, j] + fe * iez[ip, j]
                ezs = ez[i, jm] + fs * iez[i, jm]
                ezn = ez[i, jp] + fn * iez[i, jp]
            else:
                hxw = hx[im, j]
                hxe = hx[ip, j]
                hxs = hx[i, jm]
                hxn = hx[i, jp]
                hyw = hy[im, j]
                hye = hy[ip, j]
                hys = hy[i, jm]
                hyn = hy[i, jp]
                ezw = ez[im, j]
                eze = ez[ip, j]
                ezs = ez[i, jm]
                ezn = ez[i, jp]

            if here:
                psi_ezx[i, j] = bx[i] * psi_ezx[i, j] + ax[i] * ((hye - hyw) * inv2dx)
                psi_ezy[i, j] = by[j] * psi_ezy[i, j] + ay[j] * ((hxn - hxs) * inv2dy)
                psi_hxy[i, j] = by[j] * psi_hxy[i, j] + ay[j] * ((ezn - ezs) * inv2dy)
                psi_hyx[i, j] = bx[i] * psi_hyx[i, j] + ax[i] * ((eze - ezw) * inv2dx)
                d_ez = (lam_x * (hye - hyw) + dt * psi_ezx[i, j]) - (lam_y * (hxn - hxs) + dt * psi_ezy[i, j])
                d_hx = lam_y * (ezn - ezs) + dt * psi_hxy[i, j]
                d_hy = lam_x * (eze - ezw) + dt * psi_hyx[i, j]
            else:
                d_ez = (lam_x * (hye - hyw) + 0.0) - (lam_y * (hxn - hxs) + 0.0)
                d_hx = lam_y * (ezn - ezs) + 0.0
                d_hy = lam_x * (eze - ezw) + 0.0

            vz = ((ezw + eze) + (ezs + ezn) + ez[i, j]) / 5.0 + sign * d_ez
            vx = ((hxw + hxe) + (hxs + hxn) + hx[i, j]) / 5.0 - sign * d_hx
            vy = ((hyw + hye) + (hys + hyn) + hy[i, j]) / 5.0 + sign * d_hy
            out_ez[i, j] = vz
            out_hx[i, j] = vx
            out_hy[i, j] = vy
            if not (np.isfinite(vz) and np.isfinite(vx) and np.isfinite(vy)):
                ok = False
    return ok


def theta_sweep(hx, hy, ez, update, pml, ihx, ihy, iez, bx, ax, by, ay,
                psi_ezx, psi_ezy, psi_hxy, psi_hyx, dt, inv2dx, inv2dy, sign, periodic):
    out_hx = np.empty_like(hx)
    out_hy = np.empty_like(hy)
    out_ez = np.empty_like(ez)
    ok = _sweep(hx, hy, ez, update, pml, ihx, ihy, iez, bx, ax, by, ay,
                psi_ezx, psi_ezy, psi_hxy, psi_hyx, float(dt), float(inv2dx), float(inv2dy),
                float(sign), bool(periodic), out_hx, out_hy, out_ez)
    return out_hx, out_hy, out_ez, ok


@njit(cache=True)
def _transport(vals, nbr, cx, cy, iterations, tol):
    k = nbr.shape[0]
    f = vals.shape[1]
    new = np.empty((k, f))
    residual = np.inf
    it = 0
    for it in range(1, iterations + 1):
        residual = 0.0
        for r in range(k):
            w = nbr[r, 0]
            e = nbr[r, 1]
            s = nbr[r, 2]
            n = nbr[r, 3]
            for c in range(f):
                v = ((vals[w, c] + vals[e, c]) + (vals[s, c] + vals[n, c]) + vals[r, c]) / 5.0 \
                    - cx[r] * (vals[e, c] - vals[w, c]) - cy[r] * (vals[n, c] - vals[s, c])
                if not np.isfinite(v):
                    return it, np.inf, r
                d = abs(v - vals[r, c])
                if d > residual:
                    residual = d
                new[r, c] = v
        for r in range(k):
            for c in range(f):
                vals[r, c] = new[r, c]
        if residual < tol:
            break
    return it, residual, -1


def transport(vals, nbr, cx, cy, iterations, tol):
    it, residual, bad = _transport(vals, nbr, cx, cy, int(iterations), float(tol))
    return int(it), float(residual), int(bad)
