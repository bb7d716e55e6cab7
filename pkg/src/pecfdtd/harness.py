"""Error measurement against a nested fine-grid reference, and study drivers.

Every study works on fields cropped to the physical rectangle, so grids at
different resolutions share the origin ``(xmin, ymin)`` and coarse node
``(i, j)`` coincides with fine node ``(k*i, k*j)``.
"""

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyCollarError, GridMismatchError
from .grid import Grid2D
from .levelset import NoShape

FIELDS = ("Ez", "Hx", "Hy")
NA = "N.A"


@dataclass(frozen=True)
class CollarSpec:
    width: float = 0.1

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("collar width must be positive")


def collar_mask(phi, collar=CollarSpec()):
    """Exterior nodes within ``collar.width`` of the conductor: ``-width < phi < 0``."""
    width = collar.width if isinstance(collar, CollarSpec) else float(collar)
    mask = (phi < 0) & (phi > -width)
    if not mask.any():
        raise EmptyCollarError(f"no grid node lies in the collar of width {width}")
    return mask


def l1_collar_error(u, u_ref, mask, dx, dy):
    # boolean indexing walks the array in C (row-major) order
    return float(dx * dy * np.sum(np.abs(u[mask] - u_ref[mask])))


def linf_collar_error(u, u_ref, mask):
    return float(np.max(np.abs(u[mask] - u_ref[mask])))


def l1_collar_mean(u, u_ref, mask):
    """Mean absolute difference per collar node (no area weight)."""
    return float(np.sum(np.abs(u[mask] - u_ref[mask])) / np.count_nonzero(mask))


def restrict(fine, fine_grid, coarse_grid):
    """Sample a fine-grid field at the nodes of a nested coarse grid."""
    ratio = coarse_grid.dx / fine_grid.dx
    k = int(round(ratio))
    if k < 1 or abs(ratio - k) > 1e-9 * k or abs(coarse_grid.dy / fine_grid.dy - k) > 1e-9 * k:
        raise GridMismatchError(f"coarse spacing is not an integer multiple of the fine spacing ({ratio:g})")
    oi = (coarse_grid.x0 - fine_grid.x0) / fine_grid.dx
    oj = (coarse_grid.y0 - fine_grid.y0) / fine_grid.dy
    i0, j0 = int(round(oi)), int(round(oj))
    if abs(oi - i0) > 1e-6 or abs(oj - j0) > 1e-6 or i0 < 0 or j0 < 0:
        raise GridMismatchError("grid origins are not aligned on a common node")
    i1 = i0 + k * (coarse_grid.nx - 1)
    j1 = j0 + k * (coarse_grid.ny - 1)
    if i1 >= fine_grid.nx or j1 >= fine_grid.ny:
        raise GridMismatchError("coarse grid extends beyond the fine grid")
    if fine.shape != fine_grid.shape:
        raise GridMismatchError(f"field shape {fine.shape} does not match grid {fine_grid.shape}")
    return np.array(fine[i0 : i1 + 1 : k, j0 : j1 + 1 : k])


def observed_order(e_coarse, e_fine):
    """``log2(e_coarse / e_fine)``; ``None`` when undefined (non-positive or growing error)."""
    if not (e_coarse > 0 and e_fine > 0) or e_fine > e_coarse:
        return None
    return math.log2(e_coarse / e_fine)


def format_order(order):
    return NA if order is None else f"{order:.2f}"


# --------------------------------------------------------------------------
# single runs


@dataclass
class LevelResult:
    """Terminal fields of one run, cropped to the physical rectangle."""

    resolution: int
    grid: Grid2D
    phi: np.ndarray
    fields: dict
    t: float


def run_level(config, resolution, cfl=None, t_end=None):
    solver = config.build_solver(resolution)
    params = config.solver_params(resolution, cfl, t_end)
    state = solver.finalize(solver.march(solver.initial_state(), params, config.scheme))
    return _crop(config, solver, state, resolution)


def _crop(config, solver, state, resolution):
    g = solver.grid
    si, sj = config.domain_slices(g)
    i0 = si.start or 0
    j0 = sj.start or 0
    sub = g.subgrid(i0, j0, len(range(*si.indices(g.nx))), len(range(*sj.indices(g.ny))))
    flds = {name: np.array(arr[si, sj]) for name, arr in state.fields().items()}
    return LevelResult(resolution, sub, np.array(solver.bundle.phi[si, sj]), flds, state.t)


def _run_many(config, jobs, workers):
    """``jobs`` is a list of ``(resolution, cfl, t_end)``; results keep the order."""
    if workers is not None and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(run_level, config, *job) for job in jobs]
            return [f.result() for f in futs]
    return [run_level(config, *job) for job in jobs]


def measure_mask(config, level):
    """Collar around the conductor, or the whole rectangle when there is none."""
    if isinstance(config.shape, NoShape):
        return np.ones(level.grid.shape, dtype=bool)
    return collar_mask(level.phi, CollarSpec(config.collar))


# --------------------------------------------------------------------------
# convergence study


@dataclass
class FieldError:
    l1: float
    l1_mean: float
    linf: float
    order: object = None


@dataclass
class ErrorReport:
    resolution: int
    count: int
    errors: dict = field(default_factory=dict)

    def order(self, name):
        return self.errors[name].order


def compare(level, ref, mask):
    out = {}
    for name in FIELDS:
        r = restrict(ref.fields[name], ref.grid, level.grid)
        u = level.fields[name]
        out[name] = FieldError(
            l1_collar_error(u, r, mask, level.grid.dx, level.grid.dy),
            l1_collar_mean(u, r, mask),
            linf_collar_error(u, r, mask),
        )
    return out


def convergence_study(config, workers=None, reference=None):
    """Errors and observed orders for each of ``config.resolutions``.

    ``reference`` may be a precomputed :class:`LevelResult` at
    ``config.reference`` (shared between studies with the same setup).
    """
    jobs = [(n, None, None) for n in config.resolutions]
    if reference is None:
        jobs.insert(0, (config.reference, None, None))
    runs = _run_many(config, jobs, workers)
    ref = reference if reference is not None else runs.pop(0)
    reports = []
    prev = None
    for level in runs:
        mask = measure_mask(config, level)
        errs = compare(level, ref, mask)
        if prev is not None:
            for name in FIELDS:
                errs[name].order = observed_order(prev.errors[name].l1, errs[name].l1)
        prev = ErrorReport(level.resolution, int(np.count_nonzero(mask)), errs)
        reports.append(prev)
    return reports, ref


# --------------------------------------------------------------------------
# CFL and long-time studies


@dataclass
class CflRow:
    cfl: float
    rel_l1: float
    rel_linf: float


def cfl_study(config, cfl_list=None, resolution=160, workers=None, reference=None):
    """Collar norms of Ez at each CFL, relative to the reference run's norms."""
    cfl_list = list(config.cfl_list if cfl_list is None else cfl_list)
    jobs = [(resolution, c, None) for c in cfl_list]
    if reference is None:
        jobs.insert(0, (config.reference, None, None))
    runs = _run_many(config, jobs, workers)
    ref = reference if reference is not None else runs.pop(0)
    rows = []
    for c, level in zip(cfl_list, runs):
        mask = measure_mask(config, level)
        r = restrict(ref.fields["Ez"], ref.grid, level.grid)
        u = np.abs(level.fields["Ez"][mask])
        rr = np.abs(r[mask])
        rows.append(CflRow(c, float(np.sum(u) / np.sum(rr)), float(np.max(u) / np.max(rr))))
    return rows, ref


@dataclass
class LongtimeRow:
    t: float
    linf: float


def longtime_study(config, t_list=None, resolution=160):
    """Collar l-infinity norm of Ez at each time in ``t_list`` from one continuous run."""
    t_list = sorted(config.t_list if t_list is None else t_list)
    solver = config.build_solver(resolution)
    state = solver.initial_state()
    rows = []
    t_prev = 0.0
    for t in t_list:
        span = t - t_prev
        if span > 0:
            params = config.solver_params(resolution, t_end=span)
            state = solver.march(state, params, config.scheme)
        t_prev = t
        level = _crop(config, solver, solver.finalize(state), resolution)
        mask = measure_mask(config, level)
        rows.append(LongtimeRow(t, float(np.max(np.abs(level.fields["Ez"][mask])))))
    return rows


# --------------------------------------------------------------------------
# tables


def convergence_table(reports, norm="l1"):
    """Aligned text table in the layout of a per-field error/order listing."""
    head = f"{'dx':>8} " + " ".join(f"{name + ' err':>12} {'order':>6}" for name in FIELDS)
    lines = [head]
    for rep in reports:
        cells = []
        for name in FIELDS:
            e = rep.errors[name]
            val = e.l1 if norm == "l1" else e.l1_mean if norm == "mean" else e.linf
            cells.append(f"{val:12.3e} {format_order(e.order) if rep is not reports[0] else '--':>6}")
        lines.append(f"{'1/' + str(rep.resolution):>8} " + " ".join(cells))
    return "\n".join(lines) + "\n"


def convergence_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["resolution", "field", "l1", "order", "linf", "l1_mean", "count"])
    for rep in reports:
        for name in FIELDS:
            e = rep.errors[name]
            w.writerow([f"1/{rep.resolution}", name, repr(e.l1),
                        "" if e.order is None else repr(e.order), repr(e.linf), repr(e.l1_mean), rep.count])
    return buf.getvalue()


def cfl_table(rows):
    lines = [f"{'cfl':>6} {'rel l1':>10} {'rel linf':>10}"]
    lines += [f"{r.cfl:6.2f} {r.rel_l1:10.4f} {r.rel_linf:10.4f}" for r in rows]
    return "\n".join(lines) + "\n"


def cfl_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["cfl", "rel_l1", "rel_linf"])
    for r in rows:
        w.writerow([repr(r.cfl), repr(r.rel_l1), repr(r.rel_linf)])
    return buf.getvalue()


def longtime_table(rows):
    base = rows[0].linf if rows else 1.0
    lines = [f"{'T':>6} {'linf':>12} {'change':>9}"]
    lines += [f"{r.t:6.2f} {r.linf:12.6e} {100.0 * (r.linf - base) / base:8.3f}%" for r in rows]
    return "\n".join(lines) + "\n"


def longtime_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "linf"])
    for r in rows:
        w.writerow([repr(r.t), repr(r.linf)])
    return buf.getvalue()
