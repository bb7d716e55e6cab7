"""theta-scheme sweeps, BFECC time stepping, and the main simulation loop.

Units: epsilon = mu = 1, so the wave speed is 1 and the CFL number is dt/dx.
"""

from dataclasses import dataclass, replace

import numpy as np

from ._backend import kernels
from .boundary import Closure, PmlState, tfsf_init
from .errors import InstabilityError, ValidationError
from .extension import ExtensionParams, GhostBuilder
from .levelset import build_bundle, NoShape


@dataclass
class EMState:
    hx: np.ndarray
    hy: np.ndarray
    ez: np.ndarray
    t: float = 0.0

    def replace(self, **kw):
        return replace(self, **kw)

    def copy(self):
        return EMState(self.hx.copy(), self.hy.copy(), self.ez.copy(), self.t)

    def fields(self):
        return {"Ez": self.ez, "Hx": self.hx, "Hy": self.hy}

    def is_finite(self):
        return bool(np.isfinite(self.hx).all() and np.isfinite(self.hy).all()
                    and np.isfinite(self.ez).all())


@dataclass(frozen=True)
class SolverParams:
    dt: float
    n_steps: int
    theta: float = 0.8

    @classmethod
    def from_cfl(cls, dx, cfl, t_end, theta=0.8):
        """Step count ``round(T / (cfl*dx))``; dt is then adjusted to land on T exactly."""
        if cfl <= 0:
            raise ValidationError("CFL number must be positive")
        if t_end < 0:
            raise ValidationError("terminal time must be non-negative")
        if t_end == 0:
            return cls(cfl * dx, 0, theta)
        n = max(1, int(round(t_end / (cfl * dx))))
        return cls(t_end / n, n, theta)

    @property
    def t_end(self):
        return self.dt * self.n_steps

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValidationError("theta must lie in [0, 1]")
        if self.dt <= 0:
            raise ValidationError("time step must be positive")


class Solver:
    """One fixed configuration: grid, level set, closure, ghost builder.

    ``theta`` blends centred and Lax-Friedrichs updates; only the 5-point
    average case (theta = 4/5) has the closed form used by the kernels, so
    other values are handled by mixing the two averages explicitly.
    """

    def __init__(self, grid, shape=None, wave=None, closure="pml", pml=None,
                 extension=None, domain=None):
        self.grid = grid
        self.closure = closure if isinstance(closure, Closure) else Closure(grid, closure, pml, wave, domain)
        pml_flags = self.closure.pml
        shape = shape if shape is not None else NoShape()
        self.bundle = build_bundle(shape, grid, pml_flags)
        mask = self.bundle.mask
        if (mask.inside & (pml_flags | _adjacent(pml_flags))).any():
            raise ValidationError("conductor must lie entirely inside the non-PML region")
        self.ghosts = GhostBuilder(self.bundle, extension if extension is not None else ExtensionParams())
        self.update = ~(mask.inside | self.closure.edge)
        self.psi = PmlState.zeros(grid.shape)
        self.inv2dx = 1.0 / (2.0 * grid.dx)
        self.inv2dy = 1.0 / (2.0 * grid.dy)

    @property
    def mask(self):
        return self.bundle.mask

    @property
    def wave(self):
        return self.closure.wave

    def initial_state(self):
        hx, hy, ez = tfsf_init(self.grid, self.wave, self.mask, self.closure)
        return EMState(hx, hy, ez, 0.0)

    # -- sweeps ------------------------------------------------------------

    def sweep(self, state, dt, direction, psi=None, theta=0.8, step=None):
        """One theta-scheme sweep; ``direction`` is +1 (forward) or -1 (backward).

        ``psi`` is updated in place; pass a throwaway copy for sweeps whose
        memory must not persist.
        """
        psi = psi if psi is not None else PmlState.zeros(self.grid.shape)
        inc = self.closure.incident_ring(state.t)
        bx, ax, by, ay = self.closure.coefficients(dt)
        hx, hy, ez, ok = kernels.theta_sweep(
            state.hx, state.hy, state.ez, self.update, self.closure.pml, inc[0], inc[1], inc[2],
            bx, ax, by, ay, *psi.arrays(), dt, self.inv2dx, self.inv2dy,
            float(direction), self.closure.periodic)
        if theta != 0.8:
            hx, hy, ez = self._retheta(state, (hx, hy, ez), theta)
        if not ok:
            raise InstabilityError("non-finite field after sweep", step)
        return EMState(hx, hy, ez, state.t + direction * dt)

    def _retheta(self, state, lf5, theta):
        # kernel result = avg5 + flux; replace avg5 with (1-theta) u + theta avg4
        out = []
        for old, new in zip((state.hx, state.hy, state.ez), lf5):
            p = np.pad(old, 1, mode="wrap" if self.closure.periodic else "edge")
            ring = (p[:-2, 1:-1] + p[2:, 1:-1]) + (p[1:-1, :-2] + p[1:-1, 2:])
            avg5 = (ring + old) / 5.0
            avg4 = ring / 4.0
            mixed = new - avg5 + (1.0 - theta) * old + theta * avg4
            out.append(np.where(self.update, mixed, old))
        return tuple(out)

    def forward(self, state, params, psi=None, step=None):
        return self.sweep(state, params.dt, +1, psi, params.theta, step)

    def backward(self, state, params, psi=None, step=None):
        return self.sweep(state, params.dt, -1, psi, params.theta, step)

    def ghost(self, state):
        hx, hy, ez = self.ghosts.apply(state.hx, state.hy, state.ez)
        return EMState(hx, hy, ez, state.t)

    # -- time stepping -----------------------------------------------------

    def bfecc_step(self, state, params, step=None, return_error=False):
        u0 = self.ghost(state)
        # the trial sweeps work on a scratch copy of the CPML memory; the backward
        # sweep starts from the memory the forward sweep left at t + dt
        psi = self.psi.copy()
        u_star = self.forward(u0, params, psi, step)
        u_back = self.backward(self.ghost(u_star), params, psi, step)
        upd = self.update
        err = []
        comp = []
        for a, b in ((u0.hx, u_back.hx), (u0.hy, u_back.hy), (u0.ez, u_back.ez)):
            e = np.where(upd, 0.5 * (a - b), 0.0)
            err.append(e)
            comp.append(a + e)
        u_comp = EMState(*comp, u0.t)
        new = self.forward(self.ghost(u_comp), params, self.psi, step)
        if return_error:
            return new, EMState(*err, u0.t)
        return new

    def forward_step(self, state, params, step=None):
        """Plain (uncompensated) step: ghosts, then one forward sweep."""
        return self.forward(self.ghost(state), params, self.psi, step)

    def finalize(self, state):
        out = self.ghost(state)
        dead = self.mask.inside
        for a in (out.hx, out.hy, out.ez):
            a[dead] = 0.0
        return out

    def march(self, state, params, scheme="bfecc", callback=None):
        stepper = self.bfecc_step if scheme == "bfecc" else self.forward_step
        t0 = state.t
        for n in range(params.n_steps):
            state = stepper(state, params, step=n)
            # pin the clock to t0 + (n+1) dt so round-off does not accumulate
            state.t = t0 + (n + 1) * params.dt
            if callback is not None:
                callback(n + 1, state)
        return state


def _adjacent(mask):
    p = np.pad(mask, 1)
    return p[:-2, 1:-1] | p[2:, 1:-1] | p[1:-1, :-2] | p[1:-1, 2:]


def theta_forward(solver, state, params):
    return solver.forward(state, params)


def theta_backward(solver, state, params):
    return solver.backward(state, params)


def finalize(solver, state):
    return solver.finalize(state)


def run(config, scheme="bfecc", callback=None):
    """Run a :class:`~pecfdtd.config.SimConfig` to its terminal time.

    Returns ``(solver, terminal_state)``; the state lives on the padded grid.
    """
    solver = config.build_solver()
    params = config.solver_params()
    state = solver.initial_state()
    state = solver.march(state, params, scheme, callback)
    return solver, solver.finalize(state)
