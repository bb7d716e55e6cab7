import math

import numpy as np
import pytest

from pecfdtd.boundary import (Closure, GaussianPulse, NoWave, PlaneSine, PmlParams, PmlState, incident_eval,
                              pml_profiles, tfsf_init)
from pecfdtd.config import parse_config
from pecfdtd.emcore import EMState, Solver, SolverParams
from pecfdtd.grid import unit_grid
from pecfdtd.levelset import build_bundle, NoShape


class TestIncident:
    def test_gaussian_zero_at_centre(self):
        w = GaussianPulse()
        hx, hy, ez = incident_eval(w, 0.3 - 0.1, 0.5, 0.3)
        assert (float(hx), float(hy), float(ez)) == (0.0, 0.0, 0.0)

    def test_gaussian_value(self):
        hx, hy, ez = incident_eval(GaussianPulse(0.1, -0.1), 0.0, 0.5, 0.0)
        expected = 10.0 * math.exp(-1.0)
        assert float(ez) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(3.67879, abs=1e-5)
        assert float(hy) == -float(ez) and float(hx) == 0.0

    def test_plane_behind_front(self):
        hx, hy, ez = incident_eval(PlaneSine(2 * np.pi / 0.3), 0.325, 0.5, 0.4)
        assert float(ez) == pytest.approx(-1.0, abs=1e-12)
        assert float(hy) == pytest.approx(1.0, abs=1e-12)

    def test_plane_windows(self):
        causal = PlaneSine(window="causal")
        literal = PlaneSine(window="literal")
        # ahead of the front the causal wave is silent
        assert float(incident_eval(causal, 0.6, 0.5, 0.5)[2]) == 0.0
        assert float(incident_eval(literal, 0.6, 0.5, 0.5)[2]) != 0.0
        assert float(incident_eval(literal, 0.4, 0.5, 0.5)[2]) == 0.0

    def test_none(self):
        out = incident_eval(NoWave(), np.zeros((3, 4)), np.zeros((3, 4)), 1.0)
        assert all(a.shape == (3, 4) and not a.any() for a in out)

    def test_satisfies_tmz(self):
        # centred residual of dEz/dt - dHy/dx away from the pulse tails
        w = GaussianPulse()
        res = []
        for h in (1e-2, 5e-3):
            x = np.linspace(0.0, 0.4, 41)
            t = 0.2
            dez = (w.fields(x, 0.5, t + h)[2] - w.fields(x, 0.5, t - h)[2]) / (2 * h)
            dhy = (w.fields(x + h, 0.5, t)[1] - w.fields(x - h, 0.5, t)[1]) / (2 * h)
            res.append(np.max(np.abs(dez - dhy)))
        assert res[1] <= res[0] / 3.0 or res[1] < 1e-9

    def test_validation(self):
        with pytest.raises(ValueError):
            GaussianPulse(sigma=0)
        with pytest.raises(ValueError):
            PlaneSine(omega=-1)
        with pytest.raises(ValueError):
            PlaneSine(window="sideways")


class TestPml:
    def test_profile_values(self):
        params = PmlParams(thickness=10, order=3, r0=1e-6)
        g = unit_grid(20, pad=10)
        sx, sy = pml_profiles(params, g)
        smax = params.sigma_max(g.dx)
        assert smax == pytest.approx(-4 * math.log(1e-6) / (2 * 10 * g.dx))
        assert sx[10, 15] == 0.0  # inner interface x = 0
        assert sx[0, 15] == pytest.approx(smax)  # outer edge
        assert sx[5, 15] == pytest.approx(smax / 8)  # half depth
        assert sy[15, 0] == pytest.approx(smax)
        assert sx[0, 0] == pytest.approx(smax) and sy[0, 0] == pytest.approx(smax)
        assert np.all(sx[10:31, :] == 0)

    def test_validation(self):
        for kw in ({"thickness": 4}, {"order": 1}, {"r0": 1.0}):
            with pytest.raises(ValueError):
                PmlParams(**kw)

    def test_zero_sigma_is_plain_scheme(self):
        g = unit_grid(20, pad=10)
        clo = Closure(g, "pml")
        clo.sigma_x[:] = 0.0
        clo.sigma_y[:] = 0.0
        s = Solver(g, closure=clo)
        rng = np.random.default_rng(0)
        st = EMState(*(rng.normal(size=g.shape) for _ in range(3)))
        psi = PmlState.zeros(g.shape)
        out = s.forward(st, SolverParams(0.5 * g.dx, 1), psi)
        lam = 0.5 * g.dx / (2 * g.dx)
        c = (slice(1, -1), slice(1, -1))

        def avg(a):
            return ((a[:-2, 1:-1] + a[2:, 1:-1]) + (a[1:-1, :-2] + a[1:-1, 2:]) + a[1:-1, 1:-1]) / 5.0

        ez = avg(st.ez) + lam * (st.hy[2:, 1:-1] - st.hy[:-2, 1:-1]) - lam * (st.hx[1:-1, 2:] - st.hx[1:-1, :-2])
        hx = avg(st.hx) - lam * (st.ez[1:-1, 2:] - st.ez[1:-1, :-2])
        hy = avg(st.hy) + lam * (st.ez[2:, 1:-1] - st.ez[:-2, 1:-1])
        np.testing.assert_allclose(out.ez[c], ez, atol=1e-14)
        np.testing.assert_allclose(out.hx[c], hx, atol=1e-14)
        np.testing.assert_allclose(out.hy[c], hy, atol=1e-14)
        assert not any(a.any() for a in psi.arrays())

    def test_outer_ring_held(self):
        g = unit_grid(20, pad=10)
        s = Solver(g)
        rng = np.random.default_rng(1)
        st = EMState(*(rng.normal(size=g.shape) for _ in range(3)))
        out = s.forward(st, SolverParams(g.dx, 1))
        edge = s.closure.edge
        np.testing.assert_array_equal(out.ez[edge], st.ez[edge])

    def test_scattered_field_bounded(self):
        for wave in ("gaussian", "plane"):
            cfg = parse_config(f"[grid]\nresolution=40\n[solver]\nt_end=0.8\n[pec]\ntype=disk\n[wave]\ntype={wave}\n")
            solver = cfg.build_solver()
            params = cfg.solver_params()
            X, Y = solver.grid.mesh()
            ts = np.linspace(0, 0.8, 161)
            peak = max(np.max(np.abs(cfg.wave.fields(X, Y, t)[2])) for t in ts)
            worst = [0.0]
            pml = solver.closure.pml

            def watch(k, st):
                worst[0] = max(worst[0], max(np.max(np.abs(a[pml])) for a in (st.ez, st.hx, st.hy)))

            solver.march(solver.initial_state(), params, callback=watch)
            assert worst[0] <= 2 * peak


class TestTfsf:
    def test_none_wave_zero(self):
        g = unit_grid(20, pad=10)
        clo = Closure(g)
        out = tfsf_init(g, NoWave(), build_bundle(NoShape(), g).mask, clo)
        assert not any(a.any() for a in out)

    def test_plane_starts_silent(self):
        g = unit_grid(20, pad=10)
        clo = Closure(g, wave=PlaneSine())
        out = tfsf_init(g, clo.wave, build_bundle(NoShape(), g).mask, clo)
        assert not any(a.any() for a in out)

    def test_gaussian_tail(self):
        g = unit_grid(20, pad=10)
        clo = Closure(g, wave=GaussianPulse())
        hx, hy, ez = tfsf_init(g, clo.wave, build_bundle(NoShape(), g).mask, clo)
        i, j = 10, 20  # node (0, 0.5)
        assert ez[i, j] == pytest.approx(10.0 * math.exp(-1.0), rel=1e-12)
        assert np.all(ez[clo.pml] == 0)

    def test_ring_covers_interface(self):
        g = unit_grid(20, pad=10)
        clo = Closure(g)
        ring = np.zeros(g.shape, dtype=bool)
        ring[tuple(clo.ring.T)] = True
        # both sides of the interface: outermost physical nodes and innermost collar nodes
        assert ring[10, 15] and ring[9, 15] and not ring[11, 15] and not ring[8, 15]

    def test_unknown_closure(self):
        with pytest.raises(ValueError):
            Closure(unit_grid(20), "mirror")
