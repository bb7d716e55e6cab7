import csv
import io
import math

import numpy as np
import pytest

from pecfdtd import harness
from pecfdtd.config import parse_config
from pecfdtd.errors import EmptyCollarError, GridMismatchError
from pecfdtd.grid import unit_grid
from pecfdtd.harness import (CollarSpec, collar_mask, l1_collar_error, linf_collar_error, observed_order,
                             restrict)
from pecfdtd.levelset import Disk, build_bundle


def disk_phi(n):
    g = unit_grid(n)
    return g, build_bundle(Disk((0.5, 0.5), 0.2), g).phi


class TestCollar:
    def test_disk_band(self):
        g, phi = disk_phi(160)
        m = collar_mask(phi, CollarSpec(0.1))
        X, Y = g.mesh()
        r = np.hypot(X - 0.5, Y - 0.5)[m]
        assert m.any()
        # nodes exactly on r = 0.3 fall either way under rounding
        assert np.all((r > 0.2) & (r < 0.3 + 1e-12))
        assert np.count_nonzero(np.abs(r - 0.3) < 1e-12) <= 4

    def test_empty(self):
        # the closest exterior node to r = 0.2 sits at sqrt(17)/20 ~ 0.2062
        _, phi = disk_phi(20)
        with pytest.raises(EmptyCollarError):
            collar_mask(phi, CollarSpec(0.005))

    def test_area_scaling(self):
        c40 = np.count_nonzero(collar_mask(disk_phi(40)[1]))
        c80 = np.count_nonzero(collar_mask(disk_phi(80)[1]))
        assert 4 * 0.85 <= c80 / c40 <= 4 * 1.15

    def test_width_validation(self):
        with pytest.raises(ValueError):
            CollarSpec(0.0)


class TestNorms:
    def test_identical(self):
        u = np.random.default_rng(0).normal(size=(6, 7))
        m = u > 0
        assert l1_collar_error(u, u, m, 0.1, 0.1) == 0.0
        assert linf_collar_error(u, u, m) == 0.0

    def test_constant_offset(self):
        u = np.random.default_rng(1).normal(size=(6, 7))
        m = np.zeros(u.shape, dtype=bool)
        m[1:4, 2:6] = True
        d, dx, dy = 0.25, 0.1, 0.05
        assert l1_collar_error(u + d, u, m, dx, dy) == pytest.approx(d * dx * dy * 12)
        assert linf_collar_error(u + d, u, m) == pytest.approx(d)
        assert harness.l1_collar_mean(u - d, u, m) == pytest.approx(d)


class TestRestrict:
    def test_identity(self):
        g = unit_grid(20)
        f = np.random.default_rng(2).normal(size=g.shape)
        np.testing.assert_array_equal(restrict(f, g, g), f)

    def test_stride(self):
        fine, coarse = unit_grid(640), unit_grid(160)
        f = np.arange(fine.nx * fine.ny, dtype=float).reshape(fine.shape)
        r = restrict(f, fine, coarse)
        assert r.shape == coarse.shape
        for i, j in ((0, 0), (3, 7), (160, 160), (17, 99)):
            assert r[i, j] == f[4 * i, 4 * j]

    def test_commutes_with_sampling(self):
        fine, coarse = unit_grid(80), unit_grid(20)

        def f(X, Y):
            return np.sin(3 * X) * np.exp(Y)

        np.testing.assert_array_equal(restrict(f(*fine.mesh()), fine, coarse), f(*coarse.mesh()))

    def test_mismatch(self):
        with pytest.raises(GridMismatchError):
            restrict(np.zeros(unit_grid(60).shape), unit_grid(60), unit_grid(40))
        shifted = unit_grid(20).subgrid(1, 0, 20, 21)
        fine = unit_grid(40)
        shifted = type(shifted)(shifted.x0 + fine.dx / 2, shifted.y0, shifted.dx, shifted.dy, 20, 21)
        with pytest.raises(GridMismatchError):
            restrict(np.zeros(fine.shape), fine, shifted)


class TestOrder:
    def test_values(self):
        assert observed_order(4, 1) == pytest.approx(2.0)
        assert round(observed_order(5.58e-1, 1.63e-1), 2) == 1.78
        assert observed_order(2.58e-1, 2.66e-1) is None
        assert observed_order(0.0, 1.0) is None
        assert harness.format_order(None) == "N.A"
        assert harness.format_order(observed_order(5.58e-1, 1.63e-1)) == "1.78"


def small_disk(extra=""):
    return parse_config("[grid]\nresolutions=20\nreference=20\n[solver]\nt_end=0.2\n[pec]\ntype=disk\n"
                        "[wave]\ntype=gaussian\n" + extra)


class TestStudies:
    def test_self_reference_is_zero(self):
        reports, ref = harness.convergence_study(small_disk())
        assert len(reports) == 1 and ref.resolution == 20
        for e in reports[0].errors.values():
            assert e.l1 == 0.0 and e.linf == 0.0 and e.order is None
        assert reports[0].count > 0

    def test_shared_reference_reused(self):
        cfg = small_disk()
        _, ref = harness.convergence_study(cfg)
        again, _ = harness.convergence_study(cfg, reference=ref)
        assert again[0].errors["Ez"].l1 == 0.0

    def test_cfl_self_ratio(self):
        cfg = small_disk()
        rows, _ = harness.cfl_study(cfg, [1.0], resolution=20)
        assert rows[0].rel_l1 == pytest.approx(1.0, abs=1e-15)
        assert rows[0].rel_linf == pytest.approx(1.0, abs=1e-15)

    def test_longtime_single_entry_matches_run(self):
        cfg = small_disk()
        rows = harness.longtime_study(cfg, [0.2], resolution=20)
        level = harness.run_level(cfg, 20)
        mask = harness.measure_mask(cfg, level)
        assert len(rows) == 1
        assert rows[0].linf == np.max(np.abs(level.fields["Ez"][mask]))
        assert rows[0].linf > 0 and math.isfinite(rows[0].linf)

    def test_longtime_segments_match_one_run(self):
        cfg = small_disk()
        rows = harness.longtime_study(cfg, [0.1, 0.2], resolution=20)
        level = harness.run_level(cfg, 20)
        mask = harness.measure_mask(cfg, level)
        assert rows[1].linf == pytest.approx(np.max(np.abs(level.fields["Ez"][mask])), rel=1e-12)

    def test_workers_match_serial(self):
        cfg = parse_config("[grid]\nresolutions=20,40\nreference=40\n[solver]\nt_end=0.2\n[pec]\ntype=disk\n"
                           "[wave]\ntype=gaussian\n")
        a, _ = harness.convergence_study(cfg)
        b, _ = harness.convergence_study(cfg, workers=2)
        assert a[0].errors["Ez"].l1 == b[0].errors["Ez"].l1

    def test_free_space_order(self):
        cfg = parse_config("[grid]\nresolutions=40,80,160\nreference=640\n[solver]\nt_end=0.4\n"
                           "[wave]\ntype=gaussian\n")
        reports, _ = harness.convergence_study(cfg)
        for name in harness.FIELDS:
            assert reports[-1].order(name) >= 1.9


class TestTables:
    def reports(self):
        mk = harness.FieldError
        return [
            harness.ErrorReport(20, 100, {f: mk(1.0, 0.1, 2.0) for f in harness.FIELDS}),
            harness.ErrorReport(40, 400, {f: mk(0.25, 0.025, 0.5, 2.0) for f in harness.FIELDS}),
            harness.ErrorReport(80, 1600, {f: mk(0.3, 0.03, 0.6, None) for f in harness.FIELDS}),
        ]

    def test_text(self):
        lines = harness.convergence_table(self.reports()).splitlines()
        assert len(lines) == 4
        assert lines[1].split()[0] == "1/20" and "--" in lines[1]
        assert "2.00" in lines[2] and "N.A" in lines[3]

    def test_csv(self):
        rows = list(csv.reader(io.StringIO(harness.convergence_csv(self.reports()))))
        assert rows[0][:5] == ["resolution", "field", "l1", "order", "linf"]
        assert len(rows) == 1 + 3 * 3
        assert rows[4][0] == "1/40" and float(rows[4][3]) == 2.0
        assert rows[1][3] == ""

    def test_study_tables(self):
        c = harness.cfl_table([harness.CflRow(1.0, 0.99, 0.92)])
        assert "0.9900" in c and "0.9200" in c
        lt = harness.longtime_table([harness.LongtimeRow(3.8, 2.0), harness.LongtimeRow(12.8, 1.99)])
        assert "-0.500%" in lt
        assert harness.longtime_csv([harness.LongtimeRow(3.8, 2.0)]).splitlines() == ["t,linf", "3.8,2.0"]
