import math
import pathlib

import pytest
from hypothesis import given, settings, strategies as st

from pecfdtd.boundary import GaussianPulse, NoWave, PlaneSine
from pecfdtd.config import load_config, parse_config, parse_number, render_config
from pecfdtd.errors import ConfigError
from pecfdtd.levelset import Disk, NoShape, Union, Wedge


def test_empty_is_defaults():
    cfg = parse_config("")
    assert cfg.domain == (0.0, 1.0, 0.0, 1.0)
    assert cfg.resolution == 40 and cfg.dx == 1 / 40
    assert cfg.theta == 0.8 and cfg.cfl == 1.0
    assert isinstance(cfg.shape, NoShape) and isinstance(cfg.wave, NoWave)
    assert cfg.resolutions == [20, 40, 80, 160] and cfg.reference == 640
    assert cfg.collar == 0.1


def test_disk_geometry():
    cfg = parse_config("[pec]\ntype=disk\ncenter=0.5,0.5\nradius=0.2\n")
    assert cfg.shape == Disk((0.5, 0.5), 0.2)


def test_dotted_keys_and_expressions():
    cfg = parse_config("pec.type = wedge\nwave.type=plane\nwave.omega = 2*pi/0.2\n[grid]\nresolution = 1/80\n")
    assert isinstance(cfg.shape, Wedge) and cfg.shape.bisector == pytest.approx(math.pi)
    assert cfg.wave == PlaneSine(2 * math.pi / 0.2)
    assert cfg.resolution == 80


def test_cfl_zero_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config("[grid]\nresolution = 20\n\n[solver]\ncfl = 0\n")
    assert info.value.key == "solver.cfl" and info.value.line == 5
    assert "CFL > 0" in str(info.value) and "line 5" in str(info.value)


def test_override_error_is_tagged():
    with pytest.raises(ConfigError) as info:
        parse_config("", ["solver.cfl=-1"])
    assert "override" in str(info.value)


def test_override_applies():
    cfg = parse_config("[solver]\ncfl = 0.5\n", ["solver.cfl=0.64", "grid.resolution=20"])
    assert cfg.cfl == 0.64 and cfg.resolution == 20


@pytest.mark.parametrize("text, key", [
    ("[grid]\nfoo = 1\n", "grid.foo"),
    ("[solver]\ntheta = abc\n", "solver.theta"),
    ("[solver]\ntheta = 1.5\n", "solver.theta"),
    ("[grid]\nresolution = 3\n", "grid.resolution"),
    ("[grid]\nresolutions = 20, 30\n", "grid.reference"),
    ("[pec]\ntype = disk\nradius = 0.45\n", "pec.type"),
    ("[wave]\ntype = laser\n", "wave.type"),
    ("[output]\nfields = Ez, Bz\n", "output.fields"),
])
def test_invalid(text, key):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key


def test_syntax_errors():
    with pytest.raises(ConfigError):
        parse_config("[nowhere]\n")
    with pytest.raises(ConfigError):
        parse_config("[grid]\njust words\n")
    with pytest.raises(ConfigError):
        parse_config("cfl = 1\n")


def test_union_members():
    cfg = parse_config("[pec]\ntype = union\nmembers = wedge(0.3, 0.3, 0.15); wedge(0.6, 0.6, 0.15)\n")
    assert isinstance(cfg.shape, Union)
    assert [m.center for m in cfg.shape.members] == [(0.3, 0.3), (0.6, 0.6)]


def test_union_overlap_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config("[pec]\ntype = union\nmembers = disk(0.4, 0.5, 0.15); disk(0.6, 0.5, 0.15)\n")
    assert info.value.key == "pec.members" and info.value.line == 3


def test_parse_number():
    assert parse_number("2*pi/0.3") == pytest.approx(2 * math.pi / 0.3)
    assert parse_number("-1e-6") == -1e-6
    for bad in ("__import__('os')", "1/0", "x"):
        with pytest.raises(ValueError):
            parse_number(bad)


def test_shipped_configs_parse():
    root = pathlib.Path(__file__).resolve().parents[1] / "configs"
    files = sorted(root.glob("*.ini"))
    assert len(files) >= 6
    for f in files:
        cfg = load_config(f)
        assert parse_config(render_config(cfg)) == cfg


def test_scatterer_configs():
    root = pathlib.Path(__file__).resolve().parents[1] / "configs"
    disk = load_config(root / "disk_gaussian.ini")
    assert disk.shape == Disk((0.5, 0.5), 0.2) and disk.wave == GaussianPulse(0.1, -0.1) and disk.t_end == 0.4
    pair = load_config(root / "two_wedges.ini")
    assert pair.wave.omega == pytest.approx(2 * math.pi / 0.2)
    assert [m.radius for m in pair.shape.members] == [0.15, 0.15]


@settings(max_examples=40, deadline=None)
@given(res=st.sampled_from([20, 40, 80]), cfl=st.floats(0.05, 2.0), t=st.floats(0, 20),
       kind=st.sampled_from(["none", "disk", "wedge"]), wave=st.sampled_from(["none", "gaussian", "plane"]),
       radius=st.floats(0.05, 0.3), heat=st.booleans())
def test_render_round_trip(res, cfl, t, kind, wave, radius, heat):
    text = (f"[grid]\nresolution={res}\n[solver]\ncfl={cfl!r}\nt_end={t!r}\n[pec]\ntype={kind}\n"
            f"radius={radius!r}\n[wave]\ntype={wave}\n[output]\nheatmaps={heat}\n")
    cfg = parse_config(text)
    assert parse_config(render_config(cfg)) == cfg
