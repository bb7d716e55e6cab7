import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from pecfdtd.errors import SnapshotError
from pecfdtd.grid import unit_grid
from pecfdtd.snapshot import (SnapshotHeader, colormap, read_snapshot, snapshot_diff, write_heatmap,
                              write_snapshot)


def header(nx, ny, field="Ez", t=0.4):
    return SnapshotHeader(nx, ny, 0.1, 0.1, 0.0, 0.0, t, field)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(allow_nan=False, allow_infinity=False)))
def test_round_trip_exact(tmp_path_factory, field):
    path = tmp_path_factory.mktemp("snap") / "f.txt"
    h = SnapshotHeader(*field.shape, 1 / 3, 0.1, -0.2, 1e-9, 0.7, "Hx")
    write_snapshot(field, h, path)
    back, h2 = read_snapshot(path)
    assert h2 == h
    np.testing.assert_array_equal(back, field)


def test_two_by_two_zero(tmp_path):
    path = tmp_path / "z.txt"
    write_snapshot(np.zeros((2, 2)), header(2, 2), path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# 2 2 ")
    assert lines[1:] == ["0 0", "0 0"]


def test_for_grid(tmp_path):
    g = unit_grid(20)
    h = SnapshotHeader.for_grid(g, 0.8, "Ez")
    assert (h.nx, h.ny, h.dx, h.x0) == (21, 21, 0.05, 0.0)


def test_nx_mismatch_line(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("# 3 2 0.1 0.1 0 0 0 Ez\n1 2 3\n4 5\n")
    with pytest.raises(SnapshotError) as info:
        read_snapshot(path)
    assert info.value.line == 3
    assert "line 3" in str(info.value)


@pytest.mark.parametrize("text, line", [
    ("3 2 0.1 0.1 0 0 0 Ez\n", 1),
    ("# 3 2 0.1 0.1 0 0 Ez\n", 1),
    ("# 2 2 0.1 0.1 0 0 0 Ez\n1 2\n", 3),
    ("# 2 2 0.1 0.1 0 0 0 Ez\n1 2\n3 x\n", 3),
    ("", 1),
])
def test_malformed(tmp_path, text, line):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(SnapshotError) as info:
        read_snapshot(path)
    assert info.value.line == line


def test_write_shape_checked(tmp_path):
    with pytest.raises(SnapshotError):
        write_snapshot(np.zeros((2, 3)), header(3, 2), tmp_path / "x.txt")


def read_ppm(path):
    data = path.read_bytes()
    parts = data.split(b"\n", 3)
    assert parts[0] == b"P6"
    w, h = map(int, parts[1].split())
    assert parts[2] == b"255"
    return w, h, np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)


def test_ppm_payload(tmp_path):
    path = tmp_path / "a.ppm"
    write_heatmap(np.array([[0.0, 1.0], [-1.0, 0.5]]), path, (-1.0, 1.0))
    w, h, img = read_ppm(path)
    assert (w, h) == (2, 2) and img.size == 12


def test_white_at_mid_and_blue_at_lo(tmp_path):
    path = tmp_path / "w.ppm"
    write_heatmap(np.full((3, 4), 0.5), path, (0.0, 1.0))
    assert np.all(read_ppm(path)[2] == 255)
    write_heatmap(np.full((3, 4), -2.0), path, (-2.0, 2.0))
    img = read_ppm(path)[2]
    assert np.all(img[..., 2] == 255) and not img[..., :2].any()


def test_orientation_and_clamp(tmp_path):
    f = np.zeros((3, 2))
    f[0, 0] = 5.0  # (i=0, j=0): bottom-left, clamped to red
    path = tmp_path / "o.ppm"
    write_heatmap(f, path, (-1.0, 1.0))
    w, h, img = read_ppm(path)
    assert (w, h) == (3, 2)
    assert tuple(img[1, 0]) == (255, 0, 0)
    assert tuple(img[0, 0]) == (255, 255, 255)


def test_colormap_validation():
    with pytest.raises(ValueError):
        colormap(np.zeros(2), 1.0, 1.0)


def test_diff(tmp_path):
    a = np.arange(6, dtype=float).reshape(3, 2)
    write_snapshot(a, header(3, 2), tmp_path / "a.txt")
    write_snapshot(a + 0.5, header(3, 2), tmp_path / "b.txt")
    assert snapshot_diff(tmp_path / "a.txt", tmp_path / "b.txt") == (0.5, 0.5)
    write_snapshot(np.zeros((2, 2)), header(2, 2), tmp_path / "c.txt")
    with pytest.raises(SnapshotError):
        snapshot_diff(tmp_path / "a.txt", tmp_path / "c.txt")
