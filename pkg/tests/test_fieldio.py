import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from fracwave.errors import GridMismatch
from fracwave.fieldio import read_field, read_sidecar, write_field
from fracwave.spectral import Field, make_grid

GRID2 = make_grid(2, 16, 3.0)


@settings(max_examples=25, deadline=None)
@given(arrays(np.float64, (16, 16), elements=st.floats(-1e300, 1e300, allow_nan=False)),
       st.sampled_from(["csv", "bin"]))
def test_round_trip_is_exact(tmp_path_factory, values, fmt):
    path = tmp_path_factory.mktemp("f") / f"field.{fmt}"
    write_field(path, Field(GRID2, values), fmt)
    back = read_field(path, GRID2)
    assert back.grid == GRID2
    assert np.array_equal(back.samples, values)


def test_sidecar_and_layout(tmp_path):
    grid = make_grid(2, 8, 1.0)
    arr = np.arange(64, dtype=float).reshape(8, 8)
    path, side = write_field(tmp_path / "a.csv", Field(grid, arr))
    assert json.loads(side.read_text()) == {"dim": 2, "n": 8, "L": 1.0, "format": "csv"}
    lines = path.read_text().splitlines()
    assert len(lines) == 64 and lines[1] == "1" and lines[8] == "8"  # row-major
    write_field(tmp_path / "a.bin", Field(grid, arr))
    assert (tmp_path / "a.bin").stat().st_size == 64 * 8
    assert read_sidecar(tmp_path / "a.bin")["format"] == "bin"


def test_grid_mismatch(tmp_path):
    grid = make_grid(1, 16, 1.0)
    write_field(tmp_path / "a.csv", Field.constant(grid, 2.0))
    with pytest.raises(GridMismatch):
        read_field(tmp_path / "a.csv", make_grid(1, 16, 2.0))
    (tmp_path / "a.csv").write_text("1\n2\n")
    with pytest.raises(GridMismatch):
        read_field(tmp_path / "a.csv")


def test_missing_sidecar(tmp_path):
    (tmp_path / "b.csv").write_text("1\n")
    with pytest.raises(FileNotFoundError):
        read_field(tmp_path / "b.csv")
    with pytest.raises(ValueError):
        write_field(tmp_path / "c.txt", Field.zeros(make_grid(1, 8, 1.0)), "npy")
