import numpy as np
import pytest

from loewnerzip.errors import ValidationError
from loewnerzip.fileio import load_walk_codes, read_curve, read_driving, save_walk_codes, write_curve, write_driving
from loewnerzip.zipper import Curve


def test_curve_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(0)
    pts = np.concatenate(([0j], np.cumsum(rng.normal(size=50) + 1j * rng.random(50) + 1e-3j)))
    p = tmp_path / "a.curve"
    write_curve(p, Curve(pts), model="lerw", N=50, seed=3, **{"lambda": "0.9"})
    first = p.read_text().splitlines()[0]
    assert first == "# curve v1 model=lerw N=50 seed=3 lambda=0.9"
    curve, meta = read_curve(p)
    assert np.array_equal(curve.points, pts)
    assert meta == {"model": "lerw", "N": "50", "seed": "3", "lambda": "0.9"}


def test_driving_round_trip(tmp_path):
    t = np.linspace(0, 0.25, 11)
    u = np.sin(t) / 3
    p = tmp_path / "a.driving"
    write_driving(p, t, u, steps=10)
    assert p.read_text().startswith("# driving v1 steps=10\n")
    t2, u2, meta = read_driving(p)
    assert np.array_equal(t, t2) and np.array_equal(u, u2) and meta == {"steps": "10"}


@pytest.mark.parametrize("content", [
    "# driving v1\n0 0\n",
    "# curve v2\n0 0\n",
    "# curve v1 model\n0 0\n0 1\n",
    "# curve v1\n0 0 0\n0 1 1\n",
    "# curve v1\n0 0\nx y\n",
])
def test_read_curve_rejects(tmp_path, content):
    p = tmp_path / "bad.curve"
    p.write_text(content)
    with pytest.raises(ValidationError):
        read_curve(p)


def test_walk_codes_round_trip(tmp_path):
    x = np.array([0, 0, 1, 1, 0, -1])
    y = np.array([0, 1, 1, 2, 2, 2])
    p = tmp_path / "w.npz"
    save_walk_codes(p, x, y, n=5, iterations=100)
    x2, y2, meta = load_walk_codes(p)
    assert np.array_equal(x, x2) and np.array_equal(y, y2)
    assert meta == {"n": 5, "iterations": 100}
    with pytest.raises(ValidationError):
        save_walk_codes(p, np.array([0, 2]), np.array([0, 0]))
    with pytest.raises(ValidationError):
        save_walk_codes(p, np.array([1, 1]), np.array([0, 1]))


def test_shipped_saw_fixture(saw_200k):
    assert saw_200k.size == 200_001
    assert saw_200k[0] == 0
    assert np.all(saw_200k.imag[1:] >= 1)
    assert np.unique(saw_200k).size == saw_200k.size
