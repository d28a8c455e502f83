"""Lattice random curves in the half plane and the vertical distortion.

Three models, each started at the origin:

* ``lerw``: chronological loop erasure of the half-plane excursion
  (simple random walk conditioned to stay in the upper half plane);
* ``saw``: self-avoiding walks of fixed length whose sites after the origin
  lie in ``{y >= 1}``, sampled with the pivot algorithm;
* ``percolation``: the exploration interface of critical site percolation on
  the triangular lattice, drawn as a path on the hexagonal lattice.

Randomness inside the compiled kernels comes from numba's generator, seeded
per sample from ``(master_seed, index)`` so a sample is reproducible on its
own, independent of how samples are spread over workers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
from numba import njit

from . import _hashtable as ht
from .errors import ValidationError
from .zipper import Curve

MODELS = ("lerw", "saw", "percolation")

# size exponents: a walk of N steps has diameter ~ N^nu
DEFAULT_NU = {"lerw": 4 / 5, "saw": 3 / 4, "percolation": 4 / 7}

LERW_STEP_CAP = 10**9
SQRT3 = math.sqrt(3.0)


@dataclass
class ModelParams:
    model: str
    steps: int
    nu: Optional[float] = None
    lam: float = 1.0
    t_horizon: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValidationError(f"model must be one of {MODELS}, got {self.model!r}")
        if int(self.steps) < 1:
            raise ValidationError("steps must be >= 1")
        if not self.lam > 0:
            raise ValidationError("distortion lambda must be > 0")
        if self.nu is None:
            self.nu = DEFAULT_NU[self.model]


@dataclass
class LatticeWalk:
    x: np.ndarray
    y: np.ndarray
    model: str = ""
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.x.size

    @property
    def n_steps(self):
        return self.x.size - 1

    def as_complex(self) -> np.ndarray:
        return self.x.astype(float) + 1j * self.y.astype(float)


def stream_seed(master_seed: int, index: int) -> int:
    """32-bit seed for the compiled generator, from ``(master_seed, index)``."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


@njit(cache=True)
def _seed(s):
    np.random.seed(s)


# ---------------------------------------------------------------------------
# half-plane excursion and LERW


def excursion_probabilities(k: int):
    """``(up, down, left, right)`` transition probabilities at height ``k >= 1``."""
    if k < 1:
        raise ValidationError("excursion height must be >= 1")
    return (k + 1) / (4 * k), (k - 1) / (4 * k), 0.25, 0.25


@njit(cache=True)
def _excursion_dir(k, u):
    # 0 up, 1 down, 2 left, 3 right
    if u < 0.25:
        return 2
    if u < 0.5:
        return 3
    if u < 0.5 + (k + 1) / (4.0 * k):
        return 0
    return 1


@njit(cache=True)
def excursion_step(k):
    return _excursion_dir(k, np.random.random())


@njit(cache=True)
def _lerw_kernel(n_target, seed, cap):
    np.random.seed(seed)
    size = max(16, n_target + 1)
    wx = np.zeros(size, dtype=np.int64)
    wy = np.zeros(size, dtype=np.int64)
    keys, vals = ht.new_table(4 * size)
    used = 0
    used += ht.put(keys, vals, ht.pack(0, 0), 0)
    # the excursion's first move enters the half plane
    wy[1] = 1
    used += ht.put(keys, vals, ht.pack(0, 1), 1)
    length = 2
    steps = 1
    while length - 1 < n_target and steps < cap:
        x = wx[length - 1]
        y = wy[length - 1]
        d = _excursion_dir(y, np.random.random())
        if d == 0:
            y += 1
        elif d == 1:
            y -= 1
        elif d == 2:
            x -= 1
        else:
            x += 1
        steps += 1
        key = ht.pack(x, y)
        idx = ht.get(keys, vals, key, -1)
        if idx >= 0 and idx < length and wx[idx] == x and wy[idx] == y:
            length = idx + 1
            continue
        wx[length] = x
        wy[length] = y
        used += ht.put(keys, vals, key, length)
        length += 1
        if 2 * used > keys.shape[0]:
            # drop stale entries while growing
            keys, vals = ht.new_table(max(4 * length, keys.shape[0]))
            used = 0
            for i in range(length):
                used += ht.put(keys, vals, ht.pack(wx[i], wy[i]), i)
    return wx[:length].copy(), wy[:length].copy(), steps


def generate_lerw(n_target: int, seed: int) -> LatticeWalk:
    """Loop-erased half-plane excursion, stopped when the erased walk has ``n_target`` steps."""
    if n_target < 1:
        raise ValidationError("n_target must be >= 1")
    wx, wy, steps = _lerw_kernel(int(n_target), np.uint32(seed), LERW_STEP_CAP)
    if wx.size - 1 < n_target:
        raise RuntimeError(f"LERW did not reach {n_target} steps within {LERW_STEP_CAP} excursion steps")
    return LatticeWalk(wx, wy, "lerw", {"excursion_steps": int(steps)})


def loop_erase(xs, ys):
    """Chronological loop erasure of an explicit path (pure Python reference)."""
    out = []
    where = {}
    for p in zip(xs, ys):
        if p in where:
            cut = where[p]
            for q in out[cut + 1:]:
                del where[q]
            del out[cut + 1:]
        else:
            where[p] = len(out)
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# pivot algorithm for half-plane SAW

# the seven non-identity symmetries of Z^2 as (a, b, c, d): (x, y) -> (ax + by, cx + dy)
SYMMETRIES = np.array(
    [
        [0, -1, 1, 0],  # rotate +90
        [-1, 0, 0, -1],  # rotate 180
        [0, 1, -1, 0],  # rotate -90
        [1, 0, 0, -1],  # reflect in x axis
        [-1, 0, 0, 1],  # reflect in y axis
        [0, 1, 1, 0],  # reflect in y = x
        [0, -1, -1, 0],  # reflect in y = -x
    ],
    dtype=np.int64,
)


@njit(cache=True)
def _rebuild(keys, vals, wx, wy):
    ht.clear(keys)
    used = 0
    for i in range(wx.shape[0]):
        used += ht.put(keys, vals, ht.pack(wx[i], wy[i]), i)
    return used


@njit(cache=True)
def _pivot_kernel(wx, wy, keys, vals, used, n_iter, syms, ymin):
    """Run ``n_iter`` pivot proposals in place; returns ``(used, accepted)``."""
    n = wx.shape[0] - 1
    tx = np.empty(n + 1, dtype=np.int64)
    ty = np.empty(n + 1, dtype=np.int64)
    accepted = 0
    for _ in range(n_iter):
        p = np.random.randint(0, n)
        g = np.random.randint(0, 7)
        a = syms[g, 0]
        b = syms[g, 1]
        c = syms[g, 2]
        d = syms[g, 3]
        px = wx[p]
        py = wy[p]
        ok = True
        for i in range(p + 1, n + 1):
            dx = wx[i] - px
            dy = wy[i] - py
            nx = px + a * dx + b * dy
            ny = py + c * dx + d * dy
            if ny < ymin:
                ok = False
                break
            idx = ht.get(keys, vals, ht.pack(nx, ny), -1)
            if idx >= 0 and idx <= p and wx[idx] == nx and wy[idx] == ny:
                ok = False
                break
            tx[i] = nx
            ty[i] = ny
        if not ok:
            continue
        accepted += 1
        for i in range(p + 1, n + 1):
            wx[i] = tx[i]
            wy[i] = ty[i]
            used += ht.put(keys, vals, ht.pack(tx[i], ty[i]), i)
        if 2 * used > keys.shape[0]:
            used = _rebuild(keys, vals, wx, wy)
    return used, accepted


class PivotChain:
    """Markov chain on ``n``-step half-plane SAWs started from the vertical rod.

    With ``open_half_plane`` every site after the origin has ``y >= 1``, so the
    walk is a curve in the open upper half plane.  Otherwise sites may also
    lie on the axis (``y >= 0``).
    """

    def __init__(self, n: int, seed: int, open_half_plane: bool = True):
        if n < 1:
            raise ValidationError("SAW length must be >= 1")
        self.n = int(n)
        self.ymin = 1 if open_half_plane else 0
        self.wx = np.zeros(n + 1, dtype=np.int64)
        self.wy = np.arange(n + 1, dtype=np.int64)
        self.keys, self.vals = ht.new_table(4 * (n + 1))
        self.used = _rebuild(self.keys, self.vals, self.wx, self.wy)
        self.iterations = 0
        self.accepted = 0
        _seed(np.uint32(seed))

    def run(self, n_iter: int):
        # the compiled RNG is process-global; chains must not interleave
        self.used, acc = _pivot_kernel(
            self.wx, self.wy, self.keys, self.vals, self.used, int(n_iter), SYMMETRIES, self.ymin
        )
        self.iterations += n_iter
        self.accepted += acc

    def walk(self) -> LatticeWalk:
        return LatticeWalk(self.wx.copy(), self.wy.copy(), "saw", {"iteration": self.iterations})


def generate_saw(n: int, stride: int, count: int, seed: int, burn_in: Optional[int] = None) -> Iterator[LatticeWalk]:
    """Emit ``count`` walks, ``stride`` pivot proposals apart, after ``burn_in`` (default ``10 n``)."""
    chain = PivotChain(n, seed)
    chain.run(10 * n if burn_in is None else burn_in)
    for _ in range(count):
        chain.run(stride)
        yield chain.walk()


# ---------------------------------------------------------------------------
# percolation exploration on the hexagonal lattice
#
# Hexagon (i, j) in axial coordinates has its center at
#   (i + j/2 + 1/2,  sqrt(3)/2 j + sqrt(3)/6),
# unit center spacing.  Row j = 0 is the boundary: i < 0 white, i >= 0 black.
# Honeycomb vertices are centroids of three mutually adjacent hexagons; the
# vertical bond between hexagons (-1, 0) and (0, 0) runs from the origin up.

WHITE = 0
BLACK = 1


@njit(cache=True)
def _hex_color(keys, vals, i, j, forced):
    """Color of hexagon (i, j); interior colors are drawn lazily and memoized."""
    if j == 0:
        return WHITE if i < 0 else BLACK
    if j < 0:
        return -1
    key = ht.pack(i, j)
    c = ht.get(keys, vals, key, -1)
    if c >= 0:
        return c
    if forced >= 0:
        c = forced
    else:
        c = BLACK if np.random.random() < 0.5 else WHITE
    ht.put(keys, vals, key, c)
    return c


@njit(cache=True)
def _percolation_kernel(n_steps, seed, forced):
    np.random.seed(seed)
    keys, vals = ht.new_table(4 * n_steps + 16)
    used = 0
    li, lj = -1, 0
    ri, rj = 0, 0
    bi, bj = 0, -1
    # centroid coordinates are sums of three hex centers over 3
    xs = np.zeros(n_steps + 1)
    ys = np.zeros(n_steps + 1)
    lefts = np.zeros((n_steps, 2), dtype=np.int64)
    rights = np.zeros((n_steps, 2), dtype=np.int64)
    for s in range(n_steps):
        fi = li + ri - bi
        fj = lj + rj - bj
        lefts[s, 0] = li
        lefts[s, 1] = lj
        rights[s, 0] = ri
        rights[s, 1] = rj
        sx = (li + lj / 2.0) + (ri + rj / 2.0) + (fi + fj / 2.0) + 1.5
        sy = (lj + rj + fj) * (SQRT3 / 2.0) + SQRT3 / 2.0
        xs[s + 1] = sx / 3.0
        ys[s + 1] = sy / 3.0
        if fj >= 1 and ht.get(keys, vals, ht.pack(fi, fj), -1) < 0:
            used += 1
        c = _hex_color(keys, vals, fi, fj, forced)
        if c == WHITE:
            bi, bj = li, lj
            li, lj = fi, fj
        else:
            bi, bj = ri, rj
            ri, rj = fi, fj
        if 2 * used > keys.shape[0]:
            nk, nv = ht.new_table(keys.shape[0])
            for q in range(keys.shape[0]):
                if keys[q] != ht.EMPTY:
                    ht.put(nk, nv, keys[q], vals[q])
            keys, vals = nk, nv
    return xs, ys, lefts, rights


def generate_percolation_interface(n_steps: int, seed: int, forced_color: Optional[int] = None) -> LatticeWalk:
    """First ``n_steps`` edges of the exploration interface, as honeycomb vertices.

    ``forced_color`` (0 white, 1 black) replaces the coin flips, for testing.
    """
    if n_steps < 1:
        raise ValidationError("n_steps must be >= 1")
    forced = -1 if forced_color is None else int(forced_color)
    xs, ys, lefts, rights = _percolation_kernel(int(n_steps), np.uint32(seed), forced)
    # centroid arithmetic leaves ~1e-16 noise; snap the start exactly
    xs[0] = 0.0
    ys[0] = 0.0
    return LatticeWalk(xs, ys, "percolation", {"left_hexes": lefts, "right_hexes": rights})


def hex_center(i, j):
    return i + j / 2 + 0.5, SQRT3 / 2 * j + SQRT3 / 6


# ---------------------------------------------------------------------------
# geometry


def distort(points, lam: float) -> np.ndarray:
    """``(x, y) -> (x, lam * y)`` applied to complex points."""
    if not lam > 0:
        raise ValidationError("lambda must be > 0")
    points = np.asarray(points, dtype=np.complex128)
    return points.real + 1j * (lam * points.imag)


def rescale_to_curve(points, n: int, nu: float) -> Curve:
    """Divide by ``n ** nu`` and wrap as a :class:`Curve`."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    return Curve(np.asarray(points, dtype=np.complex128) / float(n) ** nu)


def model_curve(walk: LatticeWalk, params: ModelParams, scale_n: Optional[int] = None) -> Curve:
    """Distort, then rescale by ``scale_n ** nu`` (default: the model's step count)."""
    pts = distort(walk.as_complex(), params.lam)
    return rescale_to_curve(pts, scale_n or params.steps, params.nu)
