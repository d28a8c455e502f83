"""Driving function of a discretized curve by the zipper algorithm.

``unzip_naive`` maps each new curve point through every previous slit map,
which costs O(N^2).  ``unzip_fast`` groups the maps into blocks of ``b``,
composes the hatted series of each finished block once, and evaluates a
block through its truncated series whenever the point is far from the block
(``|z| >= L * R_j``).  Both share one compiled loop.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit

from . import conformal_maps as cm
from .errors import (
    IllConditionedSlitError,
    NonConvergenceError,
    PointOnSlitError,
    SelfIntersectionError,
    ValidationError,
)
from .power_series import (
    DEFAULT_ORDER,
    compose_full,
    eval_h,
    tilted_series_full,
    vertical_series_full,
)

VERTICAL = "vertical"
TILTED = "tilted"
SLIT_KINDS = (VERTICAL, TILTED)

DEFAULT_THRESHOLD = 4.0
MIN_TIP_IM = 1e-14

# kernel status codes
_OK = 0
_ON_SLIT = 1
_NO_CONVERGENCE = 2
_SELF_INTERSECTION = 3
_ILL_CONDITIONED = 4


@dataclass
class Curve:
    """Ordered points in the closed upper half plane, starting at the origin."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.complex128)
        if pts.ndim != 1 or pts.size < 2:
            raise ValidationError("a curve needs at least two points")
        if pts[0] != 0:
            raise ValidationError(f"curve must start at the origin, got {pts[0]!r}")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("curve has non-finite points")
        if np.any(pts[1:].imag <= 0):
            k = int(np.argmax(pts[1:].imag <= 0)) + 1
            raise ValidationError(f"curve point {k} is not in the open upper half plane: {pts[k]!r}")
        if np.any(pts[1:] == pts[:-1]):
            k = int(np.argmax(pts[1:] == pts[:-1])) + 1
            raise ValidationError(f"curve points {k - 1} and {k} coincide")
        self.points = pts

    def __len__(self):
        return self.points.size

    @classmethod
    def from_xy(cls, x, y):
        return cls(np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float))


@dataclass
class FastZipConfig:
    block_len: Optional[int] = None  # None: round(sqrt(N) / 4)
    series_order: int = DEFAULT_ORDER
    threshold: float = DEFAULT_THRESHOLD
    slit_kind: str = VERTICAL

    def __post_init__(self):
        if self.block_len is not None and int(self.block_len) < 1:
            raise ValidationError("block_len must be >= 1")
        if int(self.series_order) < 2:
            raise ValidationError("series_order must be >= 2")
        if not self.threshold > 1:
            raise ValidationError("threshold L must be > 1")
        if self.slit_kind not in SLIT_KINDS:
            raise ValidationError(f"slit_kind must be one of {SLIT_KINDS}")

    def resolved_block_len(self, n_points: int) -> int:
        if self.block_len is not None:
            return int(self.block_len)
        return default_block_len(n_points)


def default_block_len(n_points: int) -> int:
    return max(1, int(round(math.sqrt(n_points) / 4)))


@dataclass
class DrivingFunction:
    """Samples ``(t_k, u_k)`` plus the per-step increments they were summed from.

    ``t[0] = u[0] = 0``.  When unzipping stopped at ``t_max`` the last sample
    is interpolated back to exactly ``t_max``; ``dt``/``du`` keep every step
    actually taken.
    """

    t: np.ndarray
    u: np.ndarray
    dt: np.ndarray
    du: np.ndarray
    reached_t_max: bool = True
    extra: dict = field(default_factory=dict)

    @property
    def T(self) -> float:
        return float(self.t[-1])

    @property
    def U_T(self) -> float:
        return float(self.u[-1])

    @property
    def n_steps(self) -> int:
        return int(self.dt.size)

    def max_abs_u(self) -> float:
        return float(np.max(np.abs(self.u)))


# ---------------------------------------------------------------------------
# compiled core


@njit(cache=True)
def _apply_map(kind, p0, p1, p2, p3, i, z):
    if kind == 0:
        w = cm.vertical_map(p0[i], p1[i], z)
        if w.real != w.real:
            return w, _ON_SLIT
        return w, _OK
    return cm.tilted_map(p3[i], p0[i], p1[i], p2[i], z)


@njit(cache=True)
def _unzip_kernel(z, kind, fast, b, n_order, threshold, t_max, skip_collapsed):
    npts = z.shape[0]
    nmaps = npts - 1
    # map parameters: vertical (x, y); tilted (alpha, x_l, x_r, r)
    p0 = np.zeros(nmaps)
    p1 = np.zeros(nmaps)
    p2 = np.zeros(nmaps)
    p3 = np.zeros(nmaps)
    dt = np.zeros(nmaps)
    du = np.zeros(nmaps)
    nblocks_max = nmaps // b if fast else 0
    series = np.zeros((max(nblocks_max, 1), n_order + 1))
    radius = np.zeros(max(nblocks_max, 1))
    block = np.zeros(n_order + 1)
    nsealed = 0
    rmax = 0.0
    t = 0.0
    count = 0  # maps built so far
    skipped = 0
    for k in range(nmaps):
        w = z[k + 1]
        wb = w
        st = _OK
        start = 0
        if fast:
            for j in range(nsealed):
                if abs(w) >= threshold * radius[j]:
                    w = eval_h(series[j], w)
                else:
                    for i in range(j * b, (j + 1) * b):
                        w, st = _apply_map(kind, p0, p1, p2, p3, i, w)
                        if st != _OK:
                            break
                if st != _OK:
                    break
            start = nsealed * b
        wb = w
        if st == _OK:
            for i in range(start, count):
                w, st = _apply_map(kind, p0, p1, p2, p3, i, w)
                if st != _OK:
                    break
        if st == _OK and not w.imag > MIN_TIP_IM:
            st = _SELF_INTERSECTION
        if st != _OK:
            # precision collapse inside a narrow fjord; the next healthy
            # point's slit absorbs the excursion
            if skip_collapsed and (st == _SELF_INTERSECTION or st == _ON_SLIT):
                skipped += 1
                continue
            return count, skipped, st, k + 1, p0, p1, p2, p3, dt, du
        if kind == 0:
            x, y, d_t, d_u = cm.vertical_constants(w)
            p0[count] = x
            p1[count] = y
        else:
            r, alpha, x_l, x_r, d_t, d_u = cm.tilted_constants(w)
            if alpha != alpha:
                return count, skipped, _ILL_CONDITIONED, k + 1, p0, p1, p2, p3, dt, du
            p0[count] = alpha
            p1[count] = x_l
            p2[count] = x_r
            p3[count] = r
        if fast:
            # radius in the coordinates the open block's series will act on
            if abs(wb) > rmax:
                rmax = abs(wb)
        dt[count] = d_t
        du[count] = d_u
        count += 1
        t += d_t
        if fast and count % b == 0:
            # seal block: H = h_last o ... o h_first
            for i in range(count - b, count):
                if kind == 0:
                    s = vertical_series_full(p0[i], p1[i], n_order)
                else:
                    s = tilted_series_full(p0[i], p1[i], p2[i], n_order)
                if i == count - b:
                    block[:] = s
                else:
                    block[:] = compose_full(s, block)
            series[nsealed, :] = block
            radius[nsealed] = rmax
            nsealed += 1
            rmax = 0.0
        if t >= t_max:
            break
    return count, skipped, _OK, -1, p0, p1, p2, p3, dt, du


def _raise_for_status(status, index):
    if status == _ON_SLIT:
        raise PointOnSlitError("curve point lands on a previous slit", index)
    if status == _NO_CONVERGENCE:
        raise NonConvergenceError("tilted slit Newton iteration failed", index)
    if status == _SELF_INTERSECTION:
        raise SelfIntersectionError("image tip collapsed onto the real axis", index)
    if status == _ILL_CONDITIONED:
        raise IllConditionedSlitError("tilted slit angle out of range", index)


def _run(curve, kind, fast, b, n_order, threshold, t_max, skip_collapsed=False):
    if not isinstance(curve, Curve):
        curve = Curve(np.asarray(curve))
    if kind not in SLIT_KINDS:
        raise ValidationError(f"slit kind must be one of {SLIT_KINDS}")
    if t_max is not None and not t_max > 0:
        raise ValidationError("t_max must be positive")
    tm = math.inf if t_max is None else float(t_max)
    count, skipped, status, bad, p0, p1, p2, p3, dt, du = _unzip_kernel(
        curve.points, 0 if kind == VERTICAL else 1, fast, int(b), int(n_order), float(threshold), tm,
        bool(skip_collapsed),
    )
    if status != _OK:
        _raise_for_status(status, bad)
    dt = dt[:count].copy()
    du = du[:count].copy()
    t = np.concatenate(([0.0], np.cumsum(dt)))
    u = np.concatenate(([0.0], np.cumsum(du)))
    reached = True
    if t_max is not None:
        if t[-1] >= tm:
            # interpolate the last step back to exactly t_max
            t0, t1 = t[-2], t[-1]
            frac = (tm - t0) / (t1 - t0)
            u[-1] = u[-2] + frac * (u[-1] - u[-2])
            t[-1] = tm
        else:
            reached = False
    params = {"kind": kind, "p0": p0[:count], "p1": p1[:count], "p2": p2[:count], "p3": p3[:count],
              "skipped": int(skipped)}
    return DrivingFunction(t, u, dt, du, reached, params)


def unzip_naive(curve, kind: str = VERTICAL, t_max: Optional[float] = None,
                skip_collapsed: bool = False) -> DrivingFunction:
    """O(N^2) zipper: every point goes through every previous slit map.

    A point whose image tip has ``Im <= 1e-14`` (or lands on an earlier slit)
    raises, unless ``skip_collapsed`` is set; then the point is dropped and
    ``extra["skipped"]`` counts such points.  This happens deep inside narrow
    fjords, where double precision is exhausted and each point moves ``t`` by
    less than ``1e-26``.
    """
    return _run(curve, kind, False, 1, DEFAULT_ORDER, DEFAULT_THRESHOLD, t_max, skip_collapsed)


def unzip_fast(curve, cfg: Optional[FastZipConfig] = None, t_max: Optional[float] = None,
               skip_collapsed: bool = False) -> DrivingFunction:
    """Block zipper with truncated series for far-away blocks.

    ``skip_collapsed`` as for :func:`unzip_naive`.
    """
    if cfg is None:
        cfg = FastZipConfig()
    if not isinstance(curve, Curve):
        curve = Curve(np.asarray(curve))
    b = cfg.resolved_block_len(len(curve))
    return _run(curve, cfg.slit_kind, True, b, cfg.series_order, cfg.threshold, t_max, skip_collapsed)


def unzip(curve, cfg: Optional[FastZipConfig] = None, t_max=None, naive: bool = False,
          skip_collapsed: bool = False) -> DrivingFunction:
    cfg = cfg or FastZipConfig()
    if naive:
        return unzip_naive(curve, cfg.slit_kind, t_max, skip_collapsed)
    return unzip_fast(curve, cfg, t_max, skip_collapsed)


def slit_steps(d: DrivingFunction):
    """Rebuild the :class:`SlitStep` records of an unzipped curve."""
    e = d.extra
    steps = []
    for i in range(d.n_steps):
        if e["kind"] == VERTICAL:
            m = cm.VerticalSlit(float(e["p0"][i]), float(e["p1"][i]))
        else:
            m = cm.TiltedSlit(float(e["p3"][i]), float(e["p0"][i]), float(e["p1"][i]), float(e["p2"][i]))
        steps.append(cm.SlitStep(m, float(d.dt[i]), float(d.du[i])))
    return steps


def block_radius(images) -> float:
    """Largest modulus among a block's image points."""
    images = np.asarray(images)
    if images.size == 0:
        raise ValidationError("block_radius needs at least one image")
    return float(np.max(np.abs(images)))


def sample_driving(d: DrivingFunction, times) -> np.ndarray:
    """Driving function at the requested capacity times by linear interpolation."""
    times = np.asarray(times, dtype=float)
    if np.any(times < 0) or np.any(times > d.T):
        raise ValidationError(f"sample times must lie in [0, {d.T}]")
    return np.interp(times, d.t, d.u)
