"""Elementary conformal maps that remove a short slit from the upper half plane.

Every map ``h`` is normalized hydrodynamically at infinity,

    h(z) = z - du + 2 dt / z + O(1/z^2),

and sends the slit tip to the origin.  Two families are supported:

* vertical slits from ``x`` to ``x + iy`` with the closed form
  ``h(z) = i sqrt(-(z - x)^2 - y^2)``;
* tilted slits from ``0`` to ``r exp(i pi alpha)`` whose inverse is
  ``(w + x_l)^(1 - alpha) (w - x_r)^alpha``; the forward map is found by Newton.

The scalar kernels are numba-compiled so the zipper can call them in its inner
loop.  The public wrappers take and return plain Python ``complex`` numbers and
raise the exceptions from :mod:`loewnerzip.errors`.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numba import njit

from .errors import (
    DegenerateSlitError,
    IllConditionedSlitError,
    NonConvergenceError,
    PointOnSlitError,
)

ALPHA_MIN = 1e-6
ALPHA_GRID = 2.0**53
NEWTON_MAX_ITER = 100
NEWTON_RTOL = 1e-14
# accepted residual of the log-form equation, i.e. relative error in h^{-1}(w)
NEWTON_GTOL = 1e-13
CONTINUATION_STEPS = 64
CONTINUATION_MAX_SOLVES = 2000
# relative height below which a failed solve falls back to the boundary value
NEAR_AXIS = 1e-12

# status codes returned by the compiled tilted solver
OK = 0
ON_SLIT = 1
NO_CONVERGENCE = 2


@dataclass(frozen=True)
class VerticalSlit:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise DegenerateSlitError(f"vertical slit needs y > 0, got {self.y!r}")

    @property
    def tip(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class TiltedSlit:
    """Segment from 0 to ``r exp(i pi alpha)``; ``x_l, x_r`` are the preimages of its base."""

    r: float
    alpha: float
    x_l: float
    x_r: float

    @property
    def tip(self) -> complex:
        return cmath.rect(self.r, math.pi * self.alpha)


@dataclass(frozen=True)
class SlitStep:
    map: Union[VerticalSlit, TiltedSlit]
    dt: float
    du: float


# ---------------------------------------------------------------------------
# compiled scalar kernels


@njit(cache=True)
def vertical_constants(w):
    """Return ``(x, y, dt, du)`` for the vertical slit ending at ``w``."""
    x = w.real
    y = w.imag
    return x, y, 0.25 * y * y, x


@njit(cache=True)
def tilted_constants(w):
    """Return ``(r, alpha, x_l, x_r, dt, du)``; ``alpha`` is NaN when out of range.

    Constants come from the right-leaning mirror image of the slit, with
    ``alpha`` rounded to a multiple of 2^-53 so that ``1 - alpha`` is exact;
    mirrored tips then give exactly mirrored constants.
    """
    r = abs(w)
    a = math.atan2(w.imag, abs(w.real)) / math.pi
    a = math.floor(a * ALPHA_GRID + 0.5) / ALPHA_GRID
    if a < ALPHA_MIN:
        return r, math.nan, math.nan, math.nan, math.nan, math.nan
    b = 1.0 - a
    la = math.log(a)
    lb = math.log(b)
    x_l = r * math.exp(a * (lb - la))
    x_r = r * math.exp(b * (la - lb))
    dt = 0.25 * r * r * math.exp((b - a) * (la - lb))
    du = r * (b - a) * math.exp(-(a * la + b * lb))
    if w.real < 0.0:
        return r, b, x_r, x_l, dt, -du
    return r, a, x_l, x_r, dt, du


@njit(cache=True)
def vertical_map(x, y, z):
    """Vertical slit map; NaN if ``z`` lies on the slit below its tip."""
    u = z - x
    if u.real == 0.0 and 0.0 <= u.imag < y:
        return complex(math.nan, math.nan)
    if z.imag == 0.0:
        # boundary value, limit from above
        return complex(math.copysign(math.hypot(u.real, y), u.real), 0.0)
    # -(u^2 + y^2) with the imaginary part formed without cancellation
    ur = u.real
    ui = u.imag
    pr = ur * ur + (y - ui) * (y + ui)
    h = 1j * np.sqrt(complex(-pr, -2.0 * ur * ui))
    if h.imag == 0.0:
        h = complex(math.copysign(abs(h.real), ur), 0.0)
    return h


@njit(cache=True)
def vertical_inverse(x, y, w):
    if w.imag == 0.0:
        w = complex(w.real, 0.0)
    return x + np.sqrt(w - y) * np.sqrt(w + y)


@njit(cache=True)
def tilted_inverse(alpha, x_l, x_r, w):
    if w.imag == 0.0:
        w = complex(w.real, 0.0)
    return np.exp((1.0 - alpha) * np.log(w + x_l) + alpha * np.log(w - x_r))


@njit(cache=True)
def _real_log_root(p, c1, q, c2, target):
    """Solve ``p log(v - c1) + q log(v + c2) = target`` for ``v > c1`` (increasing in ``v``)."""
    lo = c1
    hi = c1 + 1.0
    while p * math.log(hi - c1) + q * math.log(hi + c2) < target:
        hi = c1 + 2.0 * (hi - c1)
    v = 0.5 * (lo + hi)
    for _ in range(200):
        f = p * math.log(v - c1) + q * math.log(v + c2) - target
        if f > 0.0:
            hi = v
        else:
            lo = v
        fp = p / (v - c1) + q / (v + c2)
        v_new = v - f / fp
        if not (lo < v_new < hi):
            v_new = 0.5 * (lo + hi)
        if abs(v_new - v) <= 1e-16 * abs(v) or hi - lo <= 4e-16 * abs(v):
            return v_new
        v = v_new
    return v


@njit(cache=True)
def _tilted_real(alpha, x_l, x_r, x):
    """Tilted map on the real axis outside the slit base, ``x != 0``."""
    beta = 1.0 - alpha
    target = math.log(abs(x))
    if x > 0.0:
        return complex(_real_log_root(alpha, x_r, beta, x_l, target), 0.0)
    return complex(-_real_log_root(beta, x_l, alpha, x_r, target), 0.0)


@njit(cache=True)
def _tilted_newton(alpha, x_l, x_r, logz, w, scale):
    beta = 1.0 - alpha
    g = beta * np.log(w + x_l) + alpha * np.log(w - x_r) - logz
    gp = beta / (w + x_l) + alpha / (w - x_r)
    for _ in range(NEWTON_MAX_ITER):
        g_abs = abs(g)
        # residual floor: rounding w moves g by eps |w| |g'|
        tol = NEWTON_GTOL + 4.4e-16 * (abs(w) + 1.0) * abs(gp)
        if g_abs <= 2e-15:
            return w, OK
        step = g / gp
        if step.real != step.real or not math.isfinite(abs(step)):
            break
        # damp steps that leave the closed half plane or do not reduce the residual
        improved = False
        for _halve in range(60):
            w_new = w - step
            if w_new.imag >= 0.0:
                g_new = beta * np.log(w_new + x_l) + alpha * np.log(w_new - x_r) - logz
                if abs(g_new) < g_abs:
                    improved = True
                    break
            step = 0.5 * step
        if not improved:
            return w, OK if g_abs <= tol else NO_CONVERGENCE
        w = w_new
        g = g_new
        gp = beta / (w + x_l) + alpha / (w - x_r)
        if abs(step) <= NEWTON_RTOL * (abs(w) + scale) and abs(g) <= tol:
            return w, OK
    if abs(g) <= NEWTON_GTOL + 4.4e-16 * (abs(w) + 1.0) * abs(gp):
        return w, OK
    return w, NO_CONVERGENCE


@njit(cache=True)
def tilted_map(r, alpha, x_l, x_r, z):
    """Solve ``(w + x_l)^(1-a) (w - x_r)^a = z`` for ``w`` in the closed upper half plane.

    Left-leaning slits are solved through their mirror image, so mirrored
    inputs give exactly mirrored outputs.  Returns ``(w, status)``.
    """
    if alpha > 0.5 or (alpha == 0.5 and z.real < 0.0):
        w, status = _tilted_map_right(r, 1.0 - alpha, x_r, x_l, -z.conjugate())
        return -w.conjugate(), status
    return _tilted_map_right(r, alpha, x_l, x_r, z)


@njit(cache=True)
def _tilted_map_right(r, alpha, x_l, x_r, z):
    """Tilted map for ``alpha <= 1/2``.

    Real ``z`` is solved on the real line.  Otherwise Newton on the logarithm
    of the inverse formula, started from the vertical slit map with the same
    tip, then from ``z - du``; if both fail, by continuation along the ray
    through ``z``.
    """
    tip_re = r * math.cos(math.pi * alpha)
    tip_im = r * math.sin(math.pi * alpha)
    if z.imag == 0.0:
        z = complex(z.real, 0.0)
    az = abs(z)
    if z.real == tip_re and z.imag == tip_im:
        return 0j, OK
    # closed segment minus the tip itself
    if az < r * (1.0 - 1e-14) and abs(z.imag * tip_re - z.real * tip_im) <= 1e-15 * r * az:
        if z.real * tip_re + z.imag * tip_im >= 0.0:
            return complex(math.nan, math.nan), ON_SLIT
    beta = 1.0 - alpha
    if z.imag == 0.0:
        return _tilted_real(alpha, x_l, x_r, z.real), OK
    logz = np.log(z)
    scale = r + az
    du = (1.0 - 2.0 * alpha) * r * alpha ** (-alpha) * beta ** (-beta)
    for guess in (vertical_map(tip_re, tip_im, z), z - du):
        if guess.real != guess.real:
            continue
        if guess.imag < 0.0:
            guess = complex(guess.real, 0.0)
        w, status = _tilted_newton(alpha, x_l, x_r, logz, guess, scale)
        if status == OK:
            return w, OK
    # continuation inward along the ray through z, which misses the slit;
    # far out h(z) = z - du is accurate.  Steps shrink near the tip.
    t = 20.0 * scale / az
    w = t * z - du
    dlog = math.log(t) / CONTINUATION_STEPS
    for _ in range(CONTINUATION_MAX_SOLVES):
        t_next = max(1.0, t * math.exp(-dlog))
        zk = z * t_next
        w_next, status = _tilted_newton(alpha, x_l, x_r, np.log(zk), w, r + abs(zk))
        if status == OK:
            w = w_next
            t = t_next
            if t == 1.0:
                return w, OK
            dlog *= 1.5
        else:
            dlog *= 0.25
            if dlog < 1e-13:
                break
    # near the axis the root can sit closer to a base preimage than double
    # spacing resolves; the boundary value is then the nearest answer
    if z.imag <= NEAR_AXIS * az:
        return _tilted_real(alpha, x_l, x_r, z.real), OK
    return w, NO_CONVERGENCE


# ---------------------------------------------------------------------------
# public API


def _check_tip(w: complex) -> complex:
    w = complex(w)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise DegenerateSlitError(f"non-finite tip {w!r}")
    if not w.imag > 0:
        raise DegenerateSlitError(f"slit tip must have positive imaginary part, got {w!r}")
    return w


def vertical_from_tip(w: complex) -> SlitStep:
    """Vertical slit from the real axis up to ``w``: ``dt = y^2/4``, ``du = x``."""
    w = _check_tip(w)
    x, y, dt, du = vertical_constants(w)
    return SlitStep(VerticalSlit(x, y), dt, du)


def tilted_from_tip(w: complex) -> SlitStep:
    """Straight slit from the origin to ``w``."""
    w = _check_tip(w)
    r, alpha, x_l, x_r, dt, du = tilted_constants(w)
    if math.isnan(alpha):
        raise IllConditionedSlitError(
            f"tilted slit angle arg(w)/pi outside [{ALPHA_MIN}, {1 - ALPHA_MIN}] for w={w!r}"
        )
    return SlitStep(TiltedSlit(r, alpha, x_l, x_r), dt, du)


def apply_vertical(s: VerticalSlit, z: complex) -> complex:
    h = vertical_map(s.x, s.y, complex(z))
    if cmath.isnan(h):
        raise PointOnSlitError(f"{z!r} lies on the vertical slit at x={s.x}, height {s.y}")
    return complex(h)


def apply_vertical_inverse(s: VerticalSlit, z: complex) -> complex:
    return complex(vertical_inverse(s.x, s.y, complex(z)))


def apply_tilted(s: TiltedSlit, z: complex) -> complex:
    w, status = tilted_map(s.r, s.alpha, s.x_l, s.x_r, complex(z))
    if status == ON_SLIT:
        raise PointOnSlitError(f"{z!r} lies on the tilted slit to {s.tip!r}")
    if status == NO_CONVERGENCE:
        raise NonConvergenceError(
            f"Newton did not converge for z={z!r}; curve discretization may be too coarse"
        )
    return complex(w)


def apply_tilted_inverse(s: TiltedSlit, w: complex) -> complex:
    return complex(tilted_inverse(s.alpha, s.x_l, s.x_r, complex(w)))


def apply_step(step: SlitStep, z: complex) -> complex:
    if isinstance(step.map, VerticalSlit):
        return apply_vertical(step.map, z)
    return apply_tilted(step.map, z)
