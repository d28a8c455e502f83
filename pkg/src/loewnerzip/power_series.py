"""Truncated power series of ``hhat(z) = 1 / h(1 / z)`` for slit maps.

For a hydrodynamically normalized map ``h``, ``hhat`` is analytic at the
origin with ``hhat(z) = z + a_2 z^2 + ...``.  The point of working with
``hhat`` rather than the Laurent series of ``h`` is that hatting commutes with
composition, so the series of a block of maps is the composition of the
member series.

Compiled kernels work on "full" arrays ``c[0..n]`` where ``c[j]`` multiplies
``z^j`` and ``c[0] == 0``.  :class:`PowerSeries` stores ``a_1..a_n``.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .conformal_maps import TiltedSlit, VerticalSlit
from .errors import ValidationError

DEFAULT_ORDER = 12


@njit(cache=True)
def mul_trunc(a, b, n):
    """Cauchy product of two coefficient arrays, truncated after ``z^n``."""
    out = np.zeros(n + 1, dtype=a.dtype)
    for i in range(min(n, a.shape[0] - 1) + 1):
        ai = a[i]
        if ai == 0.0:
            continue
        for j in range(min(n - i, b.shape[0] - 1) + 1):
            out[i + j] += ai * b[j]
    return out


@njit(cache=True)
def compose_full(a, b):
    """Coefficients of ``a(b(z))`` for full arrays with ``a[0] == b[0] == 0``."""
    n = a.shape[0] - 1
    p = np.zeros(n + 1, dtype=a.dtype)
    p[0] = a[n]
    for j in range(n - 1, 0, -1):
        p = mul_trunc(p, b, n)
        p[0] += a[j]
    return mul_trunc(p, b, n)


@njit(cache=True)
def reciprocal(d, m):
    """First ``m`` coefficients of ``1 / d(z)``; requires ``d[0] != 0``."""
    out = np.zeros(m, dtype=d.dtype)
    out[0] = 1.0 / d[0]
    for k in range(1, m):
        acc = 0.0 * d[0]
        for i in range(1, min(k, d.shape[0] - 1) + 1):
            acc += d[i] * out[k - i]
        out[k] = -acc / d[0]
    return out


@njit(cache=True)
def revert_full(a):
    """Compositional inverse by Lagrange inversion.

    ``[z^k] a^{-1} = (1/k) [w^{k-1}] (w / a(w))^k``.
    """
    n = a.shape[0] - 1
    phi = reciprocal(a[1:], n)
    out = np.zeros(n + 1, dtype=a.dtype)
    power = phi.copy()
    for k in range(1, n + 1):
        out[k] = power[k - 1] / k
        if k < n:
            power = mul_trunc(power, phi, n - 1)
    return out


@njit(cache=True)
def vertical_series_full(x, y, n):
    """``z (1 - 2xz + (x^2 + y^2) z^2)^(-1/2)`` to order ``n``.

    The square-root reciprocal obeys ``q f' = -q' f / 2``, a three-term
    recurrence in the coefficients.
    """
    q1 = -2.0 * x
    q2 = x * x + y * y
    c = np.zeros(n, dtype=np.float64)
    c[0] = 1.0
    for k in range(1, n):
        v = -(k - 0.5) * q1 * c[k - 1]
        if k >= 2:
            v -= (k - 1) * q2 * c[k - 2]
        c[k] = v / k
    out = np.zeros(n + 1, dtype=np.float64)
    out[1:] = c
    return out


@njit(cache=True)
def _binomial_series(p, u, m):
    # (1 + u z)^p, first m coefficients
    out = np.zeros(m, dtype=np.float64)
    out[0] = 1.0
    for k in range(1, m):
        out[k] = out[k - 1] * (p - k + 1) / k * u
    return out


@njit(cache=True)
def tilted_inverse_series_full(alpha, x_l, x_r, n):
    """Series of the hatted inverse ``z (1 + x_l z)^(alpha-1) (1 - x_r z)^(-alpha)``."""
    left = _binomial_series(alpha - 1.0, x_l, n)
    right = _binomial_series(-alpha, -x_r, n)
    prod = mul_trunc(left, right, n - 1)
    out = np.zeros(n + 1, dtype=np.float64)
    out[1:] = prod
    return out


@njit(cache=True)
def tilted_series_full(alpha, x_l, x_r, n):
    if alpha > 0.5:
        # mirror image: hhat(z) -> -hhat(-z) flips the even coefficients
        out = revert_full(tilted_inverse_series_full(1.0 - alpha, x_r, x_l, n))
        for j in range(2, n + 1, 2):
            out[j] = -out[j]
        return out
    return revert_full(tilted_inverse_series_full(alpha, x_l, x_r, n))


@njit(cache=True)
def eval_h(full, z):
    """``h(z) = 1 / hhat(1/z)`` with ``hhat`` truncated; Horner in ``1/z``."""
    zeta = 1.0 / z
    n = full.shape[0] - 1
    s = full[n] + 0j
    for j in range(n - 1, 0, -1):
        s = s * zeta + full[j]
    return 1.0 / (s * zeta)


class PowerSeries:
    """Truncated series ``a_1 z + ... + a_n z^n`` of a hatted conformal map."""

    __slots__ = ("full",)

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs)
        if coeffs.ndim != 1 or coeffs.size < 1:
            raise ValidationError("power series needs a non-empty 1-d coefficient array")
        dtype = np.complex128 if np.iscomplexobj(coeffs) else np.float64
        self.full = np.zeros(coeffs.size + 1, dtype=dtype)
        self.full[1:] = coeffs

    @classmethod
    def from_full(cls, full):
        obj = cls.__new__(cls)
        obj.full = np.asarray(full)
        return obj

    @classmethod
    def identity(cls, n=DEFAULT_ORDER):
        c = np.zeros(n)
        c[0] = 1.0
        return cls(c)

    @property
    def coeffs(self):
        return self.full[1:]

    @property
    def order(self):
        return self.full.size - 1

    def __call__(self, z):
        """Evaluate the truncated ``hhat`` polynomial at ``z``."""
        return np.polyval(self.full[::-1], z)

    def __repr__(self):
        return f"PowerSeries({np.array2string(self.coeffs, precision=6)})"


def series_of_vertical(s: VerticalSlit, n: int = DEFAULT_ORDER) -> PowerSeries:
    return PowerSeries.from_full(vertical_series_full(s.x, s.y, n))


def series_of_tilted(s: TiltedSlit, n: int = DEFAULT_ORDER) -> PowerSeries:
    return PowerSeries.from_full(tilted_series_full(s.alpha, s.x_l, s.x_r, n))


def series_of_step(step, n: int = DEFAULT_ORDER) -> PowerSeries:
    if isinstance(step.map, VerticalSlit):
        return series_of_vertical(step.map, n)
    return series_of_tilted(step.map, n)


def compose(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Series of ``a o b`` truncated at the common order."""
    if a.order != b.order:
        raise ValidationError(f"order mismatch: {a.order} vs {b.order}")
    dtype = np.result_type(a.full, b.full)
    return PowerSeries.from_full(compose_full(a.full.astype(dtype), b.full.astype(dtype)))


def revert(a: PowerSeries) -> PowerSeries:
    """Compositional inverse; leading coefficient must be non-zero."""
    if a.full[1] == 0:
        raise ValidationError("cannot revert a series with zero linear coefficient")
    return PowerSeries.from_full(revert_full(a.full))


def eval_h_via_series(s: PowerSeries, z: complex) -> complex:
    """Approximate ``h(z)`` as ``1 / sum_j a_j z^-j``; valid only for large ``|z|``."""
    return complex(eval_h(s.full.astype(np.complex128), complex(z)))
