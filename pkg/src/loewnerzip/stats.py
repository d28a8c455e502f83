"""Tests of whether sampled driving processes look like ``sqrt(kappa) B_t``.

The input is a matrix ``U`` of shape ``(n_samples, n_times)`` holding each
sample's driving function at equally spaced times ``T/n, 2T/n, ..., T``
(ten times in all experiments).  Six statistics are computed:

* Kolmogorov-Smirnov distance of ``U_{T/2}`` and ``U_T`` from ``N(0, kappa t)``;
* ``Z``: normalized sample mean of the product of the increments over
  ``[0, T/2]`` and ``[T/2, T]``;
* three chi-square tests on cells of increment space: signs of ten
  increments, signs of five increments, and quartiles of two increments.

p-values come from the asymptotic null distributions.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special

from .errors import ValidationError

QUARTILE = 0.6744897501960817  # Phi^{-1}(3/4)

REPORT_HEADER = ["model", "lambda", "N_samples", "D_half_p", "D_full_p", "Z_p", "chi2a_p", "chi2b_p", "chi2c_p"]


# ---------------------------------------------------------------------------
# special functions


def normal_cdf(x):
    return special.ndtr(x)


def normal_quantile(p):
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise ValidationError("normal_quantile needs 0 < p < 1")
    return special.ndtri(p)


def chi2_sf(dof, x):
    """Upper tail of the chi-square distribution, ``Q(dof/2, x/2)``."""
    if dof <= 0:
        raise ValidationError("chi-square needs dof > 0")
    if x < 0:
        raise ValidationError("chi-square statistic must be >= 0")
    return float(special.gammaincc(dof / 2.0, x / 2.0))


def ks_sf(x: float) -> float:
    """Limiting tail ``P(sqrt(N) D > x) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2)``.

    Below ``x = 1`` the alternating series converges slowly, so the Jacobi
    theta transform ``1 - sqrt(2 pi)/x sum_k exp(-(2k-1)^2 pi^2 / (8 x^2))`` is
    used instead.
    """
    if x < 0:
        raise ValidationError("ks_sf needs x >= 0")
    if x == 0:
        return 1.0
    if x < 1.0:
        s = 0.0
        k = 1
        while True:
            term = math.exp(-((2 * k - 1) ** 2) * math.pi**2 / (8 * x * x))
            s += term
            if term < 1e-16:
                break
            k += 1
        return min(1.0, max(0.0, 1.0 - math.sqrt(2 * math.pi) / x * s))
    s = 0.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * x * x)
        s += term if k % 2 else -term
        if term < 1e-12:
            break
        k += 1
    return min(1.0, max(0.0, 2.0 * s))


# ---------------------------------------------------------------------------
# individual tests


def ks_statistic(samples, cdf: Callable) -> tuple:
    """``D = max_k |F(Y_(k)) - (k - 1/2)/N| + 1/(2N)`` and its asymptotic p-value."""
    y = np.sort(np.asarray(samples, dtype=float))
    n = y.size
    if n == 0:
        raise ValidationError("KS statistic needs at least one sample")
    f = np.asarray(cdf(y), dtype=float)
    k = np.arange(1, n + 1)
    d = float(np.max(np.abs(f - (k - 0.5) / n)) + 0.5 / n)
    return d, ks_sf(math.sqrt(n) * d)


def z_statistic(u_half, u_full, kappa: float, T: float) -> tuple:
    """Product-of-increments test; under the null ``sd(X1 X2) = kappa T / 2``."""
    u_half = np.asarray(u_half, dtype=float)
    u_full = np.asarray(u_full, dtype=float)
    if u_half.shape != u_full.shape:
        raise ValidationError("u_half and u_full must have equal length")
    n = u_half.size
    if n < 2:
        raise ValidationError("Z statistic needs at least two samples")
    prod = u_half * (u_full - u_half)
    sigma = kappa * T / 2.0
    z = float(np.mean(prod) / (sigma / math.sqrt(n)))
    return z, float(special.erfc(abs(z) / math.sqrt(2.0)))


def _chi2_from_cells(cells, m):
    observed = np.bincount(cells, minlength=m).astype(float)
    expected = cells.size / m
    chi2 = float(np.sum((observed - expected) ** 2) / expected)
    return chi2, m - 1, chi2_sf(m - 1, chi2)


def chi2_sign_cells(increments) -> tuple:
    """Cells are the sign patterns of the increments; all ``2^n`` are equally likely."""
    x = np.asarray(increments, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValidationError("increments must be a non-empty (samples, n) matrix")
    n_inc = x.shape[1]
    weights = 1 << np.arange(n_inc)
    cells = ((x > 0).astype(np.int64) * weights).sum(axis=1)
    return _chi2_from_cells(cells, 2**n_inc)


def quartile_bins(x, q):
    """Bin index 0..3 for ``(-inf, -q], (-q, 0], (0, q], (q, inf)``."""
    x = np.asarray(x, dtype=float)
    return np.where(x <= -q, 0, np.where(x <= 0, 1, np.where(x <= q, 2, 3)))


def chi2_quartile_cells(x1, x2, kappa: float, T: float) -> tuple:
    """16 cells from the quartiles of two increments over ``[0, T/2]`` and ``[T/2, T]``."""
    q = QUARTILE * math.sqrt(kappa * T / 2.0)
    cells = 4 * quartile_bins(x1, q) + quartile_bins(x2, q)
    return _chi2_from_cells(cells.astype(np.int64), 16)


@dataclass
class KappaEstimate:
    kappa: float
    stderr: float  # two standard deviations


def fit_kappa(times, u) -> KappaEstimate:
    """Weighted least-squares slope through the origin of ``t -> E[U_t^2]``.

    Weights are inverse estimated variances of the sample second moments.
    """
    times = np.asarray(times, dtype=float)
    u = np.asarray(u, dtype=float)
    if u.ndim != 2 or u.shape[1] != times.size:
        raise ValidationError("u must be (samples, len(times))")
    if times.size < 2 or u.shape[0] < 30:
        raise ValidationError("fit_kappa needs >= 2 times and >= 30 samples")
    sq = u**2
    v = sq.mean(axis=0)
    var = sq.var(axis=0, ddof=1) / u.shape[0]
    if np.any(var <= 0):
        raise ValidationError("degenerate driving samples (zero variance)")
    w = 1.0 / var
    denom = float(np.sum(w * times**2))
    kappa = float(np.sum(w * times * v) / denom)
    if not kappa > 0:
        raise ValidationError("fitted kappa is not positive")
    return KappaEstimate(kappa, 2.0 / math.sqrt(denom))


def variance_table(times, u):
    """Rows ``(t, E[U_t^2], standard error)``."""
    sq = np.asarray(u, dtype=float) ** 2
    return np.column_stack([times, sq.mean(axis=0), sq.std(axis=0, ddof=1) / math.sqrt(sq.shape[0])])


# ---------------------------------------------------------------------------
# the full battery


@dataclass
class StatReport:
    n_samples: int
    kappa: float
    kappa_err: float
    D_half: float
    D_full: float
    Z: float
    chi2_a: float
    chi2_b: float
    chi2_c: float
    p_D_half: float
    p_D_full: float
    p_Z: float
    p_chi2_a: float
    p_chi2_b: float
    p_chi2_c: float
    dof_a: int = 1023
    dof_b: int = 31
    dof_c: int = 15

    def p_values(self):
        return [self.p_D_half, self.p_D_full, self.p_Z, self.p_chi2_a, self.p_chi2_b, self.p_chi2_c]

    def csv_row(self, model: str, lam: float):
        return [model, f"{lam:g}", str(self.n_samples)] + [f"{p:.6f}" for p in self.p_values()]

    def as_dict(self):
        return asdict(self)


def stat_report(T: float, u, kappa: Optional[float] = None) -> StatReport:
    """All six tests for samples ``u`` at times ``T/10, ..., T``.

    ``kappa`` defaults to the weighted fit over the ten times.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 2 or u.shape[1] != 10:
        raise ValidationError("expected driving samples at ten equally spaced times")
    times = T * np.arange(1, 11) / 10.0
    est = fit_kappa(times, u)
    kap = est.kappa if kappa is None else float(kappa)

    def normal(t):
        sd = math.sqrt(kap * t)
        return lambda y: special.ndtr(y / sd)

    d_half, p_half = ks_statistic(u[:, 4], normal(T / 2))
    d_full, p_full = ks_statistic(u[:, 9], normal(T))
    z, p_z = z_statistic(u[:, 4], u[:, 9], kap, T)
    padded = np.column_stack([np.zeros(u.shape[0]), u])
    inc10 = np.diff(padded, axis=1)
    inc5 = np.diff(padded[:, ::2], axis=1)
    ca, dof_a, pa = chi2_sign_cells(inc10)
    cb, dof_b, pb = chi2_sign_cells(inc5)
    cc, dof_c, pc = chi2_quartile_cells(u[:, 4], u[:, 9] - u[:, 4], kap, T)
    return StatReport(
        u.shape[0], est.kappa, est.stderr,
        d_half, d_full, z, ca, cb, cc,
        p_half, p_full, p_z, pa, pb, pc,
        dof_a, dof_b, dof_c,
    )


def histogram_data(u_T, T: float, kappa: float, width: float = 0.1, lim: float = 5.0):
    """Density histogram of ``U_T / sqrt(T)`` with the ``N(0, kappa)`` density at bin centers."""
    edges = np.linspace(-lim, lim, int(round(2 * lim / width)) + 1)
    scaled = np.asarray(u_T, dtype=float) / math.sqrt(T)
    counts, _ = np.histogram(scaled, bins=edges)
    centers = 0.5 * (edges[1:] + edges[:-1])
    density = counts / (scaled.size * width)
    normal = np.exp(-(centers**2) / (2 * kappa)) / math.sqrt(2 * math.pi * kappa)
    return np.column_stack([centers, density, normal])
