"""Timing of naive and fast unzipping on prefixes of one long curve."""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ValidationError
from .zipper import Curve, FastZipConfig, default_block_len, unzip_fast, unzip_naive

TIMING_HEADER = ["N_points", "seconds_naive", "seconds_fast", "block_len", "speedup"]


@dataclass
class TimingRecord:
    N_points: int
    seconds_naive: float
    seconds_fast: float
    block_len: int
    fast_by_block: Optional[dict] = None

    @property
    def speedup(self) -> float:
        return self.seconds_naive / self.seconds_fast

    def csv_row(self):
        return [self.N_points, f"{self.seconds_naive:.4f}", f"{self.seconds_fast:.4f}", self.block_len,
                f"{self.speedup:.3f}"]


def _timed(fn, repeats: int) -> float:
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return float(best)


def warm_up():
    """Compile the kernels so the first timing is not inflated."""
    c = Curve(np.array([0, 0.1j, 0.1 + 0.2j, 0.2j + 0.05, 0.3j]))
    unzip_naive(c)
    unzip_fast(c, FastZipConfig(block_len=2))


def time_prefixes(points, sizes: Sequence[int], blocks: Optional[Sequence[int]] = None, *,
                  naive: bool = True, naive_max: Optional[int] = None, repeats: int = 1,
                  cfg: Optional[FastZipConfig] = None, progress=None):
    """Time unzipping the first ``N`` points of ``points`` for each ``N`` in ``sizes``.

    ``blocks`` lists block lengths to scan; the fastest is reported.  Without
    it the default ``round(sqrt(N)/4)`` is used.  Naive timings are skipped
    (NaN) when ``naive`` is false or ``N > naive_max``.
    """
    points = np.asarray(points, dtype=complex)
    if max(sizes) > points.size:
        raise ValidationError(f"curve has {points.size} points, need {max(sizes)}")
    cfg = cfg or FastZipConfig()
    warm_up()
    records = []
    for n in sizes:
        curve = Curve(points[:n])
        grid = list(blocks) if blocks else [default_block_len(n)]
        by_block = {}
        for b in grid:
            c = FastZipConfig(b, cfg.series_order, cfg.threshold, cfg.slit_kind)
            by_block[b] = _timed(lambda: unzip_fast(curve, c), repeats)
        best = min(by_block, key=by_block.get)
        t_naive = np.nan
        if naive and (naive_max is None or n <= naive_max):
            t_naive = _timed(lambda: unzip_naive(curve, cfg.slit_kind), repeats)
        rec = TimingRecord(n, t_naive, by_block[best], best, by_block)
        records.append(rec)
        if progress is not None:
            progress(rec)
    return records


def loglog_slope(sizes, seconds) -> float:
    """Least-squares slope of ``log(seconds)`` against ``log(N)``."""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(seconds, dtype=float))
    ok = np.isfinite(y)
    if ok.sum() < 2:
        raise ValidationError("need at least two finite timings for a slope")
    return float(np.polyfit(x[ok], y[ok], 1)[0])


def write_timings(path, records) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TIMING_HEADER)
        for r in records:
            w.writerow(r.csv_row())
