import math

import numpy as np
import pytest

from loewnerzip.bench import TIMING_HEADER, TimingRecord, loglog_slope, time_prefixes, write_timings
from loewnerzip.errors import ValidationError


def test_loglog_slope():
    n = np.array([1e4, 2e4, 5e4, 1e5])
    assert loglog_slope(n, 3e-9 * n**2) == pytest.approx(2.0, abs=1e-12)
    assert loglog_slope(n, 1e-6 * n**1.35) == pytest.approx(1.35, abs=1e-12)
    # missing timings are ignored
    assert loglog_slope(n, [1.0, 2.0, np.nan, np.nan]) == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        loglog_slope(n, [1.0, np.nan, np.nan, np.nan])


def test_timing_record():
    r = TimingRecord(50_000, 8.54, 1.0, 50)
    assert r.speedup == pytest.approx(8.54)
    assert r.csv_row() == [50_000, "8.5400", "1.0000", 50, "8.540"]


def test_time_prefixes_and_write(tmp_path):
    pts = np.concatenate(([0j], 0.01 * np.arange(1, 2001) * 1j + 0.001 * np.sin(np.arange(1, 2001))))
    seen = []
    recs = time_prefixes(pts, [500, 1000], blocks=[4, 8], naive_max=500, progress=seen.append)
    assert [r.N_points for r in recs] == [500, 1000]
    assert seen == recs
    assert set(recs[0].fast_by_block) == {4, 8}
    assert recs[0].block_len in (4, 8)
    assert recs[0].seconds_naive > 0 and math.isnan(recs[1].seconds_naive)
    path = tmp_path / "t.csv"
    write_timings(path, recs)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(TIMING_HEADER)
    assert len(lines) == 3
    with pytest.raises(ValidationError):
        time_prefixes(pts, [5000])
