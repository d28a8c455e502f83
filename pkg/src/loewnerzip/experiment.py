"""Batch pipeline: generate -> distort -> rescale -> unzip -> sample -> test.

Samples are grouped into work units whose content depends only on the
config, never on the worker count: LERW and percolation units are chunks of
independently seeded samples, SAW units are pivot chains.  Results are merged
in unit order, so output files are byte-identical for any ``workers``.
"""
from __future__ import annotations

import configparser
import csv
import logging
import math
import multiprocessing
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import curve_models as cmod
from .errors import NumericFailure, ValidationError
from .stats import REPORT_HEADER, fit_kappa, histogram_data, stat_report, variance_table
from .zipper import FastZipConfig, unzip

log = logging.getLogger(__name__)

N_TIMES = 10
CHUNK = 25


@dataclass
class ExperimentConfig:
    # [model]
    model: str = "lerw"
    steps: int = 10_000
    nu: Optional[float] = None
    lam: float = 1.0
    t_horizon: float = 0.0184
    stride: Optional[int] = None  # saw: pivot proposals between samples (default steps // 2)
    chain_samples: int = 100  # saw: samples per independent chain
    burn_in: Optional[int] = None  # saw: default 10 * steps
    # [zipper]
    block_len: Optional[int] = None
    series_order: int = 12
    threshold: float = 4.0
    slit_kind: str = "vertical"
    naive: bool = False
    # [experiment]
    samples: int = 1000
    seed: int = 1
    workers: int = 1
    out: str = "out"
    subsets: List[int] = field(default_factory=list)

    def __post_init__(self):
        if self.nu is None and self.model in cmod.DEFAULT_NU:
            self.nu = cmod.DEFAULT_NU[self.model]
        self.validate()

    def validate(self):
        cmod.ModelParams(self.model, self.steps, self.nu, self.lam, self.t_horizon, self.seed)
        self.zip_config()
        if not self.t_horizon > 0:
            raise ValidationError("t_horizon must be > 0")
        if self.samples < 30:
            raise ValidationError("need at least 30 samples")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")
        if self.chain_samples < 1:
            raise ValidationError("chain_samples must be >= 1")
        if self.seed < 0 or self.seed >= 2**64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
        for s in self.subsets:
            if not 30 <= s <= self.samples:
                raise ValidationError(f"subset size {s} outside [30, samples]")

    def zip_config(self) -> FastZipConfig:
        return FastZipConfig(self.block_len, self.series_order, self.threshold, self.slit_kind)

    def model_params(self) -> cmod.ModelParams:
        return cmod.ModelParams(self.model, self.steps, self.nu, self.lam, self.t_horizon, self.seed)

    @property
    def saw_stride(self) -> int:
        return self.stride if self.stride is not None else max(1, self.steps // 2)

    @property
    def saw_burn_in(self) -> int:
        return self.burn_in if self.burn_in is not None else 10 * self.steps

    def times(self) -> np.ndarray:
        return self.t_horizon * np.arange(1, N_TIMES + 1) / N_TIMES


# section -> {key: (attribute, parser)}
def _opt_int(s):
    return None if s.strip().lower() in ("auto", "none", "") else int(s)


def _opt_float(s):
    return None if s.strip().lower() in ("auto", "none", "") else float(s)


def _bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _int_list(s):
    return [int(x) for x in s.replace(",", " ").split()]


CONFIG_KEYS = {
    "model": {
        "model": ("model", str),
        "steps": ("steps", int),
        "nu": ("nu", _opt_float),
        "lambda": ("lam", float),
        "t_horizon": ("t_horizon", float),
        "stride": ("stride", _opt_int),
        "chain_samples": ("chain_samples", int),
        "burn_in": ("burn_in", _opt_int),
    },
    "zipper": {
        "block_len": ("block_len", _opt_int),
        "series_order": ("series_order", int),
        "threshold": ("threshold", float),
        "slit_kind": ("slit_kind", str),
        "naive": ("naive", _bool),
    },
    "experiment": {
        "samples": ("samples", int),
        "seed": ("seed", int),
        "workers": ("workers", int),
        "out": ("out", str),
        "subsets": ("subsets", _int_list),
    },
}


def parse_config(text: str, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    """Parse ``key = value`` lines under ``[model]``, ``[zipper]``, ``[experiment]``."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ValidationError(f"config syntax: {exc}") from exc
    values = {} if base is None else {f.name: getattr(base, f.name) for f in fields(base)}
    explicit = set()
    for section in cp.sections():
        if section not in CONFIG_KEYS:
            raise ValidationError(f"unknown config section [{section}]")
        for key, raw in cp.items(section):
            if key not in CONFIG_KEYS[section]:
                raise ValidationError(f"unknown key {key!r} in [{section}]")
            attr, conv = CONFIG_KEYS[section][key]
            try:
                values[attr] = conv(raw)
                explicit.add(attr)
            except ValueError as exc:
                raise ValidationError(f"[{section}] {key}: {exc}") from exc
    if "model" in explicit and "nu" not in explicit:
        values["nu"] = None
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def dump_config(cfg: ExperimentConfig) -> str:
    out = []
    for section, keys in CONFIG_KEYS.items():
        out.append(f"[{section}]")
        for key, (attr, _) in keys.items():
            v = getattr(cfg, attr)
            if v is None:
                v = "auto"
            elif isinstance(v, list):
                v = ", ".join(map(str, v))
            out.append(f"{key} = {v}")
        out.append("")
    return "\n".join(out)


# Desk presets: lattice sizes and horizons reduced so the unzipped curves have
# ~2,000 steps (SAW ~1,000) at about 0.1 s each; T calibrated by
# scripts/calibrate_horizon.py.  Full presets use the original large-scale sizes.
PRESETS = {
    "lerw-desk": dict(model="lerw", steps=10_000, t_horizon=0.0184),
    "saw-desk": dict(model="saw", steps=10_000, t_horizon=0.0088, chain_samples=100),
    "percolation-desk": dict(model="percolation", steps=10_000, t_horizon=0.0287),
    "lerw-full": dict(model="lerw", steps=50_000, t_horizon=0.01),
    "saw-full": dict(model="saw", steps=200_000, t_horizon=0.002, stride=100_000),
    "percolation-full": dict(model="percolation", steps=40_000, t_horizon=0.1),
}


def preset(name: str, **overrides) -> ExperimentConfig:
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    kw = dict(PRESETS[name])
    kw.update(overrides)
    return ExperimentConfig(**kw)


# ---------------------------------------------------------------------------
# per-sample pipeline


def generate_walk(cfg: ExperimentConfig, index: int, steps: Optional[int] = None) -> cmod.LatticeWalk:
    """The ``index``-th LERW or percolation walk; SAW walks come from :func:`saw_unit_walks`."""
    steps = steps or cfg.steps
    seed = cmod.stream_seed(cfg.seed, index)
    if cfg.model == "lerw":
        return cmod.generate_lerw(steps, seed)
    if cfg.model == "percolation":
        return cmod.generate_percolation_interface(steps, seed)
    raise ValidationError("SAW samples come from pivot chains, not single seeds")


def n_units(cfg: ExperimentConfig) -> int:
    per = cfg.chain_samples if cfg.model == "saw" else CHUNK
    return math.ceil(cfg.samples / per)


def unit_indices(cfg: ExperimentConfig, unit: int) -> range:
    per = cfg.chain_samples if cfg.model == "saw" else CHUNK
    return range(unit * per, min(cfg.samples, (unit + 1) * per))


def saw_unit_walks(cfg: ExperimentConfig, unit: int):
    idx = unit_indices(cfg, unit)
    # offset keeps chain seeds apart from per-sample seeds of other models
    seed = cmod.stream_seed(cfg.seed, 2**40 + unit)
    return list(cmod.generate_saw(cfg.steps, cfg.saw_stride, len(idx), seed, cfg.saw_burn_in))


def unzip_walk(cfg: ExperimentConfig, walk: cmod.LatticeWalk):
    curve = cmod.model_curve(walk, cfg.model_params(), scale_n=cfg.steps)
    # fjord points below double precision are dropped rather than failing the sample
    d = unzip(curve, cfg.zip_config(), t_max=cfg.t_horizon, naive=cfg.naive, skip_collapsed=True)
    if d.extra["skipped"]:
        log.debug("dropped %d collapsed points", d.extra["skipped"])
    return d


def run_sample(cfg: ExperimentConfig, index: int, walk=None):
    """Driving values at the ten grid times and the number of steps unzipped."""
    if walk is None:
        walk = generate_walk(cfg, index)
    d = unzip_walk(cfg, walk)
    steps = cfg.steps
    while not d.reached_t_max:
        if cfg.model == "saw":
            raise NumericFailure(
                f"SAW sample {index} has capacity {d.T:.4g} < T={cfg.t_horizon}; increase steps"
            )
        # percolation prefixes are exact; LERW extension is a rare fallback
        steps *= 2
        log.info("sample %d: extending walk to %d steps", index, steps)
        d = unzip_walk(cfg, generate_walk(cfg, index, steps))
    return np.interp(cfg.times(), d.t, d.u), d.n_steps


def run_unit(args):
    cfg, unit = args
    idx = unit_indices(cfg, unit)
    walks = saw_unit_walks(cfg, unit) if cfg.model == "saw" else [None] * len(idx)
    rows = np.empty((len(idx), N_TIMES))
    steps = np.empty(len(idx), dtype=np.int64)
    for r, (i, w) in enumerate(zip(idx, walks)):
        try:
            rows[r], steps[r] = run_sample(cfg, i, w)
        except NumericFailure as exc:
            raise NumericFailure(f"sample {i}: {exc}") from exc
    return rows, steps


def collect_samples(cfg: ExperimentConfig, progress=None):
    """Run every unit and return ``(U, steps)`` in sample order."""
    units = [(cfg, u) for u in range(n_units(cfg))]
    if cfg.workers == 1:
        results = map(run_unit, units)
        pool = None
    else:
        pool = multiprocessing.get_context("fork").Pool(cfg.workers)
        results = pool.imap(run_unit, units)
    try:
        out_u, out_s = [], []
        for k, (rows, steps) in enumerate(results):
            out_u.append(rows)
            out_s.append(steps)
            if progress is not None:
                progress(k + 1, len(units))
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    return np.concatenate(out_u), np.concatenate(out_s)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    u: np.ndarray
    steps: np.ndarray
    reports: list

    @property
    def report(self):
        return self.reports[-1]


def analyse(cfg: ExperimentConfig, u, steps) -> ExperimentResult:
    sizes = sorted(set(cfg.subsets) | {cfg.samples})
    reports = [stat_report(cfg.t_horizon, u[:n]) for n in sizes]
    return ExperimentResult(cfg, u, steps, reports)


def write_outputs(res: ExperimentResult, out_dir) -> dict:
    cfg = res.config
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    paths["report"] = out / "report.csv"
    with paths["report"].open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for r in res.reports:
            w.writerow(r.csv_row(cfg.model, cfg.lam))
    est = fit_kappa(cfg.times(), res.u)
    paths["kappa"] = out / "kappa.csv"
    with paths["kappa"].open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["model", "lambda", "N_samples", "kappa", "kappa_err", "mean_steps"])
        w.writerow([cfg.model, f"{cfg.lam:g}", cfg.samples, f"{est.kappa:.6f}", f"{est.stderr:.6f}",
                    f"{res.steps.mean():.1f}"])
    paths["variance"] = out / "variance.csv"
    np.savetxt(paths["variance"], variance_table(cfg.times(), res.u), fmt="%.10g", delimiter=",",
               header="t,mean_u2,stderr", comments="")
    paths["histogram"] = out / "histogram.csv"
    np.savetxt(paths["histogram"], histogram_data(res.u[:, -1], cfg.t_horizon, est.kappa), fmt="%.10g",
               delimiter=",", header="center,density,normal_density", comments="")
    paths["samples"] = out / "samples.csv"
    np.savetxt(paths["samples"], np.column_stack([res.steps, res.u]), fmt="%.17g", delimiter=",",
               header="steps," + ",".join(f"u{i}" for i in range(1, N_TIMES + 1)), comments="")
    paths["config"] = out / "config.ini"
    paths["config"].write_text(dump_config(cfg))
    return paths


def run_experiment(cfg: ExperimentConfig, out_dir=None, progress=None) -> ExperimentResult:
    u, steps = collect_samples(cfg, progress)
    res = analyse(cfg, u, steps)
    if out_dir is not None:
        write_outputs(res, out_dir)
    return res
