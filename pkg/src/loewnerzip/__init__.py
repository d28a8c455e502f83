"""Loewner driving functions of lattice curves by the zipper algorithm.

The fast variant groups slit maps into blocks and replaces each block by a
truncated Laurent-type series for points far from it.  Around it sit
generators for loop-erased random walks, self-avoiding walks and percolation
interfaces, and statistical tests of whether the driving processes look like
Brownian motion.
"""
from .conformal_maps import SlitStep, TiltedSlit, VerticalSlit
from .errors import (
    DegenerateSlitError,
    IllConditionedSlitError,
    LoewnerZipError,
    NonConvergenceError,
    NumericFailure,
    PointOnSlitError,
    SelfIntersectionError,
    ValidationError,
)
from .power_series import PowerSeries, compose, revert, series_of_tilted, series_of_vertical
from .zipper import Curve, DrivingFunction, FastZipConfig, sample_driving, unzip, unzip_fast, unzip_naive

__version__ = "0.1.0"

__all__ = [
    "Curve",
    "DegenerateSlitError",
    "DrivingFunction",
    "FastZipConfig",
    "IllConditionedSlitError",
    "LoewnerZipError",
    "NonConvergenceError",
    "NumericFailure",
    "PointOnSlitError",
    "PowerSeries",
    "SelfIntersectionError",
    "SlitStep",
    "TiltedSlit",
    "ValidationError",
    "VerticalSlit",
    "compose",
    "revert",
    "sample_driving",
    "series_of_tilted",
    "series_of_vertical",
    "unzip",
    "unzip_fast",
    "unzip_naive",
]
