"""Command line: ``loewnerzip generate|unzip|experiment|bench|selftest``.

Exit status is 0 on success, 2 on invalid input and 3 on numerical failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import curve_models as cmod
from . import experiment as exp
from .errors import LoewnerZipError, NumericFailure, ValidationError
from .fileio import load_walk_codes, read_curve, write_curve, write_driving
from .zipper import SLIT_KINDS, FastZipConfig, unzip

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3

log = logging.getLogger("loewnerzip")


# ---------------------------------------------------------------------------
# config assembly


def _config_from_args(args) -> exp.ExperimentConfig:
    if args.config:
        cfg = exp.load_config(args.config)
    else:
        cfg = exp.preset(args.preset)
    over = {}
    for attr in ("seed", "workers", "samples", "lam", "steps", "t_horizon", "block_len"):
        v = getattr(args, attr, None)
        if v is not None:
            over[attr] = v
    if getattr(args, "naive", False):
        over["naive"] = True
    if getattr(args, "method", None):
        over["slit_kind"] = args.method
    if getattr(args, "out", None):
        over["out"] = args.out
    return dataclasses.replace(cfg, **over) if over else cfg


def _add_config_args(p, samples=True):
    p.add_argument("--config", metavar="PATH", help="config file ([model], [zipper], [experiment])")
    p.add_argument("--preset", default="lerw-desk", choices=sorted(exp.PRESETS),
                   help="starting point when no --config is given (default lerw-desk)")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--workers", type=int)
    p.add_argument("--lambda", dest="lam", type=float, help="vertical distortion factor")
    p.add_argument("--steps", type=int, help="lattice steps per walk")
    p.add_argument("--t-horizon", type=float, help="capacity horizon T")
    if samples:
        p.add_argument("--samples", type=int)


def _add_zip_args(p):
    p.add_argument("--method", choices=SLIT_KINDS, help="slit kind (default vertical)")
    p.add_argument("--naive", action="store_true", help="use the O(N^2) zipper")
    p.add_argument("--block-len", type=int, help="block length b (default round(sqrt(N)/4))")


# ---------------------------------------------------------------------------
# subcommands


def walks_for(cfg: exp.ExperimentConfig, count: int):
    """The first ``count`` walks of the experiment described by ``cfg``."""
    if cfg.model != "saw":
        for i in range(count):
            yield i, exp.generate_walk(cfg, i)
        return
    cfg = dataclasses.replace(cfg, samples=max(30, count))
    i = 0
    for unit in range(exp.n_units(cfg)):
        for w in exp.saw_unit_walks(cfg, unit):
            if i >= count:
                return
            yield i, w
            i += 1


def cmd_generate(args) -> int:
    cfg = _config_from_args(args)
    out = Path(args.out or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    params = cfg.model_params()
    for i, walk in walks_for(cfg, args.count):
        curve = cmod.model_curve(walk, params, scale_n=cfg.steps)
        path = out / f"{cfg.model}_{i:05d}.curve"
        write_curve(path, curve, model=cfg.model, N=cfg.steps, nu=f"{cfg.nu:.17g}", **{"lambda": f"{cfg.lam:g}"},
                    seed=cfg.seed, index=i)
        print(path)
    return EXIT_OK


def cmd_unzip(args) -> int:
    zcfg = FastZipConfig(args.block_len, args.series_order, args.threshold, args.method or "vertical")
    out = Path(args.out) if args.out else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    for name in args.curves:
        curve, meta = read_curve(name)
        try:
            d = unzip(curve, zcfg, t_max=args.t_max, naive=args.naive, skip_collapsed=args.skip_collapsed)
        except NumericFailure as exc:
            raise NumericFailure(f"{name}: {exc}") from exc
        dest = (out or Path(name).parent) / (Path(name).stem + ".driving")
        info = dict(steps=d.n_steps, T=f"{d.T:.17g}", method=zcfg.slit_kind, naive=int(args.naive))
        write_driving(dest, d.t, d.u, **info)
        print(f"{name}: steps={d.n_steps} T={d.T:.17g} U_T={d.U_T:.17g} skipped={d.extra['skipped']} -> {dest}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = _config_from_args(args)
    out = Path(cfg.out)

    def progress(done, total):
        log.info("unit %d/%d", done, total)

    res = exp.run_experiment(cfg, out, progress)
    r = res.report
    print(f"kappa = {r.kappa:.4f} +- {r.kappa_err:.4f}  ({cfg.samples} samples, mean steps {res.steps.mean():.0f})")
    print("p-values: " + " ".join(f"{k}={p:.6f}" for k, p in zip(exp.REPORT_HEADER[3:], r.p_values())))
    print(f"outputs in {out}")
    return EXIT_OK


def _bench_points(args, n_max):
    if args.walk:
        if args.walk.endswith(".npz"):
            x, y, _ = load_walk_codes(args.walk)
            pts = x + 1j * y
        else:
            pts = read_curve(args.walk)[0].points
    else:
        log.info("building a %d-step SAW (%d pivot proposals)", n_max, args.iterations)
        chain = cmod.PivotChain(n_max, args.seed)
        chain.run(args.iterations)
        w = chain.walk()
        pts = w.x + 1j * w.y
    if pts.size < n_max:
        raise ValidationError(f"walk has {pts.size} points, need {n_max}")
    pts = pts[:n_max]
    return pts / n_max ** cmod.DEFAULT_NU["saw"]


def cmd_bench(args) -> int:
    sizes = args.sizes
    pts = _bench_points(args, max(sizes))

    def progress(r):
        print(f"N={r.N_points}: naive {r.seconds_naive:.3f}s fast {r.seconds_fast:.3f}s (b={r.block_len}) "
              f"speedup {r.speedup:.2f}", flush=True)

    cfg = FastZipConfig(slit_kind=args.method or "vertical")
    recs = bench_mod.time_prefixes(pts, sizes, args.blocks, naive=not args.no_naive, naive_max=args.naive_max,
                                   repeats=args.repeats, cfg=cfg, progress=progress)
    if len(sizes) >= 2:
        print(f"log-log slope fast {bench_mod.loglog_slope(sizes, [r.seconds_fast for r in recs]):.3f}")
        naive = [r.seconds_naive for r in recs]
        if np.isfinite(naive).sum() >= 2:
            print(f"log-log slope naive {bench_mod.loglog_slope(sizes, naive):.3f}")
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        path = Path(args.out) / "timing.csv"
        bench_mod.write_timings(path, recs)
        print(f"wrote {path}")
    return EXIT_OK


def selftest_checks():
    """Fast closed-form checks; yields ``(name, ok, detail)``."""
    from .conformal_maps import VerticalSlit
    from .power_series import series_of_vertical
    from .stats import ks_sf
    from .zipper import Curve, unzip_fast, unzip_naive

    seg = Curve(np.concatenate(([0j], 0.3 + 1j * np.linspace(0.001, 1.0, 1000))))
    d = unzip_naive(seg)
    yield "vertical segment (naive)", abs(d.T - 0.25) < 1e-12 and abs(d.U_T - 0.3) < 1e-12, \
        f"T={d.T:.15g} U_T={d.U_T:.15g}"
    d = unzip_fast(seg)
    yield "vertical segment (fast)", abs(d.T - 0.25) < 1e-7 and abs(d.U_T - 0.3) < 1e-7, \
        f"T={d.T:.15g} U_T={d.U_T:.15g}"
    ref = [1.0, 0.0, -0.5, 0.0, 0.375, 0.0, -0.3125, 0.0, 0.2734375, 0.0, -0.24609375, 0.0]
    err = float(np.max(np.abs(series_of_vertical(VerticalSlit(0.0, 1.0), 12).coeffs - ref)))
    yield "vertical slit series", err < 1e-14, f"max error {err:.2e}"
    p = ks_sf(1.36)
    yield "KS tail at 1.36", 0.049 <= p <= 0.051, f"{p:.6f}"
    alpha = 1 / 3
    z = np.linspace(0, 1, 2001)[1:] * np.exp(1j * math.pi * alpha)
    d = unzip(Curve(np.concatenate(([0j], z))), FastZipConfig(slit_kind="tilted"))
    ratio = d.U_T / math.sqrt(d.T)
    yield "tilted straight line", abs(ratio - math.sqrt(2)) < 1e-3, f"U_T/sqrt(T)={ratio:.6f}"


def cmd_selftest(args) -> int:
    ok_all = True
    for name, ok, detail in selftest_checks():
        ok_all &= bool(ok)
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return EXIT_OK if ok_all else EXIT_NUMERIC


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="loewnerzip", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write model curves (distorted and rescaled) as curve files")
    _add_config_args(p, samples=False)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out", metavar="DIR")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("unzip", help="compute driving functions of curve files")
    p.add_argument("curves", nargs="+")
    _add_zip_args(p)
    p.add_argument("--series-order", type=int, default=12)
    p.add_argument("--threshold", type=float, default=4.0)
    p.add_argument("--t-max", type=float, help="stop at this capacity")
    p.add_argument("--skip-collapsed", action="store_true",
                   help="drop points whose images fall below double precision instead of failing")
    p.add_argument("--out", metavar="DIR", help="output directory (default: next to each input)")
    p.set_defaults(func=cmd_unzip)

    p = sub.add_parser("experiment", help="sample driving functions and run the Brownian motion tests")
    _add_config_args(p)
    _add_zip_args(p)
    p.add_argument("--out", metavar="DIR")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("bench", help="time naive and fast unzipping on prefixes of a SAW")
    p.add_argument("--walk", help="walk file (.npz step codes or curve file); default: build a SAW")
    p.add_argument("--sizes", type=int, nargs="+", default=[10_000, 20_000, 50_000])
    p.add_argument("--blocks", type=int, nargs="*", help="block lengths to scan")
    p.add_argument("--method", choices=SLIT_KINDS)
    p.add_argument("--no-naive", action="store_true")
    p.add_argument("--naive-max", type=int, help="skip naive timings above this size")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--iterations", type=int, default=1_000_000, help="pivot proposals when building a SAW")
    p.add_argument("--seed", type=int, default=2007)
    p.add_argument("--out", metavar="DIR")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("selftest", help="quick closed-form checks")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericFailure, LoewnerZipError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
