"""Pick the capacity horizon T that gives a target mean number of unzipped steps.

    python scripts/calibrate_horizon.py lerw 10000 2000 --samples 200
"""
import argparse

import numpy as np

from loewnerzip import curve_models as cmod
from loewnerzip.experiment import ExperimentConfig, saw_unit_walks
from loewnerzip.zipper import unzip_fast


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("model", choices=cmod.MODELS)
    ap.add_argument("steps", type=int)
    ap.add_argument("target", type=float, help="desired mean number of unzipped steps")
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=999)
    ap.add_argument("--t-cap", type=float, default=None,
                    help="stop unzipping here; deep fjords exhaust double precision")
    args = ap.parse_args()

    cfg = ExperimentConfig(model=args.model, steps=args.steps, samples=max(30, args.samples), seed=args.seed,
                           chain_samples=args.samples)
    params = cfg.model_params()
    if args.model == "saw":
        walks = saw_unit_walks(cfg, 0)[: args.samples]
    elif args.model == "lerw":
        walks = [cmod.generate_lerw(args.steps, cmod.stream_seed(args.seed, i)) for i in range(args.samples)]
    else:
        walks = [cmod.generate_percolation_interface(args.steps, cmod.stream_seed(args.seed, i))
                 for i in range(args.samples)]
    caps = [unzip_fast(cmod.model_curve(w, params), t_max=args.t_cap, skip_collapsed=True).t for w in walks]
    grid = np.geomspace(min(c[-1] for c in caps) / 100, max(c[-1] for c in caps), 400)

    def mean_steps(T):
        return np.mean([np.searchsorted(c, T) if c[-1] >= T else len(c) for c in caps])

    means = np.array([mean_steps(T) for T in grid])
    T = float(np.interp(args.target, means, grid))
    short = np.mean([c[-1] < T for c in caps])
    need = [np.searchsorted(c, T) for c in caps if c[-1] >= T]
    print(f"T = {T:.5g}: mean steps {mean_steps(T):.0f}, max {max(need)}, "
          f"fraction of walks too short {short:.3f}")


if __name__ == "__main__":
    main()
