"""Build the long half-plane SAW used by the timing and accuracy benchmarks.

    python scripts/make_saw_fixture.py tests/data/saw_200k.npz --steps 200000 --iterations 1000000
"""
import argparse
import time

from loewnerzip.curve_models import PivotChain
from loewnerzip.fileio import save_walk_codes


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out")
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--iterations", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=2007)
    args = ap.parse_args()

    chain = PivotChain(args.steps, args.seed)
    t0 = time.time()
    chunk = 50_000
    done = 0
    while done < args.iterations:
        n = min(chunk, args.iterations - done)
        chain.run(n)
        done += n
        print(f"{done} iterations, {chain.accepted} accepted, {time.time() - t0:.0f}s", flush=True)
    w = chain.walk()
    save_walk_codes(args.out, w.x, w.y, seed=args.seed, iterations=args.iterations)


if __name__ == "__main__":
    main()
