"""Run the acceptance suite and print one PASS/FAIL line per criterion.

    python3 scripts/run_acceptance.py              # A1-A7, A9, A10 (about 35 min on one core)
    python3 scripts/run_acceptance.py --extended   # also A8 (hours)
    python3 scripts/run_acceptance.py -k "a1 or a9"
"""
import argparse
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--extended", action="store_true", help="include the multi-hour distortion check")
    ap.add_argument("-k", dest="select", help="pytest -k expression")
    args = ap.parse_args(argv)
    cmd = [str(ROOT / "tests" / "test_acceptance.py"), "-q", "-p", "no:cacheprovider"]
    if args.extended:
        cmd.append("--run-extended")
    if args.select:
        cmd += ["-k", args.select]
    return pytest.main(cmd)


if __name__ == "__main__":
    sys.exit(main())
