import sys
import argparse
import csv
import math
import os
from multiprocessing import Pool

# Allow running this script directly by ensuring project root is on sys.path
sys.path.append(os.path.dirname(os.path.dirname(__file__)))
from app.utils.geometry import detect_degeneration


def sweep(magnitude: float, lo: float, hi: float) -> tuple[float, list[float]]:
    return magnitude, detect_degeneration(magnitude, (lo, hi))


def main(magnitudes: list[float], lo: float, hi: float, out: str | None = None, workers: int = 1):
    with Pool(workers) as pool:
        results = pool.starmap(sweep, [(magnitude, lo, hi) for magnitude in magnitudes])
    rows = [(magnitude, root, root - math.pi / 2) for magnitude, roots in results for root in roots]
    print(f"Critical angles found: {len(rows)}")
    for magnitude, root, offset in rows:
        print(f"|c|={magnitude:g}: arg c = {root:.15f} (arg c - pi/2 = {offset:.3e})")
    if out:
        with open(out, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["abs_c", "arg_c", "offset_from_half_pi"])
            writer.writerows(rows)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Locate arg c where the P-Stokes geometry degenerates")
    parser.add_argument("magnitudes", nargs="*", type=float, default=[0.5, 1.0, 2.0])
    parser.add_argument("--lo", type=float, default=0.1)
    parser.add_argument("--hi", type=float, default=math.pi - 0.1)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", default=None)
    args = parser.parse_args()
    main(args.magnitudes, args.lo, args.hi, args.out, args.workers)
