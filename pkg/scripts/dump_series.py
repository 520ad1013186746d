import sys
import argparse
import os

# Allow running this script directly by ensuring project root is on sys.path
sys.path.append(os.path.dirname(os.path.dirname(__file__)))
from app.api.series import build_dump
from app.context import init_tower


def main(K: int, N: int, normalization: str, out: str | None = None):
    init_tower()
    dump = build_dump(K, N, normalization)
    text = dump.model_dump_json(indent=2)
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
        print(f"Wrote series K={K}, N={N} ({normalization}) to {out}")
    else:
        print(text)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Dump the formal series as JSON")
    parser.add_argument("--K", type=int, default=1)
    parser.add_argument("--N", type=int, default=4)
    parser.add_argument("--normalization", choices=["tau1", "inf"], default="tau1")
    parser.add_argument("--out", default=None)
    args = parser.parse_args()
    main(args.K, args.N, args.normalization, args.out)
