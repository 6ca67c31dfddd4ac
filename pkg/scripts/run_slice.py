"""scl over an integer grid in the plane spanned by two words; emits unit ball data."""
import argparse
from pathlib import Path

from freescl.experiments import SliceConfig, run_slice

WORDS = ["AbaBAbaBBAbaabaaBAAA", "baaabAAbaabABAABBABa"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("words", nargs="*", default=WORDS)
    ap.add_argument("--grid", type=int, default=2)
    ap.add_argument("--mode", choices=["exact", "inexact"], default="inexact")
    ap.add_argument("--out", type=Path, default=Path("runs/slice"))
    args = ap.parse_args()
    man, res = run_slice(SliceConfig(args.words, args.grid, args.mode), args.out)
    man.dump(args.out / "manifest.json")
    print(f"symmetric {res.symmetric}  convex {res.convex}  additivity defect {res.additivity_defect}")
    for t, v in sorted(res.values.items()):
        print(t, v)


if __name__ == "__main__":
    main()
