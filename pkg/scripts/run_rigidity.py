"""scl of random commutator words over a range of lengths, against the theory and heuristic curves."""
import argparse
from pathlib import Path

from freescl.experiments import RigidityConfig, run_rigidity


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--n-min", type=int, default=40)
    ap.add_argument("--n-max", type=int, default=100)
    ap.add_argument("--step", type=int, default=10)
    ap.add_argument("--samples", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--upper", action="store_true", help="also run the tripod upper bound")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("runs/rigidity"))
    args = ap.parse_args()
    cfg = RigidityConfig(args.k, args.n_min, args.n_max, args.step, args.samples, args.seed, "inexact",
                         args.upper, True, args.jobs)
    man, rows = run_rigidity(cfg, args.out)
    man.dump(args.out / "manifest.json")
    by_n = {}
    for r in rows:
        if r.normalized is not None:
            by_n.setdefault(r.n, []).append(r.normalized)
    for n, vals in sorted(by_n.items()):
        print(f"n={n:4d}  mean scl/heuristic {sum(vals) / len(vals):.4f} over {len(vals)} words")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
