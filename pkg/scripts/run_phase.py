"""A_l statistics of random commutator words across l, with the scale m marked."""
import argparse
from pathlib import Path

from freescl.experiments import PhaseConfig, run_phase


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--ell-max", type=int, default=11)
    ap.add_argument("--out", type=Path, default=Path("runs/phase"))
    args = ap.parse_args()
    cfg = PhaseConfig(args.k, args.n, list(range(args.seeds)), args.ell_max)
    man, res = run_phase(cfg, args.out)
    man.dump(args.out / "manifest.json")
    print(f"m = {res.m:.4f}")
    for ell, mean, lo, hi in res.rows:
        print(f"A_{ell:<2d} mean {float(mean):.4f}  [{float(lo):.4f}, {float(hi):.4f}]")


if __name__ == "__main__":
    main()
