"""Spectra, traces and Cheeger constants of the subword digraphs X_1 .. X_max."""
import argparse
import json
from pathlib import Path

from freescl.spectra import build_digraph, cheeger_constant, report_json, spectral_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--max-level", type=int, default=4)
    ap.add_argument("--samples", type=int, default=5000)
    ap.add_argument("--out", type=Path, default=Path("runs/spectra"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for i in range(1, args.max_level + 1):
        g = build_digraph(args.k, i)
        spec = spectral_report(g)
        ch = cheeger_constant(g, samples=args.samples)
        (args.out / f"X{i}.json").write_text(report_json(g, spec, ch) + "\n")
        lo, hi = float(ch.h) ** 2 / 2, 2 * float(ch.h)
        print(f"X_{i}: {g.n_vertices} vertices, lambda1 {spec.lambda1:.6f}, h {ch.h} ({ch.method}), "
              f"Chung interval [{lo:.4f}, {hi:.4f}] holds {lo <= spec.lambda1 <= hi}")
    print(json.dumps({"traces X_1": spectral_report(build_digraph(args.k, 1)).traces[1:7]}))


if __name__ == "__main__":
    main()
