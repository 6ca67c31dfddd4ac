"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 domain error (not a boundary, wrong
parity, bad word), 4 capacity (size caps, exhausted sampling or assembly).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .experiments import (PhaseConfig, RigidityConfig, RunManifest, SliceConfig, replay, run_phase,
                          run_rigidity, run_slice)
from .quasimorphisms import DegenerateError, InvalidSetError, rigidity_certificate, verify_certificate
from .sampling import (ExhaustionError, ParityError, RandomWordSpec, random_commutator_word, sample)
from .sampling import RangeError as SamplingRangeError
from .scl import NotABoundaryError, extract_fatgraph, scl, verify_fatgraph
from .spectra import CapacityError, build_digraph, cheeger_constant, report_json, spectral_report
from .tripods import AssemblyFailure, assemble_upper_bound
from .tripods import RangeError as TripodRangeError
from .words import Alphabet, AlphabetError, ChainSyntaxError, CyclicWord, Word, cyclic_reduce, parse_chain

log = logging.getLogger("freescl")

DOMAIN_ERRORS = (NotABoundaryError, ParityError, AlphabetError, ChainSyntaxError, DegenerateError,
                 InvalidSetError, SamplingRangeError, TripodRangeError)
CAPACITY_ERRORS = (CapacityError, ExhaustionError, AssemblyFailure)


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--rank", type=int, default=d(2), help="number of generators k")
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--mode", choices=["exact", "inexact", "auto"], default=d("auto"))
    p.add_argument("--out", type=Path, default=d(None), help="output directory or file")
    p.add_argument("--manifest", type=Path, default=d(None), help="where to write the run manifest")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freescl", description="stable commutator length lab")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    p = add("sample", "random reduced words")
    p.add_argument("n", type=int)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--free", action="store_true", help="do not condition on [F,F]")

    p = add("scl", "scl of a chain such as 'abAB + 2*aabAAB'")
    p.add_argument("chain")
    p.add_argument("--fatgraph", type=Path, help="write an extremal fatgraph (exact mode)")

    p = add("certify", "quasimorphism lower bound for a word")
    _word_source(p)
    p.add_argument("--epsilon", type=float, default=0.25)
    p.add_argument("--offset", default="0", help="tiling offset or 'best'")

    p = add("verify-certificate", "re-check a certificate from its JSON file")
    p.add_argument("path", type=Path)

    p = add("tripod-upper", "upper bound from tripod gluing")
    _word_source(p)
    p.add_argument("--L", type=int, default=None, help="tripod edge length")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--budget", type=int, default=200_000)

    p = add("phase", "A_l statistics of random words")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--ell-max", type=int, default=11)
    p.add_argument("--cyclic", action="store_true")

    p = add("rigidity", "scl of random words against the theory and heuristic curves")
    p.add_argument("--n-min", type=int, default=40)
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--step", type=int, default=10)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--upper", action="store_true", help="also compute tripod upper bounds")
    p.add_argument("--jobs", type=int, default=1)

    p = add("slice", "scl over a grid in the span of 2 or 3 words")
    p.add_argument("words", nargs="+")
    p.add_argument("--grid", type=int, default=2)

    p = add("spectra", "spectrum of the subword digraph X_i")
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--J", type=int, default=12, help="highest trace power")
    p.add_argument("--triplets", type=Path, help="write P_i in sparse triplet form")

    p = add("cheeger", "Cheeger constant of X_i")
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--samples", type=int, default=2000)

    p = add("replay", "re-run a manifest and compare output digests")
    p.add_argument("path", type=Path)
    return parser


def _word_source(p):
    p.add_argument("word", nargs="?", help="a word in [F,F]; omit with --random")
    p.add_argument("--random", type=int, metavar="N", help="use a random word of length N")


def _get_word(args) -> CyclicWord:
    if args.random is not None:
        w = random_commutator_word(RandomWordSpec(Alphabet(args.rank), args.random, args.seed, True))
    elif args.word:
        w = Word.parse(args.word, Alphabet(args.rank))
    else:
        raise SystemExit(_usage("give a word or --random N"))
    core, _ = cyclic_reduce(w)
    return core


def _usage(msg: str) -> int:
    print(f"freescl: error: {msg}", file=sys.stderr)
    return 2


def _emit(args, text: str, name: str) -> None:
    if args.out is None:
        print(text)
        return
    path = args.out if args.out.suffix else args.out / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + "\n")
    print(path)


def _mode(args) -> str | None:
    return None if args.mode == "auto" else args.mode


def _experiment_done(args, man: RunManifest, out: Path) -> None:
    path = args.manifest or out / "manifest.json"
    man.dump(path)
    for f, h in man.outputs.items():
        print(f"{out / f}  sha256={h[:16]}")
    print(f"manifest: {path}")


def run(args) -> int:
    cmd = args.command
    if cmd == "sample":
        for j in range(args.count):
            spec = RandomWordSpec(Alphabet(args.rank), args.n, args.seed + j, not args.free)
            print(sample(spec))
    elif cmd == "scl":
        c = parse_chain(args.chain, args.rank)
        res = scl(c, mode=_mode(args))
        print(f"scl({c}) = {res.value}  [{res.mode}]")
        if args.fatgraph:
            fg = extract_fatgraph(res)
            rep = verify_fatgraph(fg, c)
            args.fatgraph.write_text(fg.dumps() + "\n")
            print(f"fatgraph: {args.fatgraph}  verified={rep.ok}")
    elif cmd == "certify":
        offset = args.offset if args.offset == "best" else int(args.offset)
        cert = rigidity_certificate(_get_word(args), args.epsilon, args.rank, offset)
        _emit(args, cert.dumps(), "certificate.json")
        print(f"lower bound {cert.lower_bound} (~{float(cert.lower_bound):.6g})", file=sys.stderr)
    elif cmd == "verify-certificate":
        chk = verify_certificate(args.path.read_text())
        print(json.dumps({"ok": chk.ok, "lower_bound": str(chk.lower_bound), "failures": chk.failures}))
        return 0 if chk.ok else 3
    elif cmd == "tripod-upper":
        asm = assemble_upper_bound(_get_word(args), args.L, args.budget, args.epsilon)
        _emit(args, asm.fatgraph.dumps(), "fatgraph.json")
        print(f"upper bound {asm.upper_bound} (~{float(asm.upper_bound):.6g}); tripods {asm.tripods}, "
              f"N {asm.multiplicity}", file=sys.stderr)
    elif cmd == "phase":
        cfg = PhaseConfig(args.rank, args.n, list(range(args.seed, args.seed + args.seeds)), args.ell_max,
                          True, args.cyclic)
        out = args.out or Path("runs/phase")
        man, res = run_phase(cfg, out)
        print(f"m = {res.m:.6f}")
        for ell, mean, lo, hi in res.rows:
            print(f"A_{ell}: mean {float(mean):.4f} min {float(lo):.4f} max {float(hi):.4f}")
        _experiment_done(args, man, out)
    elif cmd == "rigidity":
        mode = "inexact" if args.mode == "auto" else args.mode
        cfg = RigidityConfig(args.rank, args.n_min, args.n_max, args.step, args.samples, args.seed, mode,
                             args.upper, True, args.jobs)
        out = args.out or Path("runs/rigidity")
        man, rows = run_rigidity(cfg, out)
        bad = [r for r in rows if not r.consistent()]
        failed = [r for r in rows if r.error]
        print(f"{len(rows)} samples, {len(failed)} failed, {len(bad)} sandwich violations")
        _experiment_done(args, man, out)
    elif cmd == "slice":
        cfg = SliceConfig(args.words, args.grid, _mode(args), args.rank)
        out = args.out or Path("runs/slice")
        man, res = run_slice(cfg, out)
        print(f"symmetric {res.symmetric}, convex {res.convex}, additivity defect {res.additivity_defect}")
        _experiment_done(args, man, out)
    elif cmd == "spectra":
        g = build_digraph(args.rank, args.level)
        rep = spectral_report(g, args.J)
        if args.triplets:
            args.triplets.write_text(g.to_triplets())
        _emit(args, report_json(g, rep, None), "spectra.json")
    elif cmd == "cheeger":
        g = build_digraph(args.rank, args.level)
        rep = cheeger_constant(g, args.samples, args.seed)
        _emit(args, report_json(g, None, rep), "cheeger.json")
    elif cmd == "replay":
        man = RunManifest.load(args.path)
        out = args.out or args.path.parent / "replay"
        new, same = replay(man, out)
        for f, ok in same.items():
            print(f"{f}: {'identical' if ok else 'DIFFERENT'}")
        return 0 if all(same.values()) else 1
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except DOMAIN_ERRORS as e:
        print(f"freescl: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    except CAPACITY_ERRORS as e:
        print(f"freescl: {type(e).__name__}: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
