"""Experiment drivers: phase transition of A_l, rigidity of scl, and scl-norm slices.

Every driver takes a dataclass config, writes CSV (and SVG polyline) files to
an output directory and returns a :class:`RunManifest`.  CSVs contain no
timestamps, so re-running a manifest's config reproduces them byte for byte.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path

from . import __version__
from .quasimorphisms import rigidity_certificate
from .sampling import RandomWordSpec, ScaleParameters, random_commutator_word, sample, subword_stats
from .scl.gluing import heuristic_value, scl, theory_value
from .tripods import assemble_upper_bound
from .words import Alphabet, Chain, Word, cyclic_reduce

CSV_SCHEMA = "freescl-csv/1"


def fmt(x) -> str:
    """Stable text form: exact rationals as p/q, floats with 12 significant digits."""
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["# " + CSV_SCHEMA])
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    path.write_text(buf.getvalue())


def write_svg(path: Path, series: dict[str, list[tuple[float, float]]], marks: dict[str, float] | None = None,
              width: int = 640, height: int = 400) -> None:
    """Raw polylines in data coordinates mapped to the canvas; no axes or styling beyond color."""
    pts = [p for s in series.values() for p in s]
    if not pts:
        path.write_text('<svg xmlns="http://www.w3.org/2000/svg"/>\n')
        return
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    if marks:
        x0, x1 = min([x0] + list(marks.values())), max([x1] + list(marks.values()))
    sx = (width - 40) / (x1 - x0 or 1)
    sy = (height - 40) / (y1 - y0 or 1)

    def xy(x, y):
        return f"{20 + (x - x0) * sx:.3f},{height - 20 - (y - y0) * sy:.3f}"

    colors = ["black", "blue", "red", "green", "gray"]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">']
    for i, (name, s) in enumerate(series.items()):
        pts_s = " ".join(xy(x, y) for x, y in s)
        out.append(f'<polyline id="{name}" fill="none" stroke="{colors[i % len(colors)]}" points="{pts_s}"/>')
    for name, x in (marks or {}).items():
        out.append(f'<line id="{name}" x1="{xy(x, y0).split(",")[0]}" y1="20" '
                   f'x2="{xy(x, y0).split(",")[0]}" y2="{height - 20}" stroke="gray"/>')
    out.append("</svg>")
    path.write_text("\n".join(out) + "\n")


def digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    version: str = __version__
    started: str = ""
    finished: str = ""
    outputs: dict[str, str] = field(default_factory=dict)    # file name -> sha256

    def to_json(self) -> dict:
        return asdict(self)

    def dump(self, path: Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: Path) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text()))


def _stamp() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())


def _finish(manifest: RunManifest, out: Path, files: list[str]) -> RunManifest:
    manifest.outputs = {f: digest(out / f) for f in files}
    manifest.finished = _stamp()
    return manifest


def word_seed(base: int, n: int, sample: int) -> int:
    """Deterministic per-sample seed, independent of evaluation order."""
    return base * 1_000_003 + n * 1009 + sample


# ---------------------------------------------------------------- phase


@dataclass
class PhaseConfig:
    k: int = 2
    n: int = 10_000
    seeds: list[int] = field(default_factory=lambda: list(range(10)))
    ell_max: int = 11
    conditioned: bool = True
    cyclic: bool = False


@dataclass
class PhaseResult:
    m: float
    rows: list[tuple[int, Fraction, Fraction, Fraction]]     # ell, mean, min, max
    per_seed: dict[int, list[Fraction]]


def phase_statistics(cfg: PhaseConfig) -> PhaseResult:
    alphabet = Alphabet(cfg.k)
    per_seed = {}
    for seed in cfg.seeds:
        v = sample(RandomWordSpec(alphabet, cfg.n, seed, cfg.conditioned))
        per_seed[seed] = [subword_stats(v, ell, cfg.cyclic).A() for ell in range(1, cfg.ell_max + 1)]
    rows = []
    for j in range(cfg.ell_max):
        vals = [per_seed[s][j] for s in cfg.seeds]
        rows.append((j + 1, sum(vals, Fraction(0)) / len(vals), min(vals), max(vals)))
    return PhaseResult(ScaleParameters(cfg.n, cfg.k).m, rows, per_seed)


def run_phase(cfg: PhaseConfig, out: Path) -> tuple[RunManifest, PhaseResult]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    man = RunManifest("phase", asdict(cfg), started=_stamp())
    res = phase_statistics(cfg)
    write_csv(out / "phase.csv", ["ell", "mean_A", "min_A", "max_A", "mean_A_float", "m"],
              [[ell, mean, lo, hi, float(mean), res.m] for ell, mean, lo, hi in res.rows])
    write_svg(out / "phase.svg",
              {"mean": [(ell, float(mean)) for ell, mean, _, _ in res.rows],
               "min": [(ell, float(lo)) for ell, _, lo, _ in res.rows],
               "max": [(ell, float(hi)) for ell, _, _, hi in res.rows]},
              {"m": res.m})
    return _finish(man, out, ["phase.csv", "phase.svg"]), res


# ---------------------------------------------------------------- rigidity


@dataclass
class RigidityConfig:
    k: int = 2
    n_min: int = 40
    n_max: int = 100
    step: int = 10
    samples: int = 20
    seed: int = 0
    mode: str = "inexact"
    upper: bool = False          # tripod upper bound per sample
    lower: bool = True           # certificate lower bound per sample
    jobs: int = 1

    def lengths(self) -> list[int]:
        return list(range(self.n_min, self.n_max + 1, self.step))


@dataclass
class ExperimentRow:
    n: int
    seed: int
    core_length: int
    scl: Fraction | float | None
    mode: str
    lower: Fraction | None = None
    upper: Fraction | None = None
    theory: float = 0.0
    heuristic: float = 0.0
    error: str = ""

    @property
    def normalized(self) -> float | None:
        return None if self.scl is None else float(self.scl) / self.heuristic

    def consistent(self) -> bool:
        if self.scl is None:
            return True
        tol = 0 if self.mode == "exact" else 1e-7
        ok = True
        if self.lower is not None:
            ok &= self.lower <= self.scl + tol
        if self.upper is not None:
            ok &= self.scl <= self.upper + tol
        return bool(ok)

    def as_list(self) -> list:
        return [self.n, self.seed, self.core_length, self.scl, self.mode, self.lower, self.upper,
                self.theory, self.heuristic, self.normalized, self.error]


ROW_HEADER = ["n", "seed", "core_length", "scl", "mode", "certificate_lower", "tripod_upper",
              "theory", "heuristic", "scl_over_heuristic", "error"]


def rigidity_sample(cfg: RigidityConfig, n: int, s: int) -> ExperimentRow:
    seed = word_seed(cfg.seed, n, s)
    row = ExperimentRow(n, seed, 0, None, cfg.mode, theory=theory_value(n, cfg.k),
                        heuristic=heuristic_value(n, cfg.k))
    try:
        w = random_commutator_word(RandomWordSpec(Alphabet(cfg.k), n, seed, True))
        core, _ = cyclic_reduce(w)
        row.core_length = len(core)
        row.scl = scl(Chain.from_words([w], rank=cfg.k), mode=cfg.mode).value
        if cfg.lower:
            row.lower = rigidity_certificate(core, rank=cfg.k).lower_bound
        if cfg.upper:
            row.upper = assemble_upper_bound(core).upper_bound
    except Exception as e:       # recorded per sample; the run continues
        row.error = f"{type(e).__name__}: {e}"
    return row


def _sample_task(args):
    return rigidity_sample(*args)


def rigidity_rows(cfg: RigidityConfig) -> list[ExperimentRow]:
    tasks = [(cfg, n, s) for n in cfg.lengths() for s in range(cfg.samples)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as ex:
            return list(ex.map(_sample_task, tasks))
    return [_sample_task(t) for t in tasks]


def _mean(vals):
    if not vals:
        return None
    if all(isinstance(v, Fraction) for v in vals):
        return sum(vals, Fraction(0)) / len(vals)
    return math.fsum(float(v) for v in vals) / len(vals)


def run_rigidity(cfg: RigidityConfig, out: Path) -> tuple[RunManifest, list[ExperimentRow]]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    man = RunManifest("rigidity", asdict(cfg), started=_stamp())
    rows = rigidity_rows(cfg)
    write_csv(out / "rigidity.csv", ROW_HEADER, [r.as_list() for r in rows])
    summary = []
    for n in cfg.lengths():
        good = [r for r in rows if r.n == n and r.scl is not None]
        summary.append([n, len(good), _mean([r.scl for r in good]),
                        _mean([r.lower for r in good if r.lower is not None]),
                        _mean([r.upper for r in good if r.upper is not None]),
                        theory_value(n, cfg.k), heuristic_value(n, cfg.k),
                        _mean([r.normalized for r in good])])
    write_csv(out / "rigidity_summary.csv",
              ["n", "samples", "mean_scl", "mean_lower", "mean_upper", "theory", "heuristic",
               "mean_scl_over_heuristic"], summary)
    write_svg(out / "rigidity.svg",
              {"scl": [(r.n, float(r.scl)) for r in rows if r.scl is not None],
               "theory": [(n, theory_value(n, cfg.k)) for n in cfg.lengths()],
               "heuristic": [(n, heuristic_value(n, cfg.k)) for n in cfg.lengths()]})
    return _finish(man, out, ["rigidity.csv", "rigidity_summary.csv", "rigidity.svg"]), rows


# ---------------------------------------------------------------- slice


@dataclass
class SliceConfig:
    words: list[str]
    grid: int = 2
    mode: str | None = None
    rank: int = 2


@dataclass
class SliceResult:
    values: dict[tuple[int, ...], Fraction | float]
    symmetric: bool
    convex: bool
    additivity_defect: Fraction | float | None


def _slice_chain(words, t, rank) -> Chain:
    return Chain.from_words(words, coefficients=list(t), rank=rank)


def slice_values(cfg: SliceConfig) -> SliceResult:
    d = len(cfg.words)
    if d not in (2, 3):
        raise ValueError("slices need two or three words")
    words = [Word.parse(w) for w in cfg.words]
    for w in words:
        scl(Chain.from_words([w], rank=cfg.rank), mode="inexact")   # NotABoundaryError per word
    G = cfg.grid
    pts = [t for t in product(range(-G, G + 1), repeat=d) if any(t)]
    vals = {t: scl(_slice_chain(words, t, cfg.rank), mode=cfg.mode).value for t in pts}
    exact = all(isinstance(v, Fraction) for v in vals.values())
    tol = 0 if exact else 1e-7
    symmetric = all(abs(vals[t] - vals[tuple(-x for x in t)]) <= tol for t in pts)
    convex = True
    for t, s in product(pts, repeat=2):
        mid = tuple(a + b for a, b in zip(t, s))
        if any(x % 2 for x in mid):
            continue
        mid = tuple(x // 2 for x in mid)
        vm = vals.get(mid, 0) if any(mid) else 0
        if vm > (vals[t] + vals[s]) / 2 + tol:
            convex = False
    one = tuple([1, 1] + [0] * (d - 2))
    e1 = tuple([1] + [0] * (d - 1))
    e2 = tuple([0, 1] + [0] * (d - 2))
    defect = abs(vals[one] - vals[e1] - vals[e2])
    return SliceResult(vals, symmetric, convex, defect)


def run_slice(cfg: SliceConfig, out: Path) -> tuple[RunManifest, SliceResult]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    man = RunManifest("slice", asdict(cfg), started=_stamp())
    res = slice_values(cfg)
    d = len(cfg.words)
    rows = []
    for t, v in res.values.items():
        ball = [None] * d if v == 0 else [x / float(v) for x in t]
        rows.append(list(t) + [v] + ball)
    write_csv(out / "slice.csv",
              [f"t{i + 1}" for i in range(d)] + ["scl"] + [f"ball{i + 1}" for i in range(d)], rows)
    write_csv(out / "slice_checks.csv", ["symmetric", "convex", "additivity_defect"],
              [[res.symmetric, res.convex, res.additivity_defect]])
    files = ["slice.csv", "slice_checks.csv"]
    if d == 2:
        pts = sorted((math.atan2(t[1], t[0]), t[0] / float(v), t[1] / float(v))
                     for t, v in res.values.items() if v)
        write_svg(out / "slice.svg", {"ball": [(x, y) for _, x, y in pts + pts[:1]]})
        files.append("slice.svg")
    return _finish(man, out, files), res


# ---------------------------------------------------------------- replay


RUNNERS = {
    "phase": (PhaseConfig, run_phase),
    "rigidity": (RigidityConfig, run_rigidity),
    "slice": (SliceConfig, run_slice),
}


def replay(manifest: RunManifest, out: Path) -> tuple[RunManifest, dict[str, bool]]:
    """Re-run a manifest's config into ``out`` and compare output digests file by file."""
    if manifest.command not in RUNNERS:
        raise ValueError(f"no replay for command {manifest.command!r}")
    cls, runner = RUNNERS[manifest.command]
    new, _ = runner(cls(**manifest.config), out)
    same = {f: new.outputs.get(f) == h for f, h in manifest.outputs.items()}
    return new, same
