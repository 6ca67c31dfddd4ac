import json
import subprocess
import sys
from fractions import Fraction

import pytest

from freescl.cli import main
from freescl.experiments import (PhaseConfig, RigidityConfig, RunManifest, SliceConfig, fmt, replay,
                                 rigidity_sample, run_phase, run_rigidity, slice_values, word_seed)
from freescl.scl.gluing import heuristic_value, theory_value

SLICE_WORDS = ["AbaBAbaBBAbaabaaBAAA", "baaabAAbaabABAABBABa"]


def test_curves():
    assert theory_value(240) == pytest.approx(8.018, abs=1e-3)
    assert heuristic_value(240) == pytest.approx(6.679, abs=1e-3)


def test_fmt_and_seeds():
    assert fmt(Fraction(1, 2)) == "1/2" and fmt(None) == ""
    assert fmt(0.1) == "0.1"
    assert len({word_seed(0, n, s) for n in (40, 50) for s in range(20)}) == 40


def test_phase_reproducible(tmp_path):
    cfg = PhaseConfig(n=2000, seeds=[0, 1], ell_max=6)
    man, res = run_phase(cfg, tmp_path / "a")
    assert res.rows[0][1] == 0
    man.dump(tmp_path / "a" / "manifest.json")
    new, same = replay(RunManifest.load(tmp_path / "a" / "manifest.json"), tmp_path / "b")
    assert same and all(same.values())
    assert (tmp_path / "a" / "phase.csv").read_bytes() == (tmp_path / "b" / "phase.csv").read_bytes()
    assert (tmp_path / "a" / "phase.csv").read_text().startswith("# freescl-csv/1")


def test_rigidity_rows(tmp_path):
    cfg = RigidityConfig(n_min=16, n_max=20, step=4, samples=3, mode="exact", upper=True)
    man, rows = run_rigidity(cfg, tmp_path / "a")
    assert len(rows) == 6 and not any(r.error for r in rows)
    assert all(r.consistent() for r in rows)
    _, same = replay(man, tmp_path / "b")
    assert all(same.values())
    row = rigidity_sample(cfg, 16, 0)
    assert row.as_list()[0] == 16


def test_slice_small():
    r = slice_values(SliceConfig(["abAB", "baBA"], grid=2, mode="exact"))
    assert r.values[(1, 0)] == Fraction(1, 2) and r.values[(1, 1)] == 0
    assert r.symmetric and r.convex


def test_slice_two_long_words():
    r = slice_values(SliceConfig(SLICE_WORDS, grid=1, mode="inexact"))
    assert r.symmetric and r.convex
    assert all(v > 0 for v in r.values.values())


def test_slice_needs_boundaries():
    from freescl.scl import NotABoundaryError
    with pytest.raises(NotABoundaryError):
        slice_values(SliceConfig(["ab", "abAB"], grid=1))


# ---------------------------------------------------------------- CLI


def test_cli_scl(capsys, tmp_path):
    assert main(["scl", "abAB + 2*aabAAB", "--mode", "exact", "--fatgraph", str(tmp_path / "f.json")]) == 0
    out = capsys.readouterr().out
    assert "verified=True" in out
    assert main(["--mode", "exact", "scl", "abAB"]) == 0
    assert "= 1/2" in capsys.readouterr().out


def test_cli_exit_codes(capsys):
    assert main(["scl", "ab"]) == 3
    assert main(["scl", "ab + *"]) == 3
    assert main(["sample", "5"]) == 3
    assert main(["spectra", "--level", "20"]) == 4
    assert main(["certify", "--random", "2"]) == 4
    with pytest.raises(SystemExit) as e:
        main(["scl"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["certify"])
    assert e.value.code == 2


def test_cli_certificate_roundtrip(capsys, tmp_path):
    path = tmp_path / "cert.json"
    assert main(["certify", "--random", "200", "--seed", "3", "--out", str(path)]) == 0
    capsys.readouterr()
    assert main(["verify-certificate", str(path)]) == 0
    assert json.loads(capsys.readouterr().out)["ok"]
    data = json.loads(path.read_text())
    data["value"] = str(Fraction(data["value"]) + 1)
    path.write_text(json.dumps(data))
    assert main(["verify-certificate", str(path)]) == 3


def test_cli_tripod_spectra_cheeger(capsys, tmp_path):
    assert main(["tripod-upper", "--random", "24", "--L", "1", "--out", str(tmp_path / "t.json")]) == 0
    assert main(["spectra", "--level", "1", "--triplets", str(tmp_path / "p.txt")]) == 0
    out = capsys.readouterr().out
    assert json.loads(out[out.index("{"):])["vertices"] == 4
    assert (tmp_path / "p.txt").read_text().startswith("# freescl-sparse/1")
    assert main(["cheeger", "--level", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["cheeger"]["h"] == "1/3"


def test_cli_phase_and_replay(capsys, tmp_path):
    out = tmp_path / "phase"
    assert main(["phase", "--n", "1000", "--seeds", "2", "--ell-max", "4", "--out", str(out)]) == 0
    assert main(["replay", str(out / "manifest.json"), "--out", str(tmp_path / "again")]) == 0
    assert "phase.csv: identical" in capsys.readouterr().out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "freescl", "scl", "abABabAB"], capture_output=True, text=True)
    assert r.returncode == 0 and "= 1 " in r.stdout
