import math
import statistics
from itertools import permutations

import pytest

from conftest import commutator_core
from freescl.scl import scl, verify_fatgraph
from freescl.tripods import (RangeError, abstract_tripod_count, assemble_upper_bound, brute_force_tripod_copies,
                             default_edge_length, enumerate_tripods, imbalance_statistic, joint_of,
                             partner_arm)
from freescl.words import Chain


def test_abstract_count():
    assert abstract_tripod_count(2, 1) == 8
    # ordered letter triples with distinct letters, up to rotation
    assert len(list(permutations(range(4), 3))) // 3 == 8
    assert abstract_tripod_count(3, 2) == 6 * 5 * 4 * 5 ** 3 // 3


def test_enumeration_small():
    ts = enumerate_tripods("abAB", 1)
    assert len(ts.copies) == brute_force_tripod_copies("abAB", 1)
    assert ts.abstract_count == 8
    with pytest.raises(RangeError):
        enumerate_tripods("abAB", 3)


@pytest.mark.parametrize("n, seed", [(12, 0), (16, 1), (20, 2), (24, 3)])
def test_enumeration_matches_brute_force(n, seed):
    v = commutator_core(n, seed)
    for L in (1, 2):
        if 2 * L > len(v):
            continue
        assert len(enumerate_tripods(v, L).copies) == brute_force_tripod_copies(v, L)


@pytest.mark.parametrize("seed", range(3))
def test_tripod_labels_and_joints(seed):
    v = commutator_core(40, seed)
    codes = v.letters
    n = len(codes)
    L = 1
    for c in enumerate_tripods(v, L).copies:
        x, y, z = c.x, c.y, c.z
        assert len({x[-1], y[-1], z[-1]}) == 3
        for arm in c.arms(n):
            j = joint_of(codes, arm, L)
            p, q = j.first, j.second
            span_p = {(p + i) % n for i in range(j.L)}
            span_q = {(q + i) % n for i in range(j.L)}
            assert not span_p & span_q
            assert (p + j.L) % n != q and (q + j.L) % n != p
            other = partner_arm(codes, arm, L)
            assert partner_arm(codes, other, L) == arm


def test_imbalance_empty_and_bound():
    r = imbalance_statistic("abAB", 1)
    assert r.empty and (r.imbalance, r.mass) == (0, 0)
    for seed in range(3):
        r = imbalance_statistic(commutator_core(40, seed), 1)
        assert r.imbalance <= 2 * r.boundary_mass


@pytest.mark.parametrize("seed", range(3))
def test_imbalance_methods_agree(seed):
    v = commutator_core(60, seed)
    for L in (1, 2):
        a = imbalance_statistic(v, L, method="enumerate")
        b = imbalance_statistic(v, L, method="count")
        assert (a.imbalance, a.mass, a.boundary_mass) == (b.imbalance, b.mass, b.boundary_mass)


def test_boundary_linearity_and_iota_mass():
    """d is additive over disjoint tripod sets, and iota preserves the total joint mass."""
    from collections import Counter
    v = commutator_core(40, 0)
    codes, n = v.letters, len(v)
    copies = enumerate_tripods(v, 1).copies

    def d(cs):
        out = Counter()
        for c in cs:
            for arm in c.arms(n):
                out[arm] += 1
        return out

    half = len(copies) // 2
    assert d(copies[:half]) + d(copies[half:]) == d(copies)
    full = d(copies)
    iota = Counter({partner_arm(codes, a, 1): k for a, k in full.items()})
    assert sum(iota.values()) == sum(full.values())


def test_default_edge_length():
    assert default_edge_length(10_000) == math.floor(0.4 * math.log(10_000) / math.log(3))
    assert default_edge_length(10) == 1


def test_assemble_abAB():
    a = assemble_upper_bound("abAB", 1)
    assert a.upper_bound >= scl("abAB", mode="exact").value
    assert verify_fatgraph(a.fatgraph, Chain.from_words(["abAB"])).ok


@pytest.mark.parametrize("n, seed", [(16, 0), (16, 1), (24, 2), (32, 3)])
def test_assemble_is_upper_bound(n, seed):
    v = commutator_core(n, seed)
    exact = scl(Chain.from_words([v.word]), mode="exact").value
    for L in (1, 2):
        a = assemble_upper_bound(v, L)
        assert a.report.ok, a.report.failures
        assert a.upper_bound >= exact


@pytest.mark.parametrize("seed", range(3))
def test_assemble_sanity_ceiling(seed):
    n = 60
    v = commutator_core(n, seed)
    a = assemble_upper_bound(v, 1)
    assert a.report.ok
    assert a.upper_bound >= scl(Chain.from_words([v.word]), mode="inexact").value - 1e-9
    assert float(a.upper_bound) * math.log(n) / n <= 3 * math.log(3) / 6


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="measured median imbalance/mass is about 1.03 at n=1e4, L=3")
def test_imbalance_decay_diagnostic():
    n = 10_000
    L = default_edge_length(n)
    ratios = [imbalance_statistic(commutator_core(n, seed), L).ratio for seed in range(20)]
    assert statistics.median(ratios) <= 0.5


@pytest.mark.slow
def test_imbalance_relative_at_scale():
    """The normalized total variation distance between d mu and iota d mu is small."""
    n = 10_000
    L = default_edge_length(n)
    rel = [imbalance_statistic(commutator_core(n, seed), L).relative for seed in range(5)]
    assert statistics.median(rel) <= 0.25
