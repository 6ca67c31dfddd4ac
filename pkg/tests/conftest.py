import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from freescl.sampling import RandomWordSpec, random_commutator_word
from freescl.scl import gluing
from freescl.words import Alphabet, Word, cyclic_reduce

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def letters(k=2):
    return st.integers(0, 2 * k - 1)


@st.composite
def reduced_words(draw, k=2, min_size=0, max_size=12):
    raw = draw(st.lists(letters(k), min_size=min_size, max_size=max_size))
    out = []
    for c in raw:
        if out and c == out[-1] ^ 1:
            c = out[-1]     # repeat instead of cancelling
        out.append(c)
    return tuple(out)


@st.composite
def cyclic_words(draw, k=2, min_size=1, max_size=10):
    w = draw(reduced_words(k, min_size, max_size))
    core, _ = cyclic_reduce(Word(w))
    return core


def commutator_word(n, seed, k=2):
    return random_commutator_word(RandomWordSpec(Alphabet(k), n, seed, True))


def commutator_core(n, seed, k=2):
    return cyclic_reduce(commutator_word(n, seed, k))[0]


# every exact solve made by the suite, as (chain text, strong duality holds)
EXACT_SOLVES: list[tuple[str, bool]] = []


@pytest.fixture(autouse=True, scope="session")
def record_exact_solves():
    inner = gluing.solve

    def recording(glp, mode="exact"):
        r = inner(glp, mode)
        if r.mode == "exact":
            EXACT_SOLVES.append((str(r.chain), r.strong_duality))
        return r

    gluing.solve = recording
    yield
    gluing.solve = inner


def pytest_terminal_summary(terminalreporter):
    if EXACT_SOLVES:
        bad = [c for c, ok in EXACT_SOLVES if not ok]
        terminalreporter.write_line(f"strong duality: {len(EXACT_SOLVES) - len(bad)}/{len(EXACT_SOLVES)} "
                                    f"exact solves have primal = dual" + (f"; violations {bad[:5]}" if bad else ""))
