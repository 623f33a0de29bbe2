"""Shared fixtures: benchmark markets and a random scenario-tree corpus."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from arbscan.market import DiscreteMeasure, Market, Scenario, SignificantClass, load_market

SVU_DOC = {
    "d": 1,
    "T": 2,
    "scenarios": [
        {"id": "w1", "prices": [[7], [8], [9]]},
        {"id": "w2", "prices": [[7], [8], [6]]},
        {"id": "w3", "prices": [[7], [3], [5]]},
        {"id": "w4", "prices": [[7], [3], [4]]},
    ],
    "classes": {"branch": [["w1", "w2"]]},
    "probabilities": {
        "U": {"w1": "1/4", "w2": "1/4", "w3": "1/4", "w4": "1/4"},
    },
}

MULTI_DOC = {
    "d": 2,
    "T": 2,
    "scenarios": [
        {"id": "A1", "prices": [[2, 2], [3, 7], [3, 7]]},
        {"id": "A2", "prices": [[2, 2], [2, 2], [5, 3]]},
        {"id": "A3", "prices": [[2, 2], [2, 2], [1, 1]]},
        {"id": "A4", "prices": [[2, 2], [1, 1], [1, 1]]},
    ],
    "classes": {"openish": [["A1", "A2"]]},
}

# two scenarios per class of the three-asset single-period example
EX3D_DOC = {
    "d": 3,
    "T": 1,
    "scenarios": [
        {"id": "irr2", "prices": [[2, 2, 2], [1, 2, 4]]},
        {"id": "irr5", "prices": [[2, 2, 2], [1, 2, 7]]},
        {"id": "qlo16", "prices": [[2, 2, 2], [3, "17/16", 2]]},
        {"id": "qlo9", "prices": [[2, 2, 2], [3, "10/9", 2]]},
        {"id": "qge916", "prices": [[2, 2, 2], [2, "25/16", 2]]},
        {"id": "qge4", "prices": [[2, 2, 2], [2, 5, 2]]},
    ],
    "classes": {"irrationals": [["irr2", "irr5"]]},
    "probabilities": {
        "P_I": {"irr2": "1/2", "irr5": "1/2"},
    },
}

# two-asset single-period market with no martingale measure at all
EX1000_DOC = {
    "d": 2,
    "T": 1,
    "scenarios": [
        {"id": "i1", "prices": [[2, 2], [3, 5]]},
        {"id": "i2", "prices": [[2, 2], [3, 8]]},
        {"id": "z0", "prices": [[2, 2], [2, 1]]},
        {"id": "q1", "prices": [[2, 2], [2, "3/2"]]},
        {"id": "q2", "prices": [[2, 2], [2, "7/4"]]},
    ],
}

# one-step gain on half the scenarios, zero increment on the rest
COUNTNA_DOC = {
    "d": 1,
    "T": 1,
    "scenarios": [
        {"id": "r1", "prices": [[2], [3]]},
        {"id": "r2", "prices": [[2], [3]]},
        {"id": "q1", "prices": [[2], [2]]},
        {"id": "q2", "prices": [[2], [2]]},
    ],
}

CONSTANT_DOC = {
    "d": 1,
    "T": 2,
    "scenarios": [
        {"id": "c1", "prices": [[5], [5], [5]]},
        {"id": "c2", "prices": [[5], [5], [5]]},
    ],
}


@pytest.fixture(scope="session")
def svu() -> Market:
    return load_market(SVU_DOC)


@pytest.fixture(scope="session")
def multi() -> Market:
    return load_market(MULTI_DOC)


@pytest.fixture(scope="session")
def ex3d() -> Market:
    return load_market(EX3D_DOC)


@pytest.fixture(scope="session")
def ex1000() -> Market:
    return load_market(EX1000_DOC)


@pytest.fixture(scope="session")
def countna() -> Market:
    return load_market(COUNTNA_DOC)


@pytest.fixture(scope="session")
def constant() -> Market:
    return load_market(CONSTANT_DOC)


# ---------------------------------------------------------------------------
# Random corpus
# ---------------------------------------------------------------------------


def random_market(rng: random.Random, max_n: int = 10, max_t: int = 3, max_d: int = 3) -> Market:
    """Scenario tree of lattice random walks with integer prices in [0, 20]."""
    d = rng.randint(1, max_d)
    t_horizon = rng.randint(1, max_t)
    n = rng.randint(2, max_n)
    start = tuple(Fraction(rng.randint(5, 15)) for _ in range(d))

    groups = [(list(range(n)), [start])]
    for _t in range(t_horizon):
        nxt = []
        for members, path in groups:
            k = rng.randint(1, min(3, len(members)))
            shuffled = members[:]
            rng.shuffle(shuffled)
            cuts = sorted(rng.sample(range(1, len(members)), k - 1)) if k > 1 else []
            parts = []
            lo = 0
            for cut in cuts + [len(members)]:
                parts.append(sorted(shuffled[lo:cut]))
                lo = cut
            steps = rng.sample([s for s in _STEPS[d]], k)
            last = path[-1]
            for part, step in zip(parts, steps):
                row = tuple(
                    min(Fraction(20), max(Fraction(0), a + b)) for a, b in zip(last, step)
                )
                nxt.append((part, path + [row]))
        groups = nxt

    paths: dict[int, list] = {}
    for members, path in groups:
        for i in members:
            paths[i] = path
    scenarios = tuple(
        Scenario(f"s{i}", tuple(paths[i])) for i in range(n)
    )
    return Market(d=d, T=t_horizon, scenarios=scenarios)


def _all_steps(d: int):
    out = [()]
    for _ in range(d):
        out = [s + (Fraction(v),) for s in out for v in (-1, 0, 1)]
    return out


_STEPS = {1: _all_steps(1), 2: _all_steps(2), 3: _all_steps(3)}


def random_class(rng: random.Random, n: int, name: str) -> SignificantClass:
    k = rng.randint(1, 3)
    sets = []
    for _ in range(k):
        size = rng.randint(1, n)
        sets.append(frozenset(rng.sample(range(n), size)))
    return SignificantClass(name, tuple(sets))


def random_measure(rng: random.Random, n: int, support=None) -> DiscreteMeasure:
    pool = sorted(support) if support else list(range(n))
    size = rng.randint(1, len(pool))
    chosen = rng.sample(pool, size)
    raw = {i: Fraction(rng.randint(1, 9)) for i in chosen}
    total = sum(raw.values())
    return DiscreteMeasure({i: w / total for i, w in raw.items()})


@pytest.fixture(scope="session")
def mini_corpus() -> list[Market]:
    rng = random.Random(20240811)
    return [random_market(rng, max_n=7) for _ in range(60)]
