"""Finite scenario-tree market model: scenarios, filtrations, strategies, measures.

Sigma-algebras are partitions of scenario indices; measurability is constancy
on atoms.  Everything is exact rational arithmetic.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence, Union

from .errors import MarketFormatError
from .ratgeom import Vec, rat

Atom = frozenset[int]

_ZERO = Fraction(0)


@dataclass(frozen=True)
class Scenario:
    """One price trajectory: ``path[t]`` is the d-vector of prices at time t."""

    id: str
    path: tuple[Vec, ...]


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty atoms covering a ground set of scenario indices."""

    atoms: tuple[Atom, ...]

    def __post_init__(self):
        atoms = tuple(sorted((frozenset(a) for a in self.atoms), key=min))
        object.__setattr__(self, "atoms", atoms)
        seen: set[int] = set()
        for a in atoms:
            if not a:
                raise ValueError("partition atom is empty")
            if seen & a:
                raise ValueError("partition atoms overlap")
            seen |= a
        object.__setattr__(self, "ground", frozenset(seen))

    ground: Atom = field(init=False)

    def atom_of(self, i: int) -> Atom:
        for a in self.atoms:
            if i in a:
                return a
        raise KeyError(i)

    def refines(self, other: "Partition") -> bool:
        return all(any(a <= b for b in other.atoms) for a in self.atoms)


def refine(p: Partition, q: Partition) -> Partition:
    """Coarsest common refinement (the join of the two sigma-algebras)."""
    if p.ground != q.ground:
        raise ValueError("partitions have different ground sets")
    atoms = []
    for a in p.atoms:
        for b in q.atoms:
            c = a & b
            if c:
                atoms.append(c)
    return Partition(tuple(atoms))


@dataclass(frozen=True)
class SignificantClass:
    """A named finite family of nonempty scenario sets."""

    name: str
    sets: tuple[Atom, ...]

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in self.sets))
        if not self.sets:
            raise MarketFormatError(f"class {self.name!r} declares no sets")
        for s in self.sets:
            if not s:
                raise MarketFormatError(f"class {self.name!r} contains an empty set")


@dataclass(frozen=True)
class DiscreteMeasure:
    """Exact probability vector over scenario indices (zero weights may be omitted)."""

    weights: Mapping[int, Fraction]

    def __post_init__(self):
        w = {i: Fraction(v) for i, v in self.weights.items() if v != 0}
        object.__setattr__(self, "weights", w)
        for i, v in w.items():
            if v < 0:
                raise MarketFormatError(f"negative weight on scenario index {i}")
        if sum(w.values(), _ZERO) != 1:
            raise MarketFormatError("weights do not sum to 1")

    def __getitem__(self, i: int) -> Fraction:
        return self.weights.get(i, _ZERO)

    @property
    def support(self) -> Atom:
        return frozenset(self.weights)

    def mass(self, indices) -> Fraction:
        return sum((self.weights.get(i, _ZERO) for i in indices), _ZERO)


@dataclass(frozen=True)
class Strategy:
    """Predictable positions: ``positions[t-1]`` maps time-(t-1) atoms to vectors.

    Atoms within one period must be disjoint; indices not covered by any atom
    hold the zero position.
    """

    positions: tuple[Mapping[Atom, Vec], ...]

    def __post_init__(self):
        norm = []
        for t, pos in enumerate(self.positions):
            pos = {frozenset(a): tuple(v) for a, v in pos.items()}
            seen: set[int] = set()
            for a in pos:
                if seen & a:
                    raise ValueError(f"strategy atoms overlap at period {t + 1}")
                seen |= a
            norm.append(pos)
        object.__setattr__(self, "positions", tuple(norm))

    def vector(self, t: int, i: int, d: int) -> Vec:
        """Position held over (t-1, t] in scenario i."""
        for a, v in self.positions[t - 1].items():
            if i in a:
                return v
        return tuple(_ZERO for _ in range(d))


@dataclass(frozen=True)
class Market:
    d: int
    T: int
    scenarios: tuple[Scenario, ...]
    classes: Mapping[str, SignificantClass] = field(default_factory=dict)
    probabilities: Mapping[str, DiscreteMeasure] = field(default_factory=dict)

    def __post_init__(self):
        if self.T < 1:
            raise MarketFormatError("T must be at least 1")
        if not self.scenarios:
            raise MarketFormatError("market declares no scenarios")
        seen = set()
        for s in self.scenarios:
            if s.id in seen:
                raise MarketFormatError(f"duplicate scenario id {s.id!r}")
            seen.add(s.id)
            if len(s.path) != self.T + 1:
                raise MarketFormatError(
                    f"scenario {s.id!r} has {len(s.path)} price rows, expected {self.T + 1}"
                )
            for row in s.path:
                if len(row) != self.d:
                    raise MarketFormatError(
                        f"scenario {s.id!r} has a price row of length {len(row)}, expected d={self.d}"
                    )
        if len({s.path[0] for s in self.scenarios}) > 1:
            warnings.warn(
                "initial prices differ across scenarios; time-0 information is nontrivial",
                stacklevel=2,
            )

    @property
    def n(self) -> int:
        return len(self.scenarios)

    @property
    def all_indices(self) -> Atom:
        return frozenset(range(self.n))

    def index_of(self, scenario_id: str) -> int:
        for i, s in enumerate(self.scenarios):
            if s.id == scenario_id:
                return i
        raise KeyError(scenario_id)

    def ids(self, indices) -> list[str]:
        return [self.scenarios[i].id for i in sorted(indices)]

    def increment(self, t: int, i: int) -> Vec:
        """Price increment over (t-1, t] in scenario i."""
        a, b = self.scenarios[i].path[t - 1], self.scenarios[i].path[t]
        return tuple(x - y for x, y in zip(b, a))

    def history(self, i: int, upto: int) -> tuple[Vec, ...]:
        """Price rows 0..upto of scenario i (a level-set key)."""
        return self.scenarios[i].path[: upto + 1]

    def level_sets(self, members, depth: int) -> list[tuple[tuple[Vec, ...], Atom]]:
        """Group ``members`` by equality of price rows 0..depth, ordered by min index."""
        groups: dict[tuple[Vec, ...], set[int]] = {}
        for i in sorted(members):
            groups.setdefault(self.history(i, depth), set()).add(i)
        out = [(k, frozenset(v)) for k, v in groups.items()]
        out.sort(key=lambda kv: min(kv[1]))
        return out


def natural_filtration(m: Market) -> list[Partition]:
    """Partitions F_0..F_T where F_t groups scenarios sharing price rows 0..t."""
    return [
        Partition(tuple(a for _k, a in m.level_sets(m.all_indices, t)))
        for t in range(m.T + 1)
    ]


def value_process(m: Market, filtration: Sequence[Partition], h: Strategy) -> list[list[Fraction]]:
    """V[t][i]: exact gains of ``h``; V[0] = 0 everywhere.

    Every atom that ``h`` references must be an atom of ``filtration``.
    """
    if len(h.positions) != m.T:
        raise ValueError(f"strategy covers {len(h.positions)} periods, expected {m.T}")
    for t in range(1, m.T + 1):
        legal = set(filtration[t - 1].atoms)
        for a in h.positions[t - 1]:
            if a not in legal:
                raise ValueError(
                    f"strategy references atom {sorted(a)} absent from the filtration at time {t - 1}"
                )
    return strategy_values(m, h)


def strategy_values(m: Market, h: Strategy) -> list[list[Fraction]]:
    """V[t][i] without any filtration cross-check (atoms taken at face value)."""
    v = [[_ZERO] * m.n]
    for t in range(1, m.T + 1):
        prev = v[-1]
        row = []
        for i in range(m.n):
            pos = h.vector(t, i, m.d)
            inc = m.increment(t, i)
            row.append(prev[i] + sum((a * b for a, b in zip(pos, inc)), _ZERO))
        v.append(row)
    return v


# ---------------------------------------------------------------------------
# Market file loading
# ---------------------------------------------------------------------------


def _parse_rat(value, where: str) -> Fraction:
    try:
        return rat(value)
    except ValueError as exc:
        raise MarketFormatError(f"{where}: {exc}") from exc


def load_market(source: Union[str, Path, dict]) -> Market:
    """Parse and validate a market document (path, JSON text, or dict)."""
    if isinstance(source, dict):
        doc = source
    else:
        if isinstance(source, Path):
            text = source.read_text("utf-8")
        elif isinstance(source, str) and source.lstrip().startswith("{"):
            text = source
        else:
            text = Path(source).read_text("utf-8")
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MarketFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MarketFormatError("market document must be a JSON object")

    for key in ("d", "T", "scenarios"):
        if key not in doc:
            raise MarketFormatError(f"missing required key {key!r}")
    d, T = doc["d"], doc["T"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise MarketFormatError("d must be a positive integer")
    if not isinstance(T, int) or isinstance(T, bool):
        raise MarketFormatError("T must be an integer")

    scenarios = []
    for entry in doc["scenarios"]:
        sid = entry.get("id")
        if not isinstance(sid, str):
            raise MarketFormatError("every scenario needs a string id")
        rows = entry.get("prices")
        if not isinstance(rows, list):
            raise MarketFormatError(f"scenario {sid!r} has no price rows")
        path = tuple(
            tuple(_parse_rat(x, f"scenario {sid!r}") for x in row) for row in rows
        )
        scenarios.append(Scenario(sid, path))

    market = Market(d=d, T=T, scenarios=tuple(scenarios))
    idx = {s.id: i for i, s in enumerate(market.scenarios)}

    def to_indices(ids, where: str) -> Atom:
        out = set()
        for sid in ids:
            if sid not in idx:
                raise MarketFormatError(f"{where} references unknown scenario {sid!r}")
            out.add(idx[sid])
        return frozenset(out)

    classes = {}
    for name, sets in (doc.get("classes") or {}).items():
        classes[name] = SignificantClass(
            name, tuple(to_indices(s, f"class {name!r}") for s in sets)
        )

    probabilities = {}
    for name, weights in (doc.get("probabilities") or {}).items():
        mapped = {}
        for sid, w in weights.items():
            if sid not in idx:
                raise MarketFormatError(
                    f"probability {name!r} references unknown scenario {sid!r}"
                )
            mapped[idx[sid]] = _parse_rat(w, f"probability {name!r}")
        try:
            probabilities[name] = DiscreteMeasure(mapped)
        except MarketFormatError as exc:
            if "sum to 1" in str(exc):
                raise MarketFormatError(
                    f"probability {name!r} does not sum to 1"
                ) from None
            raise MarketFormatError(f"probability {name!r}: {exc}") from None

    return Market(
        d=d, T=T, scenarios=market.scenarios, classes=classes, probabilities=probabilities
    )
