"""Level-set splitting, backward elimination to a fixpoint, and the aggregator.

A level set whose increment cone does not contain 0 in its relative interior
splits into strict-gain blocks plus an efficient residual.  Iterating block
removal backwards over time until nothing changes yields the maximal set of
scenarios supportable by martingale measures (``omega_star``); the aggregator
strategy holds, in each scenario, the separator that eliminated it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .errors import DomainError
from .market import Atom, Market, Partition, Strategy, natural_filtration, refine
from .ratgeom import Vec, maximal_separator

_ZERO = Fraction(0)

LevelKey = tuple[Vec, ...]


@dataclass(frozen=True)
class Splitting:
    """Decomposition of one level set at one period.

    ``blocks[i]`` gains strictly under ``separators[i]``; ``residual`` admits
    no one-step gain at all (its increment cone holds 0 in relative interior).
    """

    t: int
    level_key: LevelKey
    members: Atom
    blocks: tuple[Atom, ...]
    separators: tuple[Vec, ...]
    residual: Atom

    @property
    def beta(self) -> int:
        return len(self.blocks)

    def __post_init__(self):
        union = frozenset().union(*self.blocks) if self.blocks else frozenset()
        if union | self.residual != self.members or len(self.blocks) != len(self.separators):
            raise ValueError("inconsistent splitting")


@dataclass(frozen=True)
class Event:
    """One block-elimination step of the fixpoint (sweep >= 1)."""

    sweep: int
    splitting: Splitting


@dataclass(frozen=True)
class PolarAnalysis:
    """Full output of :func:`backward_eliminate`.

    ``survivors[t]`` is the set of scenarios not eliminated at any period
    strictly after t, so ``survivors[T]`` is everything and ``survivors[0]``
    equals ``omega_star``.  ``splittings`` holds the first-sweep decomposition
    of every level set (the reported, construction-faithful one); ``events``
    records every eliminating splitting across all sweeps.
    """

    omega_star: Atom
    survivors: tuple[Atom, ...]
    splittings: Mapping[tuple[int, LevelKey], Splitting]
    events: tuple[Event, ...]
    eliminated_levels: Mapping[int, tuple[Splitting, ...]]
    rounds: int
    start_set: Atom

    def elimination_time(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for ev in self.events:
            for block in ev.splitting.blocks:
                for i in block:
                    out[i] = ev.splitting.t
        return out

    def blocks_at(self, t: int) -> Atom:
        dead: set[int] = set()
        for ev in self.events:
            if ev.splitting.t == t:
                for block in ev.splitting.blocks:
                    dead |= block
        return frozenset(dead)


def split_level_set(m: Market, t: int, gamma: Atom) -> Splitting:
    """Iterated maximal separation of one level set's period-t increments.

    Peels strict-gain blocks until 0 enters the relative interior of the
    residual's increment cone; at most d rounds are possible because each
    separator drops the span dimension.
    """
    if not gamma:
        raise DomainError("cannot split an empty level set")
    members = frozenset(gamma)
    keys = {m.history(i, t - 1) for i in members}
    if len(keys) > 1:
        raise ValueError("level set mixes different price histories")
    level_key = next(iter(keys))

    blocks: list[Atom] = []
    separators: list[Vec] = []
    current = members
    while True:
        order = sorted(current)
        found = maximal_separator([m.increment(t, i) for i in order])
        if found is None:
            residual = current
            break
        h, strict = found
        block = frozenset(order[k] for k in strict)
        blocks.append(block)
        separators.append(h)
        current = current - block
        if not current:
            residual = frozenset()
            break
    sp = Splitting(
        t=t,
        level_key=level_key,
        members=members,
        blocks=tuple(blocks),
        separators=tuple(separators),
        residual=residual,
    )
    assert sp.beta <= m.d
    return sp


def backward_eliminate(m: Market, within: Optional[Atom] = None) -> PolarAnalysis:
    """Fixpoint block elimination over the (optionally restricted) scenario set.

    Each sweep walks t = T..1, splits every level set of the current
    survivors, and removes all blocks immediately; sweeps repeat until one
    full pass removes nothing.  On exit every surviving level set passes
    cone_ri_contains_zero, so every survivor is supportable by a martingale
    measure concentrated on the survivors.
    """
    start = m.all_indices if within is None else frozenset(within)
    surviving = set(start)
    cache: dict[tuple[int, Atom], Splitting] = {}
    round_one: dict[tuple[int, LevelKey], Splitting] = {}
    events: list[Event] = []
    eliminated: dict[int, list[Splitting]] = {t: [] for t in range(1, m.T + 1)}

    sweep = 0
    while True:
        sweep += 1
        changed = False
        for t in range(m.T, 0, -1):
            if not surviving:
                break
            for _key, gamma in m.level_sets(frozenset(surviving), t - 1):
                ck = (t, gamma)
                sp = cache.get(ck)
                if sp is None:
                    sp = split_level_set(m, t, gamma)
                    cache[ck] = sp
                if sweep == 1:
                    round_one[(t, sp.level_key)] = sp
                if sp.blocks:
                    changed = True
                    events.append(Event(sweep, sp))
                    for block in sp.blocks:
                        surviving -= block
                    if not sp.residual:
                        eliminated[t].append(sp)
        if not changed:
            break

    omega_star = frozenset(surviving)
    elim_time: dict[int, int] = {}
    for ev in events:
        for block in ev.splitting.blocks:
            for i in block:
                elim_time[i] = ev.splitting.t
    survivors = tuple(
        frozenset(i for i in start if elim_time.get(i, 0) <= t) for t in range(m.T + 1)
    )
    assert survivors[0] == omega_star and survivors[m.T] == start

    return PolarAnalysis(
        omega_star=omega_star,
        survivors=survivors,
        splittings=round_one,
        events=tuple(events),
        eliminated_levels={t: tuple(v) for t, v in eliminated.items()},
        rounds=sweep,
        start_set=start,
    )


def aggregator_pieces(m: Market, pa: PolarAnalysis) -> list[dict[int, Vec]]:
    """Per period t (1-based), the nonzero aggregator values by scenario index."""
    pieces: list[dict[int, Vec]] = [dict() for _ in range(m.T + 1)]
    for ev in pa.events:
        sp = ev.splitting
        for block, sep in zip(sp.blocks, sp.separators):
            for i in block:
                pieces[sp.t][i] = sep
    return pieces


def universal_aggregator(m: Market, pa: PolarAnalysis) -> tuple[Strategy, list[Partition]]:
    """The aggregator strategy and the enlarged filtration it is predictable for.

    The strategy holds, at each scenario's elimination period, the separator
    of the block that removed it (zero otherwise); its strict-gain set is
    exactly the complement of ``omega_star``.  The filtration joins the
    natural one with the value partitions of the aggregator one step ahead
    (no look-ahead term at T).
    """
    zero = tuple(_ZERO for _ in range(m.d))
    pieces = aggregator_pieces(m, pa)

    def value_partition(t: int) -> Partition:
        groups: dict[Vec, set[int]] = {}
        for i in range(m.n):
            groups.setdefault(pieces[t].get(i, zero), set()).add(i)
        return Partition(tuple(frozenset(g) for g in groups.values()))

    value_parts = [None] + [value_partition(t) for t in range(1, m.T + 1)]
    f = natural_filtration(m)
    enlarged = []
    for t in range(m.T + 1):
        part = f[t]
        for s in range(1, min(t + 1, m.T) + 1):
            part = refine(part, value_parts[s])
        enlarged.append(part)

    positions = []
    for t in range(1, m.T + 1):
        pos: dict[Atom, Vec] = {}
        for atom in enlarged[t - 1].atoms:
            vals = {pieces[t].get(i, zero) for i in atom}
            assert len(vals) == 1, "aggregator not constant on an enlarged atom"
            pos[atom] = next(iter(vals))
        positions.append(pos)
    return Strategy(tuple(positions)), enlarged


def check_predictable(h: Strategy, filtration: Sequence[Partition]) -> bool:
    """True iff each period's positions are constant on the previous partition's atoms."""
    d = next((len(v) for pos in h.positions for v in pos.values()), None)
    if d is None:
        return True
    for t in range(1, len(h.positions) + 1):
        for atom in filtration[t - 1].atoms:
            vals = {h.vector(t, i, d) for i in atom}
            if len(vals) > 1:
                return False
    return True
