"""Martingale measures: the polytope, point-supporting construction, mixing.

A measure is a martingale measure iff, for every period and every atom of the
conditioning partition, the weighted increments sum to zero exactly.  The
supporting construction walks the scenario tree restricted to the surviving
set and chooses one-step conditional weights by the anchored convex
combination, so exact martingality holds by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DomainError
from .market import Atom, DiscreteMeasure, Market, Partition, natural_filtration
from .ratgeom import EQ, LinearProgram, Vec, convex_combination_for_zero
from .splitter import PolarAnalysis

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class MartingalePolytope:
    """Linear description of all martingale measures as weight vectors.

    Row 0 normalizes the weights to sum 1; the remaining rows are the
    per-(period, atom, asset) zero-expectation equalities, ordered by period
    ascending, atom by smallest index, then asset index.  Nonnegativity is a
    variable bound, not a row.
    """

    n: int
    rows: tuple[tuple[Vec, str, Fraction], ...]

    def lp(self, objective: Optional[Sequence[Fraction]] = None) -> LinearProgram:
        obj = tuple(objective) if objective is not None else tuple(_ZERO for _ in range(self.n))
        return LinearProgram(
            objective=obj,
            constraints=self.rows,
            bounds=tuple((_ZERO, None) for _ in range(self.n)),
        )


def build_polytope(m: Market) -> MartingalePolytope:
    rows = [(tuple(_ONE for _ in range(m.n)), EQ, _ONE)]
    filtration = natural_filtration(m)
    for t in range(1, m.T + 1):
        for atom in filtration[t - 1].atoms:
            for j in range(m.d):
                coeffs = [_ZERO] * m.n
                for i in atom:
                    coeffs[i] = m.increment(t, i)[j]
                rows.append((tuple(coeffs), EQ, _ZERO))
    return MartingalePolytope(n=m.n, rows=tuple(rows))


def check_martingale(m: Market, q: DiscreteMeasure, filtration: Sequence[Partition]) -> bool:
    """Exact per-atom zero-expectation check against the given filtration."""
    for t in range(1, m.T + 1):
        for atom in filtration[t - 1].atoms:
            total = [_ZERO] * m.d
            for i in atom:
                w = q[i]
                if w:
                    inc = m.increment(t, i)
                    for j in range(m.d):
                        if inc[j]:
                            total[j] += w * inc[j]
            if any(total):
                return False
    return True


class _ComboCache:
    """Anchored one-step combinations, shared across supporting constructions."""

    def __init__(self, m: Market, star: Atom):
        self.m = m
        self.star = star
        self._memo: dict[tuple[int, Atom, int], tuple] = {}

    def children(self, t: int, node: Atom) -> list[Atom]:
        groups: dict[Vec, set[int]] = {}
        for i in sorted(node):
            groups.setdefault(self.m.scenarios[i].path[t], set()).add(i)
        out = [frozenset(g) for g in groups.values()]
        out.sort(key=min)
        return out

    def conditional(self, t: int, node: Atom, anchor: int) -> list[tuple[Atom, Fraction]]:
        """Child sets of ``node`` at time t with weights; anchor's child weighted > 0."""
        children = self.children(t, node)
        anchor_pos = next(k for k, c in enumerate(children) if anchor in c)
        key = (t, node, anchor_pos)
        lam = self._memo.get(key)
        if lam is None:
            points = [self.m.increment(t, min(c)) for c in children]
            lam = convex_combination_for_zero(points, anchor_pos)
            self._memo[key] = lam
        return [(c, w) for c, w in zip(children, lam) if w > 0]


def _supporting(m: Market, pa: PolarAnalysis, target: int, cache: _ComboCache) -> DiscreteMeasure:
    star = pa.omega_star
    root = next(
        a for _k, a in m.level_sets(star, 0) if target in a
    )
    frontier: list[tuple[Atom, Fraction]] = [(root, _ONE)]
    for t in range(1, m.T + 1):
        nxt: list[tuple[Atom, Fraction]] = []
        for node, weight in frontier:
            anchor = target if target in node else min(node)
            for child, lam in cache.conditional(t, node, anchor):
                nxt.append((child, weight * lam))
        frontier = nxt
    weights: dict[int, Fraction] = {}
    for node, weight in frontier:
        rep = target if target in node else min(node)
        weights[rep] = weights.get(rep, _ZERO) + weight
    return DiscreteMeasure(weights)


def supporting_measure(m: Market, pa: PolarAnalysis, target: int) -> DiscreteMeasure:
    """Finite-support martingale measure giving ``target`` positive weight.

    ``target`` must lie in ``omega_star``; every level set of the surviving
    set has 0 interior to its increment cone, so the anchored combination
    exists at every node of the walk.
    """
    if target not in pa.omega_star:
        raise DomainError(
            f"scenario {m.scenarios[target].id!r} is polar: no martingale measure charges it"
        )
    return _supporting(m, pa, target, _ComboCache(m, pa.omega_star))


def mix(measures: Sequence[DiscreteMeasure], weights: Sequence[Fraction]) -> DiscreteMeasure:
    """Convex combination; martingality is preserved by linearity of the constraints."""
    if len(measures) != len(weights):
        raise DomainError("measures and weights have different lengths")
    if any(w <= 0 for w in weights):
        raise DomainError("mixing weights must be positive")
    if sum(weights, _ZERO) != 1:
        raise DomainError("mixing weights must sum to 1")
    out: dict[int, Fraction] = {}
    for q, w in zip(measures, weights):
        for i, v in q.weights.items():
            out[i] = out.get(i, _ZERO) + w * v
    return DiscreteMeasure(out)


def _geometric_weights(k: int) -> list[Fraction]:
    # 2^-n for n = 1..k, renormalized to sum exactly 1
    raw = [Fraction(1, 2**n) for n in range(1, k + 1)]
    total = sum(raw, _ZERO)
    return [w / total for w in raw]


@dataclass(frozen=True)
class SupportWitness:
    measure: DiscreteMeasure
    full: bool


def full_support_measure(m: Market, pa: PolarAnalysis) -> Optional[SupportWitness]:
    """A martingale measure whose support is exactly ``omega_star`` (None if empty).

    Flagged full iff the support is the whole scenario set.
    """
    star = sorted(pa.omega_star)
    if not star:
        return None
    cache = _ComboCache(m, pa.omega_star)
    parts = [_supporting(m, pa, i, cache) for i in star]
    q = mix(parts, _geometric_weights(len(parts)))
    assert q.support == pa.omega_star
    return SupportWitness(measure=q, full=pa.omega_star == m.all_indices)


def class_measure(m: Market, pa: PolarAnalysis, cls) -> Optional[DiscreteMeasure]:
    """A martingale measure charging every set of the class, or None.

    None exactly when some declared set is contained in the polar complement;
    otherwise mixes one supporting measure per set, anchored at the smallest
    surviving index of that set.
    """
    picks = []
    for c in cls.sets:
        alive = c & pa.omega_star
        if not alive:
            return None
        picks.append(min(alive))
    cache = _ComboCache(m, pa.omega_star)
    parts = [_supporting(m, pa, i, cache) for i in picks]
    return mix(parts, _geometric_weights(len(parts)))
