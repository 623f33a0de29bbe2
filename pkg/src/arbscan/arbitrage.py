"""Arbitrage semantics: classification, defragmentation, extraction, feasibility.

Under the enlarged filtration the class verdict is pure set logic on the polar
complement with the aggregator as universal witness.  Under the natural
filtration that equivalence can fail, so the honest decision procedure is the
oracle LP search.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .errors import DomainError
from .market import (
    Atom,
    DiscreteMeasure,
    Market,
    SignificantClass,
    Strategy,
    natural_filtration,
    strategy_values,
)
from .measures import class_measure, full_support_measure
from .oracle import oracle_arbitrage
from .ratgeom import Vec
from .splitter import PolarAnalysis, backward_eliminate, universal_aggregator

_ZERO = Fraction(0)

NO_ARBITRAGE = "NoArbitrage"
ARBITRAGE = "Arbitrage"


@dataclass(frozen=True)
class Verdict:
    kind: str
    witness: Optional[Strategy] = None
    witness_class: Optional[Atom] = None
    certificate_measure: Optional[DiscreteMeasure] = None
    detail: str = ""

    @property
    def arbitrage(self) -> bool:
        return self.kind == ARBITRAGE


@dataclass(frozen=True)
class Decomposition:
    """P split against the polar structure: P = continuous + singular.

    The singular part lives on ``carrier`` (the polar piece of the support);
    the continuous part vanishes there.
    """

    continuous: Mapping[int, Fraction]
    singular: Mapping[int, Fraction]
    carrier: Atom


def classify(
    m: Market,
    pa: PolarAnalysis,
    cls: SignificantClass,
    filtration: str = "enlarged",
) -> Verdict:
    """Class-S verdict under the chosen strategy universe.

    Enlarged mode: arbitrage iff the polar complement swallows some declared
    set (or everything is polar); the aggregator is the witness and a measure
    charging every declared set certifies the negative.  Natural mode: one
    oracle LP per declared set.
    """
    if filtration not in ("natural", "enlarged"):
        raise ValueError(f"unknown filtration mode {filtration!r}")
    polar = pa.start_set - pa.omega_star

    if filtration == "enlarged":
        if not pa.omega_star:
            agg, _ = universal_aggregator(m, pa)
            cited = cls.sets[0]
            return Verdict(ARBITRAGE, witness=agg, witness_class=cited,
                           detail="every scenario is polar")
        for c in cls.sets:
            if c <= polar:
                agg, _ = universal_aggregator(m, pa)
                return Verdict(ARBITRAGE, witness=agg, witness_class=c,
                               detail="declared set inside the polar complement")
        q = class_measure(m, pa, cls)
        assert q is not None, "no class measure despite NoArbitrage verdict"
        return Verdict(
            NO_ARBITRAGE,
            certificate_measure=q,
            detail="martingale measures exist and no declared set is polar",
        )

    f = natural_filtration(m)
    for c in cls.sets:
        h = oracle_arbitrage(m, f, c)
        if h is not None:
            return Verdict(ARBITRAGE, witness=h, witness_class=c,
                           detail="strategy found by LP search over the natural filtration")
    q = class_measure(m, pa, cls)
    return Verdict(
        NO_ARBITRAGE,
        certificate_measure=q,
        detail="all per-set LP searches infeasible under the natural filtration",
    )


def one_step_1p_check(m: Market, pa: PolarAnalysis) -> list[tuple[int, tuple, Vec, Atom]]:
    """All single-period strict-gain opportunities found by the first sweep.

    One entry (t, level key, direction, gaining set) per first-sweep splitting
    with at least one block; the list is empty exactly when no one-point
    arbitrage exists at all.
    """
    out = []
    items = sorted(pa.splittings.items(), key=lambda kv: (kv[0][0], min(kv[1].members)))
    for (t, key), sp in items:
        if sp.beta >= 1:
            out.append((t, key, sp.separators[0], sp.blocks[0]))
    return out


def defragment(m: Market, h: Strategy) -> tuple[tuple[Atom, ...], Strategy]:
    """Split a nonnegative-terminal strategy into per-period strict-gain pieces.

    U_t collects the scenarios whose running value first turns positive at t;
    the masked strategy zeroes every position from the first gain onwards and
    still gains strictly on each nonempty U_t.
    """
    v = strategy_values(m, h)
    for i in range(m.n):
        if v[m.T][i] < 0:
            raise DomainError(
                f"terminal value is negative on scenario {m.scenarios[i].id!r}"
            )
    b = [frozenset(i for i in range(m.n) if v[t][i] > 0) for t in range(m.T + 1)]
    u: list[Atom] = []
    covered: set[int] = set()
    for t in range(1, m.T + 1):
        u.append(frozenset(b[t] - covered))
        covered |= b[t]

    masked_positions = []
    blocked: set[int] = set()
    for t in range(1, m.T + 1):
        keep = frozenset(range(m.n)) - frozenset(blocked)
        pos: dict[Atom, Vec] = {}
        for atom, vec_ in h.positions[t - 1].items():
            inside = atom & keep
            outside = atom - keep
            if inside:
                pos[inside] = vec_
            if outside:
                pos[outside] = tuple(_ZERO for _ in range(m.d))
        masked_positions.append(pos)
        blocked |= u[t - 1]
    return tuple(u), Strategy(tuple(masked_positions))


def lebesgue_decompose(m: Market, pa: PolarAnalysis, p: DiscreteMeasure) -> Decomposition:
    """Split P into the polar-supported singular part and the rest."""
    polar = m.all_indices - pa.omega_star
    carrier = p.support & polar
    singular = {i: w for i, w in p.weights.items() if i in carrier}
    continuous = {i: w for i, w in p.weights.items() if i not in carrier}
    return Decomposition(continuous=continuous, singular=singular, carrier=carrier)


def extract_p_arbitrage(m: Market, pa: PolarAnalysis, p: DiscreteMeasure) -> Optional[Strategy]:
    """A strategy beating the model P, or None when P only charges survivors.

    The analysis is re-run restricted to supp(P); the first period with an
    eliminating event supplies, per level set, the first-sweep separator on
    that level set (zero elsewhere).  The level set covers every P-charged
    scenario of its atom, so V_T >= 0 holds P-almost surely and the first
    block carries positive P-mass.
    """
    polar_mass = p.mass(m.all_indices - pa.omega_star)
    if polar_mass == 0:
        return None
    sub = backward_eliminate(m, within=p.support)
    assert sub.events, "positive polar mass but no restricted elimination"
    tau = min(ev.splitting.t for ev in sub.events)
    seen_levels: set[tuple] = set()
    pieces: dict[Atom, Vec] = {}
    for ev in sub.events:
        sp = ev.splitting
        if sp.t != tau or sp.level_key in seen_levels:
            continue
        seen_levels.add(sp.level_key)
        pieces[sp.members] = sp.separators[0]
    rest = m.all_indices - frozenset().union(*pieces)
    if rest:
        pieces[rest] = tuple(_ZERO for _ in range(m.d))
    zero_row = {m.all_indices: tuple(_ZERO for _ in range(m.d))}
    positions = tuple(
        pieces if t == tau else dict(zero_row) for t in range(1, m.T + 1)
    )
    h = Strategy(positions)

    v = strategy_values(m, h)
    assert all(v[m.T][i] >= 0 for i in p.support)
    gained = sum((p[i] for i in range(m.n) if v[m.T][i] > 0), _ZERO)
    assert gained > 0
    return h


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    facets: Mapping[str, bool]
    ladder: Mapping[str, bool]
    class_ladder: Mapping[str, bool]
    full_support: Optional[DiscreteMeasure]


def feasibility(m: Market, pa: PolarAnalysis) -> FeasibilityReport:
    """The four equivalent feasibility facets plus the arbitrage-strength ladder.

    Facets: (1) no scenario is polar; (2) a canonical full-support model
    admits no classical arbitrage; (3) a full-support martingale measure
    exists; (4) no class arbitrage for the singletons-plus-declared family
    under the enlarged filtration.  The ladder records no-1p => no-class-S =>
    no-model-independent for every declared class.
    """
    n = m.n
    witness = full_support_measure(m, pa)

    uniform = DiscreteMeasure({i: Fraction(1, n) for i in range(n)})
    singletons = tuple(frozenset({i}) for i in range(n))
    declared = tuple(s for cls in m.classes.values() for s in cls.sets)
    open_like = SignificantClass("open-like", singletons + declared)

    facets = {
        "omega_star_is_everything": pa.omega_star == m.all_indices,
        "uniform_model_has_no_classical_arbitrage": extract_p_arbitrage(m, pa, uniform) is None,
        "full_support_martingale_measure_exists": witness is not None and witness.full,
        "no_open_like_arbitrage_enlarged": not classify(m, pa, open_like, "enlarged").arbitrage,
    }

    no_1p = not classify(m, pa, SignificantClass("1p", singletons), "enlarged").arbitrage
    no_mi = not classify(
        m, pa, SignificantClass("MI", (m.all_indices,)), "enlarged"
    ).arbitrage
    ladder = {"no_1p": no_1p, "no_model_independent": no_mi}
    class_ladder = {
        name: not classify(m, pa, cls, "enlarged").arbitrage
        for name, cls in m.classes.items()
    }

    return FeasibilityReport(
        feasible=facets["omega_star_is_everything"],
        facets=facets,
        ladder=ladder,
        class_ladder=class_ladder,
        full_support=None if witness is None else witness.measure,
    )
