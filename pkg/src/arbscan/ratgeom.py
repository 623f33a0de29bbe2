"""Exact rational linear programming and the convex-geometry predicates on top of it.

Every number in this module is a ``fractions.Fraction``; there are no floats and
no tolerances anywhere.  The solver is a two-phase dense-tableau simplex with
Bland's anti-cycling pivot rule (lowest eligible column index enters, ratio
ties broken by lowest basic-variable index), which makes every result both
terminating and bit-reproducible.  Infeasible programs come back with a Farkas
certificate over the expanded row system that callers can re-verify with
:func:`verify_farkas_certificate`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DomainError

Rational = Fraction
Vec = tuple[Fraction, ...]

LE = "<="
EQ = "="
GE = ">="
RELATIONS = (LE, EQ, GE)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)


def rat(value) -> Fraction:
    """Convert an int, Fraction, "p/q" string or decimal string to a Fraction.

    Floats are rejected: binary floats have no canonical exact meaning here.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a rational: {value!r} (use an integer or a string)")


def rat_str(value: Fraction) -> str:
    """Canonical lossless rendering ("3", "-7/2", ...)."""
    return str(value)


def vec(values) -> Vec:
    return tuple(rat(v) for v in values)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), _ZERO)


def is_zero(u: Sequence[Fraction]) -> bool:
    return all(a == 0 for a in u)


@dataclass(frozen=True)
class LinearProgram:
    """maximize objective . x  subject to rows ``coeffs . x rel rhs`` and bounds.

    ``bounds`` is an optional per-variable (lower, upper) pair; ``None`` on
    either side means unbounded on that side.  A lower bound of exactly 0 is
    handled natively by the solver; every other finite bound becomes an extra
    constraint row (see :func:`expanded_rows`).
    """

    objective: Vec
    constraints: tuple[tuple[Vec, str, Fraction], ...]
    bounds: Optional[tuple[tuple[Optional[Fraction], Optional[Fraction]], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "objective", tuple(self.objective))
        object.__setattr__(
            self,
            "constraints",
            tuple((tuple(c), r, b) for (c, r, b) in self.constraints),
        )
        if self.bounds is not None:
            object.__setattr__(self, "bounds", tuple(tuple(b) for b in self.bounds))


@dataclass(frozen=True)
class LpResult:
    status: str
    solution: Optional[Vec]
    objective_value: Optional[Fraction]
    certificate: Optional[Vec] = None


def _validate(lp: LinearProgram) -> int:
    n = len(lp.objective)
    for k, (coeffs, rel, _rhs) in enumerate(lp.constraints):
        if len(coeffs) != n:
            raise ValueError(f"constraint {k} has arity {len(coeffs)}, expected {n}")
        if rel not in RELATIONS:
            raise ValueError(f"constraint {k} has unknown relation {rel!r}")
    if lp.bounds is not None and len(lp.bounds) != n:
        raise ValueError(f"bounds cover {len(lp.bounds)} variables, expected {n}")
    return n


def _nonneg_mask(lp: LinearProgram, n: int) -> list[bool]:
    if lp.bounds is None:
        return [False] * n
    return [lo is not None and lo == 0 for lo, _hi in lp.bounds]


def expanded_rows(lp: LinearProgram) -> list[tuple[Vec, str, Fraction]]:
    """The constraint system the solver and the Farkas verifier share.

    Original rows in order, then nonzero lower-bound rows (ascending variable
    index), then upper-bound rows.  Zero lower bounds are absorbed into the
    variable domain instead.
    """
    n = len(lp.objective)
    rows = list(lp.constraints)
    if lp.bounds is not None:
        unit = lambda j: tuple(_ONE if i == j else _ZERO for i in range(n))
        for j, (lo, _hi) in enumerate(lp.bounds):
            if lo is not None and lo != 0:
                rows.append((unit(j), GE, lo))
        for j, (_lo, hi) in enumerate(lp.bounds):
            if hi is not None:
                rows.append((unit(j), LE, hi))
    return rows


def verify_farkas_certificate(lp: LinearProgram, certificate: Sequence[Fraction]) -> bool:
    """Check that ``certificate`` proves infeasibility of ``lp``.

    With v over :func:`expanded_rows` and g = sum_i v_i a_i, the conditions are
    v_i >= 0 on <= rows, v_i <= 0 on >= rows, g_j = 0 for free variables,
    g_j >= 0 for variables with native lower bound 0, and v . b < 0.  Any
    feasible x would then give 0 <= g.x <= v.b < 0.
    """
    n = _validate(lp)
    rows = expanded_rows(lp)
    if len(certificate) != len(rows):
        return False
    nonneg = _nonneg_mask(lp, n)
    g = [_ZERO] * n
    vb = _ZERO
    for v_i, (coeffs, rel, rhs) in zip(certificate, rows):
        if rel == LE and v_i < 0:
            return False
        if rel == GE and v_i > 0:
            return False
        if v_i:
            for j, a in enumerate(coeffs):
                if a:
                    g[j] += v_i * a
            vb += v_i * rhs
    for j in range(n):
        if nonneg[j]:
            if g[j] < 0:
                return False
        elif g[j] != 0:
            return False
    return vb < 0


class _Tableau:
    """Internal standard-form tableau.

    Columns: per variable either one column (native nonnegative) or a +/- pair
    (free), then one slack per inequality row, then artificials where the row
    has no natural unit column.  Rows are sign-normalized so every right-hand
    side is nonnegative; >=-rows with rhs <= 0 flip so their surplus becomes a
    basic slack and needs no artificial.
    """

    def __init__(self, lp: LinearProgram, rows, live, nonneg):
        self.lp = lp
        self.all_rows = rows
        self.live = live
        n = len(lp.objective)

        self.var_cols: list[tuple[int, int]] = []  # (var index, sign)
        col_of_var: list[tuple[int, Optional[int]]] = []
        for j in range(n):
            plus = len(self.var_cols)
            self.var_cols.append((j, +1))
            if nonneg[j]:
                col_of_var.append((plus, None))
            else:
                self.var_cols.append((j, -1))
                col_of_var.append((plus, plus + 1))
        self.col_of_var = col_of_var
        nv = len(self.var_cols)

        sigma = []
        slack_kind = []  # +1 unit slack, -1 non-unit surplus, 0 none
        for idx in live:
            coeffs, rel, rhs = rows[idx]
            if rel == EQ:
                s = -1 if rhs < 0 else 1
                slack_kind.append(0)
            elif rel == LE:
                s = -1 if rhs < 0 else 1
                slack_kind.append(s)  # slack coeff +1 scaled by s
            else:  # GE: flip whenever that makes the surplus basic
                s = -1 if rhs <= 0 else 1
                slack_kind.append(-s)
            sigma.append(s)
        self.sigma = sigma

        slack_col = {}
        c = nv
        for k, kind in enumerate(slack_kind):
            if kind != 0:
                slack_col[k] = c
                c += 1
        art_col = {}
        for k, kind in enumerate(slack_kind):
            if kind != 1:  # no basic unit column yet
                art_col[k] = c
                c += 1
        self.ncols = c
        self.slack_col = slack_col
        self.art_col = art_col
        self.art_set = frozenset(art_col.values())

        body = []
        basis = []
        for k, idx in enumerate(live):
            coeffs, rel, rhs = rows[idx]
            s = sigma[k]
            row = [_ZERO] * (self.ncols + 1)
            for (j, sign), col in zip(self.var_cols, range(nv)):
                a = coeffs[j]
                if a:
                    row[col] = s * sign * a
            if k in slack_col:
                row[slack_col[k]] = Fraction(slack_kind[k])
            if k in art_col:
                row[art_col[k]] = _ONE
                basis.append(art_col[k])
            else:
                basis.append(slack_col[k])
            row[-1] = s * rhs
            body.append(row)
        self.body = body
        self.basis = basis
        # initial unit column of each row, for dual extraction
        self.start_unit = [art_col.get(k, slack_col.get(k)) for k in range(len(live))]

    # -- pivoting ---------------------------------------------------------

    def _pivot(self, r: int, pc: int, objrow: list[Fraction]) -> None:
        prow = self.body[r]
        piv = prow[pc]
        if piv != 1:
            inv = _ONE / piv
            self.body[r] = prow = [v * inv if v else v for v in prow]
        nz = [j for j, v in enumerate(prow) if v]
        for row in self.body:
            if row is prow:
                continue
            f = row[pc]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
        f = objrow[pc]
        if f:
            for j in nz:
                objrow[j] -= f * prow[j]
        self.basis[r] = pc

    def _simplex(self, objrow: list[Fraction], eligible) -> str:
        body = self.body
        while True:
            pc = -1
            for j in range(self.ncols):
                if objrow[j] > 0 and eligible(j):
                    pc = j
                    break
            if pc < 0:
                return OPTIMAL
            best_r = -1
            best_ratio = None
            for r, row in enumerate(body):
                a = row[pc]
                if a > 0:
                    ratio = row[-1] / a
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and self.basis[r] < self.basis[best_r])
                    ):
                        best_ratio = ratio
                        best_r = r
            if best_r < 0:
                return UNBOUNDED
            self._pivot(best_r, pc, objrow)

    # -- phases -----------------------------------------------------------

    def _priced_objrow(self, cost: list[Fraction]) -> list[Fraction]:
        objrow = list(cost) + [_ZERO]
        for r, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.body[r]
                for j, v in enumerate(row):
                    if v:
                        objrow[j] -= cb * v
        return objrow

    def phase_one(self):
        """Returns (feasible, farkas certificate over all_rows or None)."""
        if not self.art_col:
            return True, None
        cost = [_ZERO] * self.ncols
        for c in self.art_set:
            cost[c] = Fraction(-1)
        objrow = self._priced_objrow(cost)
        status = self._simplex(objrow, lambda j: True)
        assert status == OPTIMAL  # phase 1 is bounded above by 0
        value = -objrow[-1]
        if value < 0:
            cert = [_ZERO] * len(self.all_rows)
            for k, idx in enumerate(self.live):
                unit = self.start_unit[k]
                c_unit = Fraction(-1) if unit in self.art_set else _ZERO
                u_k = c_unit - objrow[unit]
                cert[idx] = self.sigma[k] * u_k
            return False, tuple(cert)
        self._drive_out_artificials(objrow)
        return True, None

    def _drive_out_artificials(self, objrow: list[Fraction]) -> None:
        r = 0
        while r < len(self.body):
            if self.basis[r] in self.art_set:
                row = self.body[r]
                pc = next(
                    (j for j, v in enumerate(row[:-1]) if v and j not in self.art_set),
                    None,
                )
                if pc is None:
                    # redundant row: zero over every structural column
                    del self.body[r]
                    del self.basis[r]
                    continue
                self._pivot(r, pc, objrow)
            r += 1

    def phase_two(self) -> str:
        cost = [_ZERO] * self.ncols
        for (j, sign), col in zip(self.var_cols, range(len(self.var_cols))):
            c = self.lp.objective[j]
            if c:
                cost[col] = sign * c
        objrow = self._priced_objrow(cost)
        art = self.art_set
        return self._simplex(objrow, lambda j: j not in art)

    def solution(self) -> Vec:
        value_of = {}
        for r, b in enumerate(self.basis):
            value_of[b] = self.body[r][-1]
        out = []
        for plus, minus in self.col_of_var:
            x = value_of.get(plus, _ZERO)
            if minus is not None:
                x -= value_of.get(minus, _ZERO)
            out.append(x)
        return tuple(out)


def lp_solve(lp: LinearProgram) -> LpResult:
    """Exact optimum of ``lp`` (maximization), deterministic via Bland's rule."""
    n = _validate(lp)
    rows = expanded_rows(lp)
    nonneg = _nonneg_mask(lp, n)

    live = []
    for idx, (coeffs, rel, rhs) in enumerate(rows):
        if any(coeffs):
            live.append(idx)
            continue
        ok = rhs >= 0 if rel == LE else rhs <= 0 if rel == GE else rhs == 0
        if not ok:
            cert = [_ZERO] * len(rows)
            if rel == LE:
                cert[idx] = _ONE
            elif rel == GE:
                cert[idx] = Fraction(-1)
            else:
                cert[idx] = Fraction(-1) if rhs > 0 else _ONE
            return LpResult(INFEASIBLE, None, None, tuple(cert))

    tab = _Tableau(lp, rows, live, nonneg)
    feasible, cert = tab.phase_one()
    if not feasible:
        if not verify_farkas_certificate(lp, cert):
            raise RuntimeError("internal error: invalid Farkas certificate")
        return LpResult(INFEASIBLE, None, None, cert)
    status = tab.phase_two()
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED, None, None)
    x = tab.solution()
    return LpResult(OPTIMAL, x, dot(lp.objective, x))


# ---------------------------------------------------------------------------
# Convex-geometry predicates
# ---------------------------------------------------------------------------


def _check_dims(points: Sequence[Vec]) -> int:
    if not points:
        raise ValueError("point list is empty")
    d = len(points[0])
    for p in points:
        if len(p) != d:
            raise ValueError(f"dimension mismatch: {len(p)} vs {d}")
    return d


def conv_contains_zero(points: Sequence[Vec]) -> bool:
    """True iff 0 is a convex combination of ``points`` (exact)."""
    d = _check_dims(points)
    n = len(points)
    constraints = [(tuple(_ONE for _ in range(n)), EQ, _ONE)]
    for k in range(d):
        constraints.append((tuple(p[k] for p in points), EQ, _ZERO))
    lp = LinearProgram(
        objective=tuple(_ZERO for _ in range(n)),
        constraints=tuple(constraints),
        bounds=tuple((_ZERO, None) for _ in range(n)),
    )
    return lp_solve(lp).status == OPTIMAL


def _separator_round(values: list[Vec], d: int, target: list[int]) -> tuple[Vec, Fraction]:
    """One slack LP: maximize sum of capped slacks over ``target`` values.

    Variables are H in [-1,1]^d followed by one slack in [0,1] per target
    value; every value (target or not) keeps its H.x >= 0 (resp >= s) row.
    """
    nv = d + len(target)
    slack_of = {v: d + k for k, v in enumerate(target)}
    constraints = []
    for v, x in enumerate(values):
        row = list(x) + [_ZERO] * len(target)
        if v in slack_of:
            row[slack_of[v]] = Fraction(-1)
        constraints.append((tuple(row), GE, _ZERO))
    bounds = [(Fraction(-1), _ONE)] * d + [(_ZERO, _ONE)] * len(target)
    objective = tuple(_ZERO for _ in range(d)) + tuple(_ONE for _ in target)
    res = lp_solve(LinearProgram(objective, tuple(constraints), tuple(bounds)))
    assert res.status == OPTIMAL
    return res.solution[:d], res.objective_value


def maximal_separator(points: Sequence[Vec]) -> Optional[tuple[Vec, frozenset[int]]]:
    """Separating direction with the largest possible strict set, or None.

    Returns None iff 0 lies in the relative interior of the convex cone
    spanned by the points (no one-sided direction gains anywhere).  Otherwise
    returns (H, strict) with H.x >= 0 for every point and strict equal to the
    union of the strict sets of *all* valid separators: the slack LP is
    re-run on the not-yet-strict residual and the round directions are summed,
    which certifies maximality when the residual LP's optimum hits zero.
    """
    d = _check_dims(points)
    values: list[Vec] = []
    index_of: dict[Vec, int] = {}
    val_idx = []
    for p in points:
        p = tuple(p)
        if p not in index_of:
            index_of[p] = len(values)
            values.append(p)
        val_idx.append(index_of[p])

    if all(is_zero(v) for v in values):
        return None

    strict_vals: set[int] = set()
    acc: Optional[list[Fraction]] = None
    target = list(range(len(values)))
    while target:
        h, gain = _separator_round(values, d, target)
        if gain == 0:
            break
        new = {v for v in target if dot(h, values[v]) > 0}
        assert new, "positive slack sum without a strict value"
        strict_vals |= new
        acc = list(h) if acc is None else [a + b for a, b in zip(acc, h)]
        target = [v for v in range(len(values)) if v not in strict_vals]

    if not strict_vals:
        return None
    scale = max(abs(c) for c in acc)
    h_out = tuple(c / scale for c in acc)
    strict = frozenset(i for i, v in enumerate(val_idx) if v in strict_vals)
    return h_out, strict


def cone_ri_contains_zero(points: Sequence[Vec]) -> bool:
    """True iff 0 is in the relative interior of the cone spanned by the points."""
    return maximal_separator(points) is None


def convex_combination_for_zero(points: Sequence[Vec], anchor: int) -> tuple[Fraction, ...]:
    """Convex weights summing to 1 with sum(w_i x_i) = 0 and w_anchor maximal (> 0).

    Requires 0 in the relative interior of the point cone; violations raise a
    DomainError carrying a separating direction as certificate.
    """
    d = _check_dims(points)
    n = len(points)
    if not 0 <= anchor < n:
        raise ValueError(f"anchor {anchor} out of range for {n} points")
    constraints = [(tuple(_ONE for _ in range(n)), EQ, _ONE)]
    for k in range(d):
        constraints.append((tuple(p[k] for p in points), EQ, _ZERO))
    objective = tuple(_ONE if i == anchor else _ZERO for i in range(n))
    res = lp_solve(
        LinearProgram(objective, tuple(constraints), tuple((_ZERO, None) for _ in range(n)))
    )
    if res.status != OPTIMAL or res.objective_value == 0:
        sep = maximal_separator(points)
        raise DomainError(
            "zero is not interior to the cone of the given points",
            certificate=None if sep is None else sep[0],
        )
    return res.solution
