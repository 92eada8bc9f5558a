"""Brute-force gap oracle for ``E_{q,q'} = {n alpha + m beta mod 1}``.

Points are identified by their flat index ``n * q' + m``.  Positions are first
computed in ``bits``-bit fixed point (numpy ``uint64`` arithmetic wraps modulo
one for free); each fixed-point position is within ``2(n + m)`` units of the
true one, so any two neighbours further apart than the sum of their error
bounds are certainly in the right order.  The remaining near-ties are sorted
with exact linear-form comparisons.
"""
from __future__ import annotations

import csv
import functools
import io
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .cf_core import (
    DEFAULT_MAX_DEPTH,
    ONE,
    CFReal,
    LinearForm,
    Sign,
    certified_sign,
    decimal_approx,
)

CSV_HEADER = ["q", "qp", "dn", "dm", "dc", "mult", "approx", "primitive"]


class UndecidedComparison(ArithmeticError):
    def __init__(self, p1, p2):
        super().__init__(f"cannot order points {p1} and {p2} at the configured depth")
        self.pair = (p1, p2)


class CertificationError(ArithmeticError):
    pass


def point_ids(order: np.ndarray, qp: int) -> list[tuple[int, int]]:
    return [(int(i) // qp, int(i) % qp) for i in order]


@dataclass
class _Positions:
    pos: np.ndarray      # fixed-point positions, flat-indexed
    tol: int             # per-point error bound, in units of 2**-bits
    bits: int


def _positions(q: int, qp: int, alpha: CFReal, beta: CFReal, bits: int) -> _Positions:
    if not 8 <= bits <= 64:
        raise ValueError("bits must be in [8, 64]")
    mask = np.uint64((1 << bits) - 1)
    A = np.uint64(alpha.fixed_point(bits) & ((1 << bits) - 1))
    B = np.uint64(beta.fixed_point(bits) & ((1 << bits) - 1))
    with np.errstate(over="ignore"):
        pa = np.arange(q, dtype=np.uint64) * A
        pb = np.arange(qp, dtype=np.uint64) * B
        pos = ((pa[:, None] + pb[None, :]) & mask).ravel()
    return _Positions(pos, 2 * (q + qp - 2) + 1, bits)


def _floor_estimates(q, qp, alpha, beta, pos: _Positions) -> np.ndarray:
    """``floor(n alpha + m beta)`` for points whose position is not near the wrap."""
    af, bf = alpha.approx_float(), beta.approx_float()
    x = (np.arange(q, dtype=np.float64)[:, None] * af + np.arange(qp, dtype=np.float64)[None, :] * bf).ravel()
    frac = pos.pos.astype(np.float64) / float(1 << pos.bits)
    return np.rint(x - frac).astype(np.int64)


def _exact_frac_form(idx: int, qp: int, k_est: int, near_wrap: bool,
                     alpha: CFReal, beta: CFReal, max_depth: int) -> LinearForm:
    n, m = divmod(int(idx), qp)
    f = LinearForm(n, m, -int(k_est))
    if near_wrap:
        s = certified_sign(f, alpha, beta, max_depth)
        if s is Sign.UNDECIDED:
            raise UndecidedComparison((n, m), (0, 0))
        if s is Sign.NEGATIVE:
            f = f + ONE
        else:
            s1 = certified_sign(f - ONE, alpha, beta, max_depth)
            if s1 is Sign.UNDECIDED:
                raise UndecidedComparison((n, m), (0, 0))
            if s1 is not Sign.NEGATIVE:
                f = f - ONE
    return f


def _clusters(near: np.ndarray) -> list[list[int]]:
    """Maximal cyclic runs of slots joined by near-tie links ``i -> i+1``."""
    P = len(near)
    idx = np.flatnonzero(near)
    if len(idx) == 0:
        return []
    if len(idx) == P:
        return [list(range(P))]
    # start from a slot whose incoming link is not near
    runs, cur = [], None
    start = int(np.flatnonzero(~near)[0]) + 1
    for t in range(P):
        i = (start + t) % P
        if near[i]:
            if cur is None:
                cur = [i]
            cur.append((i + 1) % P)
        elif cur is not None:
            runs.append(cur)
            cur = None
    if cur is not None:
        runs.append(cur)
    return runs


@dataclass
class SortResult:
    order: np.ndarray       # flat indices in clockwise order starting at (0, 0)
    floors: np.ndarray      # exact floor(n alpha + m beta), flat-indexed
    near_ties: int          # points resolved by exact comparison


def _sort(q: int, qp: int, alpha: CFReal, beta: CFReal, bits: int, max_depth: int) -> SortResult:
    if q < 1 or qp < 1:
        raise ValueError("q and q' must be >= 1")
    P = q * qp
    pp = _positions(q, qp, alpha, beta, bits)
    floors = _floor_estimates(q, qp, alpha, beta, pp)
    order = np.argsort(pp.pos, kind="stable")
    if P == 1:
        return SortResult(order, floors, 0)
    sp = pp.pos[order]
    mask = np.uint64((1 << bits) - 1)
    with np.errstate(over="ignore"):
        diffs = (np.roll(sp, -1) - sp) & mask
    near = diffs <= np.uint64(2 * pp.tol)
    clusters = _clusters(near)
    if not clusters:
        return SortResult(order, floors, 0)

    wrap_band = 2 * pp.tol
    full = 1 << bits
    order = order.copy()
    resolved = 0
    wrap_cluster = None
    for slots in clusters:
        members = [int(order[s]) for s in slots]
        near_wrap = [int(pp.pos[i]) <= wrap_band or int(pp.pos[i]) >= full - wrap_band for i in members]
        forms = {}
        for i, nw in zip(members, near_wrap):
            forms[i] = _exact_frac_form(i, qp, floors[i], nw, alpha, beta, max_depth)
            floors[i] = -forms[i].w
        resolved += len(members)

        def cmp(i, j, forms=forms):
            s = certified_sign(forms[i] - forms[j], alpha, beta, max_depth)
            if s is Sign.UNDECIDED:
                raise UndecidedComparison(divmod(i, qp), divmod(j, qp))
            return -1 if s is Sign.NEGATIVE else 1

        ranked = sorted(members, key=functools.cmp_to_key(cmp))
        if slots[-1] < slots[0] or any(near_wrap):
            wrap_cluster = (slots, ranked, forms)
            continue
        order[slots] = ranked

    if wrap_cluster is not None:
        slots, ranked, forms = wrap_cluster
        slot_set = set(slots)
        middle = [int(order[s]) for s in range(P) if s not in slot_set]
        low = [i for i in ranked if forms[i].approx(alpha, beta) < 0.5]
        high = [i for i in ranked if forms[i].approx(alpha, beta) >= 0.5]
        order = np.array(low + middle + high, dtype=order.dtype)
    if int(order[0]) != 0:
        raise CertificationError("(0, 0) is not the first point")
    return SortResult(order, floors, resolved)


def enumerate_and_sort(q: int, qp: int, alpha: CFReal, beta: CFReal, bits: int = 64,
                       max_depth: int = DEFAULT_MAX_DEPTH) -> np.ndarray:
    """Flat indices ``n*q' + m`` of E_{q,q'} in clockwise order from (0, 0)."""
    return _sort(q, qp, alpha, beta, bits, max_depth).order


@dataclass
class NeighborTable:
    q: int
    qp: int
    succ: np.ndarray   # succ[n*qp + m] = flat index of the clockwise neighbour

    def successor(self, n: int, m: int) -> tuple[int, int]:
        return divmod(int(self.succ[n * self.qp + m]), self.qp)

    def is_bijection(self) -> bool:
        return np.array_equal(np.sort(self.succ), np.arange(self.q * self.qp))

    def cycle_length(self, start: int = 0) -> int:
        i, steps = self.succ[start], 1
        while i != start and steps <= len(self.succ):
            i = self.succ[i]
            steps += 1
        return steps

    def is_single_cycle(self) -> bool:
        return self.is_bijection() and self.cycle_length() == self.q * self.qp

    def __eq__(self, other) -> bool:
        return (isinstance(other, NeighborTable) and (self.q, self.qp) == (other.q, other.qp)
                and np.array_equal(self.succ, other.succ))

    def mismatches(self, other: "NeighborTable") -> np.ndarray:
        return np.flatnonzero(self.succ != other.succ)


@dataclass
class GapSet:
    q: int
    qp: int
    counts: dict[LinearForm, int] = field(default_factory=dict)

    @property
    def distinct(self) -> int:
        return len(self.counts)

    def total_count(self) -> int:
        return sum(self.counts.values())

    def weighted_sum(self) -> LinearForm:
        s = LinearForm(0, 0, 0)
        for t, c in self.counts.items():
            s = s + t * c
        return s

    def sorted_triples(self, alpha: CFReal, beta: CFReal, max_depth: int = DEFAULT_MAX_DEPTH) -> list[LinearForm]:
        def cmp(x, y):
            s = certified_sign(x - y, alpha, beta, max_depth)
            if s is Sign.UNDECIDED:
                raise CertificationError(f"cannot separate gap values {x} and {y}")
            return -1 if s is Sign.NEGATIVE else (1 if s is Sign.POSITIVE else 0)
        return sorted(self.counts, key=functools.cmp_to_key(cmp))

    def certify(self, alpha: CFReal, beta: CFReal, max_depth: int = DEFAULT_MAX_DEPTH) -> None:
        """Raise unless every triple lies in (0, 1), counts sum to q q' and the circle is covered once."""
        if self.total_count() != self.q * self.qp:
            raise CertificationError("multiplicities do not sum to q q'")
        if self.weighted_sum() != ONE:
            raise CertificationError(f"weighted gap sum is {self.weighted_sum()}, not (0, 0, 1)")
        for t in self.counts:
            if certified_sign(t, alpha, beta, max_depth) is not Sign.POSITIVE:
                raise CertificationError(f"gap {t} not certified positive")
            if t != ONE and certified_sign(t - ONE, alpha, beta, max_depth) is not Sign.NEGATIVE:
                raise CertificationError(f"gap {t} not certified below one")

    def to_csv(self, alpha: CFReal, beta: CFReal, primitive: set | None = None) -> str:
        if primitive is None:
            primitive = set(primitive_gaps(self, alpha, beta))
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for t in self.sorted_triples(alpha, beta):
            w.writerow([self.q, self.qp, t.u, t.v, t.w, self.counts[t],
                        decimal_approx(t, alpha, beta, 20), int(t in primitive)])
        return buf.getvalue()


def _gaps_from_order(q, qp, order: np.ndarray, floors: np.ndarray) -> GapSet:
    P = q * qp
    if P == 1:
        return GapSet(q, qp, {ONE: 1})
    nxt = np.roll(order, -1)
    dn = nxt // qp - order // qp
    dm = nxt % qp - order % qp
    dc = floors[order] - floors[nxt]
    dc[-1] += 1
    W1, W2 = 2 * qp + 1, 2 * (q + qp) + 5
    C = q + qp + 2
    key = ((dn + q) * W1 + (dm + qp)) * W2 + (dc + C)
    uniq, cnt = np.unique(key, return_counts=True)
    counts = {}
    for k, c in zip(uniq.tolist(), cnt.tolist()):
        rest, w = divmod(k, W2)
        u, v = divmod(rest, W1)
        counts[LinearForm(u - q, v - qp, w - C)] = c
    return GapSet(q, qp, counts)


def gap_set(q: int, qp: int, alpha: CFReal, beta: CFReal, bits: int = 64,
            max_depth: int = DEFAULT_MAX_DEPTH, certify: bool = True) -> tuple[GapSet, NeighborTable]:
    q, qp = int(q), int(qp)
    res = _sort(q, qp, alpha, beta, bits, max_depth)
    gs = _gaps_from_order(q, qp, res.order, res.floors)
    if certify:
        gs.certify(alpha, beta, max_depth)
    succ = np.empty(q * qp, dtype=np.int64)
    succ[res.order] = np.roll(res.order, -1)
    return gs, NeighborTable(q, qp, succ)


def gaps_of_subset(q: int, qp: int, order: np.ndarray, floors: np.ndarray, keep_rows: int) -> GapSet:
    """Gap set of E_{q, keep_rows} read off an ordering of a larger E_{q,q'} (rows m < keep_rows)."""
    sub = order[(order % qp) < keep_rows]
    n, m = sub // qp, sub % qp
    new_order = n * keep_rows + m
    new_floors = np.empty(q * keep_rows, dtype=np.int64)
    new_floors[new_order] = floors[sub]
    return _gaps_from_order(q, keep_rows, new_order, new_floors)


def distinct_count(N: int, alpha: CFReal, beta: CFReal, **kw) -> int:
    if N < 1:
        raise ValueError("N must be >= 1")
    return gap_set(N, N, alpha, beta, **kw)[0].distinct


# -- primitive lengths -----------------------------------------------------------

def _solve_nonneg(cols: list[LinearForm], target: LinearForm) -> list[int] | None:
    """Unique solution of ``sum c_i cols_i = target`` for independent ``cols``, if nonneg integral."""
    if not cols:
        return [] if target.is_zero() else None
    M = [[Fraction(c[r]) for c in cols] + [Fraction(target[r])] for r in range(3)]
    k = len(cols)
    row = 0
    piv = []
    for col in range(k):
        p = next((r for r in range(row, 3) if M[r][col] != 0), None)
        if p is None:
            raise ValueError("columns are not independent")
        M[row], M[p] = M[p], M[row]
        for r in range(3):
            if r != row and M[r][col] != 0:
                f = M[r][col] / M[row][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[row])]
        piv.append(row)
        row += 1
    for r in range(row, 3):
        if M[r][k] != 0:
            return None
    sol = [M[i][k] / M[i][i] for i in range(k)]
    if any(s < 0 or s.denominator != 1 for s in sol):
        return None
    return [int(s) for s in sol]


def _rank(cols: list[LinearForm]) -> int:
    rows = [[Fraction(c[r]) for c in cols] for r in range(3)]
    rank = 0
    for col in range(len(cols)):
        p = next((r for r in range(rank, 3) if rows[r][col] != 0), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        for r in range(rank + 1, 3):
            f = rows[r][col] / rows[rank][col]
            rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def is_sum_of_smaller(target: LinearForm, smaller: list[LinearForm], values: dict, limit: int,
                      max_enum: int = 2_000_000) -> bool:
    """Whether ``target`` is a nonnegative integer combination (>= 2 terms) of ``smaller``.

    ``smaller`` is in increasing value order; ``values`` maps triples to floats
    and is only used to bound the search.  The combination is checked exactly.
    """
    basis, free = [], []
    for s in smaller:
        if len(basis) < 3 and _rank(basis + [s]) == len(basis) + 1:
            basis.append(s)
        else:
            free.append(s)
    tv = values[target]
    bounds = [min(limit, int(tv / values[s] * (1 + 1e-9)) + 1) for s in free]
    seen = 0
    for combo in product(*(range(b + 1) for b in bounds)):
        seen += 1
        if seen > max_enum:
            raise RuntimeError("primitive-length search exceeded its enumeration budget")
        used = sum(c * values[s] for c, s in zip(combo, free))
        if used > tv * (1 + 1e-9):
            continue
        rest = target
        for c, s in zip(combo, free):
            rest = rest - s * c
        sol = _solve_nonneg(basis, rest)
        if sol is not None and sum(sol) + sum(combo) >= 2 and sum(sol) + sum(combo) <= limit:
            return True
    return False


def primitive_gaps(g: GapSet, alpha: CFReal, beta: CFReal) -> list[LinearForm]:
    """Gap triples that are not sums of strictly smaller gap values of the same set."""
    ordered = g.sorted_triples(alpha, beta)
    values = {t: t.approx(alpha, beta) for t in ordered}
    out = []
    for i, t in enumerate(ordered):
        if not is_sum_of_smaller(t, ordered[:i], values, g.q * g.qp):
            out.append(t)
    return out
