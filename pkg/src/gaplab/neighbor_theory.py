"""Closed-form neighbour maps and their gap tables.

A :class:`CaseTable` lists rectangles of index pairs ``(n, m)`` together with
the gap triple of each rectangle.  The triple ``(dn, dm, dc)`` also fixes the
successor ``(n + dn, m + dm)``, so a table doubles as a permutation of the
index set that can be compared point-for-point with the brute-force oracle.

Tables are built in a *role view*: the continued fraction ``A`` (index ``i``)
plays alpha and ``B`` (index ``j``) plays beta.  The bounded family's regime
``q'_k < N <= q_{k+1}`` is the same construction with alpha and beta swapped.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .cf_core import (
    DEFAULT_MAX_DEPTH,
    ONE,
    CFReal,
    LinearForm,
    Sign,
    certified_sign,
    theta_form,
)
from .constructions import PairConstruction
from .gap_engine import NeighborTable
from .report import Report


class StructuralError(RuntimeError):
    """A quantity the construction relies on came out inconsistent."""


@dataclass(frozen=True)
class Rect:
    n0: int
    n1: int
    m0: int
    m1: int

    @property
    def size(self) -> int:
        return max(self.n1 - self.n0, 0) * max(self.m1 - self.m0, 0)

    @property
    def empty(self) -> bool:
        return self.size == 0

    def intersect(self, other: "Rect") -> "Rect":
        return Rect(max(self.n0, other.n0), min(self.n1, other.n1),
                    max(self.m0, other.m0), min(self.m1, other.m1))

    def swap(self) -> "Rect":
        return Rect(self.m0, self.m1, self.n0, self.n1)


@dataclass
class Case:
    label: str
    gap: LinearForm
    rects: list[Rect]

    @property
    def size(self) -> int:
        return sum(r.size for r in self.rects)


@dataclass
class CaseTable:
    q: int
    qp: int
    cases: list[Case]
    context: dict = field(default_factory=dict)

    def gaps(self) -> list[LinearForm]:
        seen = []
        for c in self.cases:
            if c.size and c.gap not in seen:
                seen.append(c.gap)
        return seen

    @property
    def distinct(self) -> int:
        return len(self.gaps())

    def region_total(self) -> int:
        return sum(c.size for c in self.cases)

    def weighted_sum(self) -> LinearForm:
        s = LinearForm(0, 0, 0)
        for c in self.cases:
            s = s + c.gap * c.size
        return s

    def multiplicities(self) -> dict[LinearForm, int]:
        out: dict[LinearForm, int] = {}
        for c in self.cases:
            if c.size:
                out[c.gap] = out.get(c.gap, 0) + c.size
        return out

    def _paint(self) -> np.ndarray:
        hits = np.zeros((self.q, self.qp), dtype=np.int32)
        for c in self.cases:
            for r in c.rects:
                if not r.empty:
                    if r.n0 < 0 or r.m0 < 0 or r.n1 > self.q or r.m1 > self.qp:
                        raise StructuralError(f"rectangle {r} of {c.label!r} leaves the index set")
                    hits[r.n0:r.n1, r.m0:r.m1] += 1
        return hits

    def is_partition(self) -> bool:
        """Rectangles cover every index pair exactly once."""
        if self.region_total() != self.q * self.qp:
            return False
        return bool(np.all(self._paint() == 1))

    def neighbor_table(self) -> NeighborTable:
        succ = np.full(self.q * self.qp, -1, dtype=np.int64)
        for c in self.cases:
            for r in c.rects:
                if r.empty:
                    continue
                n = np.arange(r.n0, r.n1)[:, None]
                m = np.arange(r.m0, r.m1)[None, :]
                src = (n * self.qp + m).ravel()
                nn, mm = n + c.gap.u, m + c.gap.v
                if nn.min() < 0 or nn.max() >= self.q or mm.min() < 0 or mm.max() >= self.qp:
                    raise StructuralError(f"{c.label!r} maps outside the index set")
                succ[src] = (nn * self.qp + mm).ravel()
        if np.any(succ < 0):
            raise StructuralError("table does not cover every point")
        return NeighborTable(self.q, self.qp, succ)

    def certify_gaps(self, alpha: CFReal, beta: CFReal, max_depth: int = DEFAULT_MAX_DEPTH) -> bool:
        """Every gap certified in (0, 1) and pairwise distinct values certified apart."""
        gaps = self.gaps()
        for g in gaps:
            if certified_sign(g, alpha, beta, max_depth) is not Sign.POSITIVE:
                return False
            if g != ONE and certified_sign(g - ONE, alpha, beta, max_depth) is not Sign.NEGATIVE:
                return False
        for x in range(len(gaps)):
            for y in range(x + 1, len(gaps)):
                if certified_sign(gaps[x] - gaps[y], alpha, beta, max_depth) in (Sign.ZERO, Sign.UNDECIDED):
                    return False
        return True

    def swapped(self) -> "CaseTable":
        cases = [Case(c.label, c.gap.swap(), [r.swap() for r in c.rects]) for c in self.cases]
        return CaseTable(self.qp, self.q, cases, dict(self.context, roles_swapped=True))

    def to_dict(self) -> dict:
        def offset(x: int, var: str) -> str:
            return f"{var} + {x}" if x >= 0 else f"{var} - {-x}"
        ctx = {k: (str(v) if isinstance(v, int) and not isinstance(v, bool) else v)
               for k, v in self.context.items()}
        ctx.update(q=str(self.q), qp=str(self.qp))
        return {"context": ctx, "cases": [
            {"label": c.label,
             "region_rects": [[str(r.n0), str(r.n1), str(r.m0), str(r.m1)] for r in c.rects if not r.empty],
             "offset": {"dn_formula": offset(c.gap.u, "n"), "dm_formula": offset(c.gap.v, "m")},
             "gap": [str(c.gap.u), str(c.gap.v), str(c.gap.w)]}
            for c in self.cases]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def _group(pieces: list[tuple[str, LinearForm, Rect]], q: int, qp: int, context: dict) -> CaseTable:
    cases: list[Case] = []
    index: dict[LinearForm, Case] = {}
    for label, gap, rect in pieces:
        if rect.empty:
            continue
        if gap in index:
            index[gap].rects.append(rect)
        else:
            index[gap] = Case(label, gap, [rect])
            cases.append(index[gap])
    return CaseTable(q, qp, cases, context)


# -- role views -------------------------------------------------------------------

@dataclass
class RoleView:
    """``A`` (index ``i``) plays alpha, ``B`` (index ``j``) plays beta; ``q'_j = b' q_i + 1``."""

    A: CFReal
    B: CFReal
    i: int
    j: int
    bprime: int
    swapped: bool = False

    @property
    def qi(self) -> int:
        return self.A.q(self.i)

    @property
    def qj(self) -> int:
        return self.B.q(self.j)

    def thA(self, k: int) -> LinearForm:
        return theta_form(self.A, k, "alpha")

    def thB(self, k: int) -> LinearForm:
        return theta_form(self.B, k, "beta")

    def D(self) -> LinearForm:
        return self.thA(self.i - 1) - self.thB(self.j - 1) * self.bprime

    def sign(self, f: LinearForm, max_depth: int = DEFAULT_MAX_DEPTH) -> Sign:
        return certified_sign(f, self.A, self.B, max_depth)

    def finish(self, table: CaseTable) -> CaseTable:
        return table.swapped() if self.swapped else table


def role_view(i: int, j: int, bprime: int, c: PairConstruction, swap: bool = False) -> RoleView:
    if swap:
        v = RoleView(c.beta, c.alpha, i, j, bprime, True)
    else:
        v = RoleView(c.alpha, c.beta, i, j, bprime, False)
    if i < 1 or j < 1:
        raise ValueError("indices must be >= 1")
    if v.qj != bprime * v.qi + 1:
        raise ValueError(f"q'_{j} = {v.qj} is not b' q_{i} + 1 with b' = {bprime} (q_{i} = {v.qi})")
    return v


def bounded_view(k: int, c: PairConstruction, swap: bool = False) -> RoleView:
    """Level-k view of the bounded family: ``E_{q_k,q'_k}`` or, swapped, ``E_{q'_k,q_{k+1}}``."""
    if swap:
        return role_view(k, k + 1, c.alpha.q(k + 1) // c.beta.q(k), c, swap=True)
    return role_view(k, k, c.beta.q(k) // c.alpha.q(k), c)


def bounded_regime(N: int, c: PairConstruction) -> tuple[int, bool]:
    """``(k, swapped)`` with ``q_k < N <= q'_k`` (unswapped) or ``q'_k < N <= q_{k+1}``."""
    a, b = c.alpha, c.beta
    k = 1
    while True:
        if a.q(k) < N <= b.q(k):
            return k, False
        if b.q(k) < N <= a.q(k + 1):
            return k, True
        if N <= a.q(k):
            raise ValueError(f"N = {N} is below the first regime")
        k += 1


# -- the four-rectangle exchange ------------------------------------------------------

def _exchange_pieces(v: RoleView) -> list[tuple[str, LinearForm, Rect]]:
    qi, qim = v.qi, v.A.q(v.i - 1)
    qj, qjm = v.qj, v.B.q(v.j - 1)
    step = v.bprime * qjm
    sa = 1 if v.i % 2 == 1 else -1
    sb = -1 if v.j % 2 == 1 else 1
    if sa == 1:
        n_ranges = {0: (0, qi - qim), 1: (qi - qim, qi)}
    else:
        n_ranges = {0: (qim, qi), 1: (0, qim)}
    if sb == -1:
        m_ranges = {0: (step, qj), 1: (0, step)}
    else:
        m_ranges = {0: (0, qj - step), 1: (qj - step, qj)}
    D = v.D()
    labels = {(0, 0): "D", (0, 1): "D - |q'_j beta|", (1, 0): "D + |q_i alpha|",
              (1, 1): "D + |q_i alpha| - |q'_j beta|"}
    pieces = []
    for wn in (0, 1):
        for wm in (0, 1):
            gap = D + v.thA(v.i) * wn - v.thB(v.j) * wm
            dn = sa * qim - wn * sa * qi
            dm = sb * step - wm * sb * qj
            if (gap.u, gap.v) != (dn, dm):
                raise StructuralError(f"exchange gap {gap} disagrees with shift ({dn}, {dm})")
            pieces.append((labels[wn, wm], gap, Rect(*n_ranges[wn], *m_ranges[wm])))
    return pieces


def exchange_table(i: int, j: int, bprime: int, c: PairConstruction, swap: bool = False) -> CaseTable:
    """Four-rectangle exchange on ``E_{q_i,q'_j}`` when ``q'_j = b' q_i + 1``."""
    v = role_view(i, j, bprime, c, swap)
    pieces = _exchange_pieces(v)
    ctx = {"kind": "exchange", "family": c.family, "i": i, "j": j, "bprime": bprime}
    t = CaseTable(v.qi, v.qj, [Case(lbl, g, [r]) for lbl, g, r in pieces], ctx)
    return v.finish(t)


def check_assumption(i: int, j: int, bprime: int, c: PairConstruction, swap: bool = False,
                     max_depth: int = DEFAULT_MAX_DEPTH) -> bool:
    """Certified truth of ``||q'_j beta|| < ||q_{i-1} alpha|| - b' ||q'_{j-1} beta||``."""
    v = RoleView(c.beta, c.alpha, i, j, bprime, True) if swap else RoleView(c.alpha, c.beta, i, j, bprime)
    s = v.sign(v.D() - v.thB(j), max_depth)
    if s is Sign.UNDECIDED:
        raise ArithmeticError("assumption undecided at the configured depth")
    return s is Sign.POSITIVE


# -- return times of a translation on a cyclic group ----------------------------------

@dataclass
class ReturnTimeProfile:
    r: int
    modulus: int
    N: int
    tau1: int
    tau2: int
    N1: int
    N2: int
    d1: int
    d2: int
    tau: np.ndarray = field(repr=False)
    carry: np.ndarray = field(repr=False)

    def segments(self) -> list[tuple[int, int, int, int]]:
        """``(m0, m1, return time, carry)`` for the three windows (possibly empty)."""
        return [(0, self.N1, self.tau1, self.d1),
                (self.N1, self.N2, self.tau1 + self.tau2, self.d1 + self.d2),
                (self.N2, self.N, self.tau2, self.d2)]

    def identities(self) -> list[bool]:
        r, M, N, N1, N2 = self.r, self.modulus, self.N, self.N1, self.N2
        t1, t2, d1, d2 = self.tau1, self.tau2, self.d1, self.d2

        def shifted(a, b, s):
            return range(a + s, b + s)
        return [
            shifted(0, N1, t1 * r) == shifted(N - N1, N, d1 * M),
            shifted(N1, N2, (t1 + t2) * r) == shifted(N - N2, N - N1, (d1 + d2) * M),
            shifted(N2, N, t2 * r) == shifted(0, N - N2, d2 * M),
        ]


def return_times(r: int, modulus: int, N: int) -> tuple[np.ndarray, np.ndarray]:
    """First return time to ``[0, N)`` of ``m -> m + r mod modulus``, and the wrap count, per m."""
    t = np.arange(modulus, dtype=np.int64)
    orbit = (t * r) % modulus                     # orbit of 0, in time order
    hits = np.flatnonzero(orbit < N)
    nxt = np.append(hits[1:], hits[0] + modulus)
    tau = np.empty(N, dtype=np.int64)
    tau[orbit[hits]] = nxt - hits
    m = np.arange(N, dtype=np.int64)
    landed = (m + tau * r) % modulus
    carry = (m + tau * r - landed) // modulus
    return tau, carry


def three_gap_return(r: int, modulus: int, N: int) -> ReturnTimeProfile:
    """Return-time profile of translation by ``r`` modulo ``modulus`` on the window ``[0, N)``.

    Computed by simulating the orbit; the three-window structure is then
    checked, not assumed.
    """
    if not 1 <= N <= modulus:
        raise ValueError("need 1 <= N <= modulus")
    if gcd(r, modulus) != 1:
        raise ValueError(f"gcd({r}, {modulus}) != 1")
    r %= modulus
    tau, carry = return_times(r, modulus, N)
    key = list(zip(tau.tolist(), carry.tolist()))
    N1 = next((m for m in range(N) if key[m] != key[0]), N)
    if N1 == N:
        N2 = N
    else:
        N2 = next(m for m in range(N - 1, -1, -1) if key[m] != key[N - 1]) + 1
    t1, d1 = key[0]
    t2, d2 = key[N - 1] if N2 < N else (key[0] if N1 == N else key[N - 1])
    if N2 == N and N1 < N:
        raise StructuralError("return times are not three-window structured")
    if N2 == N:
        t2, d2 = t1, d1
    prof = ReturnTimeProfile(r, modulus, N, t1, t2, N1, N2, d1, d2, tau, carry)
    for m0, m1, t, d in prof.segments():
        if m1 > m0 and not (np.all(tau[m0:m1] == t) and np.all(carry[m0:m1] == d)):
            raise StructuralError(f"window [{m0}, {m1}) is not a single translation")
    if not all(prof.identities()):
        raise StructuralError("interval-translation identities fail")
    return prof


# -- induced map on E_{q_k, N} and its extension to E_N ----------------------------------

def _induced_pieces(v: RoleView, N: int) -> tuple[list[tuple[str, LinearForm, Rect]], ReturnTimeProfile]:
    qA, qAm = v.qi, v.A.q(v.i - 1)
    M, qBm = v.qj, v.B.q(v.j - 1)
    if not 1 <= N <= M:
        raise ValueError(f"need N <= {M}")
    sa = 1 if v.i % 2 == 1 else -1
    sb = -1 if v.j % 2 == 1 else 1
    r_pos = (sb * v.bprime * qBm) % M
    prof = three_gap_return(r_pos, M, N)
    D = v.D()
    tA, tB = v.thA(v.i), v.thB(v.j)
    pieces = []
    names = ["Delta1", "Delta3", "Delta2"]
    for name, (m0, m1, t, d) in zip(names, prof.segments()):
        if m1 <= m0:
            continue
        dm = t * r_pos - d * M
        h, r = divmod(t * qAm, qA)
        if sa == -1:
            parts = [(0, (r, qA), -r), (1, (0, r), qA - r)]
        else:
            parts = [(0, (0, qA - r), r), (1, (qA - r, qA), r - qA)]
        for wrap, (n0, n1), dn in parts:
            if n1 <= n0:
                continue
            x, rx = divmod(dn - t * D.u, tA.u)
            y, ry = divmod(dm - t * D.v, tB.v)
            if rx or ry or x != h + wrap:
                raise StructuralError(f"induced shift ({dn}, {dm}) is not t D + x theta_A + y theta_B")
            gap = D * t + tA * x + tB * y
            label = name + (" + |q_k alpha|" if wrap else "")
            pieces.append((label, gap, Rect(n0, n1, m0, m1)))
    return pieces, prof


def induced_table_qkN(k: int, N: int, c: PairConstruction, swap: bool = False) -> CaseTable:
    """Neighbour map of ``E_{q_k,N}`` for ``q_k < N <= q'_k`` (or the swapped regime)."""
    if c.family != "bounded":
        raise ValueError("defined for the bounded family")
    v = bounded_view(k, c, swap)
    if not v.qi < N <= v.qj:
        raise ValueError(f"N = {N} outside ({v.qi}, {v.qj}]")
    pieces, prof = _induced_pieces(v, N)
    ctx = {"kind": "induced", "family": "bounded", "k": k, "N": N, "swapped": swap,
           "tau1": prof.tau1, "tau2": prof.tau2, "N1": prof.N1, "N2": prof.N2, "d1": prof.d1, "d2": prof.d2}
    return v.finish(_group(pieces, v.qi, N, ctx))


def _seven_pieces(v: RoleView, N: int) -> tuple[list[tuple[str, LinearForm, Rect]], list[LinearForm], int]:
    qA = v.qi
    a, R = (N - 1) // qA, N - ((N - 1) // qA) * qA
    th = v.thA(v.i)
    six, _ = _induced_pieces(v, N)
    pieces = []
    if v.i % 2 == 0:
        # n -> n + q_k moves clockwise by ||q_k alpha||; chain tops jump to the next chain base
        pieces.append(("|q_k alpha|", th, Rect(0, N - qA, 0, N)))
        for label, g, rc in six:
            for cnt, lo, hi in ((a, 0, R), (a - 1, R, qA)):
                x0, x1 = max(rc.n0, lo), min(rc.n1, hi)
                if x1 > x0:
                    pieces.append((f"{label} - {cnt}|q_k alpha|", g - th * cnt,
                                   Rect(x0 + cnt * qA, x1 + cnt * qA, rc.m0, rc.m1)))
    else:
        # n -> n - q_k moves clockwise; the base of a chain jumps to the top of the next one
        pieces.append(("|q_k alpha|", th, Rect(qA, N, 0, N)))
        for label, g, rc in six:
            dn = g.u
            split = R - dn          # image n0 + dn < R  <=>  n0 < split
            for cnt, lo, hi in ((a, rc.n0, min(rc.n1, split)), (a - 1, max(rc.n0, split), rc.n1)):
                if hi > lo:
                    pieces.append((f"{label} - {cnt}|q_k alpha|", g - th * cnt, Rect(lo, hi, rc.m0, rc.m1)))
    return pieces, [g for _, g, _ in six], a


def seven_table(k: int, N: int, c: PairConstruction) -> CaseTable:
    """Neighbour map of ``E_N`` for the bounded family; the regime is picked from N."""
    if c.family != "bounded":
        raise ValueError("defined for the bounded family")
    v = bounded_view(k, c, swap=False)
    swap = False
    if not v.qi < N <= v.qj:
        v = bounded_view(k, c, swap=True)
        swap = True
        if not v.qi < N <= v.qj:
            raise ValueError(f"N = {N} is in neither regime of level {k}")
    pieces, six_gaps, a = _seven_pieces(v, N)
    ctx = {"kind": "seven", "family": "bounded", "k": k, "N": N, "swapped": swap, "a": a,
           "R": N - a * v.qi}
    return v.finish(_group(pieces, N, N, ctx))


def seven_table_for(N: int, c: PairConstruction) -> CaseTable:
    k, _ = bounded_regime(N, c)
    return seven_table(k, N, c)


def lowerbound_check(k: int, N: int, c: PairConstruction, swap: bool = False,
                     max_depth: int = DEFAULT_MAX_DEPTH) -> Report:
    """Certify ``min gap(E_{q_k,N}) > a ||q_k alpha||`` where ``N = a q_k + R``, ``1 <= R <= q_k``."""
    v = bounded_view(k, c, swap)
    a = (N - 1) // v.qi
    pieces, _ = _induced_pieces(v, N)
    rep = Report(f"lower bound, k={k}, N={N}, swapped={swap}")
    for label, g, _ in pieces:
        rep.check(f"{label} > {a}|q_k alpha|", v.sign(g - v.thA(v.i) * a, max_depth) is Sign.POSITIVE)
    return rep


def gap_chain_check(k: int, c: PairConstruction, max_depth: int = DEFAULT_MAX_DEPTH) -> Report:
    """Certify the chain ``D > (q_k^5 - 1/q_k + 1/(q_k q'_k)) ||q_k alpha|| + ||q_{k+1} alpha|| / q'_k > 0``."""
    a, b = c.alpha, c.beta
    qk, qpk = a.q(k), b.q(k)
    D = theta_form(a, k - 1, "alpha") - theta_form(b, k - 1, "beta") * c.bpk(k)
    th, th1 = theta_form(a, k, "alpha"), theta_form(a, k + 1, "alpha")
    # scaled by q_k q'_k to stay integral
    rhs = th * (qk ** 6 * qpk - qpk + 1) + th1 * qk
    rep = Report(f"gap chain at k={k}")
    rep.check("D - rhs > 0", certified_sign(D * (qk * qpk) - rhs, a, b, max_depth) is Sign.POSITIVE)
    rep.check("rhs > 0", certified_sign(rhs, a, b, max_depth) is Sign.POSITIVE)
    rep.check("D > ||q_k alpha|| > b'_(k+1) ||q'_k beta||",
              certified_sign(D - th, a, b, max_depth) is Sign.POSITIVE
              and certified_sign(th - theta_form(b, k, "beta") * c.bpk(k + 1), a, b, max_depth)
              is Sign.POSITIVE)
    return rep


# -- the unbounded family ---------------------------------------------------------------

@dataclass
class UnboundedLevel:
    k: int
    A: int      # a_{4k+1}
    q3: int     # q_{4k-1}
    q4: int     # q_{4k}
    q5: int     # q_{4k+1}
    p3: int     # q'_{4k-1}
    p4: int     # q'_{4k}
    p5: int     # q'_{4k+1}
    delta: LinearForm
    th_a: LinearForm    # ||q_{4k+1} alpha||
    th_b: LinearForm    # ||q'_{4k+1} beta||


def unbounded_level(k: int, c: PairConstruction) -> UnboundedLevel:
    if c.family != "unbounded":
        raise ValueError("defined for the unbounded family")
    if k < 1:
        raise ValueError("k must be >= 1")
    a, b = c.alpha, c.beta
    lv = UnboundedLevel(
        k, a.a(4 * k + 1), a.q(4 * k - 1), a.q(4 * k), a.q(4 * k + 1), b.q(4 * k - 1), b.q(4 * k), b.q(4 * k + 1),
        theta_form(b, 4 * k - 1, "beta") - theta_form(a, 4 * k, "alpha"),
        theta_form(a, 4 * k + 1, "alpha"), theta_form(b, 4 * k + 1, "beta"))
    if lv.p5 != lv.q5 + 1:
        raise StructuralError("q'_{4k+1} != q_{4k+1} + 1")
    return lv


def delta_k(k: int, c: PairConstruction, max_depth: int = DEFAULT_MAX_DEPTH) -> tuple[LinearForm, Report]:
    """``delta_k = ||q'_{4k-1} beta|| - ||q_{4k} alpha||`` and the certified chain
    ``0 < 2 delta_k a_{4k+1} < ||q_{4k+1} alpha|| < ||q'_{4k+1} beta||``."""
    lv = unbounded_level(k, c)
    a, b = c.alpha, c.beta
    rep = Report(f"delta_{k} chain")
    rep.check("delta_k > 0", certified_sign(lv.delta, a, b, max_depth) is Sign.POSITIVE)
    rep.check("2 a_(4k+1) delta_k < ||q_(4k+1) alpha||",
              certified_sign(lv.delta * (2 * lv.A) - lv.th_a, a, b, max_depth) is Sign.NEGATIVE)
    rep.check("||q_(4k+1) alpha|| < ||q'_(4k+1) beta||",
              certified_sign(lv.th_a - lv.th_b, a, b, max_depth) is Sign.NEGATIVE)
    return lv.delta, rep


def prop42_table(k: int, c: PairConstruction, resolve_overlaps: bool = True) -> CaseTable:
    """The twelve-case neighbour map of ``E_{q_{4k+1}, q'_{4k+1}}``.

    Cases 8 and 11 carry one sub-case per ``c = 1 .. a_{4k+1} - 1``.  With
    ``resolve_overlaps`` the rectangles that case 10 shares with case 8 at
    ``c = a_{4k+1} - 1`` and with case 11 at ``c = 1`` are removed from case 10.
    """
    lv = unbounded_level(k, c)
    A, q3, q4, q5, p3, p5 = lv.A, lv.q3, lv.q4, lv.q5, lv.p3, lv.p5
    d, ta, tb = lv.delta, lv.th_a, lv.th_b
    if not (q4 - 2 * q3 > 0 and p5 - (2 * A + 1) * p3 > 0):
        raise StructuralError("case intervals are not well defined")
    cases_spec = [
        ("case 1", d, (-q4, -p3), [Rect(q4, q5, p3, p5)]),
        ("case 2", tb - d * A, (A * q4, A * p3 - p5), [Rect(0, q3, p5 - A * p3, p5)]),
        ("case 3", tb - d * (A - 1), ((A - 1) * q4, (A - 1) * p3 - p5), [Rect(q3, q4, p5 - (A - 1) * p3, p5)]),
        ("case 4", ta + tb - d * (2 * A), (2 * A * q4 - q5, 2 * A * p3 - p5),
         [Rect(q3, 2 * q3, p5 - A * p3, p5 - (A - 1) * p3)]),
        ("case 5", ta + tb - d * (2 * A - 1), ((2 * A - 1) * q4 - q5, (2 * A - 1) * p3 - p5),
         [Rect(2 * q3, q4, p5 - A * p3, p5 - (A - 1) * p3)]),
        ("case 6", ta + tb - d * (2 * A), (2 * A * q4 - q5, 2 * A * p3 - p5),
         [Rect(0, q3, p5 - (A + 1) * p3, p5 - A * p3)]),
        ("case 7", ta - d * A, (A * q4 - q5, A * p3), [Rect(q3, q4, p5 - (A + 1) * p3, p5 - A * p3)]),
    ]
    for cc in range(1, A):
        cases_spec.append((f"case 8 c={cc}", ta - d * (A + cc), ((A + cc) * q4 - q5, (A + cc) * p3),
                     [Rect(0, q4, p5 - (A + cc + 1) * p3, p5 - (A + cc) * p3)]))
    cases_spec.append(("case 9", ta - d * (2 * A), (2 * A * q4 - q5, 2 * A * p3), [Rect(0, 2 * q3, 0, p5 - 2 * A * p3)]))
    m_lo = p3 if resolve_overlaps else 0
    m_hi = p5 - 2 * A * p3 if resolve_overlaps else p5 - (2 * A - 1) * p3
    cases_spec.append(("case 10", ta - d * (2 * A - 1), ((2 * A - 1) * q4 - q5, (2 * A - 1) * p3),
                 [Rect(2 * q3, q4, m_lo, m_hi)]))
    for cc in range(1, A):
        cases_spec.append((f"case 11 c={cc}", ta - d * (2 * A - cc), ((2 * A - cc) * q4 - q5, (2 * A - cc) * p3),
                     [Rect((cc - 1) * q4 + 2 * q3, cc * q4 + 2 * q3, 0, p3)]))
    cases_spec.append(("case 12", ta - d * A, (A * q4 - q5, A * p3), [Rect((A - 1) * q4 + 2 * q3, q5, 0, p3)]))
    cases = []
    for label, gap, (dn, dm), rects in cases_spec:
        if (gap.u, gap.v) != (dn, dm):
            raise StructuralError(f"{label}: gap {gap} disagrees with stated shift ({dn}, {dm})")
        cases.append(Case(label, gap, rects))
    ctx = {"kind": "prop42", "family": "unbounded", "k": k, "a_4k+1": A, "overlaps_resolved": resolve_overlaps}
    return CaseTable(q5, p5, cases, ctx)


def prop42_counts(k: int, c: PairConstruction) -> Report:
    """Region sizes against their closed-form counts, including the overlap correction."""
    lv = unbounded_level(k, c)
    A, q3, q4, q5, p3, p4, p5 = lv.A, lv.q3, lv.q4, lv.q5, lv.p3, lv.p4, lv.p5
    t = prop42_table(k, c)
    size = {cs.label: cs.size for cs in t.cases}
    rep = Report(f"twelve-case tallies, k={k}")
    rep.check("size of case 1", size["case 1"] == (q5 - q4) * p4, f"{size['case 1']}")
    rep.check("size of case 2", size["case 2"] == q3 * A * p3)
    rep.check("size of case 3", size["case 3"] == (q4 - q3) * (A - 1) * p3)
    rep.check("cases 4 and 6 together", size["case 4"] + size["case 6"] == 2 * q3 * p3)
    rep.check("size of case 5", size["case 5"] == (q4 - 2 * q3) * p3)
    rep.check("cases 7 and 12 together", size["case 7"] + size["case 12"] == 2 * (q4 - q3) * p3)
    rep.check("cases 8 and 11 per value of c",
              all(size[f"case 8 c={cc}"] + size[f"case 11 c={A - cc}"] == 2 * q4 * p3 for cc in range(1, A)))
    rep.check("case 10 after overlaps", size["case 10"] == (q4 - 2 * q3) * (p5 - (2 * A + 1) * p3))
    rep.check("size of case 9", size["case 9"] == 2 * q3 * (p5 - 2 * A * p3))
    raw10 = prop42_table(k, c, resolve_overlaps=False).cases
    r10 = next(cs for cs in raw10 if cs.label == "case 10").rects[0]
    r8 = next(cs for cs in raw10 if cs.label == f"case 8 c={A - 1}").rects[0]
    r11 = next(cs for cs in raw10 if cs.label == "case 11 c=1").rects[0]
    ov = (q4 - 2 * q3) * p3
    rep.check("overlap of cases 8 and 10", r10.intersect(r8).size == ov, f"{r10.intersect(r8).size}")
    rep.check("overlap of cases 10 and 11", r10.intersect(r11).size == ov, f"{r10.intersect(r11).size}")
    rep.check("total", t.region_total() == q5 * p5, f"{t.region_total()} vs {q5 * p5}")
    rep.check("weighted sum S = 1", t.weighted_sum() == ONE, str(t.weighted_sum()))
    return rep


def phi_induction_map(k: int, c: PairConstruction) -> NeighborTable:
    """Neighbour map of ``E_{q_{4k+1},q'_{4k+1}}`` rebuilt from the exchange map by inducing on G.

    ``phi(n, m) = (|n + q_{4k}|, |m + q'_{4k-1}|)``; ``G`` is the set where
    phi jumps clockwise.  Points outside ``phi(G)`` go to their phi-preimage,
    points in ``phi(G)`` to ``phi`` at their second entering time into G.
    """
    lv = unbounded_level(k, c)
    q4, q5, p3, p4, p5 = lv.q4, lv.q5, lv.p3, lv.p4, lv.p5
    P = q5 * p5
    t = np.arange(P, dtype=np.int64)
    n = (t * q4) % q5
    m = (t * p3) % p5
    cyc = n * p5 + m                        # phi^t(0, 0)
    if len(np.unique(cyc)) != P:
        raise StructuralError("phi is not a single cycle")
    when = np.empty(P, dtype=np.int64)
    when[cyc] = t
    in_G = (n >= q5 - q4) | (m >= p4)
    g_times = np.flatnonzero(in_G)
    if len(g_times) == 0:
        raise StructuralError("G is empty")
    g_ext = np.concatenate([g_times, g_times + P, g_times + 2 * P])

    def next_entry(s):
        return g_ext[np.searchsorted(g_ext, s)]

    first = next_entry(t)                    # time of first entry at or after t
    second = next_entry(first + 1)           # second entry
    if np.any(second - t > 2 * P):
        raise StructuralError("orbit walk exceeded q q' steps")
    in_phiG = np.roll(in_G, 1)               # phi^t in phi(G)  <=>  phi^(t-1) in G
    target_t = np.where(in_phiG, second, t - 1) % P
    succ = np.empty(P, dtype=np.int64)
    succ[cyc] = cyc[target_t]
    return NeighborTable(q5, p5, succ)


def unbounded_witnesses(k: int, c: PairConstruction) -> list[LinearForm]:
    """``||q_{4k+1} alpha|| - (2 a_{4k+1} - c - 1) delta_k`` for ``c = 0 .. a_{4k+1} - 1``.

    Each is the gap between the adjacent points ``(c q_{4k} + 2 q_{4k-1}, 0)`` and
    ``(q_{4k+1} - q_{4k}, (2 a_{4k+1} - c - 1) q'_{4k-1})`` of E_{q_{4k+1}}.
    """
    lv = unbounded_level(k, c)
    out = []
    for cc in range(lv.A):
        g = lv.th_a - lv.delta * (2 * lv.A - cc - 1)
        n1, m1 = cc * lv.q4 + 2 * lv.q3, 0
        n2, m2 = lv.q5 - lv.q4, (2 * lv.A - cc - 1) * lv.p3
        if (g.u, g.v) != (n2 - n1, m2 - m1):
            raise StructuralError(f"witness {cc}: gap {g} does not join the stated points")
        out.append(g)
    return out


def witness_points(k: int, c: PairConstruction) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    lv = unbounded_level(k, c)
    return [((cc * lv.q4 + 2 * lv.q3, 0), (lv.q5 - lv.q4, (2 * lv.A - cc - 1) * lv.p3)) for cc in range(lv.A)]
