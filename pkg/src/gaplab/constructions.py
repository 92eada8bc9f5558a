"""The two explicit families of pairs (alpha, beta).

``bounded``: convergent denominators interlock as ``q'_k = b'_k q_k + 1`` and
``q_{k+1} = b_{k+1} q'_k + 1``; every E_N has at most seven gap lengths.

``unbounded``: blocks of four partial quotients driven by ``R_k = q'_{4k-3}``
and ``Q_k = q'_{4k-2}``; the partial quotient ``a_{4k+1}`` grows without
bound and so does the number of gap lengths along ``N = q_{4k+1}``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from math import gcd
from typing import Iterator

from .cf_core import (
    DEFAULT_MAX_DEPTH,
    CFReal,
    LinearForm,
    PartialQuotientStream,
    Sign,
    bigint,
    certified_sign,
    theta_form,
)
from .report import Report

BOUNDED_LEVEL_CAP = 6
UNBOUNDED_LEVEL_CAP = 3


# -- generators -------------------------------------------------------------

def _bounded_level_rows() -> Iterator[dict]:
    q_prev, q = 1, 3          # q_0, q_1
    qp_prev, qp = 1, 28       # q'_0, q'_1
    bp = 9                    # b'_1
    yield {"k": 1, "a": 3, "ap": 28, "q": q, "qp": qp, "b": None, "bp": bp}
    k = 1
    while True:
        b_next = bigint(q ** 6 + q_prev - 1)
        a_next = bigint(b_next * bp + q ** 5)
        q_prev, q = q, bigint(a_next * q + q_prev)
        bp_next = bigint(qp ** 6 + qp_prev - 1)
        ap_next = bigint(bp_next * b_next + qp ** 5)
        qp_prev, qp = qp, bigint(ap_next * qp + qp_prev)
        bp = bp_next
        k += 1
        yield {"k": k, "a": a_next, "ap": ap_next, "q": q, "qp": qp, "b": b_next, "bp": bp}


_bounded_rows: list[dict] = []
_bounded_source = _bounded_level_rows()


def bounded_levels() -> Iterator[dict]:
    """Yield level k = 1, 2, ... of the bounded family as a dict of integers.

    Levels are computed once per process and shared by every caller.
    """
    k = 0
    while True:
        if k == len(_bounded_rows):
            _bounded_rows.append(next(_bounded_source))
        yield _bounded_rows[k]
        k += 1


def unbounded_quotients() -> Iterator[tuple[int, int, int, int]]:
    """Yield ``(i, a_i, a'_i, block)`` for the unbounded family; block k covers 4k-1..4k+2."""
    qs = [0, 1]
    qps = [0, 1]

    def push(a, ap):
        qs.append(a * qs[-1] + qs[-2])
        qps.append(ap * qps[-1] + qps[-2])

    for i, (a, ap) in enumerate([(2, 3), (2, 1)], start=1):
        push(a, ap)
        yield i, a, ap, 0
    k = 1
    while True:
        R, Q = qps[-2], qps[-1]  # q'_{4k-3}, q'_{4k-2}
        block = [
            (1, 2),
            (3, 4 * Q + 3 * R - 2),
            (2 * Q + R - 1, 1),
            (6 * Q + 4 * R, 6 * Q + 4 * R - 1),
        ]
        for off, (a, ap) in enumerate(block):
            push(a, ap)
            yield 4 * k - 1 + off, a, ap, k
        k += 1


def bounded_alpha() -> CFReal:
    return CFReal(PartialQuotientStream(lambda: (lv["a"] for lv in bounded_levels()), "bounded"), "alpha")


def bounded_beta() -> CFReal:
    return CFReal(PartialQuotientStream(lambda: (lv["ap"] for lv in bounded_levels()), "bounded"), "beta")


def unbounded_alpha() -> CFReal:
    return CFReal(PartialQuotientStream(lambda: (t[1] for t in unbounded_quotients()), "unbounded"), "alpha")


def unbounded_beta() -> CFReal:
    return CFReal(PartialQuotientStream(lambda: (t[2] for t in unbounded_quotients()), "unbounded"), "beta")


# -- closed forms quoted for cross-checking ----------------------------------

def r_next_poly(Q: int, R: int) -> int:
    return 8 * Q ** 2 + (10 * R - 1) * Q + 3 * R ** 2 - R


def q_next_poly_printed(Q: int, R: int) -> int:
    """Closed form for Q_{k+1} exactly as printed; disagrees with the recurrence."""
    return 48 * Q ** 3 + (96 * R - 6) * Q ** 2 + (43 * R ** 2 - 5 * R - 2) * Q + 12 * R ** 3 - 4 * R ** 2 - R


def q_next_poly_corrected(Q: int, R: int) -> int:
    """Closed form for Q_{k+1} re-derived from the convergent recurrences."""
    return 48 * Q ** 3 + (92 * R - 6) * Q ** 2 + (58 * R ** 2 - 10 * R - 2) * Q + 12 * R ** 3 - 4 * R ** 2 - R


# -- construction ------------------------------------------------------------

@dataclass
class PairConstruction:
    """Joint continued-fraction data of one family.

    ``a``, ``ap``, ``b``, ``bp``, ``R``, ``Q`` are stored from index 1 (``b[0]``
    is ``None``: ``b_1`` is not defined).  ``q`` and ``qp`` are stored from
    index -1, so ``q[k + 1]`` is ``q_k``.
    """

    family: str
    levels: int
    a: list[int]
    ap: list[int]
    q: list[int]
    qp: list[int]
    b: list = field(default_factory=list)
    bp: list = field(default_factory=list)
    R: list[int] = field(default_factory=list)
    Q: list[int] = field(default_factory=list)
    _alpha: CFReal | None = field(default=None, repr=False, compare=False)
    _beta: CFReal | None = field(default=None, repr=False, compare=False)

    # index helpers
    def qk(self, k: int) -> int:
        return self.q[k + 1]

    def qpk(self, k: int) -> int:
        return self.qp[k + 1]

    def ak(self, k: int) -> int:
        return self.a[k - 1]

    def apk(self, k: int) -> int:
        return self.ap[k - 1]

    def bk(self, k: int) -> int:
        return self.b[k - 1]

    def bpk(self, k: int) -> int:
        return self.bp[k - 1]

    def Rk(self, k: int) -> int:
        return self.R[k - 1]

    def Qk(self, k: int) -> int:
        return self.Q[k - 1]

    @property
    def max_index(self) -> int:
        return len(self.a)

    @property
    def alpha(self) -> CFReal:
        if self._alpha is None:
            self._alpha = bounded_alpha() if self.family == "bounded" else unbounded_alpha()
        return self._alpha

    @property
    def beta(self) -> CFReal:
        if self._beta is None:
            self._beta = bounded_beta() if self.family == "bounded" else unbounded_beta()
        return self._beta

    def to_dict(self) -> dict:
        def enc(xs):
            return [None if x is None else str(x) for x in xs]
        return {"family": self.family, "levels": self.levels,
                "a": enc(self.a), "a'": enc(self.ap), "q": enc(self.q), "q'": enc(self.qp),
                "b": enc(self.b), "b'": enc(self.bp), "R": enc(self.R), "Q": enc(self.Q)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "PairConstruction":
        d = json.loads(text)

        def dec(xs):
            return [None if x is None else int(x) for x in xs]
        return cls(d["family"], int(d["levels"]), dec(d["a"]), dec(d["a'"]), dec(d["q"]),
                   dec(d["q'"]), dec(d["b"]), dec(d["b'"]), dec(d["R"]), dec(d["Q"]))


def _check_levels(levels: int, cap: int) -> None:
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if levels > cap:
        raise ValueError(f"levels {levels} exceeds cap {cap}")


def bounded_family(levels: int, cap: int = BOUNDED_LEVEL_CAP) -> PairConstruction:
    _check_levels(levels, cap)
    rows = list(itertools.islice(bounded_levels(), levels))
    return PairConstruction(
        family="bounded", levels=levels,
        a=[r["a"] for r in rows], ap=[r["ap"] for r in rows],
        q=[0, 1] + [r["q"] for r in rows], qp=[0, 1] + [r["qp"] for r in rows],
        b=[r["b"] for r in rows], bp=[r["bp"] for r in rows],
    )


def unbounded_family(levels: int, cap: int = UNBOUNDED_LEVEL_CAP) -> PairConstruction:
    """Level k covers indices through 4k+2; R, Q are read off the convergents."""
    _check_levels(levels, cap)
    last = 4 * levels + 2
    rows = list(itertools.islice(unbounded_quotients(), last))
    a = [r[1] for r in rows]
    ap = [r[2] for r in rows]
    q, qp = [0, 1], [0, 1]
    for x, xp in zip(a, ap):
        q.append(x * q[-1] + q[-2])
        qp.append(xp * qp[-1] + qp[-2])
    R = [qp[4 * k - 3 + 1] for k in range(1, levels + 2)]
    Q = [qp[4 * k - 2 + 1] for k in range(1, levels + 2)]
    return PairConstruction(family="unbounded", levels=levels, a=a, ap=ap, q=q, qp=qp, R=R, Q=Q)


# -- verification --------------------------------------------------------------

def _recurrence_checks(c: PairConstruction, rep: Report) -> None:
    for name, xs, qs in (("alpha", c.a, c.q), ("beta", c.ap, c.qp)):
        ok = qs[0] == 0 and qs[1] == 1 and all(
            qs[k + 1] == xs[k - 1] * qs[k] + qs[k - 1] for k in range(1, len(xs) + 1))
        rep.check(f"convergent recurrence ({name})", ok)


def _verify_bounded(c: PairConstruction, rep: Report) -> None:
    L = c.levels
    for k in range(1, L + 1):
        qk, qpk, bpk = c.qk(k), c.qpk(k), c.bpk(k)
        rep.check(f"level {k}: q'_k = b'_k q_k + 1", qpk == bpk * qk + 1, f"{qpk} vs {bpk * qk + 1}")
        rep.check(f"level {k}: q_k < b'_k < q_k^3", qk < bpk < qk ** 3)
        rep.check(f"level {k}: gcd(q_k, q'_k) = 1", gcd(qk, qpk) == 1)
        if k < L:
            b1, q1 = c.bk(k + 1), c.qk(k + 1)
            rep.check(f"level {k}: q_(k+1) = b_(k+1) q'_k + 1", q1 == b1 * qpk + 1)
            rep.check(f"level {k}: q_(k+1) = b'_k (b_(k+1) q_k) + (b_(k+1) + 1)",
                      q1 == bpk * (b1 * qk) + (b1 + 1))
            rep.check(f"level {k}: q'_k < b_(k+1) < q'_k^3", qpk < b1 < qpk ** 3)
            rep.check(f"level {k}: b_(k+1) = q_k^6 + q_(k-1) - 1", b1 == qk ** 6 + c.qk(k - 1) - 1)
            rep.check(f"level {k}: b'_(k+1) = q'_k^6 + q'_(k-1) - 1",
                      c.bpk(k + 1) == qpk ** 6 + c.qpk(k - 1) - 1)
            rep.check(f"level {k}: a_(k+1) recursion", c.ak(k + 1) == (qk ** 6 + c.qk(k - 1) - 1) * bpk + qk ** 5)
            rep.check(f"level {k}: a'_(k+1) recursion",
                      c.apk(k + 1) == (qpk ** 6 + c.qpk(k - 1) - 1) * b1 + qpk ** 5)
            rep.check(f"level {k}: a_(k+1) >= q_k^5 q'_k", c.ak(k + 1) >= qk ** 5 * qpk)


def _verify_unbounded(c: PairConstruction, rep: Report) -> None:
    L = c.levels
    for k in range(1, L + 2):
        rep.check(f"level {k}: q_(4k-3) + 1 = q'_(4k-3)", c.qk(4 * k - 3) + 1 == c.qpk(4 * k - 3))
        rep.check(f"level {k}: q_(4k-2) - 1 = q'_(4k-2)", c.qk(4 * k - 2) - 1 == c.qpk(4 * k - 2))
        rep.check(f"level {k}: R_k = q'_(4k-3), Q_k = q'_(4k-2)",
                  c.Rk(k) == c.qpk(4 * k - 3) and c.Qk(k) == c.qpk(4 * k - 2))
    for k in range(1, L + 1):
        R, Q = c.Rk(k), c.Qk(k)
        rep.check(f"level {k}: a'_(4k+1) = 1", c.apk(4 * k + 1) == 1)
        rep.check(f"level {k}: block quotients", [c.ak(4 * k - 1 + i) for i in range(4)]
                  == [1, 3, 2 * Q + R - 1, 6 * Q + 4 * R]
                  and [c.apk(4 * k - 1 + i) for i in range(4)] == [2, 4 * Q + 3 * R - 2, 1, 6 * Q + 4 * R - 1])
        rep.check(f"level {k}: q_(4k-1) = Q+R, q'_(4k-1) = 2Q+R",
                  c.qk(4 * k - 1) == Q + R and c.qpk(4 * k - 1) == 2 * Q + R)
        rep.check(f"level {k}: q_(4k) = 4Q+3R+1", c.qk(4 * k) == 4 * Q + 3 * R + 1)
        rep.check(f"level {k}: q'_(4k) = 8Q^2+(10R-3)Q+3R^2-2R",
                  c.qpk(4 * k) == 8 * Q ** 2 + (10 * R - 3) * Q + 3 * R ** 2 - 2 * R)
        rep.check(f"level {k}: q_(4k+1) = R_(k+1) - 1, q_(4k+2) = Q_(k+1) + 1",
                  c.qk(4 * k + 1) == c.Rk(k + 1) - 1 and c.qk(4 * k + 2) == c.Qk(k + 1) + 1)
        rn = r_next_poly(Q, R)
        rep.check(f"level {k}: R_(k+1) closed form", rn == c.Rk(k + 1), f"{rn} vs {c.Rk(k + 1)}")
        printed, corrected, actual = q_next_poly_printed(Q, R), q_next_poly_corrected(Q, R), c.Qk(k + 1)
        rep.check(f"level {k}: Q_(k+1) re-derived closed form (92R-6, 58R^2-10R-2)", corrected == actual,
                  f"{corrected} vs {actual}")
        if printed != actual:
            rep.flag(f"level {k}: Q_(k+1) printed closed form (96R-6, 43R^2-5R-2)",
                     f"printed polynomial gives {printed} at (Q_{k},R_{k})=({Q},{R}); "
                     f"recurrence gives Q_{k + 1} = q'_{4 * k + 2} = q_{4 * k + 2} - 1 = {actual} (authoritative)")
        else:
            rep.check(f"level {k}: Q_(k+1) printed closed form", True)


def verify_family_invariants(c: PairConstruction) -> Report:
    rep = Report(f"{c.family} family, {c.levels} level(s)")
    _recurrence_checks(c, rep)
    if c.family == "bounded":
        _verify_bounded(c, rep)
    elif c.family == "unbounded":
        _verify_unbounded(c, rep)
    else:
        rep.check("family", False, f"unknown family {c.family!r}")
    return rep


def badly_approx_witness(c: PairConstruction, k: int, max_depth: int = DEFAULT_MAX_DEPTH) -> Sign:
    """Certify ``||q_k alpha|| < q_k^-7``; returns the sign of ``q_k^7 ||q_k alpha|| - 1``.

    ``NEGATIVE`` means the inequality holds.
    """
    if c.family != "bounded":
        raise ValueError("the witness applies to the bounded family")
    if k < 1:
        raise ValueError("k must be >= 1")
    qk = c.alpha.q(k)
    form = theta_form(c.alpha, k, "alpha") * qk ** 7 - LinearForm(0, 0, 1)
    return certified_sign(form, c.alpha, c.beta, max_depth)
