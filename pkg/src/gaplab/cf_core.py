"""Continued fractions, rational enclosures and certified signs of linear forms.

Every real quantity handled by the package is an integer linear form
``u*alpha + v*beta + w`` in two continued-fraction reals.  Forms are compared
symbolically (component-wise) and evaluated numerically only to decide signs,
using nested rational enclosures obtained from consecutive convergents.
"""
from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, NamedTuple, Sequence

try:
    from gmpy2 import mpq as rational, mpz as _mpz
except ImportError:   # pure-Python numbers work, only slower at high levels
    rational, _mpz = Fraction, None

DEFAULT_MAX_DEPTH = int(os.environ.get("GAPLAB_DEPTH", "64"))


def bigint(x) -> int:
    """Machine-size values as ``int``; larger ones as gmpy2 integers when installed.

    Deep convergents of the bounded family run to millions of bits, where
    gmpy2 multiplies orders of magnitude faster than ``int``.
    """
    if _mpz is not None and x.bit_length() > 64:
        return _mpz(x)
    return int(x)


class StreamExhausted(LookupError):
    """Raised when an explicit partial-quotient list is too short."""

    def __init__(self, requested: int, available: int):
        super().__init__(
            f"partial quotients requested through index {requested}, "
            f"only {available} available"
        )
        self.requested = requested
        self.available = available


class PartialQuotientStream:
    """Lazily extendable, replayable sequence ``a_1, a_2, ...`` of positive integers.

    ``source`` is either a finite iterable (an explicit list) or a zero-argument
    callable returning a fresh iterator (a generator family).  Values are cached,
    so indexing is deterministic no matter how often the stream is replayed.
    """

    def __init__(self, source: Iterable[int] | Callable[[], Iterator[int]], kind: str | None = None):
        if callable(source):
            self._iter = iter(source())
            self._finite = False
            self.kind = kind or "generator"
        else:
            self._iter = iter(list(source))
            self._finite = True
            self.kind = kind or "explicit"
        self._cache: list[int] = []
        self._done = False

    @classmethod
    def from_json(cls, text: str) -> "PartialQuotientStream":
        """Build an explicit stream from a JSON array of decimal strings."""
        values = json.loads(text)
        if not isinstance(values, list):
            raise ValueError("expected a JSON array of decimal strings")
        return cls([int(v) for v in values])

    def _fill(self, k: int) -> None:
        while len(self._cache) < k and not self._done:
            try:
                a = next(self._iter)
                a = bigint(a if hasattr(a, "bit_length") else int(a))
            except StopIteration:
                self._done = True
                break
            if a < 1:
                raise ValueError(f"partial quotient a_{len(self._cache) + 1} = {a} is not positive")
            self._cache.append(a)

    def available(self, k: int) -> bool:
        self._fill(k)
        return len(self._cache) >= k

    @property
    def max_available(self) -> int | None:
        """Number of cached terms for an exhausted explicit stream, else None."""
        return len(self._cache) if self._done else None

    def __getitem__(self, k: int) -> int:
        if k < 1:
            raise IndexError("partial quotients are indexed from 1")
        self._fill(k)
        if len(self._cache) < k:
            raise StreamExhausted(k, len(self._cache))
        return self._cache[k - 1]

    def take(self, k: int) -> list[int]:
        self._fill(k)
        return self._cache[:k]


class ConvergentTable:
    """Rows ``(a_k, p_k, q_k)`` for ``k >= -1`` of ``[0; a_1, a_2, ...]``.

    Seeds: ``p_{-1} = 1, q_{-1} = 0, p_0 = 0, q_0 = 1``.  The table only grows.
    """

    def __init__(self, stream: PartialQuotientStream):
        self.stream = stream
        self._p = [1, 0]
        self._q = [0, 1]

    @property
    def depth(self) -> int:
        return len(self._q) - 2

    def extend(self, depth: int) -> "ConvergentTable":
        while self.depth < depth:
            k = self.depth + 1
            a = self.stream[k]
            self._p.append(bigint(a * self._p[-1] + self._p[-2]))
            self._q.append(bigint(a * self._q[-1] + self._q[-2]))
        return self

    def p(self, k: int) -> int:
        if k < -1:
            raise IndexError(k)
        self.extend(k)
        return self._p[k + 1]

    def q(self, k: int) -> int:
        if k < -1:
            raise IndexError(k)
        self.extend(k)
        return self._q[k + 1]

    def a(self, k: int) -> int:
        return self.stream[k]

    def rows(self, depth: int | None = None) -> list[dict]:
        depth = self.depth if depth is None else depth
        self.extend(depth)
        out = []
        for k in range(-1, depth + 1):
            out.append({"k": k, "a": self.stream[k] if k >= 1 else None,
                        "p": self._p[k + 1], "q": self._q[k + 1]})
        return out

    def to_json(self, depth: int | None = None) -> str:
        rows = [{"k": r["k"], "a": None if r["a"] is None else str(r["a"]),
                 "p": str(r["p"]), "q": str(r["q"])} for r in self.rows(depth)]
        return json.dumps(rows, indent=1)


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction
    exhausted: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty interval")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "RationalInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __add__(self, other):
        if isinstance(other, RationalInterval):
            return RationalInterval(self.lo + other.lo, self.hi + other.hi,
                                    self.exhausted or other.exhausted)
        return RationalInterval(self.lo + other, self.hi + other, self.exhausted)

    __radd__ = __add__

    def scale(self, c: int) -> "RationalInterval":
        if c >= 0:
            return RationalInterval(c * self.lo, c * self.hi, self.exhausted)
        return RationalInterval(c * self.hi, c * self.lo, self.exhausted)

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2


class CFReal:
    """An irrational in (0, 1) given by its partial quotients."""

    def __init__(self, stream: PartialQuotientStream | Sequence[int], name: str = "x"):
        if not isinstance(stream, PartialQuotientStream):
            stream = PartialQuotientStream(stream)
        self.stream = stream
        self.table = ConvergentTable(stream)
        self.name = name

    def __repr__(self):
        head = ", ".join(str(a) for a in self.stream.take(4))
        return f"CFReal({self.name}=[0; {head}, ...])"

    def q(self, k: int) -> int:
        return self.table.q(k)

    def p(self, k: int) -> int:
        return self.table.p(k)

    def a(self, k: int) -> int:
        return self.stream[k]

    def convergent(self, k: int) -> Fraction:
        return rational(self.p(k), self.q(k))

    def enclosure(self, depth: int) -> RationalInterval:
        """Interval between the convergents of index ``depth`` and ``depth + 1``.

        Width is exactly ``1/(q_depth q_{depth+1})``.  When an explicit stream
        runs out, the deepest available interval is returned with
        ``exhausted=True``.
        """
        if depth < 0:
            raise ValueError("depth must be >= 0")
        exhausted = False
        if not self.stream.available(depth + 1):
            avail = self.stream.max_available or 0
            if avail < 1:
                raise StreamExhausted(depth + 1, avail)
            depth = avail - 1
            exhausted = True
        c0 = self.convergent(depth)
        c1 = self.convergent(depth + 1)
        return RationalInterval(min(c0, c1), max(c0, c1), exhausted)

    def depth_for_width(self, width: Fraction, start: int = 1) -> int:
        """Smallest depth >= start whose enclosure is narrower than ``width``."""
        d = start
        while self.q(d) * self.q(d + 1) * width <= 1:
            d += 1
        return d

    def approx_float(self) -> float:
        return float(self.enclosure(self.depth_for_width(rational(1, 1 << 70))).lo)

    def fixed_point(self, bits: int) -> int:
        """Integer ``A`` with ``|A - x * 2**bits| < 2``."""
        d = self.depth_for_width(rational(1, 1 << bits))
        lo = self.enclosure(d).lo
        return int((lo.numerator << bits) // lo.denominator)


class LinearForm(NamedTuple):
    """The real number ``u*alpha + v*beta + w``; equality is component-wise."""

    u: int
    v: int
    w: int

    def __add__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(self.u + other.u, self.v + other.v, self.w + other.w)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(self.u - other.u, self.v - other.v, self.w - other.w)

    def __neg__(self) -> "LinearForm":
        return LinearForm(-self.u, -self.v, -self.w)

    def __mul__(self, c: int) -> "LinearForm":
        return LinearForm(c * self.u, c * self.v, c * self.w)

    __rmul__ = __mul__

    def swap(self) -> "LinearForm":
        """Exchange the roles of alpha and beta."""
        return LinearForm(self.v, self.u, self.w)

    def is_zero(self) -> bool:
        return self.u == 0 and self.v == 0 and self.w == 0

    def interval(self, alpha: CFReal, beta: CFReal, depth: int) -> RationalInterval:
        w = rational(int(self.w))
        out = RationalInterval(w, w)
        if self.u:
            out = out + alpha.enclosure(depth).scale(int(self.u))
        if self.v:
            out = out + beta.enclosure(depth).scale(int(self.v))
        return out

    def approx(self, alpha: CFReal, beta: CFReal, depth: int = 1, rel: float = 1e-12) -> float:
        """Float value, refining from ``depth`` until the enclosure is relatively tight."""
        if self.is_zero():
            return 0.0
        while True:
            iv = self.interval(alpha, beta, depth)
            mid = iv.midpoint()
            if (mid != 0 and iv.width < abs(mid) * rel) or iv.exhausted or depth >= DEFAULT_MAX_DEPTH:
                return float(mid)
            depth += 1


ONE = LinearForm(0, 0, 1)
ZERO_FORM = LinearForm(0, 0, 0)


class Sign(enum.Enum):
    NEGATIVE = -1
    ZERO = 0  # only ever returned for the zero form
    POSITIVE = 1
    UNDECIDED = None


def theta_form(x: CFReal, k: int, role: str = "alpha") -> LinearForm:
    """Form of ``||q_k x||`` as ``(-1)**k (q_k x - p_k)``, placed in the given role slot."""
    if k < 0:
        raise ValueError("theta_form needs k >= 0")
    s = 1 if k % 2 == 0 else -1
    coeff, const = s * x.q(k), -s * x.p(k)
    if role == "alpha":
        return LinearForm(coeff, 0, const)
    if role == "beta":
        return LinearForm(0, coeff, const)
    raise ValueError(f"unknown role {role!r}")


def certified_sign(f: LinearForm, alpha: CFReal, beta: CFReal,
                   max_depth: int = DEFAULT_MAX_DEPTH, start_depth: int = 1) -> Sign:
    """Sign of ``f`` certified by nested enclosures.

    Depth grows one continued-fraction level per round; for the fast-growing
    families one level already multiplies the precision by a huge factor.
    ``UNDECIDED`` is returned only when ``max_depth`` (or an explicit stream)
    runs out; a nonzero form is never reported as zero.
    """
    if f.is_zero():
        return Sign.ZERO
    for depth in range(max(start_depth, 0), max_depth + 1):
        try:
            iv = f.interval(alpha, beta, depth)
        except StreamExhausted:
            return Sign.UNDECIDED
        if iv.lo > 0:
            return Sign.POSITIVE
        if iv.hi < 0:
            return Sign.NEGATIVE
        if iv.exhausted:
            return Sign.UNDECIDED
    return Sign.UNDECIDED


def is_positive(f: LinearForm, alpha: CFReal, beta: CFReal, max_depth: int = DEFAULT_MAX_DEPTH) -> bool:
    """True iff ``f > 0`` is certified; raises on undecided."""
    s = certified_sign(f, alpha, beta, max_depth)
    if s is Sign.UNDECIDED:
        raise ArithmeticError(f"sign of {f} undecided at depth {max_depth}")
    return s is Sign.POSITIVE


def extend_convergents(x: CFReal, depth: int) -> ConvergentTable:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    return x.table.extend(depth)


def enclosure(x: CFReal, depth: int) -> RationalInterval:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    return x.enclosure(depth)


def decimal_approx(f: LinearForm, alpha: CFReal, beta: CFReal, digits: int = 20) -> str:
    """``digits`` significant digits of the value of ``f``."""
    from decimal import Context, Decimal

    if f.is_zero():
        return "0"
    depth = 1
    while True:
        iv = f.interval(alpha, beta, depth)
        mid = iv.midpoint()
        if mid == 0 or iv.width * 10 ** (digits + 4) < abs(mid) or iv.exhausted:
            break
        depth += 1
    ctx = Context(prec=digits)
    return str(ctx.divide(Decimal(int(mid.numerator)), Decimal(int(mid.denominator))))
