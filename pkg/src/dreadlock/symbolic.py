"""
External addresses as combinatorial objects.

Only eventually periodic addresses are representable.  They are kept in
canonical form (primitive period, minimal preperiod) so that equality and
hashing agree with equality of the underlying infinite sequences.

Text syntax::

    "(0)"          the fixed address 000...
    "(1,2,3)"      periodic address 123123...
    "[5] (1,2,3)"  preperiod 5, then 123123...
    "(L3,R-1)"     cosine family labels (tract letter + k)
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import total_ordering

from .function_model import DomainLabel, Family


def as_label(x):
    if isinstance(x, DomainLabel):
        return x
    if isinstance(x, int):
        return DomainLabel(0, x)
    if isinstance(x, tuple) and len(x) == 2:
        return DomainLabel(int(x[0]), int(x[1]))
    if isinstance(x, str):
        return parse_label(x)
    raise TypeError(f"cannot interpret {x!r} as a domain label")


def parse_label(text):
    text = text.strip()
    m = re.fullmatch(r"([LR]?)\s*([+-]?\d+)", text)
    if not m:
        raise ValueError(f"bad domain label {text!r}")
    tract = 1 if m.group(1) == "L" else 0
    return DomainLabel(tract, int(m.group(2)))


def _primitive(block):
    n = len(block)
    for d in range(1, n + 1):
        if n % d == 0 and block == block[:d] * (n // d):
            return block[:d]
    return block


@dataclass(frozen=True)
class FiniteAddress:
    """Finite external address ``F_0 F_1 ... F_{n-1}`` (address of a tail)."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(as_label(e) for e in self.entries)
        if not entries:
            raise ValueError("a finite address has at least one entry")
        object.__setattr__(self, "entries", entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def extend(self, label):
        return FiniteAddress(self.entries + (as_label(label),))

    def drop_last(self):
        return FiniteAddress(self.entries[:-1])

    def as_address(self):
        """Infinite extension repeating the last entry (only the prefix matters)."""
        return ExternalAddress(self.entries[:-1], self.entries[-1:])

    def __str__(self):
        return "[" + ",".join(str(e) for e in self.entries) + "]"


@total_ordering
@dataclass(frozen=True)
class ExternalAddress:
    """Eventually periodic sequence of domain labels.

    Parameters
    ----------
    preperiod, period : sequence of DomainLabel (ints are accepted)
        The address is ``preperiod`` followed by ``period`` repeated forever.
    """

    preperiod: tuple
    period: tuple

    def __post_init__(self):
        pre = [as_label(e) for e in self.preperiod]
        per = _primitive(tuple(as_label(e) for e in self.period))
        if not per:
            raise ValueError("period must be nonempty")
        while pre and pre[-1] == per[-1]:
            pre.pop()
            per = per[-1:] + per[:-1]
        object.__setattr__(self, "preperiod", tuple(pre))
        object.__setattr__(self, "period", per)

    @classmethod
    def periodic(cls, block):
        return cls((), tuple(block))

    @property
    def is_periodic(self):
        return not self.preperiod

    @property
    def period_length(self):
        return len(self.period)

    def entry(self, n):
        if n < 0:
            raise IndexError("address entries are indexed from 0")
        q = len(self.preperiod)
        if n < q:
            return self.preperiod[n]
        return self.period[(n - q) % len(self.period)]

    def labels(self, n):
        return [self.entry(j) for j in range(n)]

    def prefix(self, n):
        if n < 1:
            raise ValueError("prefix length must be positive")
        return FiniteAddress(tuple(self.labels(n)))

    def shift(self):
        if self.preperiod:
            return ExternalAddress(self.preperiod[1:], self.period)
        return ExternalAddress((), self.period[1:] + self.period[:1])

    def shifts(self):
        """The distinct addresses ``sigma^j(s)`` up to the first repetition."""
        out, s = [], self
        while s not in out:
            out.append(s)
            s = s.shift()
        return out

    def _horizon(self, other):
        return max(len(self.preperiod), len(other.preperiod)) + math.lcm(
            len(self.period), len(other.period)
        )

    def __lt__(self, other):
        return lex_compare(self, other) < 0

    def format(self, family=Family.EXPONENTIAL):
        def fmt(block):
            return ",".join(e.to_text(family) for e in block)

        body = f"({fmt(self.period)})"
        if self.preperiod:
            return f"[{fmt(self.preperiod)}] {body}"
        return body

    def __str__(self):
        return self.format()


def parse_address(text):
    """Parse ``"[5] (1,2,3)"``-style text into an :class:`ExternalAddress`."""
    m = re.fullmatch(r"\s*(?:\[([^\]]*)\])?\s*\(([^)]*)\)\s*", text)
    if not m:
        raise ValueError(f"bad address {text!r}; expected e.g. '[5] (1,2,3)' or '(0)'")
    pre = [parse_label(t) for t in m.group(1).split(",")] if m.group(1) else []
    if not m.group(2).strip():
        raise ValueError("period must be nonempty")
    per = [parse_label(t) for t in m.group(2).split(",")]
    return ExternalAddress(tuple(pre), tuple(per))


def shift(s):
    return s.shift()


def entry(s, n):
    return s.entry(n)


def prefix(s, n):
    return s.prefix(n)


def lex_compare(s1, s2):
    """-1, 0 or 1 as ``s1`` is lexicographically before, equal to or after ``s2``."""
    for n in range(s1._horizon(s2)):
        a, b = s1.entry(n).order_key, s2.entry(n).order_key
        if a != b:
            return -1 if a < b else 1
    return 0


def cyclic_between(a, b, c):
    """True iff ``a < b < c`` in the cyclic order induced by the linear order."""
    ab, bc, ca = lex_compare(a, b), lex_compare(b, c), lex_compare(c, a)
    return (ab < 0 and bc < 0) or (bc < 0 and ca < 0) or (ca < 0 and ab < 0)


def _tower(n, T):
    x = T
    for _ in range(n):
        if x > 700:
            return math.inf
        x = math.exp(x)
    return x


def is_exponentially_bounded(s, T, base_distances):
    """Check ``dist(zeta_0, zeta_{F_n}) <= exp^n(T)`` over one full period.

    For an eventually periodic address the left side takes finitely many
    values and the right side increases with ``n``, so checking
    ``n < len(preperiod) + len(period)`` settles the question.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    for n in range(len(s.preperiod) + len(s.period)):
        label = s.entry(n)
        if label not in base_distances:
            raise KeyError(f"no base distance for label {label}")
        if base_distances[label] > _tower(n, T):
            return False
    return True


def alphabet(K, family=Family.EXPONENTIAL):
    """Labels with ``|k| <= K`` (both tracts for the cosine family), in order."""
    tracts = (0,) if family is Family.EXPONENTIAL else (0, 1)
    return sorted(DomainLabel(t, k) for t in tracts for k in range(-K, K + 1))


def periodic_addresses(p, labels):
    """All periodic addresses of exact period ``p`` over ``labels``, sorted."""
    out = set()
    for block in itertools.product(labels, repeat=p):
        if len(_primitive(block)) == p:
            out.add(ExternalAddress((), block))
    return sorted(out)
