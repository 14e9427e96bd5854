"""Coefficient rings, weight vectors and Bezout arithmetic.

Three rings are supported: the integers, the integers modulo n, and the
rationals.  Ring elements are plain Python values: ``int`` for Z and Z/n
(Z/n elements are kept as canonical residues in ``[0, n)``) and
``fractions.Fraction`` for Q.  Nothing here ever touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence, Union

RingElem = Union[int, Fraction]

Z = "Z"
ZN = "Zn"
Q = "Q"


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended Euclid: return ``(g, x, y)`` with ``x*a + y*b == g >= 0``."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _bezout_many(values: Sequence[int]) -> tuple[int, list[int]]:
    """gcd of ``values`` and integer coefficients realising it."""
    g = 0
    coeffs = [0] * len(values)
    for idx, v in enumerate(values):
        if v == 0:
            continue
        if g == 0:
            g = abs(v)
            coeffs[idx] = 1 if v > 0 else -1
            continue
        g2, x, y = egcd(g, v)
        coeffs = [c * x for c in coeffs]
        coeffs[idx] = y
        g = g2
    return g, coeffs


@dataclass(frozen=True)
class RingSpec:
    """One of Z, Z/n (n >= 2) or Q."""

    kind: str
    n: Optional[int] = None

    def __post_init__(self):
        if self.kind not in (Z, ZN, Q):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == ZN:
            if not isinstance(self.n, int) or self.n < 2:
                raise ValueError("Z/n requires an integer n >= 2")
        elif self.n is not None:
            raise ValueError(f"ring {self.kind} takes no modulus")

    @classmethod
    def integers(cls) -> "RingSpec":
        return cls(Z)

    @classmethod
    def mod(cls, n: int) -> "RingSpec":
        return cls(ZN, n)

    @classmethod
    def rationals(cls) -> "RingSpec":
        return cls(Q)

    @classmethod
    def parse(cls, text: str) -> "RingSpec":
        """Parse ``Z``, ``Q``, ``Z/5`` or ``Zn:5``."""
        t = text.strip()
        if t in ("Z", "ZZ"):
            return cls.integers()
        if t in ("Q", "QQ"):
            return cls.rationals()
        for prefix in ("Z/", "Zn:", "Z_"):
            if t.startswith(prefix):
                return cls.mod(int(t[len(prefix):]))
        raise ValueError(f"cannot parse ring {text!r}")

    @classmethod
    def from_json(cls, data: dict) -> "RingSpec":
        kind = data.get("kind")
        if kind == "Zn":
            return cls.mod(data.get("n"))
        if kind in (Z, Q):
            return cls(kind)
        raise ValueError(f"unknown ring kind {kind!r}")

    def to_json(self) -> dict:
        if self.kind == ZN:
            return {"kind": "Zn", "n": self.n}
        return {"kind": self.kind}

    def __str__(self):
        return f"Z/{self.n}" if self.kind == ZN else self.kind

    # element arithmetic

    def elem(self, value) -> RingElem:
        """Coerce an int, Fraction or ``"p/q"`` string into the ring."""
        if isinstance(value, str):
            value = Fraction(value)
        if self.kind == Q:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator != 1:
                if self.kind == ZN and gcd(value.denominator, self.n) == 1:
                    return value.numerator * pow(value.denominator, -1, self.n) % self.n
                raise ValueError(f"{value} is not an element of {self}")
            value = value.numerator
        if not isinstance(value, int):
            raise TypeError(f"cannot coerce {value!r} into {self}")
        return value % self.n if self.kind == ZN else value

    @property
    def zero(self) -> RingElem:
        return Fraction(0) if self.kind == Q else 0

    @property
    def one(self) -> RingElem:
        return Fraction(1) if self.kind == Q else 1

    def add(self, x: RingElem, y: RingElem) -> RingElem:
        return self._norm(x + y)

    def sub(self, x: RingElem, y: RingElem) -> RingElem:
        return self._norm(x - y)

    def mul(self, x: RingElem, y: RingElem) -> RingElem:
        return self._norm(x * y)

    def neg(self, x: RingElem) -> RingElem:
        return self._norm(-x)

    def _norm(self, x):
        return x % self.n if self.kind == ZN else x

    def is_zero(self, x: RingElem) -> bool:
        return self._norm(x) == 0

    def is_unit(self, x: RingElem) -> bool:
        if self.kind == Q:
            return x != 0
        if self.kind == Z:
            return x in (1, -1)
        return gcd(x, self.n) == 1

    def inverse(self, x: RingElem) -> RingElem:
        if not self.is_unit(x):
            raise ZeroDivisionError(f"{x} is not a unit in {self}")
        if self.kind == Q:
            return 1 / Fraction(x)
        if self.kind == Z:
            return x
        return pow(x, -1, self.n)

    def power(self, x: RingElem, k: int) -> RingElem:
        if self.kind == ZN:
            return pow(x, k, self.n)
        return x ** k

    def total(self, values: Iterable[RingElem]) -> RingElem:
        s = self.zero
        for v in values:
            s = s + v
        return self._norm(s)

    def fmt(self, x: RingElem) -> str:
        return str(x)


@dataclass(frozen=True)
class WeightVector:
    """The weight ``(m_0, ..., m_L)``; the slice at height i/L carries m_i."""

    ring: RingSpec
    entries: tuple

    def __post_init__(self):
        entries = tuple(self.ring.elem(e) for e in self.entries)
        if len(entries) < 2:
            raise ValueError("a weight needs at least two entries (L >= 1)")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, values: Iterable, ring: Optional[RingSpec] = None) -> "WeightVector":
        return cls(ring or RingSpec.integers(), tuple(values))

    @property
    def L(self) -> int:
        return len(self.entries) - 1

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "weight": [str(e) for e in self.entries]}


@dataclass(frozen=True)
class BezoutWitness:
    """``x * a**k + y * b**k == g``."""

    g: RingElem
    x: RingElem
    y: RingElem
    k: int


def index(w: WeightVector) -> RingElem:
    """The index sigma: the ring sum of the weight entries."""
    return w.ring.total(w.entries)


def span_is_unit(w: WeightVector) -> tuple[bool, Optional[tuple]]:
    """Decide whether the entries of ``w`` generate the unit ideal.

    Returns ``(True, (r_0, ..., r_L))`` with ``sum r_i m_i == 1`` or
    ``(False, None)``.  If some entry is already a unit, the witness puts its
    inverse in that slot and zeros elsewhere.
    """
    ring = w.ring
    m = w.entries
    for i, mi in enumerate(m):
        if ring.is_unit(mi):
            r = [ring.zero] * len(m)
            r[i] = ring.inverse(mi)
            return True, tuple(r)
    if ring.kind == Q:
        return False, None  # no nonzero entry
    values = list(m) + ([ring.n] if ring.kind == ZN else [])
    g, coeffs = _bezout_many(values)
    if g != 1:
        return False, None
    r = tuple(ring.elem(c) for c in coeffs[: len(m)])
    assert ring.total(ring.mul(ri, mi) for ri, mi in zip(r, m)) == ring.one
    return True, r


def ncd_witness(a: RingElem, b: RingElem, k: int,
                ring: Optional[RingSpec] = None) -> Optional[BezoutWitness]:
    """Coefficients with ``x * a**k + y * b**k == 1`` or None if there are none.

    A unit power is preferred (``a**k == +-1`` gives ``(a**-k, 0)``); otherwise
    the extended Euclidean pair is used, reduced so that ``|x| <= |b**k|``.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    ring = ring or RingSpec.integers()
    a, b = ring.elem(a), ring.elem(b)
    A, B = ring.power(a, k), ring.power(b, k)
    if ring.is_unit(A):
        return BezoutWitness(ring.one, ring.inverse(A), ring.zero, k)
    if ring.is_unit(B):
        return BezoutWitness(ring.one, ring.zero, ring.inverse(B), k)
    if ring.kind == Q:
        return None
    if ring.kind == ZN:
        g, (x, y, _) = _bezout_many([A, B, ring.n])
        if g != 1:
            return None
        return BezoutWitness(ring.one, ring.elem(x), ring.elem(y), k)
    g, x, y = egcd(A, B)
    if g != 1:
        return None
    if B != 0 and abs(x) > abs(B):
        q = x // B
        x, y = x - q * B, y + q * A
    assert x * A + y * B == 1
    return BezoutWitness(1, x, y, k)
