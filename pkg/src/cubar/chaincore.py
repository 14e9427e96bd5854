"""Chains, the weighted boundary operator, pushforward and relative chains."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Optional

from .coeff import RingElem, RingSpec, WeightVector
from .cubeexpr import AffineMap, CubeExpr, canonical


def _key(gen):
    """Canonicalise cube expressions; other generators are used as given."""
    return canonical(gen) if isinstance(gen, CubeExpr) else gen


def _sort_key(gen) -> str:
    return gen.sort_key() if hasattr(gen, "sort_key") else repr(gen)


@dataclass(frozen=True)
class Chain:
    """A finite R-linear combination of generators of a common degree.

    The zero chain of degree -1 is the target of the degree-0 boundary.
    """

    ring: RingSpec
    degree: int
    terms: Mapping[Hashable, RingElem] = field(default_factory=dict)

    def __post_init__(self):
        if self.degree < -1:
            raise ValueError("chains have degree >= -1")
        clean = {}
        for g, c in self.terms.items():
            c = self.ring.elem(c)
            if not self.ring.is_zero(c):
                clean[_key(g)] = c
        if self.degree == -1 and clean:
            raise ValueError("only the zero chain has degree -1")
        object.__setattr__(self, "terms", clean)

    @classmethod
    def zero(cls, ring: RingSpec, degree: int) -> "Chain":
        return cls(ring, degree, {})

    @classmethod
    def from_terms(cls, ring: RingSpec, degree: int,
                   pairs: Iterable[tuple]) -> "Chain":
        """Sum ``coeff * gen`` over (gen, coeff) pairs, combining like terms."""
        acc: dict = {}
        for g, c in pairs:
            g = _key(g)
            acc[g] = ring.add(acc.get(g, ring.zero), ring.elem(c))
        return cls(ring, degree, acc)

    @classmethod
    def of(cls, gen, ring: Optional[RingSpec] = None, coeff=1) -> "Chain":
        ring = ring or RingSpec.integers()
        g = _key(gen)
        return cls(ring, g.arity, {g: coeff})

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.items())

    def items(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: _sort_key(kv[0]))

    def support(self) -> list:
        return [g for g, _ in self.items()]

    def coeff(self, gen) -> RingElem:
        return self.terms.get(_key(gen), self.ring.zero)

    def is_zero(self) -> bool:
        return not self.terms

    def _compatible(self, other: "Chain"):
        if self.ring != other.ring:
            raise ValueError("chains over different rings")
        if self.degree != other.degree and self.terms and other.terms:
            raise ValueError("chains of different degrees")

    def __add__(self, other: "Chain") -> "Chain":
        self._compatible(other)
        acc = dict(self.terms)
        for g, c in other.terms.items():
            acc[g] = self.ring.add(acc.get(g, self.ring.zero), c)
        deg = self.degree if self.terms else other.degree
        return Chain(self.ring, deg, acc)

    def __neg__(self) -> "Chain":
        return self.scale(self.ring.neg(self.ring.one))

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def scale(self, r) -> "Chain":
        r = self.ring.elem(r)
        return Chain(self.ring, self.degree,
                     {g: self.ring.mul(r, c) for g, c in self.terms.items()})

    __rmul__ = scale

    def __eq__(self, other):
        return (isinstance(other, Chain) and self.ring == other.ring
                and self.terms == other.terms
                and (self.degree == other.degree or not self.terms))

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __str__(self):
        if not self.terms:
            return "0"
        return " ".join(f"{'+' if str(c)[0] != '-' else ''}{c}*[{g}]" for g, c in self.items())

    def to_json(self) -> dict:
        return {"degree": self.degree,
                "terms": [{"gen": str(g), "coeff": str(c)} for g, c in self.items()]}


def _expand(u: Chain, ring: RingSpec, fn) -> Chain:
    """Linear extension of ``fn(gen) -> iterable of (gen, coeff)``."""
    out: dict = {}
    deg = None
    for g, c in u.terms.items():
        for h, d in fn(g):
            h = _key(h)
            deg = h.arity if hasattr(h, "arity") else deg
            out[h] = ring.add(out.get(h, ring.zero), ring.mul(c, ring.elem(d)))
    return Chain(ring, deg if deg is not None else u.degree, out)


def face_terms(gen, w: WeightVector):
    """Signed, weighted faces of one generator of degree n >= 1."""
    ring = w.ring
    for j in range(1, gen.arity + 1):
        sign = 1 if j % 2 else -1
        for i, m in enumerate(w.entries):
            if not ring.is_zero(m):
                yield gen.face(w.L, i, j), ring.elem(sign * m)


def boundary(u: Chain, w: WeightVector) -> Chain:
    """The weighted boundary; degree-0 chains go to the zero chain."""
    if u.ring != w.ring:
        raise ValueError(f"chain ring {u.ring} differs from weight ring {w.ring}")
    if u.degree <= 0:
        return Chain.zero(u.ring, -1)
    out = _expand(u, u.ring, lambda g: face_terms(g, w))
    return Chain(u.ring, u.degree - 1, out.terms)


@dataclass
class DDCertificate:
    """Pairing of the face-of-face terms of a double boundary."""

    generator: str
    degree: int
    L: int
    terms: int
    pairs: list
    residual: Chain
    unpaired: list

    @property
    def ok(self) -> bool:
        return self.residual.is_zero() and not self.unpaired

    def to_json(self) -> dict:
        return {"identity": "thm1", "status": "ok" if self.ok else "fail",
                "terms": self.terms, "pairs": len(self.pairs),
                "residual": [{"gen": str(g), "coeff": str(c)} for g, c in self.residual.items()]
                + [{"unpaired": p} for p in self.unpaired]}


class VerificationError(AssertionError):
    """An identity failed to verify; carries the certificate."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


def verify_dd_zero(T, w: WeightVector, strict: bool = False) -> DDCertificate:
    """Expand the double boundary of one generator and pair its terms.

    The term with first face (i, j) and second face (k, p), j <= p, is paired
    with first face (k, p+1) and second face (i, j): both fix the same two
    input slots at the same heights, so they are the same cube, with equal
    weight m_i m_k and opposite signs.
    """
    T = _key(T)
    n, L, ring = T.arity, w.L, w.ring
    if n < 1:
        raise ValueError("double boundary needs degree >= 1")
    terms = {}
    for j in range(1, n + 1):
        first = {i: T.face(L, i, j) for i in range(L + 1)}
        for p in range(1, n):
            for i in range(L + 1):
                for k in range(L + 1):
                    sign = (-1) ** (j + 1) * (-1) ** (p + 1)
                    coeff = ring.mul(w[i], w[k])
                    terms[(i, j, k, p)] = (first[i].face(L, k, p), sign, coeff)
    pairs, unpaired = [], []
    for (i, j, k, p), (gen, sign, coeff) in terms.items():
        if j > p:
            continue
        partner = terms[(k, p + 1, i, j)]
        if partner[0] == gen and partner[1] == -sign and partner[2] == coeff:
            pairs.append(((i, j, k, p), (k, p + 1, i, j)))
        else:
            unpaired.append(f"({i},{j})->({k},{p}) vs ({k},{p + 1})->({i},{j})")
    residual = boundary(boundary(Chain(ring, n, {T: ring.one}), w), w) if n >= 2 \
        else Chain.zero(ring, -1)
    cert = DDCertificate(str(T), n, L, len(terms), pairs, residual, unpaired)
    if strict and not cert.ok:
        raise VerificationError("double boundary does not cancel", cert)
    return cert


def pushforward(f, u: Chain) -> Chain:
    """Compose every generator with ``f`` (an ``AffineMap`` or a callable on
    generators) and recombine."""
    if isinstance(f, AffineMap):
        return _expand(u, u.ring, lambda g: [(g.post(f), 1)])
    if callable(f):
        return _expand(u, u.ring, lambda g: [(f(g), 1)])
    raise TypeError("f must be an AffineMap or a callable on generators")


@dataclass(frozen=True)
class RelativeChain:
    """A chain modulo chains supported in a subspace A."""

    chain: Chain
    in_A: Callable = field(compare=False, hash=False)

    @property
    def representative(self) -> Chain:
        return Chain(self.chain.ring, self.chain.degree,
                     {g: c for g, c in self.chain.terms.items() if not self.in_A(g)})

    def is_zero(self) -> bool:
        return self.representative.is_zero()

    def __eq__(self, other):
        return isinstance(other, RelativeChain) and \
            self.representative == other.representative

    def __hash__(self):
        return hash(self.representative)


def relative_reduce(u: Chain, in_A: Callable) -> RelativeChain:
    """The class of ``u`` in K_n(X, A); the representative drops A's generators."""
    return RelativeChain(u, in_A)
