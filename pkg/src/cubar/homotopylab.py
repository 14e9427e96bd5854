"""Chain homotopies and the subdivision operator, with identity verifiers.

Every verifier expands both sides of an identity into chains of canonical
cubes.  Terms with equal canonical form cancel structurally; whatever is left
is grouped by exact values on a lattice and must cancel group by group.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .chaincore import Chain, VerificationError, _key, boundary, face_terms
from .coeff import RingSpec, WeightVector, ncd_witness, span_is_unit
from .cubeexpr import fingerprint, first_difference

THIRD = Fraction(1, 3)


class NoSpanWitness(ValueError):
    """The weight entries do not generate the unit ideal, so no prism
    homotopy of this shape exists."""


@dataclass(frozen=True)
class PrismHomotopy:
    """Weight plus coefficients r_k with ``sum r_k m_k == 1``."""

    weight: WeightVector
    r: tuple

    def __post_init__(self):
        ring = self.weight.ring
        r = tuple(ring.elem(x) for x in self.r)
        if len(r) != len(self.weight):
            raise ValueError("need one coefficient per weight entry")
        if ring.total(ring.mul(a, b) for a, b in zip(r, self.weight)) != ring.one:
            raise ValueError("coefficients do not combine the weight to 1")
        object.__setattr__(self, "r", r)

    @classmethod
    def from_weight(cls, w: WeightVector) -> "PrismHomotopy":
        ok, r = span_is_unit(w)
        if not ok:
            raise NoSpanWitness(f"entries of {list(w.entries)} do not span {w.ring}; "
                                "no prism homotopy exists")
        return cls(w, r)


@dataclass
class IdentityCertificate:
    identity: str
    generator: str
    degree: int
    terms: int
    structural_cancelled: int
    lattice_cancelled: int
    residual: list
    lattice_step: Fraction
    lhs: Chain = field(repr=False)
    rhs: Chain = field(repr=False)

    @property
    def ok(self) -> bool:
        return not self.residual

    @property
    def status(self) -> str:
        return "ok" if self.ok else "fail"

    def to_json(self) -> dict:
        return {"identity": self.identity, "status": self.status, "terms": self.terms,
                "structural_cancelled": self.structural_cancelled,
                "lattice_cancelled": self.lattice_cancelled,
                "lattice_step": str(self.lattice_step), "residual": self.residual}


SubdivisionCertificate = IdentityCertificate


def compare_chains(identity: str, generator, lhs: Chain, rhs: Chain, raw_terms: int,
                   lattice_step, strict: bool = False) -> IdentityCertificate:
    """Check ``lhs == rhs``: structural keys first, then lattice groups."""
    ring = lhs.ring
    diff = lhs - rhs
    structural = raw_terms - len(diff)
    groups: dict = {}
    for g, c in diff.items():
        groups.setdefault((g.arity, fingerprint(g, lattice_step)), []).append((g, c))
    residual, lattice_cancelled = [], 0
    keys = list(groups)
    for key in keys:
        members = groups[key]
        total = ring.total(c for _, c in members)
        if ring.is_zero(total):
            lattice_cancelled += len(members)
            continue
        g = members[0][0]
        witness = None
        for other in keys:
            if other != key and other[0] == g.arity:
                witness = first_difference(g, groups[other][0][0], lattice_step)
                if witness is not None:
                    witness = [str(x) for x in witness]
                    break
        residual.append({"gen": str(g), "coeff": str(total), "witness": witness})
    cert = IdentityCertificate(identity, str(generator), generator.arity, raw_terms,
                               structural, lattice_cancelled, residual,
                               Fraction(lattice_step), lhs, rhs)
    if strict and not cert.ok:
        raise VerificationError(f"{identity} failed for {generator}", cert)
    return cert


def _nterms_boundary(u: Chain, w: WeightVector) -> int:
    nonzero = sum(1 for m in w.entries if not w.ring.is_zero(m))
    return sum(g.arity * nonzero for g in u.terms)


def cylinder_end(T, end: int):
    """T pushed to the end ``X x {end}`` of the cylinder."""
    return _key(T).cylinder(end)


def theta_prism(T, h: PrismHomotopy) -> Chain:
    """``sum_k r_k (xi(T) - psi_k(T))``, extended linearly to chains."""
    ring, L = h.weight.ring, h.weight.L
    if isinstance(T, Chain):
        out = Chain.zero(ring, max(T.degree + 1, 0))
        for g, c in T.terms.items():
            out = out + theta_prism(g, h).scale(c)
        return out
    T = _key(T)
    pairs = []
    for k, r in enumerate(h.r):
        if ring.is_zero(r):
            continue
        pairs.append((T.cross_zero(), r))
        pairs.append((T.cross_jag(L, k), ring.neg(r)))
    return Chain.from_terms(ring, T.arity + 1, pairs)


def verify_prism_identity(T, h: PrismHomotopy, lattice_step=None,
                          strict: bool = False) -> IdentityCertificate:
    """``d Theta(T) == (-1)^(n+2) (e_0 T - e_1 T) + Theta(d T)``."""
    T = _key(T)
    w, ring, n = h.weight, h.weight.ring, T.arity
    step = lattice_step or Fraction(1, 6 * w.L)
    th = theta_prism(T, h)
    lhs = boundary(th, w)
    sign = 1 if n % 2 == 0 else -1
    ends = Chain.from_terms(ring, n, [(cylinder_end(T, 0), sign), (cylinder_end(T, 1), -sign)])
    dT = boundary(Chain(ring, n, {T: ring.one}), w)
    rhs = ends + theta_prism(dT, h) if n >= 1 else ends
    raw = _nterms_boundary(th, w) + 2 + len(dT) * 2 * len(h.r)
    return compare_chains("lemma2", T, lhs, rhs, raw, step, strict)


def sd_terms(n: int):
    """(sign, e, v) triples of the subdivision of an n-cube."""
    for e in itertools.product((0, 2), repeat=n):
        choices = [(1,) if ei == 0 else (-1, 1) for ei in e]
        for v in itertools.product(*choices):
            prod = 1
            for vi in v:
                prod *= vi
            yield -prod, e, v


def subdivide(T, ring: Optional[RingSpec] = None) -> Chain:
    """The signed 3^n-term subdivision; ``SD_0(T) = -T``."""
    ring = ring or RingSpec.integers()
    if isinstance(T, Chain):
        out = Chain.zero(T.ring, T.degree)
        for g, c in T.terms.items():
            out = out + subdivide(g, T.ring).scale(c)
        return out
    T = _key(T)
    if T.arity == 0:
        return Chain(ring, 0, {T: ring.neg(ring.one)})
    return Chain.from_terms(ring, T.arity, ((T.clamped(THIRD, e, v), s)
                                            for s, e, v in sd_terms(T.arity)))


def verify_sd_naturality(T, a, b, ring: Optional[RingSpec] = None, lattice_step=None,
                         strict: bool = False) -> IdentityCertificate:
    """``d SD(T) == SD(d T)`` for the weight (a, b)."""
    ring = ring or RingSpec.integers()
    T = _key(T)
    w = WeightVector(ring, (a, b))
    step = lattice_step or Fraction(1, 6)
    sd = subdivide(T, ring)
    lhs = boundary(sd, w)
    dT = boundary(Chain(ring, T.arity, {T: ring.one}), w)
    rhs = subdivide(dT) if T.arity >= 1 else Chain.zero(ring, -1)
    raw = _nterms_boundary(sd, w) + sum(3 ** g.arity for g in dT.terms)
    return compare_chains("lemma3", T, lhs, rhs, raw, step, strict)


def theta_sd(T, tilde: bool = False, ring: Optional[RingSpec] = None) -> Chain:
    """``sum_z (-1)^(sum z) G_z(T)`` over z in {0,1,2}^n (mirror curves if tilde)."""
    ring = ring or RingSpec.integers()
    if isinstance(T, Chain):
        out = Chain.zero(T.ring, max(T.degree + 1, 0))
        for g, c in T.terms.items():
            out = out + theta_sd(g, tilde, T.ring).scale(c)
        return out
    T = _key(T)
    return Chain.from_terms(ring, T.arity + 1,
                            ((T.warp(z, tilde), (-1) ** sum(z))
                             for z in itertools.product((0, 1, 2), repeat=T.arity)))


def verify_sd_homotopy(T, a, b, tilde: bool = False, lattice_step=None,
                       ring: Optional[RingSpec] = None,
                       strict: bool = False) -> IdentityCertificate:
    """``d Theta(T) == (-1)^(n+2) (b T - a SD T) + Theta(d T)``.

    With ``tilde`` the mirrored homotopy is used and a, b trade places.
    """
    ring = ring or RingSpec.integers()
    T = _key(T)
    n = T.arity
    w = WeightVector(ring, (a, b))
    a, b = w.entries
    step = lattice_step or Fraction(1, 6)
    th = theta_sd(T, tilde, ring)
    lhs = boundary(th, w)
    first, second = (a, b) if tilde else (b, a)
    sign = 1 if n % 2 == 0 else -1
    main = Chain(ring, n, {T: ring.one}).scale(first) - subdivide(T, ring).scale(second)
    dT = boundary(Chain(ring, n, {T: ring.one}), w)
    rhs = main.scale(sign) + theta_sd(dT, tilde) if n >= 1 else main.scale(sign)
    raw = _nterms_boundary(th, w) + 1 + 3 ** n + sum(3 ** g.arity for g in dT.terms)
    return compare_chains("eq7~" if tilde else "eq7", T, lhs, rhs, raw, step, strict)


def sd_coefficient(a, b, k: int, ring: Optional[RingSpec] = None):
    """``r_k = x_k b^k + y_k a^k`` from a Bezout witness ``x_k a^k + y_k b^k = 1``."""
    ring = ring or RingSpec.integers()
    wit = ncd_witness(a, b, k, ring)
    if wit is None:
        raise NoSpanWitness(f"a^{k} and b^{k} do not generate the unit ideal for "
                            f"(a, b) = ({a}, {b})")
    a, b = ring.elem(a), ring.elem(b)
    return ring.add(ring.mul(wit.x, ring.power(b, k)), ring.mul(wit.y, ring.power(a, k)))


def iterate_sd(u, k: int, a=None, b=None, ring: Optional[RingSpec] = None):
    """k-fold subdivision of a chain; also r_k when (a, b) is given."""
    if k < 1:
        raise ValueError("k must be positive")
    if not isinstance(u, Chain):
        u = Chain.of(u, ring)
    out = u
    for _ in range(k):
        out = subdivide(out)
    r = sd_coefficient(a, b, k, u.ring) if a is not None and b is not None else None
    return out, r


def axis_extents(T) -> tuple:
    """Per-axis extent of the image of an affine cube."""
    off, mat = _key(T).affine_parts()
    return tuple(sum(abs(m) for m in row) for row in mat)


def mesh_diameter_bound(T, k: int) -> Fraction:
    """Largest per-axis extent of any term of the k-fold subdivision of T."""
    if k < 0:
        raise ValueError("k must be non-negative")
    ext = axis_extents(T)
    return (max(ext) if ext else Fraction(0)) * THIRD ** k
