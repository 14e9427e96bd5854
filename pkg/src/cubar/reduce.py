"""Normalization by degenerate cubes and multiples of the index, hybrid
complexes that switch between raw and normalized chains at a cut degree,
and closed-form tables for the one-point space."""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import gcd
from typing import Callable, Optional, Union

from .chaincore import Chain
from .coeff import Q, Z, ZN, RingSpec, WeightVector, index
from .cubeexpr import NO, UNKNOWN, YES, Cube, is_degenerate
from .gridmodel import BoundaryMatrices, GridModel, assemble, load_builtin
from .modalg import FGModulePresentation, Matrix

INF = math.inf


class UnknownDegeneracy(ValueError):
    """A generator's degeneracy could not be decided."""


class GammaError(AssertionError):
    """The boundary of a degenerate generator left the normalizing submodule."""


def classify(g) -> str:
    """Degeneracy status; exact for affine cubes (a zero column)."""
    if g.arity == 0:
        return NO
    if isinstance(g, Cube) and g.is_affine:
        _, mat = g.affine_parts()
        return YES if any(all(row[c] == 0 for row in mat) for c in range(g.arity)) else NO
    return is_degenerate(g)


def sigma_modulus(sigma, ring: RingSpec) -> int:
    """Integer q with ``R / sigma R = Z^k / q`` on coordinates (0: no reduction).

    Over Q a nonzero index gives q = 1, the zero module.
    """
    if ring.kind == Q:
        return 0 if sigma == 0 else 1
    s = abs(int(sigma))
    if ring.kind == ZN:
        return gcd(s, ring.n)
    return s


@dataclass
class GammaContext:
    sigma: object
    ring: RingSpec
    classifier: Callable = classify
    allow_unknown: bool = False

    @classmethod
    def for_weight(cls, w: WeightVector, allow_unknown: bool = False) -> "GammaContext":
        return cls(index(w), w.ring, classify, allow_unknown)

    @property
    def modulus(self) -> int:
        return sigma_modulus(self.sigma, self.ring)

    def degenerate(self, g) -> bool:
        s = self.classifier(g)
        if s == UNKNOWN:
            if not self.allow_unknown:
                raise UnknownDegeneracy(f"cannot decide whether {g} is degenerate")
            return False
        return s == YES

    def reduce_coeff(self, c):
        q = self.modulus
        if self.ring.kind == Q:
            return self.ring.zero if q else c
        if not q:
            return c
        return self.ring.elem(int(c) % q)


def gamma_normal_form(u: Chain, ctx: GammaContext) -> Chain:
    """Drop degenerate generators, then reduce coefficients modulo sigma."""
    if u.ring != ctx.ring:
        raise ValueError("chain and context use different rings")
    return Chain(u.ring, u.degree, {g: ctx.reduce_coeff(c) for g, c in u.terms.items()
                                    if not ctx.degenerate(g)})


def _restrict(M: Matrix, rows: list, cols: list) -> Matrix:
    return Matrix.from_rows(([M[r, c] for c in cols] for r in rows), len(cols))


def _keep(bm: BoundaryMatrices, ctx: GammaContext) -> dict:
    return {n: [i for i, g in enumerate(bm.gens.get(n, [])) if not ctx.degenerate(g)]
            for n in range(bm.max_degree + 1)}


def _guard(bm: BoundaryMatrices, keep: dict, q: int, ring: RingSpec):
    """Boundaries of degenerate generators must vanish in the quotient."""
    for n in range(1, bm.max_degree + 1):
        M = bm.matrix(n)
        kept = set(keep[n])
        for c in range(bm.dim(n)):
            if c in kept:
                continue
            for r in keep[n - 1]:
                x = M[r, c]
                bad = (x != 0 and q != 1) if ring.kind == Q else (int(x) % q if q else x)
                if bad:
                    raise GammaError(f"boundary of degenerate {bm.gens[n][c]} has "
                                     f"coefficient {x} on {bm.gens[n - 1][r]}")


def hybrid(bm: BoundaryMatrices, w: WeightVector, beta=INF,
           allow_unknown: bool = False) -> BoundaryMatrices:
    """Raw chains in degrees >= beta, normalized chains below.

    The map at the cut degree is the raw boundary followed by the quotient.
    """
    ctx = GammaContext.for_weight(w, allow_unknown)
    q = ctx.modulus
    keep = _keep(bm, ctx)
    _guard(bm, keep, q, w.ring)
    top = bm.max_degree
    idx = {n: (list(range(bm.dim(n))) if n >= beta else keep[n]) for n in range(top + 1)}
    gens = {n: [bm.gens[n][i] for i in idx[n]] for n in range(top + 1)}
    mats = {n: _restrict(bm.matrix(n), idx[n - 1], idx[n]) for n in range(1, top + 1)}
    raw_q = w.ring.n if w.ring.kind == ZN else 0
    moduli = {n: (raw_q if n >= beta else q) for n in range(top + 1)}
    label = "normalized" if beta == INF else ("raw" if beta == 0 else f"beta={beta}")
    return BoundaryMatrices(w.ring, gens, mats, moduli, label)


def gamma_boundary_matrices(model, w: WeightVector, pad_to: Optional[int] = None,
                            allow_unknown: bool = False) -> BoundaryMatrices:
    """The normalized complex of a model (or of given raw matrices)."""
    bm = model if isinstance(model, BoundaryMatrices) else model.matrices(w, pad_to)
    return hybrid(bm, w, INF, allow_unknown)


def beta_complex(model, w: WeightVector, beta, pad_to: Optional[int] = None) -> BoundaryMatrices:
    """Hybrid complex cut at ``beta`` (0 is raw, ``inf`` is normalized)."""
    if beta != INF and (not isinstance(beta, int) or beta < 0):
        raise ValueError("beta is a non-negative integer or inf")
    bm = model if isinstance(model, BoundaryMatrices) else model.matrices(w, pad_to)
    if beta == 0:
        return bm
    return hybrid(bm, w, beta)


def parse_variant(text: Union[str, int, float]):
    """'raw', 'normalized', 'beta=7', 'beta:inf' or a bare cut degree."""
    if isinstance(text, (int, float)):
        return _beta_value(text)
    t = str(text).strip().lower()
    if t == "raw":
        return 0
    if t in ("normalized", "normalised", "gamma"):
        return INF
    for prefix in ("beta=", "beta:", "beta"):
        if t.startswith(prefix):
            t = t[len(prefix):]
            break
    if t in ("inf", "infinity", "oo"):
        return INF
    try:
        return _beta_value(int(t))
    except ValueError:
        raise ValueError(f"unknown variant {text!r}") from None


def _beta_value(b):
    if b == INF:
        return INF
    if int(b) != b or b < 0:
        raise ValueError("beta is a non-negative integer or inf")
    return int(b)


def variant_name(beta) -> str:
    return "normalized" if beta == INF else ("raw" if beta == 0 else f"beta={beta}")


def variant_matrices(model: GridModel, w: WeightVector, beta, n_max: int) -> BoundaryMatrices:
    """Matrices good for homology in degrees 0..n_max.

    Raw chains need the degenerate cubes, so the model is padded up to
    n_max + 1 wherever raw degrees occur; the normalized complex needs none.
    """
    pad = None if beta == INF else n_max + 1
    return beta_complex(model, w, beta, pad)


# ---------------------------------------------------------------------------
# the one-point space

def _quot(ring: RingSpec, sigma) -> FGModulePresentation:
    """R / sigma R."""
    if ring.kind == Q:
        return FGModulePresentation(ring, 1 if sigma == 0 else 0, ())
    return FGModulePresentation.from_orders(ring, [sigma_modulus(sigma, ring)])


def _ann(ring: RingSpec, sigma) -> FGModulePresentation:
    """{x : sigma x = 0}."""
    if ring.kind == Q or ring.kind == Z:
        return FGModulePresentation(ring, 1 if sigma == 0 else 0, ())
    # over Z/n the annihilator of sigma is cyclic of order gcd(sigma, n)
    return FGModulePresentation.from_orders(ring, [sigma_modulus(sigma, ring)])


def point_value(w: WeightVector, n: int, beta=0) -> FGModulePresentation:
    """Closed-form homology of the point in degree n for the cut ``beta``."""
    ring, sigma = w.ring, index(w)
    sigma = int(sigma) if ring.kind != Q else sigma
    if n < 0:
        return FGModulePresentation.zero(ring)
    if n >= beta + 1 or beta == 0:
        return _quot(ring, sigma) if n % 2 == 0 else _ann(ring, sigma)
    if n == beta:
        return FGModulePresentation(ring, 1, ()) if beta % 2 else _quot(ring, sigma)
    return _quot(ring, sigma) if n == 0 else FGModulePresentation.zero(ring)


def point_theory_table(w: WeightVector, n_max: int, variant="raw",
                       cross_check: bool = False) -> list:
    """Homology of the point in degrees 0..n_max, optionally recomputed
    from the point model's matrices."""
    beta = parse_variant(variant)
    table = [point_value(w, n, beta) for n in range(n_max + 1)]
    if cross_check:
        bm = variant_matrices(load_builtin("point", w.L), w, beta, n_max)
        got = [bm.homology(n) for n in range(n_max + 1)]
        if got != table:
            bad = [n for n in range(n_max + 1) if got[n] != table[n]]
            raise AssertionError(f"point table disagrees with the matrices in degrees {bad}")
    return table
