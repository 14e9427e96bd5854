"""Finite cubical models: generator closures, boundary matrices, pairs and
the long exact sequence.

A model is a cubical complex on an integer grid.  Its generators are the
affine parametrisations of its cells, closed under the weighted faces at
heights i/L, optionally padded with degenerate cubes ``g o pi`` where
``pi`` forgets some input coordinates.  The resulting finite complex is a
subcomplex of the singular one; for L >= 2 it is not claimed to compute the
homology of the underlying space.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable, Optional, Sequence

from .chaincore import Chain, boundary
from .coeff import Q, Z, ZN, RingSpec, WeightVector
from .cubeexpr import AffineCell, Cube, is_degenerate, YES, NO
from .modalg import (FGModulePresentation, Lattice, Matrix, boundary_lattice,
                     cycle_lattice, homology_from_matrices, kernel_basis)

BUILTIN_MODELS = ("point", "interval", "interval-pair", "s1", "s2", "t2", "klein", "d2-pair")


class ClosureError(ValueError):
    """A face landed outside the generator set."""


class CoverError(ValueError):
    """A cover does not cover the carrier of a model."""


@dataclass(frozen=True)
class CubicalComplex:
    """Elementary boxes ``prod [base_i, base_i + extent_i]`` in Z^dim."""

    dim: int
    top_cells: frozenset

    def __post_init__(self):
        cells = frozenset((tuple(int(x) for x in b), tuple(int(e) for e in ex))
                          for b, ex in self.top_cells)
        for b, ex in cells:
            if len(b) != self.dim or len(ex) != self.dim or any(e not in (0, 1) for e in ex):
                raise ValueError(f"bad cell {b}, {ex} in dimension {self.dim}")
        object.__setattr__(self, "top_cells", cells)

    @classmethod
    def of(cls, dim: int, cells: Iterable) -> "CubicalComplex":
        return cls(dim, frozenset(cells))

    def closed_cells(self) -> frozenset:
        """All classical faces of the top cells."""
        out = set()
        for b, ex in self.top_cells:
            free = [i for i, e in enumerate(ex) if e]
            for choice in itertools.product((None, 0, 1), repeat=len(free)):
                nb, ne = list(b), list(ex)
                for axis, c in zip(free, choice):
                    if c is not None:
                        nb[axis] += c
                        ne[axis] = 0
                out.add((tuple(nb), tuple(ne)))
        return frozenset(out)

    def to_json(self) -> list:
        return [{"base": list(b), "extent": list(e)} for b, e in sorted(self.top_cells)]

    @classmethod
    def from_json(cls, dim: int, cells: list) -> "CubicalComplex":
        return cls(dim, frozenset((tuple(c["base"]), tuple(c["extent"])) for c in cells))


@dataclass(frozen=True)
class GridModel:
    complex: CubicalComplex
    L: int = 1
    subcomplex: Optional[CubicalComplex] = None
    name: str = ""

    @property
    def dim(self) -> int:
        return self.complex.dim

    @property
    def is_pair(self) -> bool:
        return self.subcomplex is not None

    @property
    def is_point(self) -> bool:
        cells = self.complex.closed_cells()
        return len(cells) == 1 and not any(next(iter(cells))[1]) and not self.is_pair

    def with_L(self, L: int) -> "GridModel":
        return GridModel(self.complex, L, self.subcomplex, self.name)

    def absolute(self) -> "GridModel":
        return GridModel(self.complex, self.L, None, self.name)

    def generators(self, pad_to: Optional[int] = None) -> "Generators":
        return closure_generate(self.complex, self.L, pad_to)

    def sub_generators(self, pad_to: Optional[int] = None) -> "Generators":
        if self.subcomplex is None:
            return Generators({})
        return closure_generate(self.subcomplex, self.L, pad_to)

    def matrices(self, w: WeightVector, pad_to: Optional[int] = None) -> "BoundaryMatrices":
        """Boundary matrices of the model, relative to the subcomplex if any."""
        if w.L != self.L:
            raise ValueError(f"weight has L={w.L} but the model uses L={self.L}")
        X = self.generators(pad_to)
        if self.subcomplex is None:
            return assemble(X, w)
        return pair_matrices(X, self.sub_generators(pad_to), w)

    def to_json(self) -> dict:
        data = {"dim": self.dim, "L": self.L, "top_cells": self.complex.to_json()}
        if self.subcomplex is not None:
            data["subcomplex"] = self.subcomplex.to_json()
        return data

    @classmethod
    def from_json(cls, data, name: str = "") -> "GridModel":
        if isinstance(data, str):
            data = json.loads(data)
        for key in ("dim", "top_cells"):
            if key not in data:
                raise ValueError(f"model JSON lacks field {key!r}")
        dim = int(data["dim"])
        sub = data.get("subcomplex")
        model = cls(CubicalComplex.from_json(dim, data["top_cells"]), int(data.get("L", 1)),
                    CubicalComplex.from_json(dim, sub) if sub is not None else None, name)
        if model.subcomplex is not None and not model.subcomplex.closed_cells() <= \
                model.complex.closed_cells():
            raise ValueError("subcomplex is not contained in the complex")
        return model


def load_builtin(name: str, L: int = 1) -> GridModel:
    if name not in BUILTIN_MODELS:
        raise ValueError(f"unknown built-in model {name!r}; choose from {BUILTIN_MODELS}")
    text = resources.files("cubar").joinpath("models").joinpath(f"{name}.json").read_text()
    return GridModel.from_json(text, name).with_L(L)


@dataclass(frozen=True)
class LCubicalGenerator:
    """An axis-parallel unit box with some axes fixed at multiples of 1/L."""

    lower: tuple
    free_axes: tuple

    @property
    def degree(self) -> int:
        return len(self.free_axes)

    def to_cube(self) -> Cube:
        ext = [int(i in self.free_axes) for i in range(len(self.lower))]
        return AffineCell.box(self.lower, ext).normal_form()

    @classmethod
    def from_cube(cls, c: Cube) -> "LCubicalGenerator":
        off, mat = c.affine_parts()
        free = []
        for col in range(c.arity):
            hits = [r for r in range(len(off)) if mat[r][col] != 0]
            if len(hits) != 1 or mat[hits[0]][col] != 1:
                raise ValueError("cube is not an axis-parallel unit box")
            free.append(hits[0])
        if free != sorted(set(free)):
            raise ValueError("cube is not an axis-parallel unit box")
        return cls(tuple(off), tuple(free))

    def __str__(self):
        parts = [f"[{x},{x + 1}]" if i in self.free_axes else str(x)
                 for i, x in enumerate(self.lower)]
        return "x".join(parts)


@dataclass
class Generators:
    """Generators per degree, in a fixed canonical order."""

    by_degree: dict

    def __post_init__(self):
        self.by_degree = {n: sorted(set(g), key=lambda c: c.sort_key())
                          for n, g in self.by_degree.items() if g}
        self._index = {n: {g: i for i, g in enumerate(gs)} for n, gs in self.by_degree.items()}

    def __getitem__(self, n: int) -> list:
        return self.by_degree.get(n, [])

    def index(self, n: int) -> dict:
        return self._index.get(n, {})

    def __contains__(self, g) -> bool:
        return g in self.index(g.arity)

    def all(self) -> list:
        return [g for n in sorted(self.by_degree) for g in self.by_degree[n]]

    @property
    def max_degree(self) -> int:
        return max(self.by_degree, default=-1)

    def counts(self) -> dict:
        return {n: len(g) for n, g in sorted(self.by_degree.items())}

    def __eq__(self, other):
        return isinstance(other, Generators) and self.by_degree == other.by_degree


def close_under_faces(gens: Iterable, L: int) -> Generators:
    """Smallest face-closed set (faces at i/L, i = 0..L) containing gens."""
    seen = set()
    todo = list(gens)
    while todo:
        g = todo.pop()
        if g in seen:
            continue
        seen.add(g)
        for j in range(1, g.arity + 1):
            for i in range(L + 1):
                f = g.face(L, i, j)
                if f not in seen:
                    todo.append(f)
    by_degree: dict = {}
    for g in seen:
        by_degree.setdefault(g.arity, []).append(g)
    return Generators(by_degree)


def _pad(gens: Generators, pad_to: int) -> list:
    """Degenerate cubes g o pi up to degree pad_to (g affine)."""
    out = []
    for k, gs in gens.by_degree.items():
        for g in gs:
            off, mat = g.affine_parts()
            for n in range(k + 1, pad_to + 1):
                for kept in itertools.combinations(range(n), k):
                    cols = {c: i for i, c in enumerate(kept)}
                    new = [[row[cols[c]] if c in cols else 0 for c in range(n)] for row in mat]
                    out.append(AffineCell(off, new, n).normal_form())
    return out


def closure_generate(K: CubicalComplex, L: int = 1, pad_to: Optional[int] = None) -> Generators:
    """Generators of the model: top cells closed under all faces at i/L.

    With ``pad_to`` the set also holds every degenerate ``g o pi`` of degree
    at most ``pad_to``; the point then has one generator per degree.
    """
    if L < 1:
        raise ValueError("L must be positive")
    return _closure_cached(K, L, pad_to)


@functools.lru_cache(maxsize=64)
def _closure_cached(K: CubicalComplex, L: int, pad_to: Optional[int]) -> Generators:
    tops = [AffineCell.box(b, e).normal_form() for b, e in sorted(K.top_cells)]
    gens = close_under_faces(tops, L)
    if pad_to is not None and pad_to > gens.max_degree:
        gens = close_under_faces(gens.all() + _pad(gens, pad_to), L)
    return gens


@dataclass
class BoundaryMatrices:
    """A finite chain complex ``C_n = R^k / q_n`` given by matrices.

    ``matrices[n]`` maps degree n to degree n-1 in the ordered bases
    ``gens[n]``.  ``moduli[n]`` is 0 for free modules and otherwise the
    integer q with ``C_n = Z^k / q Z^k`` (over Q a nonzero modulus means the
    module is zero).
    """

    ring: RingSpec
    gens: dict
    matrices: dict
    moduli: dict = field(default_factory=dict)
    label: str = "raw"

    def dim(self, n: int) -> int:
        return len(self.gens.get(n, []))

    @property
    def max_degree(self) -> int:
        return max((n for n, g in self.gens.items() if g), default=-1)

    def matrix(self, n: int) -> Matrix:
        if n in self.matrices:
            return self.matrices[n]
        return Matrix.zeros(self.dim(n - 1) if n >= 1 else 0, self.dim(n))

    def modulus(self, n: int) -> int:
        return self.moduli.get(n, self.ring.n if self.ring.kind == ZN else 0)

    def check_composition(self) -> bool:
        for n in range(1, self.max_degree + 1):
            prod = self.matrix(n) @ self.matrix(n + 1)
            q = self.modulus(n - 1)
            if any((x % q if q else x) for r in prod.rows for x in r):
                return False
        return True

    def homology(self, n: int) -> FGModulePresentation:
        if n < 0:
            return FGModulePresentation.zero(self.ring)
        return homology_from_matrices(self.matrix(n), self.matrix(n + 1), self.ring,
                                      q_n=self.modulus(n), q_prev=self.modulus(n - 1)
                                      if n >= 1 else 0)

    def homology_table(self, degrees: Iterable[int]) -> list:
        return [self.homology(n) for n in degrees]

    def stats(self) -> dict:
        return {"generators": {str(n): self.dim(n) for n in sorted(self.gens)},
                "variant": self.label}


def boundary_matrix(gens: Generators, n: int, w: WeightVector) -> Matrix:
    """Column per degree-n generator holding its boundary in the degree-(n-1) basis."""
    cols = gens[n]
    if n == 0:
        return Matrix.zeros(0, len(cols))
    rows = gens.index(n - 1)
    ring = w.ring
    M = [[ring.zero] * len(cols) for _ in range(len(rows))]
    for c, g in enumerate(cols):
        for f, coeff in boundary(Chain(ring, n, {g: ring.one}), w).terms.items():
            if f not in rows:
                raise ClosureError(f"face {f} of {g} is not a generator")
            M[rows[f]][c] = coeff
    return Matrix.from_rows(M, len(cols))


def assemble(gens: Generators, w: WeightVector, label: str = "raw") -> BoundaryMatrices:
    top = gens.max_degree
    mats = {n: boundary_matrix(gens, n, w) for n in range(1, top + 1)}
    return BoundaryMatrices(w.ring, {n: list(gens[n]) for n in range(top + 1)}, mats, {}, label)


def pair_matrices(X: Generators, A: Generators, w: WeightVector) -> BoundaryMatrices:
    """Matrices of K(X)/K(A) in the basis of generators outside A."""
    for g in A.all():
        if g not in X:
            raise ClosureError(f"{g} lies in A but not in X")
        for j in range(1, g.arity + 1):
            for i in range(w.L + 1):
                if g.face(w.L, i, j) not in A:
                    raise ClosureError(f"A is not a subcomplex: a face of {g} escapes")
    rel = Generators({n: [g for g in X[n] if g not in A] for n in X.by_degree})
    ring = w.ring
    top = X.max_degree
    mats = {}
    for n in range(1, top + 1):
        rows = rel.index(n - 1)
        M = [[ring.zero] * len(rel[n]) for _ in range(len(rows))]
        for c, g in enumerate(rel[n]):
            for f, coeff in boundary(Chain(ring, n, {g: ring.one}), w).terms.items():
                if f in rows:
                    M[rows[f]][c] = coeff
                elif f not in X:
                    raise ClosureError(f"face {f} of {g} is not a generator")
        mats[n] = Matrix.from_rows(M, len(rel[n]))
    return BoundaryMatrices(ring, {n: list(rel[n]) for n in range(top + 1)}, mats, {},
                            "relative")


# ---------------------------------------------------------------------------
# long exact sequence of a pair

def _preimage(source: Lattice, f, target: Lattice, dim_target: int) -> Lattice:
    """``{x in source : f(x) in target}``."""
    B = source.basis
    if not B:
        return Lattice([], source.dim)
    images = [f(b) for b in B]
    cols = images + [tuple(-x for x in t) for t in target.basis]
    M = Matrix.from_columns(cols, dim_target)
    gens = []
    for v in kernel_basis(M):
        t = v[:len(B)]
        gens.append(tuple(sum(ti * b[r] for ti, b in zip(t, B)) for r in range(source.dim)))
    if dim_target == 0:
        gens = B
    return Lattice(gens, source.dim)


def _sum(a: Lattice, b: Lattice) -> Lattice:
    return Lattice(list(a.basis) + list(b.basis), a.dim)


@dataclass
class LesReport:
    slots: list
    H_A: list
    H_X: list
    H_rel: list
    connecting_nonzero: dict

    @property
    def exact(self) -> bool:
        return all(s["exact"] for s in self.slots)

    def to_json(self) -> dict:
        return {"exact": self.exact, "slots": self.slots,
                "H_A": [h.to_json() for h in self.H_A],
                "H_X": [h.to_json() for h in self.H_X],
                "H_rel": [h.to_json() for h in self.H_rel],
                "connecting_nonzero": {str(k): v for k, v in self.connecting_nonzero.items()}}


def connecting_and_les_check(X: Generators, A: Generators, w: WeightVector,
                             strict: bool = False) -> LesReport:
    """Check exactness of ... H_n(A) -> H_n(X) -> H_n(X,A) -> H_{n-1}(A) ...

    Homology classes are lattices modulo boundaries; each slot compares the
    image lattice of the incoming map with the kernel lattice of the outgoing
    one.  Integer coefficients only.
    """
    if w.ring.kind != Z:
        raise ValueError("the exactness check works over the integers")
    full = assemble(X, w)
    sub = assemble(A, w) if A.all() else BoundaryMatrices(w.ring, {}, {}, {})
    rel = pair_matrices(X, A, w)
    top = X.max_degree
    ix = {n: X.index(n) for n in range(top + 1)}

    def incl(n):  # A-chain -> X-chain
        pos = [ix[n][g] for g in sub.gens.get(n, [])]
        def f(v):
            out = [0] * full.dim(n)
            for p, x in zip(pos, v):
                out[p] = x
            return tuple(out)
        return f

    def proj(n):  # X-chain -> relative chain
        pos = [ix[n][g] for g in rel.gens.get(n, [])]
        return lambda v: tuple(v[p] for p in pos)

    def lift_boundary(n):  # relative chain -> A-chain (boundary of the lift)
        pos = [ix[n][g] for g in rel.gens.get(n, [])]
        apos = [ix[n - 1][g] for g in sub.gens.get(n - 1, [])]
        d = full.matrix(n)
        def f(v):
            x = [0] * full.dim(n)
            for p, c in zip(pos, v):
                x[p] = c
            y = d.apply(x)
            return tuple(y[p] for p in apos)
        return f

    def Zl(bm, n):
        return cycle_lattice(bm.matrix(n)) if bm.dim(n) else Lattice([], 0)

    def Bl(bm, n):
        return boundary_lattice(bm.matrix(n + 1), bm.dim(n)) if bm.dim(n) else Lattice([], 0)

    slots, conn = [], {}
    for n in range(top + 1):
        ZA, BA, ZX, BX, ZR, BR = Zl(sub, n), Bl(sub, n), Zl(full, n), Bl(full, n), \
            Zl(rel, n), Bl(rel, n)
        # at H_n(X)
        im_i = _sum(Lattice([incl(n)(v) for v in ZA.basis], full.dim(n)), BX)
        ker_j = _preimage(ZX, proj(n), BR, rel.dim(n))
        slots.append({"slot": f"H_{n}(X)", "exact": im_i == ker_j})
        # at H_n(X,A)
        im_j = _sum(Lattice([proj(n)(v) for v in ZX.basis], rel.dim(n)), BR)
        if n >= 1:
            BA1 = Bl(sub, n - 1)
            ker_k = _preimage(ZR, lift_boundary(n), BA1, sub.dim(n - 1))
            conn[n] = not all(BA1.contains(lift_boundary(n)(v)) for v in ZR.basis)
        else:
            ker_k = ZR
        slots.append({"slot": f"H_{n}(X,A)", "exact": im_j == ker_k})
        # at H_{n-1}(A)
        if n >= 1:
            ZA1 = Zl(sub, n - 1)
            im_k = _sum(Lattice([lift_boundary(n)(v) for v in ZR.basis], sub.dim(n - 1)),
                        Bl(sub, n - 1))
            ker_i = _preimage(ZA1, incl(n - 1), Bl(full, n - 1), full.dim(n - 1))
            slots.append({"slot": f"H_{n - 1}(A)", "exact": im_k == ker_i})
    report = LesReport(slots,
                       [sub.homology(n) if sub.dim(n) or n <= top else None
                        for n in range(top + 1)],
                       [full.homology(n) for n in range(top + 1)],
                       [rel.homology(n) for n in range(top + 1)], conn)
    if strict and not report.exact:
        bad = [s["slot"] for s in slots if not s["exact"]]
        raise AssertionError(f"long exact sequence fails at {bad}")
    return report


# ---------------------------------------------------------------------------
# small chains relative to a cover

def carrier_box(g) -> tuple:
    """Per-axis (min, max) of the image of an affine cube."""
    off, mat = g.affine_parts()
    out = []
    for o, row in zip(off, mat):
        lo = o + sum(m for m in row if m < 0)
        hi = o + sum(m for m in row if m > 0)
        out.append((lo, hi))
    return tuple(out)


def _inside(box, cover_box) -> bool:
    return all(c_lo <= lo and hi <= c_hi for (lo, hi), (c_lo, c_hi) in zip(box, cover_box))


def u_small_filter(gens, cover: Sequence, check_cover: bool = True):
    """Keep the affine generators whose image lies inside some cover box.

    Cover boxes are per-axis (lo, hi) pairs.  With ``check_cover`` every
    vertex and edge midpoint of the generators must lie in the interior of a
    cover box relative to the carrier's bounding box; otherwise a
    ``CoverError`` names the uncovered point.
    """
    cover = [tuple((Fraction(lo), Fraction(hi)) for lo, hi in c) for c in cover]
    seq = gens.all() if isinstance(gens, Generators) else list(gens)
    if check_cover and seq:
        boxes = [carrier_box(g) for g in seq]
        hull = [(min(b[i][0] for b in boxes), max(b[i][1] for b in boxes))
                for i in range(len(boxes[0]))]
        for g in seq:
            for corner in itertools.product((0, Fraction(1, 2), 1), repeat=g.arity):
                p = g.eval(corner)
                if not any(_rel_interior(p, c, hull) for c in cover):
                    raise CoverError(f"point {tuple(str(x) for x in p)} is not covered")
    kept = [g for g in seq if any(_inside(carrier_box(g), c) for c in cover)]
    if isinstance(gens, Generators):
        by: dict = {}
        for g in kept:
            by.setdefault(g.arity, []).append(g)
        return Generators(by)
    return kept


def _rel_interior(p, box, hull) -> bool:
    for x, (lo, hi), (h_lo, h_hi) in zip(p, box, hull):
        if not (lo < x or (x == lo and lo <= h_lo)):
            return False
        if not (x < hi or (x == hi and hi >= h_hi)):
            return False
    return True


# ---------------------------------------------------------------------------
# subdivision at matrix level

@dataclass
class SdHomologyReport:
    a: int
    b: int
    k: int
    checks: list

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def to_json(self) -> dict:
        return {"identity": "sd-lemma4", "status": "ok" if self.ok else "fail",
                "a": self.a, "b": self.b, "k": self.k, "checks": self.checks}


def sd_homology_check(model: GridModel, a: int, b: int, k: int = 1,
                      degrees: Optional[Iterable[int]] = None,
                      pad_to: Optional[int] = None) -> SdHomologyReport:
    """Check ``[a^k SD^k u] = [b^k u]``, ``[b^k SD^k u] = [a^k u]`` and
    ``[r_k SD^k u] = [u]`` for a cycle basis u of each degree.

    The model is enlarged by the subdivided chains and by the warp homotopies
    (plain and mirrored) of every intermediate subdivision, closed under
    faces; membership in the boundary lattice is decided exactly.
    """
    from .homotopylab import sd_coefficient, subdivide, theta_sd

    if model.L != 1:
        raise ValueError("subdivision lives in the L = 1 theory")
    ring = RingSpec.integers()
    w = WeightVector(ring, (a, b))
    base = model.generators(pad_to)
    degrees = list(degrees) if degrees is not None else list(range(base.max_degree + 1))
    base_bm = assemble(base, w)
    extra, cycles = [], {}
    for n in degrees:
        Zn = cycle_lattice(base_bm.matrix(n)) if base_bm.dim(n) else Lattice([], 0)
        chains = [Chain(ring, n, {g: c for g, c in zip(base[n], v) if c}) for v in Zn.basis]
        cycles[n] = chains
        for u in chains:
            cur = u
            for _ in range(k):
                for tilde in (False, True):
                    extra.extend(theta_sd(cur, tilde).terms)
                cur = subdivide(cur)
                extra.extend(cur.terms)
    big = close_under_faces(base.all() + extra, 1)
    bm = assemble(big, w)
    r = sd_coefficient(a, b, k)
    checks = []
    for n in degrees:
        B = boundary_lattice(bm.matrix(n + 1), bm.dim(n))
        idx = big.index(n)

        def vec(ch):
            v = [0] * bm.dim(n)
            for g, c in ch.terms.items():
                v[idx[g]] += c
            return tuple(v)

        for num, u in enumerate(cycles[n]):
            sdk = u
            for _ in range(k):
                sdk = subdivide(sdk)
            for label, lhs, rhs in (("a^k SD^k u - b^k u", sdk.scale(a ** k), u.scale(b ** k)),
                                    ("b^k SD^k u - a^k u", sdk.scale(b ** k), u.scale(a ** k)),
                                    ("r_k SD^k u - u", sdk.scale(r), u)):
                checks.append({"degree": n, "cycle": num, "relation": label,
                               "ok": B.contains(vec(lhs - rhs))})
    return SdHomologyReport(a, b, k, checks)


# ---------------------------------------------------------------------------
# simplicial input

def cubical_subdivision(simplices: Iterable[Sequence[int]], n_vertices: int) -> CubicalComplex:
    """Cubical subdivision of a simplicial complex inside {0,1}^V.

    The cube ``[tau, rho]`` (nonempty tau inside rho) has base the indicator
    of tau and free axes rho minus tau; the union is homeomorphic to the
    realization of the complex.
    """
    tops = set()
    for rho in simplices:
        rho = sorted(set(rho))
        for v in rho:
            base = [0] * n_vertices
            base[v] = 1
            ext = [int(u in rho and u != v) for u in range(n_vertices)]
            tops.add((tuple(base), tuple(ext)))
    return CubicalComplex(n_vertices, frozenset(tops))


def grid_triangulation(n: int, flip: bool) -> list:
    """Triangles of an n x n grid with both directions glued; with ``flip``
    the second gluing reverses the first coordinate (a Klein bottle)."""
    def vid(i, j):
        if j == n:
            j, i = 0, (-i) % n if flip else i % n
        return (i % n) + n * (j % n)
    tris = []
    for i in range(n):
        for j in range(n):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1)
            tris += [(a, b, d), (a, c, d)]
    return tris
