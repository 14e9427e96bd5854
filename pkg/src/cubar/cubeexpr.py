"""Symbolic singular cubes ``I^n -> Q^d`` with exact rational evaluation.

Two representations live here.

*Expression trees* (``Base``, ``AffineCell``, ``Clamped``, ``Face``,
``CrossZero``, ``CrossJag``, ``Warp``, ``CylinderEnd``, ``PostCompose``)
evaluate straight from the defining formulas, including the case splits of
the warp curves.

*Canonical cubes* (``Cube``) are what chains are keyed by.  A cube is a leaf
map (an affine map or a multilinear ``Base`` table) precomposed with one
coordinate function per leaf input, followed by extra output coordinates.
Coordinate functions are constants, clamped ratios
``clamp((p0 + p1*x_a) / (q0 + q1*x_b))`` or jags ``chi_k(x_v)``; every node
type substitutes into that family, so two trees that describe the same
composite almost always land on the same cube.  When a substitution leaves
the family the result is an ``OpaqueCube`` keyed by its structure; such
cubes are still evaluable and are compared on a lattice by the verifiers.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

ZERO = Fraction(0)
ONE = Fraction(1)


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {x!r}")


def _unit(x, what="argument") -> Fraction:
    x = _q(x)
    if not 0 <= x <= 1:
        raise ValueError(f"{what} {x} is outside [0, 1]")
    return x


def clamp(y) -> Fraction:
    """Squeeze a rational into [0, 1]."""
    y = _q(y)
    return ZERO if y <= 0 else ONE if y >= 1 else y


def chi(L: int, k: int, x) -> Fraction:
    """The jag of height 1 peaking at k/L, zero at every other multiple of 1/L."""
    x = _unit(x)
    if not 0 <= k <= L:
        raise ValueError(f"jag index {k} outside 0..{L}")
    lo, hi = Fraction(k - 1, L), Fraction(k + 1, L)
    if x <= lo or x >= hi:
        return ZERO
    if x <= Fraction(k, L):
        return L * x - (k - 1)
    return (k + 1) - L * x


def eta(z: int, x, y, tilde: bool = False) -> Fraction:
    """The warp curves eta_0, eta_1, eta_2 and their mirrored versions."""
    x, y = _unit(x), _unit(y)
    if not tilde:
        d = 3 - 2 * y
        if z == 0:
            return x / d
        if z == 1:
            return (2 - x) / d if y <= Fraction(1, 2) + x / 2 else ONE
        if z == 2:
            return (2 + x) / d if y <= Fraction(1, 2) - x / 2 else ONE
    else:
        d = 1 + 2 * y
        if z == 0:
            return x / d
        if z == 1:
            return (2 - x) / d if y >= Fraction(1, 2) - x / 2 else ONE
        if z == 2:
            return (2 + x) / d if y >= Fraction(1, 2) + x / 2 else ONE
    raise ValueError(f"warp index {z} not in {{0, 1, 2}}")


def aux_curve(kind: str, *args, L: Optional[int] = None, k: Optional[int] = None) -> Fraction:
    """Evaluate ``chi`` (needs L, k), ``eta0..eta2`` or ``etaT0..etaT2``."""
    if kind == "chi":
        if L is None or k is None:
            raise ValueError("chi needs L and k")
        (x,) = args
        return chi(L, k, x)
    if kind.startswith("etaT") and len(kind) == 5:
        return eta(int(kind[4]), *args, tilde=True)
    if kind.startswith("eta") and len(kind) == 4:
        return eta(int(kind[3]), *args)
    raise ValueError(f"unknown curve {kind!r}")


def lattice_points(n: int, step) -> list:
    step = _q(step)
    N = 1 / step
    if N.denominator != 1 or N < 1:
        raise ValueError("lattice step must be 1/N for a positive integer N")
    ticks = [Fraction(i, int(N)) for i in range(int(N) + 1)]
    return list(itertools.product(ticks, repeat=n))


def _check_point(p, n) -> tuple:
    p = tuple(_q(x) for x in p)
    if len(p) != n:
        raise ValueError(f"point has {len(p)} coordinates, cube has arity {n}")
    for x in p:
        if not 0 <= x <= 1:
            raise ValueError(f"point {p} is outside the unit cube")
    return p


# ---------------------------------------------------------------------------
# coordinate functions of canonical cubes (variables are 0-based)

@dataclass(frozen=True)
class Const:
    value: Fraction

    def vars(self) -> frozenset:
        return frozenset()

    def eval(self, x) -> Fraction:
        return self.value

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Ratio:
    """``clamp((p0 + p1*x_a) / (q0 + q1*x_b))``; built only through ``ratio``."""

    p0: Fraction
    p1: Fraction
    a: Optional[int]
    q0: Fraction
    q1: Fraction
    b: Optional[int]
    exact: bool = field(compare=False, default=False)  # clamp never active

    def vars(self) -> frozenset:
        return frozenset(v for v in (self.a, self.b) if v is not None)

    def raw(self, x) -> Fraction:
        num = self.p0 + (self.p1 * x[self.a] if self.a is not None else 0)
        den = self.q0 + (self.q1 * x[self.b] if self.b is not None else 0)
        return num / den

    def eval(self, x) -> Fraction:
        return clamp(self.raw(x))

    @property
    def is_affine(self) -> bool:
        return self.q1 == 0 and self.exact

    def __str__(self):
        num = f"{self.p0}+{self.p1}*x{self.a}" if self.a is not None else str(self.p0)
        if self.q1 == 0 and self.q0 == 1:
            body = num
        else:
            den = f"{self.q0}+{self.q1}*x{self.b}" if self.b is not None else str(self.q0)
            body = f"({num})/({den})"
        return body if self.exact else f"clamp({body})"


@dataclass(frozen=True)
class Jag:
    L: int
    k: int
    var: int

    def vars(self) -> frozenset:
        return frozenset((self.var,))

    def eval(self, x) -> Fraction:
        return chi(self.L, self.k, x[self.var])

    def __str__(self):
        return f"chi[{self.L},{self.k}](x{self.var})"


Coord = Union[Const, Ratio, Jag]


def identity(v: int) -> Ratio:
    return Ratio(ZERO, ONE, v, ONE, ZERO, None, True)


def _is_identity(c) -> bool:
    return (isinstance(c, Ratio) and c.p0 == 0 and c.p1 == 1 and c.q0 == 1
            and c.q1 == 0)


def ratio(p0, p1, a, q0, q1, b) -> Coord:
    """Normalise ``clamp((p0 + p1*x_a)/(q0 + q1*x_b))`` on the unit cube."""
    p0, p1, q0, q1 = _q(p0), _q(p1), _q(q0), _q(q1)
    if p1 == 0 or a is None:
        p1, a = ZERO, None
    if q1 == 0 or b is None:
        q1, b = ZERO, None
    if q0 == 0 and q1 == 0:
        raise ZeroDivisionError("zero denominator")
    if q0 * (q0 + q1) <= 0:
        raise ZeroDivisionError("denominator vanishes on [0, 1]")
    scale = q0 if q0 != 0 else q1
    p0, p1, q0, q1 = p0 / scale, p1 / scale, q0 / scale, q1 / scale
    if a is None and b is None:
        return Const(clamp(p0 / q0))
    if a is not None and a == b and p0 * q1 == p1 * q0:
        return Const(clamp(p1 / q1))
    # linear-fractional in each variable separately, so extremes sit at corners
    if a is not None and a == b:
        corners = [(p0 + p1 * t) / (q0 + q1 * t) for t in (0, 1)]
    else:
        ta = (0, 1) if a is not None else (0,)
        tb = (0, 1) if b is not None else (0,)
        corners = [(p0 + p1 * s) / (q0 + q1 * t) for s in ta for t in tb]
    lo, hi = min(corners), max(corners)
    if hi <= 0:
        return Const(ZERO)
    if lo >= 1:
        return Const(ONE)
    return Ratio(p0, p1, a, q0, q1, b, lo >= 0 and hi <= 1)


@dataclass(frozen=True)
class _Lin:
    c0: Fraction
    c1: Fraction = ZERO
    var: Optional[int] = None

    def mul(self, other: "_Lin") -> Optional["_Lin"]:
        if self.var is None:
            return _Lin(self.c0 * other.c0, self.c0 * other.c1, other.var)
        if other.var is None:
            return _Lin(self.c0 * other.c0, self.c1 * other.c0, self.var)
        return None


def _lin_combo(c0, c1, u) -> Optional[tuple]:
    """``c0 + c1*u`` as a quotient of linear forms, if u allows it."""
    if c1 == 0 or u is None:
        return _Lin(c0), _Lin(ONE)
    if isinstance(u, Const):
        return _Lin(c0 + c1 * u.value), _Lin(ONE)
    if not (isinstance(u, Ratio) and u.exact):
        return None
    terms = {}
    for coef, var in ((c0 * u.q1, u.b), (c1 * u.p1, u.a)):
        if coef != 0 and var is not None:
            terms[var] = terms.get(var, ZERO) + coef
    terms = {v: c for v, c in terms.items() if c != 0}
    if len(terms) > 1:
        return None
    const = c0 * u.q0 + c1 * u.p0
    num = _Lin(const, *next(((c, v) for v, c in terms.items()), (ZERO, None)))
    return num, _Lin(u.q0, u.q1, u.b)


def substitute(c: Coord, phi: Sequence[Coord]) -> Optional[Coord]:
    """Compose a coordinate function with ``x_v -> phi[v]``; None if the
    composite leaves the coordinate family."""
    if isinstance(c, Const):
        return c
    if isinstance(c, Jag):
        u = phi[c.var]
        if isinstance(u, Const):
            return Const(chi(c.L, c.k, u.value))
        if _is_identity(u):
            return Jag(c.L, c.k, u.a)
        return None
    if _is_identity(c):
        return phi[c.a]
    num = _lin_combo(c.p0, c.p1, phi[c.a] if c.a is not None else None)
    den = _lin_combo(c.q0, c.q1, phi[c.b] if c.b is not None else None)
    if num is None or den is None:
        return None
    top = num[0].mul(den[1])
    bot = num[1].mul(den[0])
    if top is None or bot is None:
        return None
    return ratio(top.c0, top.c1, top.var, bot.c0, bot.c1, bot.var)


def eta_coord(z: int, v: int, y: int, tilde: bool = False) -> Coord:
    """The warp curve eta_z(x_v, x_y) in clamped-ratio form."""
    num = {0: (0, 1), 1: (2, -1), 2: (2, 1)}[z]
    den = (1, 2) if tilde else (3, -2)
    return ratio(num[0], num[1], v, den[0], den[1], y)


# ---------------------------------------------------------------------------
# affine maps and leaves

def _vec(xs) -> tuple:
    return tuple(_q(x) for x in xs)


def _mat(rows, ncols) -> tuple:
    rows = tuple(_vec(r) for r in rows)
    if any(len(r) != ncols for r in rows):
        raise ValueError("matrix rows have the wrong length")
    return rows


@dataclass(frozen=True)
class AffineMap:
    """``y = offset + matrix @ x`` from Q^source_dim to Q^len(offset)."""

    offset: tuple
    matrix: tuple
    source_dim: int

    def __post_init__(self):
        object.__setattr__(self, "offset", _vec(self.offset))
        object.__setattr__(self, "matrix", _mat(self.matrix, self.source_dim))
        if len(self.matrix) != len(self.offset):
            raise ValueError("offset and matrix disagree on the target dimension")

    @property
    def target_dim(self) -> int:
        return len(self.offset)

    @classmethod
    def identity(cls, d: int) -> "AffineMap":
        return cls((0,) * d, [[int(i == j) for j in range(d)] for i in range(d)], d)

    @classmethod
    def constant(cls, point, source_dim: int) -> "AffineMap":
        point = _vec(point)
        return cls(point, [[0] * source_dim for _ in point], source_dim)

    @classmethod
    def translation(cls, shift) -> "AffineMap":
        shift = _vec(shift)
        d = len(shift)
        return cls(shift, [[int(i == j) for j in range(d)] for i in range(d)], d)

    def __call__(self, x) -> tuple:
        if len(x) != self.source_dim:
            raise ValueError("point dimension does not match the map")
        return tuple(o + sum(m * xi for m, xi in zip(row, x))
                     for o, row in zip(self.offset, self.matrix))

    def after(self, offset, matrix) -> tuple:
        """(offset', matrix') of ``self`` composed after ``x -> offset + matrix x``."""
        k = len(matrix[0]) if matrix else 0
        if len(offset) != self.source_dim:
            raise ValueError("maps are not composable")
        new_off = self(offset)
        new_mat = tuple(tuple(sum(self.matrix[r][i] * matrix[i][c] for i in range(len(offset)))
                              for c in range(k)) for r in range(self.target_dim))
        return new_off, new_mat

    def compose(self, other: "AffineMap") -> "AffineMap":
        """``self o other``."""
        off, mat = self.after(other.offset, other.matrix or ())
        if not mat:
            mat = ()
        return AffineMap(off, mat, other.source_dim)


@dataclass(frozen=True)
class AffineLeaf:
    offset: tuple
    matrix: tuple  # target_dim rows of arity entries
    arity: int

    @property
    def target_dim(self) -> int:
        return len(self.offset)

    def eval(self, x) -> tuple:
        return tuple(o + sum(m * xi for m, xi in zip(row, x))
                     for o, row in zip(self.offset, self.matrix))

    def column_is_zero(self, i: int) -> bool:
        return all(row[i] == 0 for row in self.matrix)

    def __str__(self):
        cols = ";".join(",".join(str(x) for x in r) for r in self.matrix)
        return f"affine[{','.join(str(o) for o in self.offset)} | {cols}]"


# ---------------------------------------------------------------------------
# expression trees

class CubeExpr:
    """Base class of expression-tree nodes."""

    arity: int
    target_dim: int

    def eval(self, p) -> tuple:
        return self._eval(_check_point(p, self.arity))

    def _eval(self, p) -> tuple:
        raise NotImplementedError

    def normal_form(self) -> "CubeLike":
        raise NotImplementedError

    def validate(self) -> bool:
        """Re-check arity consistency down the tree (raises on mismatch)."""
        for child in getattr(self, "children", ()):
            child.validate()
        return True


@dataclass(frozen=True)
class Base(CubeExpr):
    """Multilinear interpolation of a value table on the lattice of step 1/N.

    ``values`` lists the images of the lattice points of I^arity in
    lexicographic order, each a tuple of length ``target_dim``.
    """

    arity: int
    target_dim: int
    N: int
    values: tuple

    def __post_init__(self):
        if self.arity < 0 or self.target_dim < 1 or self.N < 1:
            raise ValueError("invalid Base dimensions")
        vals = tuple(_vec(v) for v in self.values)
        if len(vals) != (self.N + 1) ** self.arity:
            raise ValueError("value table has the wrong number of entries")
        if any(len(v) != self.target_dim for v in vals):
            raise ValueError("value of the wrong dimension in the table")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "_hash", hash((self.arity, self.target_dim, self.N, vals)))

    def __hash__(self):
        return self._hash

    def _index(self, idx) -> int:
        pos = 0
        for i in idx:
            pos = pos * (self.N + 1) + i
        return pos

    def _eval(self, x) -> tuple:
        n, N = self.arity, self.N
        cell, frac = [], []
        for xi in x:
            s = xi * N
            c = min(int(s), N - 1)
            cell.append(c)
            frac.append(s - c)
        out = [ZERO] * self.target_dim
        for corner in itertools.product((0, 1), repeat=n):
            w = ONE
            for f, d in zip(frac, corner):
                w *= f if d else 1 - f
                if w == 0:
                    break
            if w == 0:
                continue
            val = self.values[self._index(c + d for c, d in zip(cell, corner))]
            for t in range(self.target_dim):
                out[t] += w * val[t]
        return tuple(out)

    def constant_along(self, axis: int) -> bool:
        N = self.N
        for idx in itertools.product(range(N + 1), repeat=self.arity):
            if idx[axis] == 0:
                first = self.values[self._index(idx)]
                for t in range(1, N + 1):
                    moved = list(idx)
                    moved[axis] = t
                    if self.values[self._index(moved)] != first:
                        return False
        return True

    def mapped(self, f: AffineMap) -> "Base":
        return Base(self.arity, f.target_dim, self.N, tuple(f(v) for v in self.values))

    def normal_form(self) -> "Cube":
        return make_cube(self, tuple(identity(v) for v in range(self.arity)), (), self.arity)

    @classmethod
    def random(cls, rng, arity: int, target_dim: int = 2, N: int = 2,
               lo: int = -3, hi: int = 3, denominator: int = 2) -> "Base":
        size = (N + 1) ** arity
        values = [tuple(Fraction(rng.randint(lo * denominator, hi * denominator), denominator)
                        for _ in range(target_dim)) for _ in range(size)]
        return cls(arity, target_dim, N, tuple(values))

    def to_json(self) -> dict:
        return {"arity": self.arity, "target_dim": self.target_dim,
                "lattice_step": f"1/{self.N}",
                "values": [[str(x) for x in v] for v in self.values]}

    @classmethod
    def from_json(cls, data: Union[dict, str]) -> "Base":
        if isinstance(data, str):
            data = json.loads(data)
        step = Fraction(data["lattice_step"])
        if step.numerator != 1:
            raise ValueError("lattice_step must be of the form 1/N")
        return cls(int(data["arity"]), int(data["target_dim"]), step.denominator,
                   tuple(tuple(Fraction(x) for x in v) for v in data["values"]))

    def __repr__(self):
        return f"Base(arity={self.arity}, d={self.target_dim}, N={self.N}, #{self._hash & 0xffffff:06x})"

    __str__ = __repr__


@dataclass(frozen=True)
class AffineCell(CubeExpr):
    """``x -> offset + matrix @ x``; ``box`` builds the standard parametrisation."""

    offset: tuple
    matrix: tuple
    arity: int

    def __post_init__(self):
        object.__setattr__(self, "offset", _vec(self.offset))
        object.__setattr__(self, "matrix", _mat(self.matrix, self.arity))
        if len(self.matrix) != len(self.offset) or not self.offset:
            raise ValueError("offset and matrix disagree on the target dimension")

    @property
    def target_dim(self) -> int:
        return len(self.offset)

    @classmethod
    def box(cls, base, extent, scale=1) -> "AffineCell":
        """Parametrise ``prod [base_i, base_i + scale*extent_i]`` (extent in {0,1})."""
        base = _vec(base)
        free = [i for i, e in enumerate(extent) if e]
        mat = [[_q(scale) if i == f else ZERO for f in free] for i in range(len(base))]
        return cls(base, mat, len(free))

    @classmethod
    def identity(cls, n: int) -> "AffineCell":
        return cls.box((0,) * n, (1,) * n)

    @classmethod
    def constant(cls, point, arity: int = 0) -> "AffineCell":
        point = _vec(point)
        return cls(point, [[0] * arity for _ in point], arity)

    def _eval(self, x) -> tuple:
        return tuple(o + sum(m * xi for m, xi in zip(row, x))
                     for o, row in zip(self.offset, self.matrix))

    def normal_form(self) -> "Cube":
        leaf = AffineLeaf(self.offset, self.matrix, self.arity)
        return make_cube(leaf, tuple(identity(v) for v in range(self.arity)), (), self.arity)


@dataclass(frozen=True)
class Clamped(CubeExpr):
    """``T o q o H``: input i goes to ``clamp(alpha*(e_i + v_i*x_i))``."""

    inner: CubeExpr
    alpha: Fraction
    e: tuple
    v: tuple

    def __post_init__(self):
        object.__setattr__(self, "alpha", _q(self.alpha))
        object.__setattr__(self, "e", _vec(self.e))
        object.__setattr__(self, "v", _vec(self.v))
        if not (len(self.e) == len(self.v) == self.inner.arity):
            raise ValueError("Clamped: e and v must have the inner arity")

    children = property(lambda self: (self.inner,))
    arity = property(lambda self: self.inner.arity)
    target_dim = property(lambda self: self.inner.target_dim)

    def _eval(self, x):
        y = tuple(clamp(self.alpha * (ei + vi * xi)) for ei, vi, xi in zip(self.e, self.v, x))
        return self.inner._eval(y)

    def normal_form(self):
        return canonical(self.inner).clamped(self.alpha, self.e, self.v)


@dataclass(frozen=True)
class Face(CubeExpr):
    """Fix input slot j (1-based) of ``inner`` at i/L."""

    inner: CubeExpr
    L: int
    i: int
    j: int

    def __post_init__(self):
        if self.inner.arity < 1:
            raise ValueError("cannot take a face of a 0-cube")
        if not 0 <= self.i <= self.L or self.L < 1:
            raise ValueError(f"face height {self.i}/{self.L} invalid")
        if not 1 <= self.j <= self.inner.arity:
            raise ValueError(f"face slot {self.j} outside 1..{self.inner.arity}")

    children = property(lambda self: (self.inner,))
    arity = property(lambda self: self.inner.arity - 1)
    target_dim = property(lambda self: self.inner.target_dim)

    def _eval(self, x):
        j = self.j - 1
        return self.inner._eval(x[:j] + (Fraction(self.i, self.L),) + x[j:])

    def normal_form(self):
        return canonical(self.inner).face(self.L, self.i, self.j)


@dataclass(frozen=True)
class CrossZero(CubeExpr):
    """``(x_1..x_n, x_{n+1}) -> (T(x_1..x_n), 0)``."""

    inner: CubeExpr

    children = property(lambda self: (self.inner,))
    arity = property(lambda self: self.inner.arity + 1)
    target_dim = property(lambda self: self.inner.target_dim + 1)

    def _eval(self, x):
        return self.inner._eval(x[:-1]) + (ZERO,)

    def normal_form(self):
        return canonical(self.inner).cross_zero()


@dataclass(frozen=True)
class CrossJag(CubeExpr):
    """``(x_1..x_n, x_{n+1}) -> (T(x_1..x_n), chi_k(x_{n+1}))``."""

    inner: CubeExpr
    L: int
    k: int

    def __post_init__(self):
        if self.L < 1 or not 0 <= self.k <= self.L:
            raise ValueError("CrossJag needs 0 <= k <= L")

    children = property(lambda self: (self.inner,))
    arity = property(lambda self: self.inner.arity + 1)
    target_dim = property(lambda self: self.inner.target_dim + 1)

    def _eval(self, x):
        return self.inner._eval(x[:-1]) + (chi(self.L, self.k, x[-1]),)

    def normal_form(self):
        return canonical(self.inner).cross_jag(self.L, self.k)


@dataclass(frozen=True)
class Warp(CubeExpr):
    """``(x_1..x_n, y) -> T(eta_{z_1}(x_1, y), ..., eta_{z_n}(x_n, y))``."""

    inner: CubeExpr
    z: tuple
    tilde: bool = False

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(int(t) for t in self.z))
        if len(self.z) != self.inner.arity or any(t not in (0, 1, 2) for t in self.z):
            raise ValueError("Warp needs z in {0,1,2}^n with n the inner arity")

    children = property(lambda self: (self.inner,))
    arity = property(lambda self: self.inner.arity + 1)
    target_dim = property(lambda self: self.inner.target_dim)

    def _eval(self, x):
        y = x[-1]
        return self.inner._eval(tuple(eta(zi, xi, y, self.tilde)
                                      for zi, xi in zip(self.z, x[:-1])))

    def normal_form(self):
        return canonical(self.inner).warp(self.z, self.tilde)


@dataclass(frozen=True)
class CylinderEnd(CubeExpr):
    """``x -> (T(x), end)``: the cube pushed to one end of X x I."""

    inner: CubeExpr
    end: int

    def __post_init__(self):
        if self.end not in (0, 1):
            raise ValueError("cylinder end must be 0 or 1")

    children = property(lambda self: (self.inner,))
    arity = property(lambda self: self.inner.arity)
    target_dim = property(lambda self: self.inner.target_dim + 1)

    def _eval(self, x):
        return self.inner._eval(x) + (Fraction(self.end),)

    def normal_form(self):
        return canonical(self.inner).cylinder(self.end)


@dataclass(frozen=True)
class PostCompose(CubeExpr):
    """``f o T`` for an affine map f."""

    inner: CubeExpr
    f: AffineMap

    def __post_init__(self):
        if self.f.source_dim != self.inner.target_dim:
            raise ValueError("map is not composable with the cube")

    children = property(lambda self: (self.inner,))
    arity = property(lambda self: self.inner.arity)
    target_dim = property(lambda self: self.f.target_dim)

    def _eval(self, x):
        return self.f(self.inner._eval(x))

    def normal_form(self):
        return canonical(self.inner).post(self.f)


# ---------------------------------------------------------------------------
# canonical cubes

def _face_phi(n: int, L: int, i: int, j: int) -> tuple:
    j0 = j - 1
    return tuple(identity(v) if v < j0 else Const(Fraction(i, L)) if v == j0
                 else identity(v - 1) for v in range(n))


class _CubeOps:
    """Operations shared by canonical and opaque cubes."""

    arity: int
    target_dim: int

    def eval(self, p) -> tuple:
        return self._eval(_check_point(p, self.arity))

    def face(self, L: int, i: int, j: int):
        if self.arity < 1:
            raise ValueError("cannot take a face of a 0-cube")
        if L < 1 or not 0 <= i <= L or not 1 <= j <= self.arity:
            raise ValueError(f"invalid face ({L}, {i}, {j}) of a {self.arity}-cube")
        memo = self.__dict__.setdefault("_faces", {})
        f = memo.get((L, i, j))
        if f is None:
            f = memo[(L, i, j)] = self._face(L, i, j)
        return f

    def clamped(self, alpha, e, v):
        alpha, e, v = _q(alpha), _vec(e), _vec(v)
        if not len(e) == len(v) == self.arity:
            raise ValueError("e and v must have the cube's arity")
        return self._clamped(alpha, e, v)

    def warp(self, z, tilde: bool = False):
        z = tuple(int(t) for t in z)
        if len(z) != self.arity or any(t not in (0, 1, 2) for t in z):
            raise ValueError("warp needs z in {0,1,2}^n")
        return self._warp(z, bool(tilde))

    def cross_jag(self, L: int, k: int):
        if L < 1 or not 0 <= k <= L:
            raise ValueError("cross_jag needs 0 <= k <= L")
        return self._cross_jag(L, k)

    def cylinder(self, end: int):
        if end not in (0, 1):
            raise ValueError("cylinder end must be 0 or 1")
        return self._cylinder(end)

    def post(self, f: AffineMap):
        if f.source_dim != self.target_dim:
            raise ValueError("map is not composable with the cube")
        return self._post(f)

    def sort_key(self) -> str:
        return str(self)


@dataclass(frozen=True)
class Cube(_CubeOps):
    """Canonical cube ``x -> leaf(coords(x)) ++ extras(x)``."""

    leaf: Union[AffineLeaf, Base]
    coords: tuple
    extras: tuple
    arity: int

    @property
    def target_dim(self) -> int:
        return self.leaf.target_dim + len(self.extras)

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.leaf, self.coords, self.extras, self.arity))
            object.__setattr__(self, "_hash", h)
        return h

    def normal_form(self) -> "Cube":
        return self

    def _eval(self, x) -> tuple:
        inner = tuple(c.eval(x) for c in self.coords)
        head = self.leaf._eval(inner) if isinstance(self.leaf, Base) else self.leaf.eval(inner)
        return head + tuple(c.eval(x) for c in self.extras)

    def _substituted(self, phi, arity, extra_tail=(), fallback=None):
        coords, extras = [], []
        for c in self.coords:
            s = substitute(c, phi)
            if s is None:
                return fallback()
            coords.append(s)
        for c in self.extras:
            s = substitute(c, phi)
            if s is None:
                return fallback()
            extras.append(s)
        return make_cube(self.leaf, tuple(coords), tuple(extras) + extra_tail, arity)

    def _face(self, L, i, j):
        return self._substituted(_face_phi(self.arity, L, i, j), self.arity - 1,
                                 fallback=lambda: OpaqueCube.wrap("face", (L, i, j), self))

    def _clamped(self, alpha, e, v):
        phi = tuple(ratio(alpha * ei, alpha * vi, t, 1, 0, None)
                    for t, (ei, vi) in enumerate(zip(e, v)))
        return self._substituted(phi, self.arity,
                                 fallback=lambda: OpaqueCube.wrap("clamped", (alpha, e, v), self))

    def _warp(self, z, tilde):
        n = self.arity
        phi = tuple(eta_coord(zi, t, n, tilde) for t, zi in enumerate(z))
        return self._substituted(phi, n + 1,
                                 fallback=lambda: OpaqueCube.wrap("warp", (z, tilde), self))

    def cross_zero(self):
        return make_cube(self.leaf, self.coords, self.extras + (Const(ZERO),), self.arity + 1)

    def _cross_jag(self, L, k):
        return make_cube(self.leaf, self.coords, self.extras + (Jag(L, k, self.arity),),
                         self.arity + 1)

    def _cylinder(self, end):
        return make_cube(self.leaf, self.coords, self.extras + (Const(Fraction(end)),),
                         self.arity)

    def _post(self, f):
        if not self.extras:
            if isinstance(self.leaf, AffineLeaf):
                off, mat = f.after(self.leaf.offset, self.leaf.matrix)
                return make_cube(AffineLeaf(off, mat, self.leaf.arity), self.coords, (),
                                 self.arity)
            return make_cube(self.leaf.mapped(f), self.coords, (), self.arity)
        return OpaqueCube.wrap("post", (f,), self)

    # dependence analysis

    def independent_vars(self) -> frozenset:
        """Input variables that provably never affect the value."""
        out = set()
        for v in range(self.arity):
            if any(v in c.vars() for c in self.extras):
                continue
            ok = True
            for i, c in enumerate(self.coords):
                if v in c.vars() and not self._leaf_constant_along(i):
                    ok = False
                    break
            if ok:
                out.add(v)
        return frozenset(out)

    def _leaf_constant_along(self, i: int) -> bool:
        if isinstance(self.leaf, AffineLeaf):
            return self.leaf.column_is_zero(i)
        return self.leaf.constant_along(i)

    @property
    def is_affine(self) -> bool:
        return isinstance(self.leaf, AffineLeaf) and not self.extras and \
            self.leaf.arity == self.arity and \
            all(c == identity(v) for v, c in enumerate(self.coords))

    def affine_parts(self) -> tuple:
        """(offset, matrix) of an affine cube."""
        if not self.is_affine:
            raise ValueError("cube is not affine")
        return self.leaf.offset, self.leaf.matrix

    def __str__(self):
        if self.is_affine:
            return f"{self.leaf}"
        inner = ",".join(str(c) for c in self.coords)
        s = f"{self.leaf}({inner})"
        if self.extras:
            s += " ++ (" + ",".join(str(c) for c in self.extras) + ")"
        return s


@dataclass(frozen=True)
class OpaqueCube(_CubeOps):
    """A composite outside the coordinate family, kept as a structural node."""

    op: str
    params: tuple
    child: "CubeLike"
    arity: int
    target_dim: int

    @classmethod
    def wrap(cls, op, params, child) -> "OpaqueCube":
        n, d = child.arity, child.target_dim
        arity, target = {
            "face": (n - 1, d), "clamped": (n, d), "warp": (n + 1, d),
            "cross_zero": (n + 1, d + 1), "cross_jag": (n + 1, d + 1),
            "cylinder": (n, d + 1), "post": (n, None),
        }[op]
        if op == "post":
            target = params[0].target_dim
        return cls(op, params, child, arity, target)

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.op, self.params, self.child, self.arity))
            object.__setattr__(self, "_hash", h)
        return h

    def normal_form(self):
        return self

    def _eval(self, x):
        op, p, c = self.op, self.params, self.child
        if op == "face":
            L, i, j = p
            return c._eval(x[:j - 1] + (Fraction(i, L),) + x[j - 1:])
        if op == "clamped":
            alpha, e, v = p
            return c._eval(tuple(clamp(alpha * (ei + vi * xi)) for ei, vi, xi in zip(e, v, x)))
        if op == "warp":
            z, tilde = p
            return c._eval(tuple(eta(zi, xi, x[-1], tilde) for zi, xi in zip(z, x[:-1])))
        if op == "cross_zero":
            return c._eval(x[:-1]) + (ZERO,)
        if op == "cross_jag":
            L, k = p
            return c._eval(x[:-1]) + (chi(L, k, x[-1]),)
        if op == "cylinder":
            return c._eval(x) + (Fraction(p[0]),)
        if op == "post":
            return p[0](c._eval(x))
        raise AssertionError(op)

    def _face(self, L, i, j):
        return OpaqueCube.wrap("face", (L, i, j), self)

    def _clamped(self, alpha, e, v):
        return OpaqueCube.wrap("clamped", (alpha, e, v), self)

    def _warp(self, z, tilde):
        return OpaqueCube.wrap("warp", (z, tilde), self)

    def cross_zero(self):
        return OpaqueCube.wrap("cross_zero", (), self)

    def _cross_jag(self, L, k):
        return OpaqueCube.wrap("cross_jag", (L, k), self)

    def _cylinder(self, end):
        return OpaqueCube.wrap("cylinder", (end,), self)

    def _post(self, f):
        return OpaqueCube.wrap("post", (f,), self)

    def independent_vars(self) -> frozenset:
        return frozenset()

    is_affine = False

    def __str__(self):
        return f"{self.op}{self.params}[{self.child}]"


CubeLike = Union[Cube, OpaqueCube]


def make_cube(leaf, coords: tuple, extras: tuple, arity: int) -> Cube:
    """Assemble a canonical cube, folding affine pieces into affine leaves."""
    if isinstance(leaf, AffineLeaf):
        coords = tuple(Const(ZERO) if leaf.column_is_zero(i) else c
                       for i, c in enumerate(coords))
        if all(isinstance(c, Const) or (isinstance(c, Ratio) and c.is_affine) for c in coords):
            off = list(leaf.offset)
            mat = [[ZERO] * arity for _ in off]
            for i, c in enumerate(coords):
                const, lin, var = (c.value, ZERO, None) if isinstance(c, Const) else \
                    (c.p0, c.p1, c.a)
                for r in range(len(off)):
                    m = leaf.matrix[r][i]
                    if m:
                        off[r] += m * const
                        if var is not None:
                            mat[r][var] += m * lin
            extras = list(extras)
            while extras and (isinstance(extras[0], Const)
                              or (isinstance(extras[0], Ratio) and extras[0].is_affine)):
                c = extras.pop(0)
                row = [ZERO] * arity
                if isinstance(c, Const):
                    off.append(c.value)
                else:
                    off.append(c.p0)
                    row[c.a] = c.p1
                mat.append(row)
            leaf = AffineLeaf(tuple(off), tuple(tuple(r) for r in mat), arity)
            coords = tuple(identity(v) for v in range(arity))
            extras = tuple(extras)
    if len(coords) != leaf.arity:
        raise ValueError("coordinate count does not match the leaf arity")
    return Cube(leaf, coords, extras, arity)


def canonical(e) -> CubeLike:
    """Canonical cube of an expression tree (cubes are returned unchanged)."""
    if isinstance(e, (Cube, OpaqueCube)):
        return e
    if isinstance(e, CubeExpr):
        return e.normal_form()
    raise TypeError(f"not a cube: {e!r}")


# ---------------------------------------------------------------------------
# map comparison and degeneracy

def fingerprint(e, lattice_step) -> tuple:
    return tuple(e.eval(p) for p in lattice_points(e.arity, lattice_step))


def maps_equal(e1, e2, lattice_step) -> bool:
    """Exact agreement at every point of the lattice of the given step.

    A False answer is a proof that the maps differ.  A True answer proves
    equality only for piecewise-multilinear maps whose breakpoints lie on
    the lattice.
    """
    if e1.arity != e2.arity or e1.target_dim != e2.target_dim:
        raise ValueError("maps have different arity or target dimension")
    return all(e1.eval(p) == e2.eval(p) for p in lattice_points(e1.arity, lattice_step))


def first_difference(e1, e2, lattice_step) -> Optional[tuple]:
    """A lattice point where two maps differ, or None."""
    for p in lattice_points(e1.arity, lattice_step):
        if e1.eval(p) != e2.eval(p):
            return p
    return None


YES, NO, UNKNOWN = "yes", "no", "unknown"


def dependence_witness(e, var: int, step=Fraction(1, 2), budget: int = 4096):
    """Two points differing only in ``var`` with different images, or None."""
    n = e.arity
    pts = lattice_points(n - 1, step)
    ticks = [p[0] for p in lattice_points(1, step)]
    checked = 0
    for rest in pts:
        base = rest[:var] + (ticks[0],) + rest[var:]
        ref = e.eval(base)
        for t in ticks[1:]:
            other = rest[:var] + (t,) + rest[var:]
            if e.eval(other) != ref:
                return base, other
            checked += 1
            if checked >= budget:
                return None
    return None


def is_degenerate(e, step=Fraction(1, 2)) -> str:
    """``yes`` if some input provably does not matter, ``no`` if every input
    has a witness pair, ``unknown`` otherwise."""
    if e.arity < 1:
        raise ValueError("degeneracy is defined for arity >= 1")
    c = canonical(e)
    if c.independent_vars():
        return YES
    for v in range(c.arity):
        if dependence_witness(c, v, step) is None:
            return UNKNOWN
    return NO
