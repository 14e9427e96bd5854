"""Exact integer linear algebra: Smith normal form, lattices, homology.

Matrices are small immutable row tuples.  Homology of a chain complex whose
modules are ``Z^k / qZ^k`` (``q = 0`` meaning free) is computed on integral
lifts: cycles are ``{x : d x in q' Z^k'}``, boundaries are ``im d' + q Z^k``,
and the quotient is read off a Smith normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from .coeff import Q, Z, ZN, RingSpec


@dataclass(frozen=True)
class Matrix:
    rows: tuple
    nrows: int
    ncols: int

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], ncols: Optional[int] = None) -> "Matrix":
        rows = tuple(tuple(r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        return cls(rows, len(rows), ncols)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> "Matrix":
        return cls.from_rows(
            (tuple(c[i] for c in cols) for i in range(nrows)), len(cols))

    @classmethod
    def zeros(cls, m: int, n: int) -> "Matrix":
        return cls(tuple((0,) * n for _ in range(m)), m, n)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n, n)

    @classmethod
    def diagonal(cls, entries: Sequence, m: int, n: int) -> "Matrix":
        return cls.from_rows(
            [[entries[i] if i == j and i < len(entries) else 0 for j in range(n)]
             for i in range(m)], n)

    @property
    def shape(self):
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list:
        return [self.column(j) for j in range(self.ncols)]

    @property
    def T(self) -> "Matrix":
        return Matrix.from_rows(self.columns(), self.nrows)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = other.columns()
        return Matrix.from_rows(
            ([sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows),
            other.ncols)

    def apply(self, v: Sequence) -> tuple:
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.rows)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def is_diagonal(self) -> bool:
        return all(x == 0 for i, r in enumerate(self.rows) for j, x in enumerate(r) if i != j)

    def diagonal_entries(self) -> list:
        return [self.rows[i][i] for i in range(min(self.shape))]

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise ValueError("row counts differ")
        return Matrix.from_rows((a + b for a, b in zip(self.rows, other.rows)),
                                self.ncols + other.ncols)

    def to_lists(self) -> list:
        return [list(r) for r in self.rows]

    def __repr__(self):
        return f"Matrix({self.to_lists()})"


def determinant(M: Matrix):
    """Exact determinant by fraction-free Bareiss elimination."""
    n = M.nrows
    if n != M.ncols:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    a = [list(r) for r in M.rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SmithForm:
    D: Matrix
    U: Matrix
    V: Matrix

    @property
    def invariants(self) -> list:
        return [d for d in self.D.diagonal_entries() if d != 0]

    @property
    def rank(self) -> int:
        return len(self.invariants)


def smith_normal_form(M: Matrix) -> SmithForm:
    """Return D, U, V with ``U @ M @ V == D``, D diagonal, d_1 | d_2 | ...

    The pivot is always a nonzero entry of smallest absolute value in the
    remaining block, ties broken row-major.  Diagonal entries are >= 0.
    """
    m, n = M.shape
    A = [list(r) for r in M.rows]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        if i != j:
            A[i], A[j] = A[j], A[i]
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        if i != j:
            for row in A:
                row[i], row[j] = row[j], row[i]
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):  # row dst += c * row src
        A[dst] = [x + c * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, c):  # col dst += c * col src
        for row in A:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = A[i][j]
                if x != 0 and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            dirty = False
            p = A[t][t]
            for i in range(t + 1, m):
                if A[i][t] != 0:
                    add_row(i, t, -(A[i][t] // p))
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j] != 0:
                    add_col(j, t, -(A[t][j] // p))
                    dirty = dirty or A[t][j] != 0
            if dirty:
                best = (abs(A[t][t]), t, t)
                for i in range(t + 1, m):
                    if A[i][t] != 0 and abs(A[i][t]) < best[0]:
                        best = (abs(A[i][t]), i, t)
                for j in range(t + 1, n):
                    if A[t][j] != 0 and abs(A[t][j]) < best[0]:
                        best = (abs(A[t][j]), t, j)
                swap_rows(t, best[1])
                swap_cols(t, best[2])
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p != 0), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return SmithForm(Matrix.from_rows(A, n), Matrix.from_rows(U, m), Matrix.from_rows(V, n))


# lattices in Z^k

def image_basis(gens: Sequence[Sequence[int]], dim: int) -> list:
    """A Z-basis of the lattice spanned by ``gens`` (vectors of length dim)."""
    gens = [tuple(g) for g in gens if any(g)]
    if not gens:
        return []
    G = Matrix.from_columns(gens, dim)
    S = smith_normal_form(G)
    GV = G @ S.V
    return [GV.column(j) for j in range(S.rank)]


def kernel_basis(M: Matrix) -> list:
    """A Z-basis of ``{x : M x = 0}``."""
    if M.ncols == 0:
        return []
    if M.nrows == 0 or M.is_zero():
        return [tuple(int(i == j) for i in range(M.ncols)) for j in range(M.ncols)]
    S = smith_normal_form(M)
    return [S.V.column(j) for j in range(S.rank, M.ncols)]


class Lattice:
    """A sublattice of Z^dim with a fixed basis; supports membership solves."""

    def __init__(self, gens: Sequence[Sequence[int]], dim: int):
        self.dim = dim
        self.basis = image_basis(gens, dim)
        self._snf = None

    @property
    def rank(self) -> int:
        return len(self.basis)

    def coordinates(self, v: Sequence[int]) -> Optional[tuple]:
        """Integer t with ``sum t_i basis_i == v``, or None."""
        if not self.basis:
            return () if not any(v) else None
        if self._snf is None:
            self._snf = smith_normal_form(Matrix.from_columns(self.basis, self.dim))
        S = self._snf
        s = S.U.apply(v)
        r = S.rank
        if any(s[i] for i in range(r, len(s))):
            return None
        d = S.D.diagonal_entries()
        y = []
        for i in range(r):
            if s[i] % d[i]:
                return None
            y.append(s[i] // d[i])
        y += [0] * (len(self.basis) - r)
        return S.V.apply(y)

    def contains(self, v: Sequence[int]) -> bool:
        return self.coordinates(v) is not None

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(b) for b in other.basis)

    def __eq__(self, other):
        return (isinstance(other, Lattice) and self.dim == other.dim
                and self.contains_lattice(other) and other.contains_lattice(self))

    __hash__ = None


def cycle_lattice(d: Matrix, q_prev: int = 0) -> Lattice:
    """``{x in Z^k : d x in q_prev Z^k'}``."""
    k = d.ncols
    if q_prev:
        ext = d.hstack(Matrix.from_rows(
            ([q_prev * int(i == j) for j in range(d.nrows)] for i in range(d.nrows)),
            d.nrows))
        gens = [v[:k] for v in kernel_basis(ext)]
    else:
        gens = kernel_basis(d)
    return Lattice(gens, k)


def boundary_lattice(d_next: Matrix, dim: int, q: int = 0) -> Lattice:
    gens = d_next.columns() if d_next.ncols else []
    if q:
        gens = list(gens) + [tuple(q * int(i == j) for j in range(dim)) for i in range(dim)]
    return Lattice(gens, dim)


def quotient_orders(K: Lattice, I: Lattice) -> list:
    """Cyclic orders of K/I (0 for a free summand); I must lie in K."""
    coords = []
    for b in I.basis:
        c = K.coordinates(b)
        if c is None:
            raise ValueError("boundary lattice is not contained in the cycle lattice")
        coords.append(c)
    r = K.rank
    if not coords:
        return [0] * r
    S = smith_normal_form(Matrix.from_columns(coords, r))
    inv = S.invariants
    return [d for d in inv if d != 1] + [0] * (r - len(inv))


def rank_over_q(M: Matrix) -> int:
    """Rank over Q by integer elimination on sparse rows (content divided out)."""
    den = 1
    for r in M.rows:
        for x in r:
            if isinstance(x, Fraction):
                den = den * x.denominator // gcd(den, x.denominator)
    rows = []
    for r in M.rows:
        row = {j: int(x * den) for j, x in enumerate(r) if x}
        if row:
            rows.append(row)
    rank = 0
    while rows:
        # pivot: a shortest row, eliminating its leading column from the rest
        piv = min(rows, key=len)
        rows.remove(piv)
        col = min(piv)
        p = piv[col]
        nxt = []
        for row in rows:
            c = row.get(col)
            if c:
                new = {j: p * x for j, x in row.items()}
                for j, y in piv.items():
                    v = new.get(j, 0) - c * y
                    if v:
                        new[j] = v
                    else:
                        new.pop(j, None)
                g = 0
                for x in new.values():
                    g = gcd(g, x)
                row = {j: x // g for j, x in new.items()} if g > 1 else new
            if row:
                nxt.append(row)
        rows = nxt
        rank += 1
    return rank


# presentations

def invariant_factors(orders: Iterable[int]) -> tuple[int, tuple]:
    """Free rank and divisibility chain of a direct sum of cyclic groups."""
    orders = [abs(o) for o in orders]
    free = sum(1 for o in orders if o == 0)
    tors = [o for o in orders if o > 1]
    if not tors:
        return free, ()
    S = smith_normal_form(Matrix.diagonal(tors, len(tors), len(tors)))
    return free, tuple(d for d in S.invariants if d > 1)


@dataclass(frozen=True)
class FGModulePresentation:
    """``R^free_rank + R/d_1 + ... + R/d_t`` with d_1 | d_2 | ... nonunits.

    Over Z/n the torsion entries are proper divisors of n, so ``R/d`` is the
    cyclic group of order d.
    """

    ring: RingSpec
    free_rank: int
    torsion: tuple = ()

    def __post_init__(self):
        tors = tuple(self.torsion)
        object.__setattr__(self, "torsion", tors)
        if self.free_rank < 0:
            raise ValueError("negative rank")
        if self.ring.kind == Q and tors:
            raise ValueError("vector spaces have no torsion")
        for d in tors:
            if d < 2 or (self.ring.kind == ZN and (self.ring.n % d or d == self.ring.n)):
                raise ValueError(f"invalid torsion coefficient {d} over {self.ring}")
        for a, b in zip(tors, tors[1:]):
            if b % a:
                raise ValueError("torsion is not a divisibility chain")

    @classmethod
    def zero(cls, ring: Optional[RingSpec] = None) -> "FGModulePresentation":
        return cls(ring or RingSpec.integers(), 0, ())

    @classmethod
    def from_orders(cls, ring: RingSpec, orders: Iterable[int]) -> "FGModulePresentation":
        """Canonical presentation of a sum of cyclic abelian groups.

        Over Z an order 0 is a free summand.  Over Z/n the orders must divide
        n and an order n is a free summand.  Over Q any nonzero order counts
        as a free summand (orders only distinguish zero from nonzero there).
        """
        orders = [abs(o) for o in orders]
        if ring.kind == Q:
            return cls(ring, sum(1 for o in orders if o != 1), ())
        if ring.kind == ZN:
            n = ring.n
            orders = [n if o == 0 else o for o in orders]
            if any(n % o for o in orders):
                raise ValueError("orders must divide the modulus")
            _, chain = invariant_factors(o for o in orders if o != n)
            return cls(ring, sum(1 for o in orders if o == n), chain)
        free, chain = invariant_factors(orders)
        return cls(ring, free, chain)

    def orders(self) -> list:
        top = self.ring.n if self.ring.kind == ZN else 0
        return [top] * self.free_rank + list(self.torsion)

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def direct_sum(self, *others: "FGModulePresentation") -> "FGModulePresentation":
        orders = self.orders()
        for o in others:
            if o.ring != self.ring:
                raise ValueError("direct sum across rings")
            orders += o.orders()
        return FGModulePresentation.from_orders(self.ring, orders)

    def __add__(self, other):
        return self.direct_sum(other)

    def to_json(self) -> dict:
        return {"rank": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, data: dict, ring: Optional[RingSpec] = None) -> "FGModulePresentation":
        ring = ring or RingSpec.integers()
        top = ring.n if ring.kind == ZN else 0
        return cls.from_orders(ring, [top] * int(data.get("rank", 0))
                               + [int(t) for t in data.get("torsion", [])])

    def __str__(self):
        if self.is_zero():
            return "0"
        base = {Z: "Z", Q: "Q"}.get(self.ring.kind, f"(Z/{self.ring.n})")
        parts = []
        if self.free_rank:
            parts.append(base if self.free_rank == 1 else f"{base}^{self.free_rank}")
        parts += [f"Z_{d}" for d in self.torsion]
        return " + ".join(parts)


def homology_from_matrices(d_n: Matrix, d_next: Matrix, ring: Optional[RingSpec] = None,
                           q_n: int = 0, q_prev: int = 0) -> FGModulePresentation:
    """``ker d_n / im d_next`` as a canonical presentation.

    ``d_n`` maps C_n to C_{n-1} and ``d_next`` maps C_{n+1} to C_n.  For
    quotient modules pass the moduli: ``C_n = Z^k / q_n Z^k`` and
    ``C_{n-1} = Z^k' / q_prev Z^k'``.  Over Z/n the ring modulus is applied
    on top (``gcd`` with the given moduli).  Over Q a nonzero modulus means
    the module is zero.
    """
    ring = ring or RingSpec.integers()
    k = d_n.ncols
    if d_next.nrows != k:
        raise ValueError(f"d_next has {d_next.nrows} rows but C_n has rank {k}")
    if ring.kind == Q:
        if q_n:
            return FGModulePresentation.zero(ring)
        dn = d_n if not q_prev else Matrix.zeros(0, k)
        prod = dn @ d_next
        if not prod.is_zero():
            raise ValueError("d_n @ d_next is not zero")
        kernel = k - rank_over_q(dn)
        return FGModulePresentation(ring, kernel - rank_over_q(d_next), ())
    if ring.kind == ZN:
        q_n = gcd(q_n, ring.n)
        q_prev = gcd(q_prev, ring.n)
    d_n = _lift(d_n)
    d_next = _lift(d_next)
    prod = d_n @ d_next
    if any(x % q_prev if q_prev else x for r in prod.rows for x in r):
        raise ValueError("d_n @ d_next is not zero")
    if q_n == 0 and q_prev == 0:
        # free modules: rank-nullity plus the invariant factors of d_next
        inv = smith_normal_form(d_next).invariants if d_next.ncols else []
        free = k - rank_over_q(d_n) - len(inv)
        return FGModulePresentation.from_orders(ring, [0] * free + inv)
    K = cycle_lattice(d_n, q_prev)
    I = boundary_lattice(d_next, k, q_n)
    return FGModulePresentation.from_orders(ring, quotient_orders(K, I))


def _lift(M: Matrix) -> Matrix:
    for r in M.rows:
        for x in r:
            if isinstance(x, Fraction) and x.denominator != 1:
                raise ValueError("non-integral entry in an integral computation")
    return Matrix.from_rows(([int(x) for x in r] for r in M.rows), M.ncols)


def change_coefficients(H_integral: Sequence[FGModulePresentation], sigma: int,
                        k: int) -> FGModulePresentation:
    """``H_k(.; Z_sigma) = H_k (x) Z_sigma  +  Tor(H_{k-1}, Z_sigma)``.

    The answer is an abelian group (presentation over Z).
    """
    sigma = abs(sigma)
    if sigma < 2:
        raise ValueError("coefficient change needs |sigma| >= 2")
    if k < 0 or k >= len(H_integral):
        raise ValueError(f"integral homology in degree {k} is missing")
    Hk = H_integral[k]
    orders = [sigma] * Hk.free_rank + [gcd(d, sigma) for d in Hk.torsion]
    if k >= 1:
        orders += [gcd(d, sigma) for d in H_integral[k - 1].torsion]
    return FGModulePresentation.from_orders(RingSpec.integers(), orders)
