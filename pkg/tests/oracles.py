"""Independent reference computations used by the tests.

Nothing here imports the package's cube algebra or Smith form: the classical
cubical boundary is built directly on elementary cubes, and integer linear
algebra goes through sympy.
"""

from __future__ import annotations

import itertools
import json
from math import gcd
from pathlib import Path

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

MODELS = Path(__file__).resolve().parents[1] / "src" / "cubar" / "models"


def load_cells(name: str):
    data = json.loads((MODELS / f"{name}.json").read_text())
    return [(tuple(c["base"]), tuple(c["extent"])) for c in data["top_cells"]]


def elementary_closure(top_cells):
    """All faces of the given elementary cubes, grouped by dimension."""
    cells = set()
    for base, ext in top_cells:
        free = [i for i, e in enumerate(ext) if e]
        for pick in itertools.product((None, 0, 1), repeat=len(free)):
            b, e = list(base), list(ext)
            for axis, c in zip(free, pick):
                if c is not None:
                    b[axis] += c
                    e[axis] = 0
            cells.add((tuple(b), tuple(e)))
    by_dim = {}
    for c in cells:
        by_dim.setdefault(sum(c[1]), []).append(c)
    return {k: sorted(v) for k, v in by_dim.items()}


def classical_boundary(cells_by_dim, n):
    """Integer matrix of the standard cubical boundary C_n -> C_{n-1}.

    The face obtained by collapsing the k-th free axis (0-based among the
    free axes) to its upper end has sign (-1)^k, to its lower end -(-1)^k.
    """
    rows = {c: i for i, c in enumerate(cells_by_dim.get(n - 1, []))}
    cols = cells_by_dim.get(n, [])
    M = [[0] * len(cols) for _ in rows]
    for j, (b, e) in enumerate(cols):
        free = [i for i, x in enumerate(e) if x]
        for k, axis in enumerate(free):
            e2 = list(e)
            e2[axis] = 0
            lo = (b, tuple(e2))
            hi = (tuple(x + (1 if i == axis else 0) for i, x in enumerate(b)), tuple(e2))
            M[rows[hi]][j] += (-1) ** k
            M[rows[lo]][j] -= (-1) ** k
    return M


def _rank(M):
    return Matrix(M).rank() if M and M[0] else 0


def _invariants(M):
    if not M or not M[0]:
        return []
    D = smith_normal_form(Matrix(M), domain=ZZ)
    return [abs(int(D[i, i])) for i in range(min(D.shape)) if D[i, i] != 0]


def homology_groups(mats, dims, n):
    """(free rank, torsion list) of ker d_n / im d_{n+1} for integer matrices."""
    d_n = mats.get(n) or [[] for _ in range(0)]
    d_next = mats.get(n + 1)
    rank_n = _rank(d_n) if n >= 1 and dims.get(n - 1) else 0
    inv = _invariants(d_next) if d_next and dims.get(n + 1) else []
    free = dims.get(n, 0) - rank_n - len(inv)
    return free, sorted(d for d in inv if d > 1)


def classical_homology(top_cells, degrees):
    cells = elementary_closure(top_cells)
    dims = {k: len(v) for k, v in cells.items()}
    mats = {n: classical_boundary(cells, n) for n in range(1, max(cells) + 1)}
    return [homology_groups(mats, dims, n) for n in degrees]


def mod_p_betti(top_cells, p, degrees):
    """Betti numbers over the field Z/p from the classical matrices."""
    cells = elementary_closure(top_cells)
    dims = {k: len(v) for k, v in cells.items()}

    def rank_mod(n):
        if n < 1 or n not in dims or n - 1 not in dims:
            return 0
        M = Matrix(classical_boundary(cells, n))
        # Gaussian elimination over GF(p)
        rows = [[int(x) % p for x in M.row(i)] for i in range(M.rows)]
        r = 0
        for c in range(M.cols):
            piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = pow(rows[r][c], -1, p)
            rows[r] = [x * inv % p for x in rows[r]]
            for i in range(len(rows)):
                if i != r and rows[i][c]:
                    f = rows[i][c]
                    rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
            r += 1
        return r

    return [dims.get(n, 0) - rank_mod(n) - rank_mod(n + 1) for n in degrees]


def sympy_snf_invariants(rows):
    """Nonzero invariant factors of an integer matrix."""
    return _invariants(rows)


def group_orders(free, torsion):
    return sorted(torsion) + [0] * free


def gcd_all(xs):
    g = 0
    for x in xs:
        g = gcd(g, x)
    return g
