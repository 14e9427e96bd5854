"""Homology of the one-point space for a few weights, from the closed form
and from the point model's matrices, side by side."""

from cubar.coeff import WeightVector, index
from cubar.gridmodel import load_builtin
from cubar.reduce import INF, point_theory_table, variant_matrices

N = 9

for weights in [(1, -1), (1, 1), (1, 4), (2, -1, 3)]:
    w = WeightVector.of(weights)
    print(f"weight {weights}  index {index(w)}")
    for beta in (0, 7, INF):
        closed = point_theory_table(w, N, beta)
        bm = variant_matrices(load_builtin("point", w.L), w, beta, N)
        computed = [bm.homology(n) for n in range(N + 1)]
        mark = "ok" if closed == computed else "MISMATCH"
        name = {0: "raw", INF: "normalized"}.get(beta, f"beta={beta}")
        print(f"  {name:>10}: " + ", ".join(map(str, closed)) + f"   [{mark}]")
