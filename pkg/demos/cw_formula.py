"""Weighted homology of spaces from their integral homology, next to the
normalized homology computed on the finite models."""

from cubar.coeff import WeightVector
from cubar.cwcalc import consistency_check, integral_homology, theorem4_predict
from cubar.gridmodel import connecting_and_les_check, load_builtin
from cubar.reduce import gamma_boundary_matrices

for name in ("s1", "s2", "t2", "klein"):
    m = load_builtin(name)
    data = integral_homology(m, 3)
    print(f"{name}: integral " + ", ".join(map(str, data.padded(3))))
    for a, b in ((1, -1), (1, 2), (2, 3)):
        pred = [theorem4_predict(data, a, b, n) for n in range(4)]
        print(f"   ({a},{b}): " + ", ".join(map(str, pred)))

rep = consistency_check(load_builtin("point"), 9, 2, 12)
print("point, weight (9,2): formula equals the matrices in degrees 0..12:", rep.ok)

m = load_builtin("d2-pair")
rep = connecting_and_les_check(m.generators(), m.sub_generators(), WeightVector.of((2, 3)))
print("long exact sequence of (disk, circle) with weight (2,3) is exact:", rep.exact)

bm = gamma_boundary_matrices(load_builtin("klein"), WeightVector.of((2, 3)))
print("normalized klein homology, weight (2,3):", [str(bm.homology(n)) for n in range(3)])
