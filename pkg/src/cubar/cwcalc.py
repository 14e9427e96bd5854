"""Closed-form homology of finite CW pairs from their integral homology,
with a two-route consistency check on cubical models."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence

from .coeff import RingSpec, WeightVector
from .gridmodel import GridModel
from .modalg import FGModulePresentation, change_coefficients
from .reduce import INF, gamma_boundary_matrices, variant_matrices


class TrivialCoefficientWarning(UserWarning):
    """The index is a unit, so every factor of the formula vanishes."""


@dataclass(frozen=True)
class CWHomologyInput:
    """Integral homology of a pair, degree by degree (missing degrees are 0)."""

    integral_H: tuple

    def __post_init__(self):
        Z = RingSpec.integers()
        groups = tuple(self.integral_H)
        for h in groups:
            if not isinstance(h, FGModulePresentation) or h.ring != Z:
                raise ValueError("integral homology must be given as groups over Z")
        object.__setattr__(self, "integral_H", groups)

    def H(self, k: int) -> FGModulePresentation:
        if 0 <= k < len(self.integral_H):
            return self.integral_H[k]
        return FGModulePresentation.zero(RingSpec.integers())

    def padded(self, n: int) -> list:
        return [self.H(k) for k in range(n + 1)]

    @classmethod
    def from_json(cls, data) -> "CWHomologyInput":
        """``{"homology": [{"rank": r, "torsion": [...]}, ...]}`` or a bare list."""
        if isinstance(data, str):
            data = json.loads(data)
        if isinstance(data, dict):
            data = data.get("homology", data.get("integral_H"))
        if not isinstance(data, list):
            raise ValueError("expected a list of per-degree groups")
        Z = RingSpec.integers()
        return cls(tuple(FGModulePresentation.from_json(d, Z) for d in data))

    def to_json(self) -> dict:
        return {"homology": [h.to_json() for h in self.integral_H]}


def theorem4_predict(data: CWHomologyInput, a: int, b: int, n: int) -> FGModulePresentation:
    """Weighted homology of a finite CW pair for the weight (a, b) in degree n.

    For {a, b} = {1, -1} this is the sum of the integral groups in degrees
    0..n.  Otherwise it is the sum of the Z_sigma groups (sigma = a + b) in
    the degrees of the same parity as n, up to n.
    """
    a, b = int(a), int(b)
    if gcd(a, b) != 1:
        raise ValueError(f"gcd({a}, {b}) != 1: the formula does not apply")
    Z = RingSpec.integers()
    if n < 0:
        return FGModulePresentation.zero(Z)
    if {a, b} == {1, -1}:
        return FGModulePresentation.zero(Z).direct_sum(*data.padded(n))
    sigma = a + b
    if abs(sigma) == 1:
        warnings.warn(f"index {sigma} is a unit; all Z_sigma factors are zero",
                      TrivialCoefficientWarning, stacklevel=2)
        return FGModulePresentation.zero(Z)
    H = data.padded(n)
    parts = [change_coefficients(H, sigma, k) for k in range(n % 2, n + 1, 2)]
    return FGModulePresentation.zero(Z).direct_sum(*parts)


def integral_homology(model: GridModel, n_max: int) -> CWHomologyInput:
    """Classical integral homology of a model: the (1, -1) normalized complex."""
    w = WeightVector.of((1, -1))
    bm = gamma_boundary_matrices(model.with_L(1), w)
    return CWHomologyInput(tuple(bm.homology(k) for k in range(n_max + 1)))


@dataclass
class ConsistencyReport:
    a: int
    b: int
    degrees: list
    predicted: list
    computed: Optional[list]

    @property
    def agree(self) -> Optional[list]:
        if self.computed is None:
            return None
        return [p == c for p, c in zip(self.predicted, self.computed)]

    @property
    def ok(self) -> bool:
        return self.computed is None or all(self.agree)

    def to_json(self) -> dict:
        rows = []
        for i, n in enumerate(self.degrees):
            row = {"degree": n, "predicted": self.predicted[i].to_json()}
            if self.computed is not None:
                row["computed"] = self.computed[i].to_json()
                row["agree"] = self.agree[i]
            rows.append(row)
        return {"a": self.a, "b": self.b, "status": "ok" if self.ok else "fail",
                "degrees": rows}


def consistency_check(model: GridModel, a: int, b: int, n_max: int = 12) -> ConsistencyReport:
    """Predict weighted homology from the model's classical homology; on the
    point model also compute it from the raw matrices and demand agreement."""
    data = integral_homology(model, n_max)
    predicted = [theorem4_predict(data, a, b, n) for n in range(n_max + 1)]
    computed = None
    if model.is_point:
        w = WeightVector.of((a, b))
        bm = variant_matrices(model.with_L(1), w, 0, n_max)
        computed = [bm.homology(n) for n in range(n_max + 1)]
    report = ConsistencyReport(a, b, list(range(n_max + 1)), predicted, computed)
    if not report.ok:
        bad = [n for n, ok in zip(report.degrees, report.agree) if not ok]
        raise AssertionError(f"point model disagrees with the formula in degrees {bad}")
    return report
