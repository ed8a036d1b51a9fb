"""Gauss elimination with partial pivoting for the 2x2 and 3x3 normal equations.

Systems this small are faster in plain Python floats than through LAPACK,
and owning the elimination lets the singularity test be stated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularSystem

SINGULAR_RTOL = 1e-12


@dataclass(frozen=True)
class SmallSystem:
    matrix: tuple
    rhs: tuple

    def __post_init__(self):
        matrix = tuple(tuple(float(v) for v in row) for row in np.asarray(self.matrix, dtype=float))
        rhs = tuple(float(v) for v in np.asarray(self.rhs, dtype=float).ravel())
        n = len(rhs)
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise ValueError(f"matrix must be {n}x{n} to match rhs of length {n}")
        if n not in (2, 3):
            raise ValueError(f"only 2x2 and 3x3 systems are supported, got n={n}")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "rhs", rhs)

    @property
    def n(self):
        return len(self.rhs)


def solve(system: SmallSystem) -> np.ndarray:
    return solve_linear(system.matrix, system.rhs)


def solve_linear(matrix, rhs) -> np.ndarray:
    """Solve ``matrix @ x = rhs`` for n <= 3 (any n works, but the cost is cubic).

    Raises
    ------
    SingularSystem
        If a pivot falls below ``1e-12`` times the largest row norm of the
        input matrix, or the input is not finite.
    """
    a = [[float(v) for v in row] for row in matrix]
    b = [float(v) for v in rhs]
    n = len(b)
    scale = max(sum(abs(v) for v in row) for row in a)
    if not math.isfinite(scale) or not all(math.isfinite(v) for v in b):
        raise SingularSystem("non-finite entries in linear system")
    tol = SINGULAR_RTOL * scale
    if scale == 0.0:
        raise SingularSystem("zero matrix")

    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(a[i][k]))
        if not abs(a[p][k]) > tol:
            raise SingularSystem(f"pivot {abs(a[p][k]):.3g} below tolerance {tol:.3g} at column {k}")
        if p != k:
            a[k], a[p] = a[p], a[k]
            b[k], b[p] = b[p], b[k]
        pivot_row = a[k]
        for i in range(k + 1, n):
            row = a[i]
            lam = row[k] / pivot_row[k]
            if lam != 0.0:
                for j in range(k + 1, n):
                    row[j] -= lam * pivot_row[j]
                b[i] -= lam * b[k]

    x = [0.0] * n
    for k in range(n - 1, -1, -1):
        acc = b[k]
        for j in range(k + 1, n):
            acc -= a[k][j] * x[j]
        x[k] = acc / a[k][k]
    return np.array(x)
