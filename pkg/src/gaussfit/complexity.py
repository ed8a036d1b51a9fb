"""Closed-form operation counts.

These are analytical tallies, not instrumented counts of this package's code:
subtraction counts as an addition and division as a multiplication, and the
log/exp costs are supplied by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fitters import Algorithm


@dataclass(frozen=True)
class CostModel:
    """Additions and multiplications charged per natural log and per exponential."""

    a_ln: int = 0
    m_ln: int = 0
    a_exp: int = 0
    m_exp: int = 0

    def __post_init__(self):
        for name in ("a_ln", "m_ln", "a_exp", "m_exp"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value!r}")


@dataclass(frozen=True)
class OpCount:
    additions: int
    multiplications: int

    def __sub__(self, other):
        return OpCount(self.additions - other.additions, self.multiplications - other.multiplications)


MODELED = (Algorithm.GUO, Algorithm.ROONIZI, Algorithm.FAS)


def op_counts(algorithm: Algorithm | str, n: int, model: CostModel = CostModel()) -> OpCount:
    algorithm = Algorithm(algorithm)
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if algorithm is Algorithm.GUO:
        return OpCount(n * (model.a_ln + 8) + 3, n * (model.m_ln + 11) + 17)
    if algorithm is Algorithm.FAS:
        return OpCount(n * (model.a_ln + 8) - 3, n * (model.m_ln + 10) + 12)
    if algorithm is Algorithm.ROONIZI:
        # 0.5 N^2 + 9.5 N = N (N + 19) / 2, always an integer
        return OpCount(n * n + 8 * n + n * model.a_exp - 5, n * (n + 19) // 2 + n * model.m_exp + 9)
    raise ValueError(f"no operation-count model for {algorithm.value!r}")


def gauss_elimination_cost(n: int) -> OpCount:
    """Additions and multiplications to solve an n x n system by Gauss elimination."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    return OpCount((2 * n**3 + 3 * n**2 - 5 * n) // 6, (n**3 + 3 * n**2 - n) // 3)
