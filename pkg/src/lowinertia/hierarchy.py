"""Differential-recurrence hierarchy for the driven damped pendulum.

With u = delta - delta_II and v = d(delta)/dt the relaxation functions

    a_nq = v^n sin(u)^q,     b_nq = a_nq (1 - cos u)

obey a closed, infinite set of linear ODEs.  Grouping them by velocity
power gives vectors C_n = (a_{n-1,0}, b_{n-1,0}, a_{n-1,1}, b_{n-1,1}, ...)
coupled block-tridiagonally:

    dC_n/dt = Q_n^- C_{n-1} + Q_n C_n + Q_n^+ C_{n+1}.

The block matrices are generated from :func:`recurrence_terms`, the single
source of the scalar recurrence coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TruncationTooSmall
from .model import PendulumParams

__all__ = [
    "Truncation",
    "HierarchyBlocks",
    "basis_eval",
    "recurrence_terms",
    "recurrence_rhs",
    "assemble_blocks",
    "flat_index",
]


@dataclass(frozen=True, order=True)
class Truncation:
    """Hierarchy cutoffs: velocity powers 0..n_max-1, sine powers 0..q_max."""

    n_max: int
    q_max: int

    def __post_init__(self):
        if self.n_max < 2 or self.q_max < 1:
            raise TruncationTooSmall(
                f"need n_max >= 2 and q_max >= 1, got ({self.n_max}, {self.q_max})")

    @property
    def block_dim(self) -> int:
        return 2 * (self.q_max + 1)

    @property
    def dim(self) -> int:
        return self.n_max * self.block_dim

    def scaled(self, n_factor: float = 1.0, q_factor: float = 1.0) -> "Truncation":
        return Truncation(math.ceil(self.n_max * n_factor), math.ceil(self.q_max * q_factor))


def basis_eval(n, q, delta, delta_dot, delta_ii):
    """Evaluate (a_nq, b_nq) at a phase-space point (vectorizes over arrays)."""
    if n < 0 or q < 0:
        raise ValueError("basis indices must be non-negative")
    u = np.asarray(delta) - delta_ii
    a = np.asarray(delta_dot) ** n * np.sin(u) ** q
    return a, a * (1.0 - np.cos(u))


def recurrence_terms(kind: str, n: int, q: int, beta: float, zeta_ii: float,
                     delta_ii: float) -> list[tuple[str, int, int, float]]:
    """Right-hand side of d/dt a_nq (``kind='a'``) or d/dt b_nq (``kind='b'``).

    Returned as a list of ``(kind', n', q', coefficient)`` so the same data
    feeds scalar evaluation and block assembly.  Terms whose coefficient
    vanishes identically (factor n or q equal to zero) are omitted, so no
    negative index is ever produced.
    """
    s, c = math.sin(delta_ii), math.cos(delta_ii)
    terms: list[tuple[str, int, int, float]] = []
    if kind == "a":
        if n:
            terms.append(("a", n, q, -beta * n))
        if q:
            terms.append(("a", n + 1, q - 1, float(q)))
            terms.append(("b", n + 1, q - 1, -float(q)))
        if n:
            terms.append(("a", n - 1, q + 1, -zeta_ii * n * c))
            terms.append(("b", n - 1, q, zeta_ii * n * s))
    elif kind == "b":
        if n:
            terms.append(("b", n, q, -beta * n))
        terms.append(("a", n + 1, q + 1, float(q + 1)))
        if q:
            terms.append(("b", n + 1, q - 1, -float(q)))
        if n:
            terms.append(("a", n - 1, q + 2, -zeta_ii * n * s))
            terms.append(("b", n - 1, q + 1, -zeta_ii * n * c))
            terms.append(("b", n - 1, q, 2.0 * zeta_ii * n * s))
    else:
        raise ValueError(f"kind must be 'a' or 'b', got {kind!r}")
    return terms


def recurrence_rhs(n: int, q: int, a: np.ndarray, b: np.ndarray, beta: float,
                   zeta_ii: float, delta_ii: float) -> tuple[float, float]:
    """(da_nq/dt, db_nq/dt) from snapshots ``a[n, q]`` and ``b[n, q]``.

    Indices outside the snapshot arrays count as zero, which is the hard
    truncation used throughout.
    """
    def value(kind, i, j):
        arr = a if kind == "a" else b
        if i < arr.shape[0] and j < arr.shape[1]:
            return arr[i, j]
        return 0.0

    out = []
    for kind in ("a", "b"):
        out.append(sum(coef * value(k, i, j)
                       for k, i, j, coef in recurrence_terms(kind, n, q, beta, zeta_ii, delta_ii)))
    return out[0], out[1]


def flat_index(kind: str, n: int, q: int, trunc: Truncation) -> int:
    """Position of a_nq / b_nq in the stacked vector C = (C_1, C_2, ...)."""
    return n * trunc.block_dim + 2 * q + (0 if kind == "a" else 1)


@dataclass(frozen=True, eq=False)
class HierarchyBlocks:
    """Block matrices of the truncated hierarchy.

    Arrays are indexed by ``n - 1`` for block n = 1..n_max.  ``q_plus[-1]``
    is zero: couplings past the last block are dropped.
    """

    q_plus: np.ndarray
    q_minus: np.ndarray
    q_diag: np.ndarray
    c1_zero: np.ndarray
    params: PendulumParams
    trunc: Truncation

    @property
    def n_blocks(self) -> int:
        return self.q_diag.shape[0]

    def head(self, n_blocks: int) -> "HierarchyBlocks":
        """Blocks 1..n_blocks only, with the new last block's upward coupling cut."""
        q_plus = self.q_plus[:n_blocks].copy()
        q_plus[-1] = 0.0
        return HierarchyBlocks(q_plus, self.q_minus[:n_blocks], self.q_diag[:n_blocks],
                               self.c1_zero, self.params, self.trunc)


def initial_block(params: PendulumParams, trunc: Truncation) -> np.ndarray:
    u = params.swing
    s, one_minus_c = math.sin(u), 1.0 - math.cos(u)
    c1 = np.empty(trunc.block_dim)
    for q in range(trunc.q_max + 1):
        c1[2 * q] = s ** q
        c1[2 * q + 1] = s ** q * one_minus_c
    return c1


def assemble_blocks(params: PendulumParams, trunc: Truncation) -> HierarchyBlocks:
    if not isinstance(trunc, Truncation):
        trunc = Truncation(*trunc)
    nb, dim = trunc.n_max, trunc.block_dim
    q_plus = np.zeros((nb, dim, dim))
    q_minus = np.zeros((nb, dim, dim))
    q_diag = np.zeros((nb, dim, dim))
    for blk in range(nb):
        n = blk  # block n = blk + 1 holds velocity power blk
        for q in range(trunc.q_max + 1):
            for kind in ("a", "b"):
                row = 2 * q + (0 if kind == "a" else 1)
                for k, i, j, coef in recurrence_terms(kind, n, q, params.beta,
                                                      params.zeta_ii, params.delta_ii):
                    if j > trunc.q_max or i >= nb:
                        continue
                    col = 2 * j + (0 if k == "a" else 1)
                    if i == n:
                        q_diag[blk, row, col] += coef
                    elif i == n + 1:
                        q_plus[blk, row, col] += coef
                    else:
                        q_minus[blk, row, col] += coef
    return HierarchyBlocks(q_plus, q_minus, q_diag, initial_block(params, trunc), params, trunc)
