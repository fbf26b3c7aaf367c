"""Laplace-domain solution of the hierarchy by matrix continued fractions.

Laplace-transforming dC_n/dt = Q_n^- C_{n-1} + Q_n C_n + Q_n^+ C_{n+1}
with C_n(0) = 0 for n >= 2 gives C~_1(s) = Delta_1(s) C_1(0), where

    Delta_n = [s I - Q_n - Q_n^+ Delta_{n+1} Q_{n+1}^-]^-1,
    Delta_{n_max} = [s I - Q_{n_max}]^-1,

and C~_{n+1} = Delta_{n+1} Q_{n+1}^- C~_n.  Since a_10 = delta', the
transform of the normalized rotor angle is

    delta~_N(s) = (a~_10(s) / (delta_I - delta_II) + 1) / s.

All routines vectorize over an array of complex ``s``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigensolver import TruncationReport, solve_params
from .errors import DegenerateNormalization, SingularStep
from .hierarchy import HierarchyBlocks, Truncation, assemble_blocks
from .model import PendulumParams

__all__ = [
    "Spectrum",
    "delta_fraction",
    "laplace_solution",
    "normalized_transform",
    "spectrum",
    "auto_truncation",
    "default_omega_grid",
    "OMEGA_MIN",
]

COND_LIMIT = 1e12
OMEGA_MIN = 1e-6


@dataclass(frozen=True, eq=False)
class Spectrum:
    """One-sided Fourier transform of delta_N sampled at positive frequencies."""

    omegas: np.ndarray
    values: np.ndarray
    params: PendulumParams
    trunc: Truncation


def default_omega_grid(omega_min: float = 1e-2, omega_max: float = 1e2, points: int = 400) -> np.ndarray:
    return np.logspace(np.log10(omega_min), np.log10(omega_max), points)


def _as_s(s) -> np.ndarray:
    return np.atleast_1d(np.asarray(s, dtype=complex))


def _norm1(a: np.ndarray) -> np.ndarray:
    return np.abs(a).sum(axis=-2).max(axis=-1)


def _equilibrated_cond(a: np.ndarray, inv: np.ndarray) -> np.ndarray:
    """1-norm condition number of a after row then column max-scaling.

    The basis functions are badly scaled against each other, so the raw
    estimate overstates the loss of accuracy; scaling makes it invariant
    to that.  The scaled inverse is formed from ``inv`` directly.
    """
    r = 1.0 / np.abs(a).max(axis=2)
    ar = a * r[:, :, None]
    c = 1.0 / np.abs(ar).max(axis=1)
    return _norm1(ar * c[:, None, :]) * _norm1(inv / c[:, :, None] / r[:, None, :])


def _fractions(s: np.ndarray, blocks: HierarchyBlocks, keep: int) -> list[np.ndarray]:
    """Backward recursion; returns [Delta_1, ..., Delta_keep], each shaped (len(s), D, D)."""
    nb = blocks.n_blocks
    dim = blocks.q_diag.shape[1]
    eye = np.eye(dim)
    out: list[np.ndarray] = [None] * min(keep, nb)
    delta = None
    for k in range(nb - 1, -1, -1):
        a = s[:, None, None] * eye - blocks.q_diag[k]
        if delta is not None:
            a = a - blocks.q_plus[k] @ delta @ blocks.q_minus[k + 1]
        try:
            delta = np.linalg.inv(a)
        except np.linalg.LinAlgError as exc:
            raise SingularStep(f"singular continued-fraction step at block {k + 1}") from exc
        cond = _equilibrated_cond(a, delta)
        if not np.all(np.isfinite(cond)) or cond.max() > COND_LIMIT:
            raise SingularStep(f"condition estimate {cond.max():.2e} at block {k + 1}")
        if k < keep:
            out[k] = delta
    return out


def delta_fraction(s, blocks: HierarchyBlocks) -> np.ndarray:
    """Delta_1(s); shape (D, D) for scalar ``s``, else (len(s), D, D)."""
    s_arr = _as_s(s)
    if np.any(s_arr.real < 0) or np.any(s_arr == 0):
        raise ValueError("need Re s >= 0 and s != 0")
    d1 = _fractions(s_arr, blocks, 1)[0]
    return d1[0] if np.ndim(s) == 0 else d1


def laplace_solution(s, blocks: HierarchyBlocks) -> tuple[np.ndarray, np.ndarray]:
    """(C~_1(s), C~_2(s)); a~_10(s) is ``C~_2[..., 0]``."""
    s_arr = _as_s(s)
    if np.any(s_arr == 0):
        raise ValueError("s = 0 is outside the domain")
    d1, d2 = _fractions(s_arr, blocks, 2)
    c1 = d1 @ blocks.c1_zero
    c2 = np.einsum("wij,jk,wk->wi", d2, blocks.q_minus[1], c1)
    if np.ndim(s) == 0:
        return c1[0], c2[0]
    return c1, c2


def normalized_transform(s, blocks: HierarchyBlocks) -> np.ndarray:
    """delta~_N(s) from the continued fraction (any complex s with s != 0)."""
    swing = blocks.params.swing
    if swing == 0.0:
        raise DegenerateNormalization("delta_I == delta_II")
    s_arr = _as_s(s)
    _, c2 = laplace_solution(s_arr, blocks)
    return (c2[:, 0] / swing + 1.0) / s_arr


def spectrum(params: PendulumParams, trunc: Truncation, omega_grid=None) -> Spectrum:
    """delta~_N(i omega) on a positive, sorted frequency grid.

    Points below :data:`OMEGA_MIN` are taken from the exponential-sum
    transform, where the continued-fraction form cancels catastrophically.
    """
    if params.swing == 0.0:
        raise DegenerateNormalization("delta_I == delta_II")
    omegas = default_omega_grid() if omega_grid is None else np.asarray(omega_grid, dtype=float)
    if np.any(omegas <= 0) or np.any(np.diff(omegas) <= 0):
        raise ValueError("frequency grid must be positive and strictly increasing")
    blocks = assemble_blocks(params, trunc)
    values = np.empty(len(omegas), dtype=complex)
    low = omegas < OMEGA_MIN
    if np.any(~low):
        values[~low] = normalized_transform(1j * omegas[~low], blocks)
    if np.any(low):
        values[low] = solve_params(params, trunc).transform(1j * omegas[low])
    return Spectrum(omegas, values, params, trunc)


def auto_truncation(params: PendulumParams, omega_grid=None, tol: float = 1e-8,
                    start: int = 6, step: int = 2, q_ratio: int = 2,
                    max_n: int = 60) -> TruncationReport:
    """Pick (n_max, q_max) along q_max = q_ratio * n_max from the spectrum.

    Same walk as the time-domain selector, measuring the largest pointwise
    relative change of delta~_N(i omega).  The walk also stops when a
    continued-fraction step becomes ill-conditioned; the report is then
    marked unconverged and carries the last well-conditioned truncation.
    """
    omegas = default_omega_grid() if omega_grid is None else np.asarray(omega_grid, dtype=float)
    if params.swing == 0.0:
        return TruncationReport(Truncation(2, 1), (), True)
    s = 1j * omegas
    prev = Truncation(start, q_ratio * start)
    try:
        prev_v = normalized_transform(s, assemble_blocks(params, prev))
    except SingularStep:
        return TruncationReport(prev, (), False)
    history = []
    last = None
    n = start
    while n + step <= max_n:
        n += step
        cur = Truncation(n, q_ratio * n)
        try:
            v = normalized_transform(s, assemble_blocks(params, cur))
        except SingularStep:
            return TruncationReport(prev, tuple(history), False)
        change = float(np.max(np.abs(v - prev_v) / np.abs(v)))
        history.append((cur.n_max, cur.q_max, change))
        predicted = change * min(1.0, change / last) if last else change
        last = change
        prev, prev_v = cur, v
        if predicted < tol / 4 or change < tol / 4:
            return TruncationReport(cur, tuple(history), True)
    return TruncationReport(prev, tuple(history), False)
