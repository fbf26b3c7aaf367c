"""Time-domain solution of the truncated hierarchy by diagonalization.

Writing the hierarchy as dC/dt + X C = 0 with X = -(block tridiagonal of
Q_n^-, Q_n, Q_n^+) and diagonalizing X = U diag(lambda) U^-1 gives

    delta'(t) = sum_j d_j exp(-lambda_j t),  d_j = U[r, j] (U^-1 C(0))_j,

with r the position of a_10 = delta'.  Integrating from t to infinity,

    delta(t) = delta_II + sum_j c_j exp(-lambda_j t),  c_j = -d_j / lambda_j.

Hard truncation of the hierarchy introduces spurious modes, some with
Re(lambda) < 0.  A damped pendulum relaxes to delta_II, so no genuine
mode grows; growing modes are discarded.
"""
from __future__ import annotations

import functools
import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DefectiveMatrix, NotConverged
from .hierarchy import HierarchyBlocks, Truncation, assemble_blocks, flat_index
from .model import PendulumParams, Trajectory

__all__ = [
    "EigenSolution",
    "TruncationReport",
    "assemble_super_matrix",
    "solve",
    "solve_params",
    "evaluate",
    "auto_truncation",
    "verify_truncation",
]

log = logging.getLogger(__name__)

ZERO_MODE_RTOL = 1e-10
ZERO_MODE_DTOL = 1e-10
GROWTH_RTOL = 1e-10
RESIDUAL_TOL = 1e-8
IMAG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class EigenSolution:
    """Exponential-sum representation of delta(t) and delta'(t)."""

    lambdas: np.ndarray
    c: np.ndarray
    d: np.ndarray
    delta_i: float
    delta_ii: float
    trunc: Truncation
    params: PendulumParams
    diagnostics: dict = field(default_factory=dict)

    @property
    def initial_residuals(self) -> tuple[float, float]:
        """(|sum c - (delta_I - delta_II)|, |sum d|); both vanish for an exact solution."""
        return (abs(self.c.sum() - (self.delta_i - self.delta_ii)), abs(self.d.sum()))

    def delta(self, t) -> np.ndarray:
        return evaluate(self, t).delta

    def delta_dot(self, t) -> np.ndarray:
        return evaluate(self, t).delta_dot

    def normalized(self, t) -> np.ndarray:
        """delta_N(t) = (delta - delta_II) / (delta_I - delta_II)."""
        return (self.delta(t) - self.delta_ii) / (self.delta_i - self.delta_ii)

    def transform(self, s) -> np.ndarray:
        """Laplace transform of delta_N at complex ``s`` from the exponential sum."""
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        swing = self.delta_i - self.delta_ii
        return (self.c[None, :] / (self.lambdas[None, :] + s[:, None])).sum(axis=1) / swing


def assemble_super_matrix(blocks: HierarchyBlocks) -> np.ndarray:
    nb = blocks.n_blocks
    dim = blocks.q_diag.shape[1]
    m = np.zeros((nb * dim, nb * dim))
    for k in range(nb):
        rows = slice(k * dim, (k + 1) * dim)
        m[rows, rows] = blocks.q_diag[k]
        if k + 1 < nb:
            m[rows, (k + 1) * dim:(k + 2) * dim] = blocks.q_plus[k]
        if k > 0:
            m[rows, (k - 1) * dim:k * dim] = blocks.q_minus[k]
    return -m


def solve(blocks: HierarchyBlocks, trunc: Truncation | None = None) -> EigenSolution:
    trunc = trunc or blocks.trunc
    params = blocks.params
    x = assemble_super_matrix(blocks)
    c0 = np.zeros(x.shape[0])
    c0[:trunc.block_dim] = blocks.c1_zero

    lam, u = scipy.linalg.eig(x, check_finite=False)
    norm_x = np.linalg.norm(x)
    residual = np.linalg.norm(x @ u - u * lam) / norm_x
    if residual > RESIDUAL_TOL:
        raise DefectiveMatrix(f"eigen-decomposition residual {residual:.2e}")

    # U is often ill-conditioned; the initial-value residuals are the real accuracy guard
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        weights = scipy.linalg.solve(u, c0.astype(complex), check_finite=False)
    r = flat_index("a", 1, 0, trunc)
    d = u[r, :] * weights

    zero = (np.abs(lam) < ZERO_MODE_RTOL * norm_x) & (np.abs(d) < ZERO_MODE_DTOL)
    growing = lam.real < -GROWTH_RTOL * norm_x
    keep = ~(zero | growing)
    lam_k, d_k = lam[keep], d[keep]
    c_k = -d_k / lam_k
    diagnostics = {
        "residual": float(residual),
        "dimension": int(x.shape[0]),
        "dropped_zero": int(zero.sum()),
        "dropped_growing": int(growing.sum()),
        "dropped_growing_weight": float(np.abs(d[growing]).sum()),
    }
    return EigenSolution(lam_k, c_k, d_k, params.delta_i, params.delta_ii, trunc, params, diagnostics)


@functools.lru_cache(maxsize=256)
def solve_params(params: PendulumParams, trunc: Truncation) -> EigenSolution:
    """Cached ``solve(assemble_blocks(params, trunc))``."""
    return solve(assemble_blocks(params, trunc), trunc)


def _sums(sol: EigenSolution, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Complex sums (sum c_j e^{-lambda_j t}, sum d_j e^{-lambda_j t})."""
    dv = np.empty(len(t), dtype=complex)
    rv = np.empty(len(t), dtype=complex)
    # chunked so the (len(t), modes) exponential table stays small
    step = max(1, 2_000_000 // max(1, len(sol.lambdas)))
    for lo in range(0, len(t), step):
        e = np.exp(-np.outer(t[lo:lo + step], sol.lambdas))
        dv[lo:lo + step] = e @ sol.c
        rv[lo:lo + step] = e @ sol.d
    return dv, rv


def evaluate(sol: EigenSolution, t_grid) -> Trajectory:
    """Sample delta(t) and delta'(t) from the exponential sums.

    Raises NotConverged if max |Im delta(t)| exceeds IMAG_TOL.  The
    imaginary residues of both sums are recorded in the metadata.
    """
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if np.any(t < 0):
        raise ValueError("time grid must be non-negative")
    dv, rv = _sums(sol, t)
    imag = float(np.abs(dv.imag).max(initial=0.0))
    if imag > IMAG_TOL:
        raise NotConverged(f"imaginary residue {imag:.2e} in reconstructed delta")
    return Trajectory(t, dv.real + sol.delta_ii, rv.real,
                      meta={"solver": "eigen", "n_max": sol.trunc.n_max, "q_max": sol.trunc.q_max,
                            "imag_delta": imag,
                            "imag_delta_dot": float(np.abs(rv.imag).max(initial=0.0))})


@dataclass(frozen=True)
class TruncationReport:
    trunc: Truncation
    history: tuple
    converged: bool
    doubling_n: float | None = None
    doubling_q: float | None = None


def _sup_change(params, a: Truncation, b: Truncation, t, strict: bool = True) -> float:
    """Sup-norm difference of delta(t) between two truncations; inf if either is unusable.

    ``strict`` applies the reality check of :func:`evaluate` to both.
    Otherwise the complex sums are compared directly, so imaginary
    residue counts toward the difference; this bounds the change of
    delta while accepting roundoff-level residue in very large reference
    truncations.
    """
    try:
        sa, sb = solve_params(params, a), solve_params(params, b)
        if strict:
            diff = np.abs(evaluate(sa, t).delta - evaluate(sb, t).delta).max()
        else:
            diff = np.abs(_sums(sa, t)[0] - _sums(sb, t)[0]).max()
    except (NotConverged, DefectiveMatrix):
        return math.inf
    return float(diff) if np.isfinite(diff) else math.inf


def auto_truncation(params: PendulumParams, t_grid, tol: float = 1e-8,
                    start: int = 6, step: int = 2, q_ratio: int = 2,
                    max_dim: int = 3000) -> TruncationReport:
    """Pick (n_max, q_max) along q_max = q_ratio * n_max.

    n_max grows by ``step`` until the sup-norm change of delta(t) between
    successive truncations, extrapolated one step ahead with the observed
    geometric contraction, falls below tol / 4.  The doubling test of
    :func:`verify_truncation` is not run here.
    """
    t = np.asarray(t_grid, dtype=float)
    if abs(params.swing) == 0.0:
        return TruncationReport(Truncation(2, 1), (), True)
    n = start
    prev = Truncation(n, q_ratio * n)
    history = []
    last = None
    while True:
        n += step
        cur = Truncation(n, q_ratio * n)
        if cur.dim > max_dim:
            return TruncationReport(prev, tuple(history), False)
        change = _sup_change(params, prev, cur, t)
        history.append((cur.n_max, cur.q_max, change))
        predicted = change * min(1.0, change / last) if last and math.isfinite(last) else change
        log.debug("truncation %s change %.2e predicted %.2e", cur, change, predicted)
        last = change
        prev = cur
        if predicted < tol / 4 or change < tol / 4:
            return TruncationReport(cur, tuple(history), True)


def verify_truncation(params: PendulumParams, trunc: Truncation, t_grid) -> tuple[float, float]:
    """Sup-norm change of delta(t) when doubling n_max, and when doubling q_max.

    Compared as complex sums: roundoff-level imaginary residue in the
    doubled solutions counts toward the change instead of rejecting them.
    """
    t = np.asarray(t_grid, dtype=float)
    dn = _sup_change(params, trunc, Truncation(2 * trunc.n_max, trunc.q_max), t, strict=False)
    dq = _sup_change(params, trunc, Truncation(trunc.n_max, 2 * trunc.q_max), t, strict=False)
    return dn, dq


def solve_auto(params: PendulumParams, t_grid, tol: float = 1e-8) -> EigenSolution:
    rep = auto_truncation(params, t_grid, tol)
    if not rep.converged:
        raise NotConverged(f"truncation did not converge below {tol:g} (last {rep.trunc})")
    return solve_params(params, rep.trunc)
