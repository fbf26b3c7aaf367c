"""Characteristic frequencies and times of the rotor-angle transient.

Frequencies come from three estimators: the linearized small-signal
frequency, the undamped large-amplitude pendulum frequency, and the
peak of Re delta~_N(i omega).  Times are the first-maximum time of the
normalized angle and the integral relaxation time read off the
exponential envelope through that maximum.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .eigensolver import EigenSolution
from .errors import (DomainError, EnvelopeUndefined, LowInertiaError, NoExtremum,
                     Overdamped, PeakAtBoundary)
from .model import PendulumParams

__all__ = [
    "CharacteristicReport",
    "omega_small_signal",
    "elliptic_k",
    "omega_undamped",
    "omega_peak",
    "scan_horizon",
    "first_maximum_time",
    "integral_relaxation_time",
    "envelope_q",
    "envelope_p",
    "characterize",
]

ROOT_TOL = 1e-10


def omega_small_signal(params: PendulumParams) -> float:
    """sqrt(zeta_II cos(delta_II) - beta^2 / 4); raises Overdamped if not positive."""
    arg = params.zeta_ii * math.cos(params.delta_ii) - params.beta ** 2 / 4.0
    if arg <= 0.0:
        raise Overdamped(f"zeta_II cos(delta_II) - beta^2/4 = {arg:.6g} <= 0")
    return math.sqrt(arg)


def elliptic_k(m: float) -> float:
    """Complete elliptic integral of the first kind, parameter convention.

    K(m) = integral_0^{pi/2} d(theta) / sqrt(1 - m sin^2 theta), evaluated
    as pi / (2 AGM(1, sqrt(1 - m))).
    """
    if not 0.0 <= m < 1.0:
        raise DomainError(f"elliptic parameter must lie in [0, 1), got {m}")
    a, b = 1.0, math.sqrt(1.0 - m)
    # quadratic convergence: 40 rounds is far past double precision
    for _ in range(40):
        if abs(a - b) <= 4e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (a + b)


def omega_undamped(zeta: float, delta_0: float) -> float:
    """Frequency of the undamped pendulum swinging with amplitude ``delta_0``."""
    if not zeta > 0:
        raise DomainError("coupling must be positive")
    if not 0.0 <= delta_0 < math.pi:
        raise DomainError(f"amplitude must lie in [0, pi), got {delta_0}")
    m = math.sin(delta_0 / 2.0) ** 2
    return math.pi * math.sqrt(zeta) / (2.0 * elliptic_k(m))


def omega_peak(spec) -> float:
    """Frequency of the maximum of Re delta~_N(i omega), parabolic refinement."""
    re = np.asarray(spec.values).real
    w = np.asarray(spec.omegas)
    k = int(np.argmax(re))
    if k == 0 or k == len(re) - 1:
        raise PeakAtBoundary(f"maximum of Re spectrum at grid edge omega = {w[k]:.6g}")
    x0, x1, x2 = w[k - 1:k + 2]
    y0, y1, y2 = re[k - 1:k + 2]
    # vertex of the parabola through three unequally spaced points
    num = (x1 - x0) ** 2 * (y1 - y2) - (x1 - x2) ** 2 * (y1 - y0)
    den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0)
    if den == 0.0:
        return float(x1)
    return float(x1 - 0.5 * num / den)


def scan_horizon(params: PendulumParams) -> float:
    if params.beta > 0:
        return 20.0 / params.beta
    return 200.0 / math.sqrt(params.zeta_ii)


def _rate(sol: EigenSolution, t: np.ndarray) -> np.ndarray:
    return (np.exp(-np.outer(t, sol.lambdas)) @ sol.d).real


def first_maximum_time(sol: EigenSolution, omega_estimate: Optional[float] = None,
                       t_scan: Optional[float] = None) -> float:
    """Time of the first maximum of delta_N(t) after t = 0.

    delta_N starts at its maximum 1 and falls, so the first interior
    maximum is the first root at which d(delta_N)/dt changes sign from
    positive to negative.  The root is bracketed on a grid of step
    pi / (8 omega_estimate) and bisected to 1e-10 s.
    """
    params = sol.params
    swing = sol.delta_i - sol.delta_ii
    if swing == 0.0 or not np.any(sol.d):
        raise NoExtremum("no transient: delta_I == delta_II")
    if omega_estimate is None:
        try:
            omega_estimate = omega_small_signal(params)
        except Overdamped:
            omega_estimate = math.sqrt(params.zeta_ii)
    t_scan = scan_horizon(params) if t_scan is None else t_scan
    h = math.pi / (8.0 * omega_estimate)
    grid = np.arange(1, int(math.ceil(t_scan / h)) + 1) * h
    rate_n = _rate(sol, grid) / swing
    down = np.nonzero((rate_n[:-1] > 0) & (rate_n[1:] <= 0))[0]
    if len(down) == 0:
        raise NoExtremum(f"no maximum of delta_N within t_scan = {t_scan:.6g}")
    lo, hi = grid[down[0]], grid[down[0] + 1]
    while hi - lo > ROOT_TOL:
        mid = 0.5 * (lo + hi)
        if _rate(sol, np.array([mid]))[0] / swing > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def integral_relaxation_time(sol: EigenSolution, t_os: float) -> float:
    """-T_os / ln delta_N(T_os)."""
    value = float(sol.normalized(np.array([t_os]))[0])
    if not 0.0 < value < 1.0:
        raise EnvelopeUndefined(f"delta_N(T_os) = {value:.6g} outside (0, 1)")
    return -t_os / math.log(value)


def envelope_q(params: PendulumParams, t_int: float, t) -> np.ndarray:
    """Exponential envelope (delta_I - delta_II) exp(-t / T_int) + delta_II."""
    return params.swing * np.exp(-np.asarray(t, dtype=float) / t_int) + params.delta_ii


def envelope_p(params: PendulumParams, t) -> np.ndarray:
    """Linear-response envelope (delta_I - delta_II) exp(-beta t / 2) + delta_II."""
    return params.swing * np.exp(-params.beta * np.asarray(t, dtype=float) / 2.0) + params.delta_ii


@dataclass
class CharacteristicReport:
    """Characteristic frequencies [rad/s] and times [s]; ``None`` with a reason when undefined.

    ``omega_un`` uses the effective stiffness zeta_II cos(delta_II) of the
    final equilibrium with amplitude ``delta_0 = |delta_I - delta_II|``.
    ``t_int_by_estimator`` holds T_int with T_os taken from the exact root
    and from 2 pi / omega for each frequency estimator.
    """

    omega_sm: Optional[float] = None
    omega_un: Optional[float] = None
    omega_peak: Optional[float] = None
    t_os: Optional[float] = None
    t_os_linear: Optional[float] = None
    t_int: Optional[float] = None
    t_int_linear: Optional[float] = None
    delta_0: float = 0.0
    t_int_by_estimator: dict = field(default_factory=dict)
    reasons: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _attempt(report: CharacteristicReport, name: str, fn):
    try:
        return fn()
    except LowInertiaError as exc:
        report.reasons[name] = _reason(exc)
        return None


def _reason(exc: Exception) -> str:
    return {
        Overdamped: "overdamped",
        NoExtremum: "no extremum",
        EnvelopeUndefined: "envelope undefined",
        PeakAtBoundary: "peak at grid boundary",
        DomainError: "outside domain",
    }.get(type(exc), type(exc).__name__) + f": {exc}"


def characterize(params: PendulumParams, sol: EigenSolution, spec=None) -> CharacteristicReport:
    """Evaluate every estimator; failures become ``None`` entries with reasons."""
    rep = CharacteristicReport(delta_0=abs(params.swing))
    rep.omega_sm = _attempt(rep, "omega_sm", lambda: omega_small_signal(params))
    zeta_eff = params.zeta_ii * math.cos(params.delta_ii)
    rep.omega_un = _attempt(rep, "omega_un", lambda: omega_undamped(zeta_eff, rep.delta_0))
    if spec is not None:
        rep.omega_peak = _attempt(rep, "omega_peak", lambda: omega_peak(spec))
    else:
        rep.reasons["omega_peak"] = "no spectrum supplied"
    rep.t_os = _attempt(rep, "t_os", lambda: first_maximum_time(sol, rep.omega_sm))
    if rep.omega_sm is not None:
        rep.t_os_linear = 2.0 * math.pi / rep.omega_sm
    else:
        rep.reasons["t_os_linear"] = rep.reasons.get("omega_sm", "omega_sm undefined")
    if params.beta > 0:
        rep.t_int_linear = 2.0 / params.beta
    else:
        rep.reasons["t_int_linear"] = "undamped"
    if rep.t_os is not None:
        rep.t_int = _attempt(rep, "t_int", lambda: integral_relaxation_time(sol, rep.t_os))
    else:
        rep.reasons["t_int"] = rep.reasons["t_os"]
    for name, t_os in (("t_os", rep.t_os), ("omega_sm", rep.t_os_linear),
                       ("omega_un", 2 * math.pi / rep.omega_un if rep.omega_un else None),
                       ("omega_peak", 2 * math.pi / rep.omega_peak if rep.omega_peak else None)):
        if t_os is None:
            rep.t_int_by_estimator[name] = None
            continue
        try:
            rep.t_int_by_estimator[name] = integral_relaxation_time(sol, t_os)
        except EnvelopeUndefined:
            rep.t_int_by_estimator[name] = None
    rep.provenance = {
        "omega_un_stiffness": "zeta_II*cos(delta_II)",
        "delta_0": "|delta_I - delta_II|",
        "t_os": "first maximum of delta_N (root of d delta/dt, + to -)",
        "omega_peak": "parabolic vertex of max Re spectrum" if spec is not None else None,
        "n_max": sol.trunc.n_max,
        "q_max": sol.trunc.q_max,
        "spectrum_n_max": spec.trunc.n_max if spec is not None else None,
        "spectrum_q_max": spec.trunc.q_max if spec is not None else None,
    }
    return rep
