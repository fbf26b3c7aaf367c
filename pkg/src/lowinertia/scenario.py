"""Flat ``key = value`` scenario files.

Physical mode (``model`` = kuramoto, cage or infinite) describes a
station; pendulum mode gives the reduced parameters directly.  Blank
lines and ``#`` comments are ignored; unknown keys are rejected.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .errors import NoEquilibrium, ScenarioError
from .hierarchy import Truncation
from .model import ModelKind, PendulumParams, Phase, StationScenario, reduce
from .oracle import time_grid

__all__ = ["ScenarioFile", "parse_scenario", "format_scenario", "load_scenario", "DEFAULT_SCENARIO"]

_PHYSICAL = ("kuramoto", "cage", "infinite")


@dataclass(frozen=True)
class ScenarioFile:
    model: str = "pendulum"
    omega_ref_hz: float = 50.0
    x: Optional[float] = None
    k_over_jgen: Optional[float] = None
    tau_gen_over_jgen: Optional[float] = None
    tau_el_initial_over_jgen: Optional[float] = None
    tau_el_final_over_jgen: Optional[float] = None
    beta: Optional[float] = None
    zeta_i: Optional[float] = None
    zeta_ii: Optional[float] = None
    tau: Optional[float] = None
    delta_i: Optional[float] = None
    t_max: float = 50.0
    samples: int = 5001
    n_max: Optional[int] = None
    q_max: Optional[int] = None
    omega_min: float = 1e-2
    omega_max: float = 1e2
    omega_points: int = 400

    def __post_init__(self):
        if self.model not in _PHYSICAL + ("pendulum",):
            raise ScenarioError(f"unknown model {self.model!r}")
        if self.model == "pendulum":
            self._require(("beta", "zeta_i", "zeta_ii"))
            self._forbid(("x", "k_over_jgen", "tau_gen_over_jgen", "tau_el_initial_over_jgen",
                          "tau_el_final_over_jgen"))
            self._exactly_one("tau", "delta_i")
        else:
            self._require(("k_over_jgen", "tau_el_initial_over_jgen", "tau_el_final_over_jgen"))
            self._forbid(("beta", "zeta_i", "zeta_ii", "tau"))
            self._exactly_one("tau_gen_over_jgen", "delta_i")
            if self.model == "infinite":
                if self.x is not None and not math.isinf(self.x):
                    raise ScenarioError("model = infinite requires x = inf or no x")
            elif self.x is None:
                raise ScenarioError("missing key 'x'")
        if (self.n_max is None) != (self.q_max is None):
            raise ScenarioError("n_max and q_max must both be integers or both auto")
        if not self.t_max > 0 or self.samples < 2:
            raise ScenarioError("need t_max > 0 and samples >= 2")
        if not 0 < self.omega_min < self.omega_max or self.omega_points < 3:
            raise ScenarioError("need 0 < omega_min < omega_max and omega_points >= 3")
        if not self.omega_ref_hz > 0:
            raise ScenarioError("omega_ref_hz must be positive")

    def _require(self, keys):
        missing = [k for k in keys if getattr(self, k) is None]
        if missing:
            raise ScenarioError(f"missing keys for model {self.model}: {', '.join(missing)}")

    def _forbid(self, keys):
        extra = [k for k in keys if getattr(self, k) is not None]
        if extra:
            raise ScenarioError(f"keys not valid for model {self.model}: {', '.join(extra)}")

    def _exactly_one(self, a, b):
        if (getattr(self, a) is None) == (getattr(self, b) is None):
            raise ScenarioError(f"give exactly one of {a} and {b}")

    @property
    def is_physical(self) -> bool:
        return self.model != "pendulum"

    def station(self) -> StationScenario:
        if not self.is_physical:
            raise ScenarioError("pendulum scenarios have no physical station")
        kind = ModelKind(self.model)
        x = math.inf if kind is ModelKind.INFINITE else self.x
        kw = dict(omega_ref=2.0 * math.pi * self.omega_ref_hz)
        try:
            if self.delta_i is not None:
                return StationScenario.from_initial_angle(
                    kind, x, self.k_over_jgen, self.delta_i, self.tau_el_initial_over_jgen,
                    self.tau_el_final_over_jgen, **kw)
            return StationScenario(kind, x, self.k_over_jgen, self.tau_gen_over_jgen,
                                   self.tau_el_initial_over_jgen, self.tau_el_final_over_jgen, **kw)
        except NoEquilibrium:
            raise
        except (ValueError, TypeError) as exc:
            raise ScenarioError(str(exc)) from exc

    def params(self) -> PendulumParams:
        if self.is_physical:
            return reduce(self.station(), Phase.FINAL)
        if self.delta_i is not None:
            return PendulumParams.from_initial_angle(self.beta, self.zeta_i, self.zeta_ii, self.delta_i)
        return PendulumParams.from_torque(self.beta, self.zeta_i, self.zeta_ii, self.tau)

    def truncation(self) -> Optional[Truncation]:
        if self.n_max is None:
            return None
        return Truncation(self.n_max, self.q_max)

    def times(self) -> np.ndarray:
        return time_grid(self.t_max, self.samples)

    def omegas(self) -> np.ndarray:
        return np.logspace(math.log10(self.omega_min), math.log10(self.omega_max), self.omega_points)

    def replace(self, **changes) -> "ScenarioFile":
        return dataclasses.replace(self, **changes)


_INT_KEYS = {"samples", "omega_points", "n_max", "q_max"}
_AUTO_KEYS = {"n_max", "q_max"}
_KEYS = {f.name for f in fields(ScenarioFile)}


def _value(key: str, text: str):
    if key == "model":
        return text.lower()
    if key in _AUTO_KEYS and text.lower() == "auto":
        return None
    try:
        if key in _INT_KEYS:
            return int(text)
        value = float(text)
    except ValueError as exc:
        raise ScenarioError(f"bad value for {key}: {text!r}") from exc
    if math.isnan(value):
        raise ScenarioError(f"{key} is NaN")
    return value


def parse_scenario(text: str) -> ScenarioFile:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key or not val:
            raise ScenarioError(f"line {lineno}: expected 'key = value'")
        if key not in _KEYS:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ScenarioError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _value(key, val)
    if "model" not in values:
        raise ScenarioError("missing key 'model'")
    return ScenarioFile(**values)


def load_scenario(path) -> ScenarioFile:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_scenario(fh.read())
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from exc


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_scenario(sf: ScenarioFile) -> list[str]:
    """``key = value`` lines; re-parsing them gives an equal ScenarioFile."""
    lines = []
    for f in fields(ScenarioFile):
        value = getattr(sf, f.name)
        if value is None:
            if f.name in _AUTO_KEYS:
                lines.append(f"{f.name} = auto")
            continue
        lines.append(f"{f.name} = {_fmt(value)}")
    return lines


DEFAULT_SCENARIO = ScenarioFile(model="pendulum", beta=0.5, zeta_i=1.0, zeta_ii=1.5, tau=0.5)
