"""Command-line interface.

    lowinertia transient       --scenario FILE [--solver eigen|ode|both] [--out FILE]
    lowinertia spectrum        --scenario FILE [--out FILE]
    lowinertia characteristics --scenario FILE [--out FILE]
    lowinertia verify          --scenario FILE [--level quick|full] [--out FILE]
    lowinertia sweep           --scenario FILE --param KEY --values V1,V2,... [--jobs N] [--out FILE]

Exit codes: 0 ok, 1 verification failure, 2 bad input, 3 no equilibrium,
4 numerical non-convergence.  Without ``--scenario`` a built-in pendulum
scenario is used.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import characteristics as chars
from . import eigensolver, mcf
from .errors import (LowInertiaError, NoEquilibrium, NotConverged, ScenarioError,
                     TruncationTooSmall)
from .hierarchy import Truncation, assemble_blocks
from .model import angles_from_delta, reduce
from .oracle import integrate_nbody, integrate_pendulum, machines_from_scenario
from .scenario import DEFAULT_SCENARIO, ScenarioFile, format_scenario, load_scenario, parse_scenario

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_NO_EQUILIBRIUM, EXIT_NOT_CONVERGED = 0, 1, 2, 3, 4

TIME_TOL = 1e-8
SPECTRUM_TOL = 1e-8
SPECTRUM_ACCEPT = 1e-5
ODE_TOL = 1e-11


def fmt(value: float) -> str:
    return f"{value:.16e}" if math.isfinite(value) else repr(float(value))


def inputs_hash(sf: ScenarioFile, *flags: str) -> str:
    text = "\n".join(format_scenario(sf) + list(flags))
    return hashlib.sha256(text.encode()).hexdigest()


def write_atomic(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".lowinertia-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _header(command: str, sf: ScenarioFile, digest: str, extra: dict) -> list[str]:
    lines = [f"# lowinertia {command}"]
    lines += [f"# scenario: {line}" for line in format_scenario(sf)]
    lines.append(f"# inputs_sha256 = {digest}")
    lines += [f"# {k} = {v}" for k, v in extra.items()]
    return lines


def scenario_from_header(text: str) -> ScenarioFile:
    """Rebuild the scenario echoed in an output file's header."""
    prefix = "# scenario: "
    body = "\n".join(line[len(prefix):] for line in text.splitlines() if line.startswith(prefix))
    return parse_scenario(body)


def time_solution(sf: ScenarioFile, params) -> eigensolver.EigenSolution:
    trunc = sf.truncation()
    if trunc is None:
        rep = eigensolver.auto_truncation(params, sf.times(), TIME_TOL)
        if not rep.converged:
            raise NotConverged(f"time-domain truncation did not reach {TIME_TOL:g} (last {rep.trunc})")
        trunc = rep.trunc
    return eigensolver.solve_params(params, trunc)


def spectral_truncation(sf: ScenarioFile, params) -> tuple[Truncation, bool]:
    trunc = sf.truncation()
    if trunc is not None:
        return trunc, True
    rep = mcf.auto_truncation(params, sf.omegas(), SPECTRUM_TOL)
    if not rep.converged and (not rep.history or rep.history[-1][2] > SPECTRUM_ACCEPT):
        raise NotConverged(f"spectral truncation stalled at {rep.trunc}")
    return rep.trunc, rep.converged


def cmd_transient(sf: ScenarioFile, solver: str) -> str:
    params = sf.params()
    t = sf.times()
    meta = {"solver": solver}
    cols = {"t": t}
    eig_traj = ode_traj = None
    if solver in ("eigen", "both"):
        sol = time_solution(sf, params)
        eig_traj = eigensolver.evaluate(sol, t)
        meta.update(n_max=sol.trunc.n_max, q_max=sol.trunc.q_max)
    if solver in ("ode", "both"):
        ode_traj = integrate_pendulum(params, t_eval=t, tol=ODE_TOL)
        meta.update(ode_rtol=ODE_TOL, ode_atol=ODE_TOL)
    main = eig_traj if eig_traj is not None else ode_traj
    cols["delta"] = main.delta
    cols["delta_dot"] = main.delta_dot
    if sf.is_physical:
        station = sf.station()
        phys = angles_from_delta(station, main)
        cols["omega_gen"] = phys.omega_gen
        cols["omega_grid"] = phys.omega_grid
        meta["omega_ref_hz"] = sf.omega_ref_hz
    if solver == "both":
        cols["delta_ode"] = ode_traj.delta
    lines = _header("transient", sf, inputs_hash(sf, "transient", solver), meta)
    lines.append(",".join(cols))
    data = np.column_stack(list(cols.values()))
    lines += [",".join(fmt(v) for v in row) for row in data]
    if solver == "both":
        lines.append(f"# max_abs_deviation = {fmt(float(np.abs(eig_traj.delta - ode_traj.delta).max()))}")
    return "\n".join(lines) + "\n"


def compute_spectrum(sf: ScenarioFile, params) -> tuple[mcf.Spectrum, bool]:
    trunc, converged = spectral_truncation(sf, params)
    return mcf.spectrum(params, trunc, sf.omegas()), converged


def cmd_spectrum(sf: ScenarioFile) -> str:
    params = sf.params()
    spec, converged = compute_spectrum(sf, params)
    meta = {"n_max": spec.trunc.n_max, "q_max": spec.trunc.q_max,
            "truncation_converged": str(converged).lower()}
    lines = _header("spectrum", sf, inputs_hash(sf, "spectrum"), meta)
    lines.append("omega,re,im")
    lines += [f"{fmt(w)},{fmt(v.real)},{fmt(v.imag)}" for w, v in zip(spec.omegas, spec.values)]
    return "\n".join(lines) + "\n"


def _json_clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _json_clean(obj.item())
    return obj


def _json(payload: dict) -> str:
    return json.dumps(_json_clean(payload), indent=2, sort_keys=True) + "\n"


def _metadata(sf: ScenarioFile, *flags: str) -> dict:
    return {"scenario": format_scenario(sf), "inputs_sha256": inputs_hash(sf, *flags),
            "omega_ref_hz": sf.omega_ref_hz}


def characteristics_report(sf: ScenarioFile) -> chars.CharacteristicReport:
    params = sf.params()
    sol = time_solution(sf, params)
    spec = None
    reason = None
    if params.swing != 0.0:
        try:
            spec, _ = compute_spectrum(sf, params)
        except NotConverged as exc:
            reason = f"spectrum not converged: {exc}"
    rep = chars.characterize(params, sol, spec)
    if reason:
        rep.reasons["omega_peak"] = reason
    return rep


def cmd_characteristics(sf: ScenarioFile) -> str:
    rep = characteristics_report(sf)
    return _json({"report": rep.to_dict(), "metadata": _metadata(sf, "characteristics")})


@dataclasses.dataclass
class Check:
    name: str
    passed: bool
    value: float | None = None
    threshold: float | None = None
    detail: str = ""


def _check(name, value, threshold, detail=""):
    return Check(name, bool(value < threshold), float(value), threshold, detail)


def run_checks(sf: ScenarioFile, level: str) -> list[Check]:
    checks: list[Check] = []
    try:
        params = sf.params()
        trunc = sf.truncation()
        if trunc is None:
            rep = eigensolver.auto_truncation(params, sf.times(), TIME_TOL)
            trunc = rep.trunc
    except (TruncationTooSmall, NoEquilibrium, ScenarioError) as exc:
        return [Check("precondition", False, detail=f"{type(exc).__name__}: {exc}")]
    checks.append(Check("precondition", True, detail=f"n_max={trunc.n_max} q_max={trunc.q_max}"))
    t = sf.times()
    sol = eigensolver.solve_params(params, trunc)
    c_res, d_res = sol.initial_residuals
    checks.append(_check("sum_c_identity", c_res, 1e-8))
    checks.append(_check("sum_d_identity", d_res, 1e-8))
    try:
        traj = eigensolver.evaluate(sol, t)
    except NotConverged as exc:
        checks.append(Check("reality", False, detail=str(exc)))
        return checks
    checks.append(Check("reality", True, 0.0, eigensolver.IMAG_TOL))
    ode = integrate_pendulum(params, t_eval=t, tol=ODE_TOL)
    checks.append(_check("eigen_vs_ode", float(np.abs(traj.delta - ode.delta).max()), 1e-5))
    if params.swing != 0.0:
        w = sf.omegas()[:: max(1, sf.omega_points // 50)]
        ref = sol.transform(1j * w)
        try:
            got = mcf.normalized_transform(1j * w, assemble_blocks(params, trunc))
            checks.append(_check("mcf_vs_eigen", float(np.max(np.abs(got - ref) / np.abs(ref))), 1e-6))
            w5 = w[:: max(1, len(w) // 5)][:5]
            blocks = assemble_blocks(params, trunc)
            herm = np.abs(mcf.normalized_transform(-1j * w5, blocks)
                          - np.conj(mcf.normalized_transform(1j * w5, blocks))).max()
            checks.append(_check("hermitian_symmetry", float(herm), 1e-12))
        except LowInertiaError as exc:
            checks.append(Check("mcf_vs_eigen", False, detail=f"{type(exc).__name__}: {exc}"))
    if sf.is_physical:
        station = sf.station()
        phys = angles_from_delta(station, traj)
        if math.isinf(station.x):
            err = float(np.abs(phys.omega_grid - station.omega_ref).max() / station.omega_ref)
        else:
            lhs = station.x * phys.omega_grid + phys.omega_gen
            err = float(np.abs(lhs - (1 + station.x) * station.omega_ref).max()
                        / ((1 + station.x) * station.omega_ref))
        checks.append(_check("momentum_identity", err, 1e-10))
    if level == "full":
        if params.swing != 0.0:
            dn, dq = eigensolver.verify_truncation(params, trunc, t)
            checks.append(_check("doubling_n_max", dn, 1e-8))
            checks.append(_check("doubling_q_max", dq, 1e-8))
        if sf.is_physical:
            checks += _reduction_checks(sf, t)
    return checks


def _reduction_checks(sf: ScenarioFile, t) -> list[Check]:
    out = []
    for model in ("kuramoto", "cage"):
        for x in (1.0, 2.0, 10.0):
            variant = sf.replace(model=model, x=x)
            station = variant.station()
            ms, step = machines_from_scenario(station, int(x) + 1)
            body = integrate_nbody(ms, step, t_eval=t, tol=ODE_TOL)
            two = integrate_pendulum(reduce(station), t_eval=t, tol=ODE_TOL)
            out.append(_check(f"nbody_reduction_{model}_x{int(x)}",
                              float(np.abs(body.delta - two.delta).max()), 1e-6))
    kura = reduce(sf.replace(model="kuramoto", x=math.inf).station())
    cage = reduce(sf.replace(model="cage", x=math.inf).station())
    out.append(Check("models_coincide_x_inf", kura == cage, detail=f"{kura} vs {cage}"))
    return out


def cmd_verify(sf: ScenarioFile, level: str) -> tuple[str, bool]:
    checks = run_checks(sf, level)
    ok = all(c.passed for c in checks)
    payload = {"level": level, "passed": ok, "checks": [dataclasses.asdict(c) for c in checks],
               "metadata": _metadata(sf, "verify", level)}
    return _json(payload), ok


SWEEP_COLUMNS = ("omega_sm", "omega_un", "omega_peak", "t_os", "t_os_linear", "t_int", "t_int_linear")


def _sweep_row(sf: ScenarioFile) -> list[float]:
    rep = characteristics_report(sf)
    return [getattr(rep, c) if getattr(rep, c) is not None else math.nan for c in SWEEP_COLUMNS]


def cmd_sweep(sf: ScenarioFile, param: str, values: list[float], jobs: int = 1) -> str:
    variants = []
    for v in values:
        try:
            variants.append(sf.replace(**{param: v}))
        except TypeError as exc:
            raise ScenarioError(f"unknown sweep parameter {param!r}") from exc
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, variants))
    else:
        rows = [_sweep_row(v) for v in variants]
    lines = _header("sweep", sf, inputs_hash(sf, "sweep", param, *map(repr, values)),
                    {"param": param})
    lines.append(",".join((param,) + SWEEP_COLUMNS))
    lines += [",".join(fmt(x) for x in [v] + row) for v, row in zip(values, rows)]
    return "\n".join(lines) + "\n"


def _values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad value list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lowinertia",
                                     description="Rotor-angle transients on finite-inertia grids.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", help="scenario file (default: built-in pendulum case)")
        p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("transient", help="rotor-angle trajectory as CSV")
    common(p)
    p.add_argument("--solver", choices=("eigen", "ode", "both"), default="eigen")
    p = sub.add_parser("spectrum", help="normalized rotor-angle spectrum as CSV")
    common(p)
    p = sub.add_parser("characteristics", help="characteristic frequencies and times as JSON")
    common(p)
    p = sub.add_parser("verify", help="cross-solver and reduction checks as JSON")
    common(p)
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p = sub.add_parser("sweep", help="characteristics over one scenario parameter as CSV")
    common(p)
    p.add_argument("--param", required=True, help="scenario key to vary")
    p.add_argument("--values", required=True, type=_values, help="comma-separated values")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sf = load_scenario(args.scenario) if args.scenario else DEFAULT_SCENARIO
        if args.command == "transient":
            text, code = cmd_transient(sf, args.solver), EXIT_OK
        elif args.command == "spectrum":
            text, code = cmd_spectrum(sf), EXIT_OK
        elif args.command == "characteristics":
            text, code = cmd_characteristics(sf), EXIT_OK
        elif args.command == "verify":
            text, ok = cmd_verify(sf, args.level)
            code = EXIT_OK if ok else EXIT_VERIFY
        else:
            text, code = cmd_sweep(sf, args.param, args.values, args.jobs), EXIT_OK
    except NoEquilibrium as exc:
        print(f"error: no equilibrium: {exc}", file=sys.stderr)
        return EXIT_NO_EQUILIBRIUM
    except (ScenarioError, TruncationTooSmall) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except LowInertiaError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    write_atomic(args.out, text)
    return code


if __name__ == "__main__":
    sys.exit(main())
