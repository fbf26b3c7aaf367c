import math

import pytest

from lowinertia.errors import NoEquilibrium, ScenarioError
from lowinertia.hierarchy import Truncation
from lowinertia.scenario import (DEFAULT_SCENARIO, ScenarioFile, format_scenario, load_scenario,
                                 parse_scenario)

CAGE = """
# low-inertia cage station
model = cage
x = 2
k_over_jgen = 0.3
delta_i = 1.0471975511965976
tau_el_initial_over_jgen = 1
tau_el_final_over_jgen = 2   # doubled coupling
n_max = auto
q_max = auto
"""


def test_parse_physical():
    sf = parse_scenario(CAGE)
    assert sf.model == "cage" and sf.x == 2.0 and sf.truncation() is None
    p = sf.params()
    assert p.beta == pytest.approx(0.45) and p.delta_i == pytest.approx(math.pi / 3)


def test_parse_pendulum():
    sf = parse_scenario("model = pendulum\nbeta = 0.5\nzeta_i = 1\nzeta_ii = 1.5\ntau = 0.5\n"
                        "n_max = 8\nq_max = 16\n")
    assert sf.truncation() == Truncation(8, 16)
    assert sf.params().delta_i == pytest.approx(math.pi / 6)


@pytest.mark.parametrize("sf", [DEFAULT_SCENARIO, parse_scenario(CAGE),
                                ScenarioFile(model="infinite", k_over_jgen=0.3, tau_gen_over_jgen=0.5,
                                             tau_el_initial_over_jgen=1.0, tau_el_final_over_jgen=2.0,
                                             x=math.inf, n_max=6, q_max=12)])
def test_round_trip(sf):
    assert parse_scenario("\n".join(format_scenario(sf))) == sf


@pytest.mark.parametrize("text", [
    "model = pendulum\nbeta = 0.5\nzeta_i = 1\nzeta_ii = 1.5\ntau = 0.5\ncolour = red",
    "model = pendulum\nbeta = 0.5\nbeta = 0.6\nzeta_i = 1\nzeta_ii = 1.5\ntau = 0.5",
    "model = pendulum\nbeta = 0.5\nzeta_i = 1\nzeta_ii = 1.5",
    "model = pendulum\nbeta = 0.5\nzeta_i = 1\nzeta_ii = 1.5\ntau = 0.5\ndelta_i = 0.3",
    "model = pendulum\nbeta = fast\nzeta_i = 1\nzeta_ii = 1.5\ntau = 0.5",
    "model = pendulum\nbeta = nan\nzeta_i = 1\nzeta_ii = 1.5\ntau = 0.5",
    "model = pendulum\nbeta 0.5",
    "model = pendulum\nbeta = 0.5\nzeta_i = 1\nzeta_ii = 1.5\ntau = 0.5\nn_max = 6",
    "model = pendulum\nbeta = 0.5\nzeta_i = 1\nzeta_ii = 1.5\ntau = 0.5\nx = 2",
    "model = cage\nk_over_jgen = 0.3\ntau_gen_over_jgen = 0.5\n"
    "tau_el_initial_over_jgen = 1\ntau_el_final_over_jgen = 2",
    "model = infinite\nx = 3\nk_over_jgen = 0.3\ntau_gen_over_jgen = 0.5\n"
    "tau_el_initial_over_jgen = 1\ntau_el_final_over_jgen = 2",
    "model = spring\nbeta = 0.5",
    "beta = 0.5",
    "model = pendulum\nbeta = 0.5\nzeta_i = 1\nzeta_ii = 1.5\ntau = 0.5\nomega_points = 2",
])
def test_rejects(text):
    with pytest.raises(ScenarioError):
        parse_scenario(text)


def test_invalid_station_is_scenario_error():
    sf = parse_scenario(CAGE.replace("x = 2", "x = -1"))
    with pytest.raises(ScenarioError):
        sf.params()


def test_no_equilibrium_passes_through():
    sf = parse_scenario(CAGE.replace("tau_el_final_over_jgen = 2", "tau_el_final_over_jgen = 0.5"))
    with pytest.raises(NoEquilibrium):
        sf.params()


def test_load(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text(CAGE)
    assert load_scenario(path) == parse_scenario(CAGE)
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "missing.txt")


def test_grids():
    sf = DEFAULT_SCENARIO.replace(t_max=10.0, samples=11, omega_points=5)
    assert sf.times()[-1] == 10.0 and len(sf.times()) == 11
    w = sf.omegas()
    assert len(w) == 5 and w[0] == pytest.approx(1e-2) and w[-1] == pytest.approx(1e2)
