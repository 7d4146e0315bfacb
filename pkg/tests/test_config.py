import logging
from pathlib import Path

import pytest

from uavdeploy.config import ConfigError, RunConfig, load_config, parse_config, with_overrides

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def test_minimal_file_gets_defaults(caplog):
    with caplog.at_level(logging.INFO, logger="uavdeploy.config"):
        cfg = parse_config("[scenario]\nK = 10\nP = 3\n")
    assert cfg.scenario.num_users == 10 and cfg.scenario.num_uavs == 3
    default = RunConfig()
    assert cfg.channel == default.channel and cfg.agent == default.agent and cfg.qos == default.qos
    assert "default agent.gamma = 0.9" in caplog.text
    assert "scenario.num_users" not in caplog.text


def test_gamma_out_of_range_names_field():
    with pytest.raises(ConfigError) as err:
        parse_config("[agent]\ngamma = 1.5\n")
    assert err.value.field == "agent.gamma"
    assert "[0, 1]" in str(err.value)


def test_paper_file():
    cfg = load_config(CONFIGS / "paper.ini")
    assert (cfg.scenario.num_users, cfg.scenario.num_uavs) == (24, 2)
    assert cfg.scenario.area.uav_altitude_m == 100
    assert cfg.qos.rate_threshold_bpshz == 2.5 and cfg.qos.comm_radius_m == 250
    assert cfg.agent.gamma == 0.9 and cfg.agent.batch_size == 64
    assert cfg.environment.epochs == 800 and cfg.agent.episodes == 5000
    assert cfg.agent.sync_period == 200


def test_desk_file_loads():
    cfg = load_config(CONFIGS / "desk.ini")
    assert cfg.scenario.num_users == 8 and cfg.baselines.solvers == ("drl", "anneal", "fixed")


def test_missing_file():
    with pytest.raises(ConfigError) as err:
        load_config("/nonexistent/run.ini")
    assert err.value.field == "file"


@pytest.mark.parametrize("text, field", [
    ("[agent]\nbatch_size = many\n", "agent.batch_size"),
    ("[bogus]\nx = 1\n", "bogus"),
    ("[scenario]\ncolour = red\n", "scenario.colour"),
    ("[scenario]\nP = 0\n", "scenario.num_uavs"),
    ("[baselines]\nsolvers = drl magic\n", "baselines.solvers"),
    ("[run]\nexperiment = dance\n", "run.experiment"),
    ("[scenario]\ngaussian_sigma_m = 40\n", "scenario.gaussian_sigma_m"),
    ("[channel]\ntx_power_w = -1\n", "channel.tx_power_w"),
    ("[qos]\ncomm_radius_m = -5\n", "qos.comm_radius_m"),
    ("[environment]\nreward_baseline = median\n", "environment.reward_baseline"),
])
def test_errors_name_the_field(text, field):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.field == field


def test_gaussian_section():
    cfg = parse_config("[scenario]\ndistribution = gaussian\ngaussian_centers = 100 100; 300 250\n"
                       "gaussian_sigma_m = 30\n")
    d = cfg.scenario.distribution
    assert d.kind == "gaussian" and d.gaussian_centers == ((100.0, 100.0), (300.0, 250.0))
    assert d.gaussian_sigma_m == 30.0


def test_lists_and_booleans():
    cfg = parse_config("[run]\nk_values = 4, 8 16\nreproducible = yes\n[agent]\nhidden_sizes = 32 16\n")
    assert cfg.k_values == (4, 8, 16) and cfg.reproducible is True
    assert cfg.agent.hidden_sizes == (32, 16)


def test_with_overrides():
    cfg = with_overrides(RunConfig(), **{"scenario.num_users": 5, "agent.gamma": 0.5})
    assert cfg.scenario.num_users == 5 and cfg.agent.gamma == 0.5
    with pytest.raises(ConfigError):
        with_overrides(RunConfig(), **{"agent.gamma": 2.0})
