"""Config file parsing and validation."""

import pytest

from dynguard import ConfigError, Scheme, load_config

FULL = """
# full sweep description
capacity         = 40
common_floor     = 20
service_rate     = 1.0
load_threshold   = 0.925
mix              = 0.4, 0.3, 0.3
grid             = 20, 44, 80
schemes          = dynamic, fixed, nonpriority
fixed.thresholds = 40, 30, 24
sim.enabled      = true
sim.arrivals     = 50000
sim.seeds        = 1, 2
sim.smoothing    = 0.25
out              = results.csv
"""


def write(tmp_path, text):
    path = tmp_path / "sweep.conf"
    path.write_text(text)
    return path


def test_full_config_round_trip(tmp_path):
    cfg = load_config(write(tmp_path, FULL))
    assert cfg.params.capacity == 40
    assert cfg.params.common_floor == 20
    assert cfg.params.class_count == 3
    assert cfg.mix == (0.4, 0.3, 0.3)
    assert cfg.grid == (20.0, 44.0, 80.0)
    assert cfg.schemes == (Scheme.DYNAMIC, Scheme.FIXED_GUARD, Scheme.NON_PRIORITY)
    assert cfg.fixed_thresholds.limits == (40, 30, 24)
    assert cfg.sim_enabled
    assert cfg.sim_arrivals == 50000
    assert cfg.sim_seeds == (1, 2)
    assert cfg.sim_smoothing == 0.25
    assert cfg.out_path == "results.csv"


def test_minimal_config_defaults(tmp_path):
    cfg = load_config(write(tmp_path, "capacity = 40\nmix = 0.4, 0.3, 0.3\n"))
    assert cfg.params.common_floor == 20  # half the capacity
    assert cfg.params.load_threshold == pytest.approx(0.925)
    assert len(cfg.grid) == 16
    assert cfg.grid[0] == pytest.approx(20.0)
    assert cfg.grid[-1] == pytest.approx(80.0)
    assert cfg.schemes == (Scheme.DYNAMIC, Scheme.NON_PRIORITY)
    assert not cfg.sim_enabled
    assert cfg.sim_seeds == (1,)
    assert cfg.out_path is None


def test_grid_range_form(tmp_path):
    cfg = load_config(
        write(tmp_path, "capacity = 10\nmix = 0.5, 0.5\ngrid.min = 2\ngrid.max = 10\ngrid.steps = 5\n")
    )
    assert cfg.grid == pytest.approx((2.0, 4.0, 6.0, 8.0, 10.0))


def test_missing_file():
    with pytest.raises(ConfigError, match="cannot read"):
        load_config("/nonexistent/sweep.conf")


def test_missing_capacity(tmp_path):
    with pytest.raises(ConfigError, match="capacity"):
        load_config(write(tmp_path, "mix = 0.5, 0.5\n"))


def test_unknown_key_names_the_line(tmp_path):
    with pytest.raises(ConfigError, match=r":3: unknown key 'cappacity'"):
        load_config(write(tmp_path, "capacity = 10\nmix = 1.0\ncappacity = 12\n"))


def test_duplicate_key(tmp_path):
    with pytest.raises(ConfigError, match="duplicate key"):
        load_config(write(tmp_path, "capacity = 10\ncapacity = 12\nmix = 1.0\n"))


def test_mix_must_sum_to_one(tmp_path):
    with pytest.raises(ConfigError, match="sum to 1"):
        load_config(write(tmp_path, "capacity = 10\nmix = 0.5, 0.3, 0.3\n"))


def test_mix_rejects_negative(tmp_path):
    with pytest.raises(ConfigError, match="non-negative"):
        load_config(write(tmp_path, "capacity = 10\nmix = 1.5, -0.5\n"))


def test_empty_grid_value(tmp_path):
    with pytest.raises(ConfigError, match="empty value"):
        load_config(write(tmp_path, "capacity = 10\nmix = 1.0\ngrid =\n"))


def test_grid_points_must_be_positive(tmp_path):
    with pytest.raises(ConfigError, match="positive"):
        load_config(write(tmp_path, "capacity = 10\nmix = 1.0\ngrid = 4, 0\n"))


def test_grid_forms_are_exclusive(tmp_path):
    text = "capacity = 10\nmix = 1.0\ngrid = 4\ngrid.min = 1\ngrid.max = 2\ngrid.steps = 2\n"
    with pytest.raises(ConfigError, match="not both"):
        load_config(write(tmp_path, text))

def test_incomplete_grid_range(tmp_path):
    with pytest.raises(ConfigError, match="missing grid.max"):
        load_config(write(tmp_path, "capacity = 10\nmix = 1.0\ngrid.min = 1\ngrid.steps = 4\n"))


def test_fixed_scheme_needs_thresholds(tmp_path):
    with pytest.raises(ConfigError, match="fixed.thresholds"):
        load_config(write(tmp_path, "capacity = 10\nmix = 0.5, 0.5\nschemes = fixed\n"))


def test_thresholds_without_fixed_scheme(tmp_path):
    text = "capacity = 10\nmix = 0.5, 0.5\nfixed.thresholds = 10, 5\n"
    with pytest.raises(ConfigError, match="not enabled"):
        load_config(write(tmp_path, text))


def test_threshold_capacity_mismatch(tmp_path):
    text = "capacity = 10\nmix = 0.5, 0.5\nschemes = fixed\nfixed.thresholds = 8, 5\n"
    with pytest.raises(ConfigError, match="equal the capacity"):
        load_config(write(tmp_path, text))


def test_threshold_ordering_checked(tmp_path):
    text = "capacity = 10\nmix = 0.5, 0.5\nschemes = fixed\nfixed.thresholds = 10, 12\n"
    with pytest.raises(ConfigError, match="non-increasing"):
        load_config(write(tmp_path, text))


def test_unknown_scheme(tmp_path):
    with pytest.raises(ConfigError, match="unknown scheme"):
        load_config(write(tmp_path, "capacity = 10\nmix = 1.0\nschemes = dynamo\n"))


def test_non_numeric_value(tmp_path):
    with pytest.raises(ConfigError, match="must be an integer"):
        load_config(write(tmp_path, "capacity = many\nmix = 1.0\n"))


def test_bad_smoothing(tmp_path):
    with pytest.raises(ConfigError, match="smoothing"):
        load_config(write(tmp_path, "capacity = 10\nmix = 1.0\nsim.smoothing = 2\n"))


def test_garbled_line(tmp_path):
    with pytest.raises(ConfigError, match="key = value"):
        load_config(write(tmp_path, "capacity 10\n"))
