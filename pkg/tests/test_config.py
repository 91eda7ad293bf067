import pytest

from cavityent.config import load_config, merge, parse_config
from cavityent.errors import ConfigError


def test_parse_basic():
    text = """
    # time scan at the lower decay rate
    kappa = 1.0
    grid-nt = 11   # dashes and underscores are equivalent
    out = scan.csv
    """
    assert parse_config(text) == {"kappa": 1.0, "grid_nt": 11, "out": "scan.csv"}


@pytest.mark.parametrize(
    "text",
    ["kappa 1", "= 2", "kappa =", "colour = red", "cutoff = 3.5", "gamma = fast"],
)
def test_parse_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_flags_override_file():
    merged = merge({"kappa": 1.0, "gamma": 0.3}, {"kappa": 2.0, "gamma": None, "n_t": 4.0})
    assert merged == {"kappa": 2.0, "gamma": 0.3, "n_t": 4.0}


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.conf")


def test_presets_parse():
    from pathlib import Path

    presets = sorted((Path(__file__).parents[1] / "presets").glob("*.conf"))
    assert presets
    for path in presets:
        assert load_config(path)
