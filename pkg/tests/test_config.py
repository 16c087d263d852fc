import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmamm.config import (
    ConfigError,
    config_from_dict,
    config_to_dict,
    dump_config,
    load_config,
    parse_config,
)

EXAMPLE = """
[model]
phi = 0.9

[security.0]
p = 50
r = 1
gamma = 0.5

[security.1]
p = 50
r = 1
gamma = 0.5

[run]
rounds = 1000
seed = 7
"""

EXTENDED = """
[model]
table = [0.4, 0.1, 0.1, 0.4]

[extended]
delta = 0.5
curve = linear
curve_slope = 0.5

[security.0]
p = 50
r = 1

[security.1]
p = 20
r = 2
delta = 0.3
curve_slope = 0.8   # per-security override

[run]
variant = renormalized
"""


def test_parse_base():
    cfg = parse_config(EXAMPLE)
    assert cfg.mode == "base" and cfg.rounds == 1000 and cfg.master_seed == 7
    assert cfg.model.phi == pytest.approx(0.9)
    assert [s.gamma for s in cfg.params] == [0.5, 0.5]


def test_parse_extended_with_overrides():
    cfg = parse_config(EXTENDED)
    assert cfg.mode == "extended" and cfg.variant == "renormalized"
    assert cfg.params[0].delta == 0.5 and cfg.params[1].delta == 0.3
    assert cfg.params[0].participation.slope == 0.5
    assert cfg.params[1].participation.slope == 0.8


@pytest.mark.parametrize("text", [EXAMPLE, EXTENDED])
def test_round_trip(text):
    cfg = parse_config(text)
    again = config_from_dict(config_to_dict(cfg))
    assert again == cfg
    assert parse_config(dump_config(cfg)) == cfg


@settings(max_examples=40)
@given(st.floats(0.0, 1.0), st.floats(0.01, 0.99), st.floats(-100, 100), st.floats(0.01, 100),
       st.integers(0, 2**64 - 1))
def test_round_trip_property(phi, gamma, p, r, seed):
    text = (f"[model]\nphi = {phi!r}\n[security.0]\np = {p!r}\nr = {r!r}\ngamma = {gamma!r}\n"
            f"[security.1]\np = 0\nr = 1\ngamma = 0.5\n[run]\nseed = {seed}\n")
    cfg = parse_config(text)
    assert config_from_dict(config_to_dict(cfg)) == cfg


@pytest.mark.parametrize("text,key", [
    ("[model]\nphi = 1.5\n", "model.phi"),
    ("[model]\nphi = abc\n", "model.phi"),
    ("[model]\ntable = [0.5, 0.5, 0.0]\n", "model.table"),
    ("[model]\ntable = [1, 0, 0, 0]\n", "model.table"),
    ("[model]\nphi = 0.9\nbogus = 1\n", "model.bogus"),
    ("[model]\nphi = 0.9\n[security.0]\np = 1\nr = 1\ngamma = 0.5\n", "security.1"),
    ("[model]\nphi = 0.9\n[security.0]\np = 1\nr = 1\ngamma = 1.5\n[security.1]\np=1\nr=1\ngamma=0.5\n",
     "security.0"),
    ("[model]\nphi = 0.9\n[security.0]\np = 1\nr = 1\n[security.1]\np=1\nr=1\ngamma=0.5\n",
     "security.0.gamma"),
    (EXAMPLE + "workers = 3\n", "run.workers"),
    (EXAMPLE.replace("seed = 7", "seed = -1"), "run"),
    (EXAMPLE.replace("rounds = 1000", "rounds = many"), "run.rounds"),
    (EXAMPLE + "[extra]\na = 1\n", "extra"),
    (EXTENDED.replace("curve = linear", "curve = cubic"), "security.0.curve"),
    ("[model]\n", "model"),
    ("no sections here", "<file>"),
])
def test_errors_name_the_key(text, key):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key
    assert f"'{key}'" in str(info.value)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "nope.ini")


def test_load_file(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text(EXAMPLE)
    assert load_config(path) == parse_config(EXAMPLE)


def test_echo_has_no_worker_count():
    d = config_to_dict(parse_config(EXAMPLE))
    assert "workers" not in d["run"]
    assert d["model"]["table"] == pytest.approx([0.45, 0.05, 0.05, 0.45])
