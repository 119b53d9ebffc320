from __future__ import annotations

from pathlib import Path

import pytest

from focalner.config import Config, ConfigError, load_config, parse_config


def test_defaults():
    c = Config()
    assert (c.radius, c.alpha, c.min_support, c.max_order, c.min_dp) == (5, 0.05, 3, 2, 0.6)
    assert c.n_workers >= 1
    assert c.induction_params == {"alpha": 0.05, "min_support": 3, "max_order": 2, "min_dp": 0.6}


def test_parse_values_and_relative_paths(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nradius = 3\nsentence_bounded = no\nalpha = 0.01\n"
                    "morph = lex/morph.tsv\nworkers = 2\n", encoding="utf-8")
    c = load_config(path)
    assert (c.radius, c.sentence_bounded, c.alpha, c.workers) == (3, False, 0.01, 2)
    assert Path(c.morph) == tmp_path / "lex" / "morph.tsv"
    assert c.window.radius == 3 and not c.window.sentence_bounded


@pytest.mark.parametrize("text", ["radius = 0", "alpha = 2", "min_support = 0", "colour = red",
                                  "radius = five", "sentence_bounded = maybe", "no equals sign"])
def test_rejected(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_echo_excludes_paths():
    echo = Config(morph="/x/m.tsv", seed=4).echo()
    assert "morph" not in echo and "workers" not in echo
    assert echo["seed"] == 4
