from __future__ import annotations

import pytest

from fracdhk.config import ENV_VAR, ConfigError, RunConfig, load_config, parse_config


def test_defaults():
    cfg = load_config()
    assert cfg == RunConfig()
    assert cfg.interval.a == 0.0 and cfg.interval.b == 1.0
    assert cfg.tol_for(True) < cfg.tol_for(False)


def test_parse_with_comments():
    vals = parse_config("# run\nresolution = 257  # finer\n\nseed=4\noutput_dir = out\n")
    assert vals == {"resolution": 257, "seed": 4, "output_dir": "out"}


@pytest.mark.parametrize("text", ["colour = red", "seed", "seed = four", "= 3"])
def test_parse_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


@pytest.mark.parametrize("kw", [{"a": 1.0, "b": 0.0}, {"resolution": 10}, {"tol_exact": 0.0},
                                {"battery": 0}, {"jobs": 0}])
def test_validation(kw):
    with pytest.raises(ConfigError):
        RunConfig(**kw)


def test_file_env_and_flag_precedence(tmp_path, monkeypatch):
    p = tmp_path / "run.cfg"
    p.write_text("seed = 3\nresolution = 100\n")
    monkeypatch.setenv(ENV_VAR, str(p))
    cfg = load_config(seed=9, resolution=None)
    assert cfg.seed == 9 and cfg.resolution == 100
    q = tmp_path / "other.cfg"
    q.write_text("seed = 5\n")
    assert load_config(q).seed == 5


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg")
