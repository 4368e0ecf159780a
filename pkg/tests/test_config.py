import pytest

from vnslab.solver.config import ConfigError, SimConfig, load_config, parse_config


def test_parse_with_comments_and_types():
    cfg = parse_config("mode = particle3d  # trailing comment\nnx=40\nstore_particles = no\nepsilon = 1e-3\n")
    assert cfg.mode == "particle3d" and cfg.nx == 40 and cfg.store_particles is False and cfg.epsilon == 1e-3


@pytest.mark.parametrize("text, key", [
    ("bogus = 1", "bogus"),
    ("nx = many", "nx"),
    ("cfl = 2.0", "cfl"),
    ("mode = grid2d", "mode"),
    ("t0 = 0.5", "t0"),
    ("nx = 16\nsponge_width = 8", "sponge_width"),
    ("evolve_Phi = maybe", "evolve_Phi"),
    ("just text", "just text"),
    ("base_dir = /tmp", "base_dir"),
])
def test_errors_name_the_key(text, key):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key
    assert f"'{key}'" in str(info.value)


def test_text_round_trip(tmp_path):
    cfg = SimConfig(mode="particle3d", nx=40, epsilon=0.125, seeding="sobol")
    path = tmp_path / "c.cfg"
    path.write_text(cfg.to_text())
    back = load_config(str(path))
    assert back.with_updates(base_dir=".") == cfg


def test_time_step_lands_on_final_time():
    cfg = SimConfig(nx=100, t_final=7.3)
    assert cfg.dt <= cfg.cfl * cfg.dx + 1e-15
    assert cfg.step_time(cfg.n_steps) == pytest.approx(7.3, abs=1e-12)


def test_shipped_configs_parse():
    import glob
    import os

    paths = glob.glob(os.path.join(os.path.dirname(__file__), "..", "configs", "*.cfg"))
    assert paths
    for p in paths:
        load_config(p)
