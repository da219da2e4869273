"""Layered configuration resolution and its typed views."""

import pytest

from websed.config import DEFAULTS, PipelineConfig, load_config
from websed.errors import BadConfig


def write_yaml(tmp_path, text):
    path = tmp_path / "websed.yaml"
    path.write_text(text)
    return path


class TestLayering:
    def test_defaults_alone(self):
        cfg = load_config(environ={})
        assert cfg.values == DEFAULTS
        assert cfg.seed == 0
        assert cfg.dataset == "synth"

    def test_file_overrides_defaults(self, tmp_path):
        path = write_yaml(tmp_path, "seed: 7\ntrain:\n  epochs: 5\n")
        cfg = load_config(path, environ={})
        assert cfg.seed == 7
        assert cfg["train"]["epochs"] == 5
        assert cfg["dataset"] == "synth"

    def test_env_overrides_file(self, tmp_path):
        path = write_yaml(tmp_path, "seed: 7\ntrain:\n  epochs: 5\n")
        cfg = load_config(path, environ={"WEBSED_SEED": "3",
                                         "WEBSED_TRAIN__EPOCHS": "9"})
        assert cfg.seed == 3
        assert cfg["train"]["epochs"] == 9

    def test_env_values_parse_as_yaml(self):
        cfg = load_config(environ={
            "WEBSED_EVALUATION__K_GRID": "[1, 2, 3]",
            "WEBSED_THREADS": "4",
        })
        assert cfg.k_grid == (1, 2, 3)
        assert cfg["threads"] == 4

    def test_flags_override_env(self, tmp_path):
        path = write_yaml(tmp_path, "seed: 7\n")
        cfg = load_config(path, flag_overrides={"seed": 11, "out_dir": None},
                          environ={"WEBSED_SEED": "3"})
        assert cfg.seed == 11
        # None flags mean "not given" and must not clobber lower layers.
        assert cfg["out_dir"] == "out"

    def test_unrelated_env_ignored(self):
        cfg = load_config(environ={"PATH": "/bin", "WEBSEDX_SEED": "9"})
        assert cfg.seed == 0


class TestValidation:
    def test_unknown_top_level_key(self, tmp_path):
        path = write_yaml(tmp_path, "sede: 7\n")
        with pytest.raises(BadConfig, match="sede"):
            load_config(path, environ={})

    def test_unknown_nested_key(self, tmp_path):
        path = write_yaml(tmp_path, "evaluation:\n  quorum: 3\n")
        with pytest.raises(BadConfig, match="evaluation.quorum"):
            load_config(path, environ={})

    def test_model_sections_accept_field_overrides(self, tmp_path):
        path = write_yaml(tmp_path, "cnn:\n  fc_width: 16\nfeatures:\n  mel_bands: 40\n")
        cfg = load_config(path, environ={})
        assert cfg["cnn"]["fc_width"] == 16
        assert cfg.feature_config().mel_bands == 40

    def test_bad_field_override_surfaces_at_view_time(self, tmp_path):
        path = write_yaml(tmp_path, "features:\n  mel_bandz: 40\n")
        cfg = load_config(path, environ={})
        with pytest.raises(BadConfig, match="features"):
            cfg.feature_config()

    def test_scalar_where_mapping_expected(self, tmp_path):
        path = write_yaml(tmp_path, "train: fast\n")
        with pytest.raises(BadConfig):
            load_config(path, environ={})

    def test_missing_config_file(self, tmp_path):
        with pytest.raises(BadConfig):
            load_config(tmp_path / "nope.yaml", environ={})

    def test_unparseable_yaml(self, tmp_path):
        path = write_yaml(tmp_path, "a: [unclosed\n")
        with pytest.raises(BadConfig):
            load_config(path, environ={})

    def test_k_grid_must_increase(self, tmp_path):
        path = write_yaml(tmp_path, "evaluation:\n  k_grid: [5, 5, 10]\n")
        cfg = load_config(path, environ={})
        with pytest.raises(BadConfig):
            cfg.k_grid


class TestTypedViews:
    def test_feature_config_defaults(self):
        fcfg = load_config(environ={}).feature_config()
        assert fcfg.sample_rate == 44100
        assert fcfg.mel_bands == 60

    def test_cnn_config_translates_filter_counts(self, tmp_path):
        path = write_yaml(tmp_path, "cnn:\n  conv1_filters: 8\n  conv2_filters: 4\n")
        cfg = load_config(path, environ={})
        ccfg = cfg.cnn_config(num_classes=3)
        assert ccfg.num_classes == 3
        assert ccfg.conv1.filters == 8
        assert ccfg.conv1.kernel == (57, 6)
        assert ccfg.conv2.filters == 4
        assert ccfg.conv2.kernel == (1, 3)

    def test_train_config_inherits_pipeline_seed(self, tmp_path):
        path = write_yaml(tmp_path, "seed: 42\ntrain:\n  epochs: 3\n")
        tcfg = load_config(path, environ={}).train_config()
        assert tcfg.seed == 42
        assert tcfg.epochs == 3

    def test_train_seed_override_wins(self, tmp_path):
        path = write_yaml(tmp_path, "seed: 42\ntrain:\n  seed: 5\n")
        assert load_config(path, environ={}).train_config().seed == 5

    def test_evaluation_views(self):
        cfg = load_config(environ={})
        assert cfg.k_grid == (1, 5, 10, 20, 40)
        assert cfg.min_votes == 3
        assert cfg.k_per_class == 40
        assert len(cfg.evaluators) == 5


class TestHash:
    def test_stable_and_sensitive(self, tmp_path):
        a = load_config(environ={})
        b = load_config(environ={})
        assert a.hash() == b.hash()
        assert len(a.hash()) == 12
        c = load_config(write_yaml(tmp_path, "seed: 1\n"), environ={})
        assert c.hash() != a.hash()

    def test_insensitive_to_key_order(self):
        a = PipelineConfig(values={"x": 1, "y": 2})
        b = PipelineConfig(values={"y": 2, "x": 1})
        assert a.hash() == b.hash()
