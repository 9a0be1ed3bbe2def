"""Configuration loading: defaults, YAML files, environment variables,
explicit overrides, and the reproducibility fingerprint."""

from __future__ import annotations

import pytest

from docqa.config import (
    ENV_CONFIG,
    ENV_DATA_DIR,
    ENV_PORT,
    EngineConfig,
    load_config,
)
from docqa.hnsw import HnswParams


class TestDefaults:
    def test_core_defaults(self):
        config = EngineConfig()
        assert config.data_dir == "./data"
        assert config.embed.mode == "hashed"
        assert config.embed.dim == 256
        assert config.generate.mode == "echo"
        assert config.rerank.mode == "lexical"
        assert config.service.port == 8080
        assert config.eval.ks == [1, 3, 5, 10, 20]

    def test_chunking_defaults_match_pipeline(self):
        section = EngineConfig().chunking
        assert section.mode == "semantic"
        assert section.method == "standard_deviation"
        assert section.amount == 1.0
        assert (section.chunk_size, section.overlap) == (750, 200)

    def test_retrieval_defaults(self):
        retrieval = EngineConfig().retrieval
        assert retrieval.k_per_list == 10
        assert retrieval.rrf_k == 60.0
        assert retrieval.fuse_top_p == 0.75
        assert retrieval.rerank_top_p == 0.9
        assert retrieval.max_context_chunks == 12
        assert retrieval.include_original_query is False

    def test_generation_defaults(self):
        generation = EngineConfig().generation
        assert generation.sentinel == "not enough context"
        assert generation.temperature == 0.1
        assert generation.context_window == 32000
        assert generation.history_turns == 5

    def test_index_section_converts_to_params(self):
        assert EngineConfig().index.to_params() == HnswParams()

    def test_chunking_section_converts_to_settings(self):
        settings = EngineConfig().chunking.to_settings()
        assert settings.mode == "semantic"
        assert settings.semantic.method == "standard_deviation"
        assert settings.recursive.chunk_size == 750


class TestYamlLoading:
    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "engine.yaml"
        path.write_text(
            "data_dir: /tmp/store\n"
            "chunking:\n  mode: recursive\n  chunk_size: 500\n"
            "service:\n  port: 9000\n",
            encoding="utf-8",
        )
        config = load_config(path)
        assert config.data_dir == "/tmp/store"
        assert config.chunking.mode == "recursive"
        assert config.chunking.chunk_size == 500
        assert config.service.port == 9000
        assert config.embed.dim == 256  # untouched default

    def test_unknown_top_level_key_rejected(self, tmp_path):
        path = tmp_path / "engine.yaml"
        path.write_text("mystery: 1\n", encoding="utf-8")
        with pytest.raises(ValueError, match="unknown config key"):
            load_config(path)

    def test_unknown_section_key_rejected(self, tmp_path):
        path = tmp_path / "engine.yaml"
        path.write_text("embed:\n  flavor: vanilla\n", encoding="utf-8")
        with pytest.raises(ValueError, match="embed.flavor"):
            load_config(path)

    def test_non_mapping_section_rejected(self, tmp_path):
        path = tmp_path / "engine.yaml"
        path.write_text("embed: hashed\n", encoding="utf-8")
        with pytest.raises(ValueError, match="must be a mapping"):
            load_config(path)

    def test_empty_file_gives_defaults(self, tmp_path):
        path = tmp_path / "engine.yaml"
        path.write_text("", encoding="utf-8")
        assert load_config(path).service.port == 8080


class TestEnvironment:
    def test_config_path_from_env(self, tmp_path, monkeypatch):
        path = tmp_path / "engine.yaml"
        path.write_text("summary_max_chars: 500\n", encoding="utf-8")
        monkeypatch.setenv(ENV_CONFIG, str(path))
        assert load_config().summary_max_chars == 500

    def test_data_dir_and_port_from_env(self, monkeypatch):
        monkeypatch.setenv(ENV_DATA_DIR, "/tmp/envdata")
        monkeypatch.setenv(ENV_PORT, "9100")
        config = load_config()
        assert config.data_dir == "/tmp/envdata"
        assert config.service.port == 9100

    def test_env_beats_file(self, tmp_path, monkeypatch):
        path = tmp_path / "engine.yaml"
        path.write_text("data_dir: /tmp/filedata\n", encoding="utf-8")
        monkeypatch.setenv(ENV_DATA_DIR, "/tmp/envdata")
        assert load_config(path).data_dir == "/tmp/envdata"


class TestOverrides:
    def test_top_level_override(self):
        assert load_config(None, {"data_dir": "/x"}).data_dir == "/x"

    def test_dotted_override(self):
        config = load_config(None, {"service.port": 9300, "chunking.mode": "recursive"})
        assert config.service.port == 9300
        assert config.chunking.mode == "recursive"

    def test_none_values_skipped(self):
        assert load_config(None, {"data_dir": None}).data_dir == "./data"

    def test_overrides_beat_env(self, monkeypatch):
        monkeypatch.setenv(ENV_PORT, "9100")
        assert load_config(None, {"service.port": 9400}).service.port == 9400

    def test_unknown_override_rejected(self):
        with pytest.raises(ValueError):
            load_config(None, {"mystery": 1})
        with pytest.raises(ValueError):
            load_config(None, {"mystery.key": 1})
        with pytest.raises(ValueError):
            load_config(None, {"service.mystery": 1})


class TestFingerprint:
    def test_stable_for_equal_configs(self):
        assert EngineConfig().fingerprint() == EngineConfig().fingerprint()
        assert len(EngineConfig().fingerprint()) == 16

    def test_sensitive_to_any_field(self):
        base = EngineConfig().fingerprint()
        changed = load_config(None, {"chunking.amount": 2.0}).fingerprint()
        assert changed != base

    def test_insensitive_to_construction_path(self, tmp_path):
        path = tmp_path / "engine.yaml"
        path.write_text("service:\n  port: 8080\n", encoding="utf-8")
        assert load_config(path).fingerprint() == EngineConfig().fingerprint()
