"""Engine configuration: YAML file loading, environment overrides, and a
reproducibility fingerprint.

Precedence, lowest to highest: built-in defaults, config file (path given
explicitly or via ENGINE_CONFIG), environment overrides (ENGINE_DATA_DIR,
ENGINE_PORT), then explicit keyword overrides from CLI flags.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from .chunking import RecursiveChunkConfig, SemanticChunkConfig
from .generation import GenerationConfig
from .hnsw import HnswParams
from .ingest import ChunkerSettings
from .retrieval import RetrievalConfig

ENV_CONFIG = "ENGINE_CONFIG"
ENV_DATA_DIR = "ENGINE_DATA_DIR"
ENV_PORT = "ENGINE_PORT"


@dataclass
class EmbedConfig:
    mode: str = "hashed"  # hashed | http
    base_url: str = "http://127.0.0.1:11434"
    model: str = ""
    dim: int = 256
    batch_limit: int = 64


@dataclass
class GenerateConfig:
    mode: str = "echo"  # echo | http
    base_url: str = "http://127.0.0.1:11434"
    model: str = ""


@dataclass
class RerankConfig:
    mode: str = "lexical"  # lexical | http
    base_url: str = ""
    logistic_map: bool = True


@dataclass
class ChunkingSection:
    mode: str = "semantic"  # semantic | recursive
    method: str = "standard_deviation"
    amount: float = 1.0
    buffer_size: int = 1
    chunk_size: int = 750
    overlap: int = 200

    def to_settings(self) -> ChunkerSettings:
        return ChunkerSettings(
            mode=self.mode,
            semantic=SemanticChunkConfig(
                method=self.method, amount=self.amount, buffer_size=self.buffer_size
            ),
            recursive=RecursiveChunkConfig(chunk_size=self.chunk_size, overlap=self.overlap),
        )


@dataclass
class IndexSection:
    M: int = 16
    ef_construction: int = 200
    ef_search: int = 100
    rng_seed: int = 0x5EED1E55

    def to_params(self) -> HnswParams:
        return HnswParams(
            M=self.M,
            ef_construction=self.ef_construction,
            ef_search=self.ef_search,
            rng_seed=self.rng_seed,
        )


@dataclass
class ServiceSection:
    host: str = "127.0.0.1"
    port: int = 8080
    cors_origins: list[str] = field(default_factory=list)


@dataclass
class EvalSection:
    ks: list[int] = field(default_factory=lambda: [1, 3, 5, 10, 20])


@dataclass
class EngineConfig:
    data_dir: str = "./data"
    summary_max_chars: int = 2000
    embed: EmbedConfig = field(default_factory=EmbedConfig)
    generate: GenerateConfig = field(default_factory=GenerateConfig)
    rerank: RerankConfig = field(default_factory=RerankConfig)
    chunking: ChunkingSection = field(default_factory=ChunkingSection)
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    index: IndexSection = field(default_factory=IndexSection)
    service: ServiceSection = field(default_factory=ServiceSection)
    eval: EvalSection = field(default_factory=EvalSection)

    def fingerprint(self) -> str:
        canonical = json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


_SECTIONS = {
    "embed": EmbedConfig,
    "generate": GenerateConfig,
    "rerank": RerankConfig,
    "chunking": ChunkingSection,
    "retrieval": RetrievalConfig,
    "generation": GenerationConfig,
    "index": IndexSection,
    "service": ServiceSection,
    "eval": EvalSection,
}


def _apply_section(target, values: dict, section: str) -> None:
    for key, value in values.items():
        if not hasattr(target, key):
            raise ValueError(f"unknown config key: {section}.{key}")
        setattr(target, key, value)


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> EngineConfig:
    """Build an EngineConfig from defaults, an optional YAML file, the
    ENGINE_* environment variables, and explicit overrides, in that order."""
    config = EngineConfig()

    if path is None:
        path = os.environ.get(ENV_CONFIG) or None
    if path is not None:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        if not isinstance(raw, dict):
            raise ValueError(f"config file must hold a mapping: {path}")
        for key, value in raw.items():
            if key in _SECTIONS:
                if not isinstance(value, dict):
                    raise ValueError(f"config section {key} must be a mapping")
                _apply_section(getattr(config, key), value, key)
            elif hasattr(config, key):
                setattr(config, key, value)
            else:
                raise ValueError(f"unknown config key: {key}")

    env_data_dir = os.environ.get(ENV_DATA_DIR)
    if env_data_dir:
        config.data_dir = env_data_dir
    env_port = os.environ.get(ENV_PORT)
    if env_port:
        config.service.port = int(env_port)

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if "." in key:
            section, attr = key.split(".", 1)
            _apply_section_value(config, section, attr, value)
        else:
            if not hasattr(config, key):
                raise ValueError(f"unknown config key: {key}")
            setattr(config, key, value)
    return config


def _apply_section_value(config: EngineConfig, section: str, attr: str, value) -> None:
    if section not in _SECTIONS:
        raise ValueError(f"unknown config section: {section}")
    target = getattr(config, section)
    if not hasattr(target, attr):
        raise ValueError(f"unknown config key: {section}.{attr}")
    setattr(target, attr, value)
