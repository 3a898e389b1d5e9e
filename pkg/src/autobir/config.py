"""Runtime configuration.

Settings load from an optional JSON file, then AUTOBIR_ environment
variables override individual fields. Unknown keys in either source are
rejected rather than silently ignored.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError

ENV_PREFIX = "AUTOBIR_"


@dataclass(frozen=True)
class GenerationSettings:
    max_iterations: int = 3
    history_limit: int = 10
    max_classes: int = 12
    max_path_len: int = 4
    seed_k: int = 3
    min_similarity: float = 0.15


@dataclass(frozen=True)
class EmbedderSettings:
    kind: str = "hash"  # hash | remote
    dimension: int = 256
    endpoint: str | None = None


@dataclass(frozen=True)
class ProviderSettings:
    kind: str = "scripted"  # scripted | http
    endpoint: str | None = None
    script_path: str | None = None


@dataclass(frozen=True)
class ServiceSettings:
    host: str = "127.0.0.1"
    port: int = 8080


@dataclass(frozen=True)
class AppConfig:
    catalog_root: str = "./catalog"
    tenant: str = "default"
    generation: GenerationSettings = field(default_factory=GenerationSettings)
    embedder: EmbedderSettings = field(default_factory=EmbedderSettings)
    provider: ProviderSettings = field(default_factory=ProviderSettings)
    service: ServiceSettings = field(default_factory=ServiceSettings)


_SECTIONS = {
    "generation": GenerationSettings,
    "embedder": EmbedderSettings,
    "provider": ProviderSettings,
    "service": ServiceSettings,
}


def _coerce(value: str, target_type) -> object:
    if target_type is int:
        return int(value)
    if target_type is float:
        return float(value)
    return value


def _apply_section(settings, updates: dict, section: str):
    known = settings.__dataclass_fields__
    for key, value in updates.items():
        if key not in known:
            raise ConfigError(f"unknown config key {section}.{key}")
    return replace(settings, **updates)


def load_config(
    path: str | Path | None = None, env: dict[str, str] | None = None
) -> AppConfig:
    config = AppConfig()
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        top: dict = {}
        for key, value in raw.items():
            if key in _SECTIONS:
                if not isinstance(value, dict):
                    raise ConfigError(f"config section {key} must be an object")
                section = _apply_section(getattr(config, key), value, key)
                top[key] = section
            elif key in ("catalog_root", "tenant"):
                top[key] = value
            else:
                raise ConfigError(f"unknown config key {key}")
        config = replace(config, **top)

    env = os.environ if env is None else env
    config = _apply_env(config, env)
    return config


# env var name -> (section or None, field)
_ENV_FIELDS = {
    "CATALOG_ROOT": (None, "catalog_root"),
    "TENANT": (None, "tenant"),
    "MAX_ITERATIONS": ("generation", "max_iterations"),
    "HISTORY_LIMIT": ("generation", "history_limit"),
    "MAX_CLASSES": ("generation", "max_classes"),
    "MAX_PATH_LEN": ("generation", "max_path_len"),
    "SEED_K": ("generation", "seed_k"),
    "MIN_SIMILARITY": ("generation", "min_similarity"),
    "EMBEDDER_KIND": ("embedder", "kind"),
    "EMBEDDER_DIMENSION": ("embedder", "dimension"),
    "EMBEDDER_ENDPOINT": ("embedder", "endpoint"),
    "PROVIDER_KIND": ("provider", "kind"),
    "PROVIDER_ENDPOINT": ("provider", "endpoint"),
    "SCRIPT_PATH": ("provider", "script_path"),
    "HOST": ("service", "host"),
    "PORT": ("service", "port"),
}


def _apply_env(config: AppConfig, env: dict[str, str]) -> AppConfig:
    for name, value in sorted(env.items()):
        if not name.startswith(ENV_PREFIX):
            continue
        suffix = name[len(ENV_PREFIX):]
        if suffix not in _ENV_FIELDS:
            raise ConfigError(f"unknown environment variable {name}")
        section, fname = _ENV_FIELDS[suffix]
        if section is None:
            config = replace(config, **{fname: value})
            continue
        settings = getattr(config, section)
        ftype = type(getattr(settings, fname)) if getattr(settings, fname) is not None else str
        try:
            coerced = _coerce(value, ftype)
        except ValueError as exc:
            raise ConfigError(f"cannot parse {name}={value!r}: {exc}") from exc
        config = replace(config, **{section: replace(settings, **{fname: coerced})})
    return config


def build_embedder(settings: EmbedderSettings):
    from .embedding import DeterministicHashEmbedder, RemoteEmbedder

    if settings.kind == "hash":
        return DeterministicHashEmbedder(dimension=settings.dimension)
    if settings.kind == "remote":
        if not settings.endpoint:
            raise ConfigError("remote embedder requires an endpoint")
        return RemoteEmbedder(settings.endpoint, dimension=settings.dimension)
    raise ConfigError(f"unknown embedder kind {settings.kind!r}")


def build_provider(settings: ProviderSettings):
    from .provider import HttpProvider, ScriptedProvider, load_script

    if settings.kind == "scripted":
        if settings.script_path:
            return load_script(settings.script_path)
        return ScriptedProvider()
    if settings.kind == "http":
        if not settings.endpoint:
            raise ConfigError("http provider requires an endpoint")
        return HttpProvider(settings.endpoint)
    raise ConfigError(f"unknown provider kind {settings.kind!r}")
