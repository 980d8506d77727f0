"""Application configuration: flat key=value file with environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    pass


_KEYS = ("data_dir", "rules_dir", "plans_dir", "listen_address", "cors_origins")
_ENV_PREFIX = "STUDYFLOW_"


@dataclass(frozen=True, slots=True)
class AppConfig:
    data_dir: Path
    rules_dir: Path
    plans_dir: Path
    listen_address: str = "127.0.0.1:8080"
    cors_origins: tuple[str, ...] = field(default_factory=tuple)

    @property
    def host(self) -> str:
        host, _, _ = self.listen_address.rpartition(":")
        return host

    @property
    def port(self) -> int:
        _, _, port = self.listen_address.rpartition(":")
        if not port.isdigit():
            raise ConfigError(f"listen_address {self.listen_address!r} has no numeric port")
        return int(port)

    def validate_paths(self) -> None:
        for name in ("data_dir", "rules_dir", "plans_dir"):
            path: Path = getattr(self, name)
            if not path.is_dir():
                raise ConfigError(f"{name} does not exist or is not a directory: {path}")


def _parse_file(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{line_no}: expected key=value, got {raw!r}")
        key = key.strip()
        if key not in _KEYS:
            raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def load_config(path: str | Path | None = None, env: dict[str, str] | None = None) -> AppConfig:
    """Read configuration; environment variables override file entries."""
    env = os.environ if env is None else env
    values: dict[str, str] = {}
    base = Path(".")
    if path is not None:
        file_path = Path(path)
        if not file_path.is_file():
            raise ConfigError(f"config file not found: {file_path}")
        values.update(_parse_file(file_path))
        base = file_path.parent
    for key in _KEYS:
        override = env.get(_ENV_PREFIX + key.upper())
        if override is not None:
            values[key] = override
    missing = [key for key in ("data_dir", "rules_dir", "plans_dir") if key not in values]
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")
    origins = tuple(
        origin.strip()
        for origin in values.get("cors_origins", "").split(",")
        if origin.strip()
    )
    return AppConfig(
        data_dir=(base / values["data_dir"]).resolve(),
        rules_dir=(base / values["rules_dir"]).resolve(),
        plans_dir=(base / values["plans_dir"]).resolve(),
        listen_address=values.get("listen_address", "127.0.0.1:8080"),
        cors_origins=origins,
    )
