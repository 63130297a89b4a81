"""Service configuration: dataclass plus JSON / flat-TOML file loading.

The config file may be JSON (an object of the fields below) or a flat TOML
document — ``key = value`` pairs with quoted strings, integers, floats and
``true``/``false`` booleans.  Section headers like ``[service]`` are accepted
and ignored; keys live in one flat namespace.  Arrays and nested tables are
not part of the accepted subset.
"""

from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional


class ConfigError(Exception):
    """Raised for unreadable or malformed configuration files."""


@dataclass(frozen=True)
class ServiceConfig:
    """Everything the review service needs to come up.

    Paths are optional so the app can also be assembled fully in-process
    (tests inject a corpus/model directly); ``decisions_path=None`` keeps the
    decision store in memory only.
    """

    host: str = "127.0.0.1"
    port: int = 8080
    corpus_path: Optional[str] = None
    model_path: Optional[str] = None
    decisions_path: Optional[str] = None
    retrain_min_decisions: int = 1
    retrain_folds: int = 5
    retrain_seed: int = 7
    severity: str = "prob"
    api_token: Optional[str] = None
    snapshot_every: int = 100

    def __post_init__(self) -> None:
        if self.port < 0 or self.port > 65535:
            raise ConfigError(f"port out of range: {self.port}")
        if self.retrain_min_decisions < 1:
            raise ConfigError("retrain_min_decisions must be >= 1")
        if self.retrain_folds < 2:
            raise ConfigError("retrain_folds must be >= 2")
        if self.severity not in ("prob", "prob_times_count"):
            raise ConfigError(f"unknown severity mode: {self.severity!r}")
        if self.snapshot_every < 1:
            raise ConfigError("snapshot_every must be >= 1")


_FIELDS = {f.name: f.type for f in dataclasses.fields(ServiceConfig)}

_TOML_LINE = re.compile(r"^(?P<key>[A-Za-z_][A-Za-z0-9_]*)\s*=\s*(?P<value>.+)$")


def _strip_comment(line: str) -> str:
    """Drop a trailing ``#`` comment that is not inside a quoted string."""
    in_quote: Optional[str] = None
    for i, ch in enumerate(line):
        if in_quote:
            if ch == in_quote:
                in_quote = None
        elif ch in "\"'":
            in_quote = ch
        elif ch == "#":
            return line[:i]
    return line


def _parse_toml_value(raw: str, lineno: int):
    raw = raw.strip()
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "\"'":
        return raw[1:-1]
    if raw in ("true", "false"):
        return raw == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(
            f"line {lineno}: cannot parse value {raw!r} "
            "(expected quoted string, integer, float, or true/false)"
        ) from None


def _parse_flat_toml(text: str) -> dict:
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(line).strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            continue  # section headers carry no meaning in the flat subset
        match = _TOML_LINE.match(line)
        if match is None:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key = match.group("key")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_toml_value(match.group("value"), lineno)
    return values


def load_config(path) -> ServiceConfig:
    """Read a :class:`ServiceConfig` from a JSON or flat-TOML file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc

    if path.suffix == ".json" or text.lstrip().startswith("{"):
        try:
            values = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(values, dict):
            raise ConfigError(f"{path}: top-level JSON value must be an object")
    else:
        values = _parse_flat_toml(text)

    unknown = sorted(set(values) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {', '.join(unknown)}")
    try:
        return ServiceConfig(**values)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
