"""Gateway configuration: defaults, file paths, and environment overrides.

Every field can be overridden through a TIBSA_-prefixed environment
variable; command-line flags take precedence over both.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping

from .errors import InputValidationError

ENV_PREFIX = "TIBSA_"

_ENV_FIELDS = {
    "REGISTER_PATH": ("register_path", str),
    "HOST": ("host", str),
    "PORT": ("port", int),
    "PROBABLE_THRESHOLD": ("probable_threshold", int),
    "DIVERGENCE_THRESHOLD": ("divergence_threshold", int),
    "MAX_DEPTH": ("max_depth", int),
    "DEFAULT_MODE": ("default_mode", str),
    "RUBRIC_PATH": ("rubric_path", str),
    "MATRIX_PATH": ("matrix_path", str),
}


@dataclass(frozen=True)
class GatewayConfig:
    register_path: str = "register.json"
    host: str = "127.0.0.1"
    port: int = 8400
    probable_threshold: int = 3
    divergence_threshold: int = 3
    max_depth: int = 8
    default_mode: str = "full"
    rubric_path: str | None = None
    matrix_path: str | None = None

    def validate(self) -> None:
        problems: list[str] = []
        if not 1 <= self.probable_threshold <= 5:
            problems.append("probable_threshold must be in 1..5")
        if not 0 <= self.divergence_threshold <= 4:
            problems.append("divergence_threshold must be in 0..4")
        if self.max_depth < 1:
            problems.append("max_depth must be >= 1")
        if self.default_mode not in ("full", "rapid"):
            problems.append("default_mode must be 'full' or 'rapid'")
        if not 1 <= self.port <= 65535:
            problems.append("port must be in 1..65535")
        for label, path in (("rubric_path", self.rubric_path), ("matrix_path", self.matrix_path)):
            if path is not None and not Path(path).exists():
                problems.append(f"{label} {path!r} does not exist")
        if problems:
            raise InputValidationError(problems)

    def to_dict(self) -> dict[str, Any]:
        return {
            "register_path": self.register_path,
            "host": self.host,
            "port": self.port,
            "probable_threshold": self.probable_threshold,
            "divergence_threshold": self.divergence_threshold,
            "max_depth": self.max_depth,
            "default_mode": self.default_mode,
            "rubric_path": self.rubric_path,
            "matrix_path": self.matrix_path,
        }


def config_from_env(environ: Mapping[str, str] | None = None) -> GatewayConfig:
    """Defaults overlaid with any TIBSA_* variables present."""
    environ = os.environ if environ is None else environ
    config = GatewayConfig()
    updates: dict[str, Any] = {}
    for suffix, (field_name, caster) in _ENV_FIELDS.items():
        raw = environ.get(ENV_PREFIX + suffix)
        if raw is None or raw == "":
            continue
        try:
            updates[field_name] = caster(raw)
        except ValueError:
            raise InputValidationError(
                [f"{ENV_PREFIX}{suffix}={raw!r} is not a valid {caster.__name__}"]
            ) from None
    if updates:
        config = replace(config, **updates)
    config.validate()
    return config
