"""Scenario files: JSON documents describing workload, thresholds and platforms.

Every field is required except ``flask.workers`` (defaults to 1). Unknown
keys are rejected. Errors carry the dotted JSON path of the offending value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Callable

from .backends import DockerModel, FlaskModel, ServerlessModel
from .placer import Thresholds
from .rng import MASK64
from .workload import BimodalSize, ConstantSize, Phase, UniformSize


class ConfigError(ValueError):
    def __init__(self, path: str, message: str) -> None:
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    seed: int
    window_s: float
    thresholds: Thresholds
    phases: tuple[Phase, ...]
    flask: FlaskModel
    docker: DockerModel
    serverless: ServerlessModel

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "window_s": self.window_s,
            "thresholds": self.thresholds.to_dict(),
            "phases": [p.to_dict() for p in self.phases],
            "flask": self.flask.to_dict(),
            "docker": self.docker.to_dict(),
            "serverless": self.serverless.to_dict(),
        }

    def replace_seed(self, seed: int) -> "ScenarioConfig":
        if not 0 <= seed <= MASK64:
            raise ConfigError("seed", "must be a 64-bit unsigned integer")
        return ScenarioConfig(**{**self.__dict__, "seed": seed})


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {type(value).__name__}")
    return float(value)


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {type(value).__name__}")
    return value


def _string(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(path, f"expected a string, got {type(value).__name__}")
    return value


def _object(doc: Any, path: str, fields: dict[str, Callable], optional: dict[str, Any] = {}) -> dict:
    """Check keys of a JSON object and coerce each field."""
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected an object")
    unknown = sorted(set(doc) - set(fields))
    if unknown:
        raise ConfigError(_join(path, unknown[0]), "unknown key")
    out = {}
    for key, conv in fields.items():
        if key not in doc:
            if key in optional:
                out[key] = optional[key]
                continue
            raise ConfigError(_join(path, key), "missing field")
        out[key] = conv(doc[key], _join(path, key))
    return out


def _build(cls, kwargs: dict, path: str):
    """Construct a model, mapping its invariant errors onto a JSON path."""
    try:
        return cls(**kwargs)
    except ValueError as exc:
        msg = str(exc)
        field = next((k for k in kwargs if msg.startswith(k) or f" {k} " in f" {msg} "), None)
        raise ConfigError(_join(path, field) if field else path, msg) from None


def _size_dist(doc: Any, path: str):
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected an object")
    kind = _string(doc.get("kind"), _join(path, "kind")) if "kind" in doc else None
    if kind is None:
        raise ConfigError(_join(path, "kind"), "missing field")
    if kind == "constant":
        f = _object(doc, path, {"kind": _string, "bytes": _integer})
        return _build(ConstantSize, {"bytes": f["bytes"]}, path)
    if kind == "uniform":
        f = _object(doc, path, {"kind": _string, "min_bytes": _integer, "max_bytes": _integer})
        del f["kind"]
        return _build(UniformSize, f, path)
    if kind == "bimodal":
        f = _object(
            doc,
            path,
            {"kind": _string, "small_bytes": _integer, "large_bytes": _integer, "large_fraction": _number},
        )
        del f["kind"]
        return _build(BimodalSize, f, path)
    raise ConfigError(_join(path, "kind"), f"unknown size distribution {kind!r}")


def _phase(doc: Any, path: str) -> Phase:
    f = _object(
        doc,
        path,
        {"duration": _number, "start_rate": _number, "end_rate": _number, "size_dist": _size_dist},
    )
    for key in ("start_rate", "end_rate"):
        if f[key] < 0:
            raise ConfigError(_join(path, key), "must be >= 0")
    if not f["duration"] > 0:
        raise ConfigError(_join(path, "duration"), "must be > 0")
    return Phase(**f)


def _phases(doc: Any, path: str) -> tuple[Phase, ...]:
    if not isinstance(doc, list):
        raise ConfigError(path, "expected an array")
    if not doc:
        raise ConfigError(path, "phases must be non-empty")
    return tuple(_phase(p, f"{path}[{i}]") for i, p in enumerate(doc))


def _seed(value: Any, path: str) -> int:
    seed = _integer(value, path)
    if not 0 <= seed <= MASK64:
        raise ConfigError(path, "must be a 64-bit unsigned integer")
    return seed


def _positive(value: Any, path: str) -> float:
    v = _number(value, path)
    if not v > 0:
        raise ConfigError(path, "must be > 0")
    return v


def parse_scenario(doc: Any) -> ScenarioConfig:
    f = _object(
        doc,
        "",
        {
            "name": _string,
            "seed": _seed,
            "window_s": _positive,
            "thresholds": lambda d, p: _object(
                d, p, {"frequency_threshold": _positive, "size_threshold": _positive}
            ),
            "phases": _phases,
            "flask": lambda d, p: _object(
                d,
                p,
                {
                    "workers": _integer,
                    "base_service": _number,
                    "per_byte": _number,
                    "timeout": _number,
                    "max_queue": _integer,
                },
                optional={"workers": 1},
            ),
            "docker": lambda d, p: _object(
                d,
                p,
                {
                    "containers": _integer,
                    "cold_start": _number,
                    "keep_warm": _number,
                    "base_service": _number,
                    "per_byte": _number,
                    "timeout": _number,
                    "max_queue": _integer,
                },
            ),
            "serverless": lambda d, p: _object(
                d,
                p,
                {
                    "concurrency_limit": _integer,
                    "cold_start": _number,
                    "keep_warm": _number,
                    "memory_mb": _number,
                    "ref_memory_mb": _number,
                    "base_service": _number,
                    "per_byte": _number,
                    "timeout": _number,
                },
            ),
        },
    )
    return ScenarioConfig(
        name=f["name"],
        seed=f["seed"],
        window_s=f["window_s"],
        thresholds=Thresholds(**f["thresholds"]),
        phases=f["phases"],
        flask=_build(FlaskModel, f["flask"], "flask"),
        docker=_build(DockerModel, f["docker"], "docker"),
        serverless=_build(ServerlessModel, f["serverless"], "serverless"),
    )


def load_scenario(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"{path}: invalid JSON ({exc})") from None
    return parse_scenario(doc)


def dump_scenario(config: ScenarioConfig) -> str:
    return json.dumps(config.to_dict(), indent=2) + "\n"


BUNDLED = ("flask_knee", "serverless_band", "mixed_dynamic")


def bundled_scenario(name: str) -> ScenarioConfig:
    text = resources.files("hybridplace.scenarios").joinpath(f"{name}.json").read_text()
    return parse_scenario(json.loads(text))
