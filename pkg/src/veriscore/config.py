"""Run configuration: defaults, TOML file, environment, explicit overrides.

Precedence, lowest to highest: built-in defaults, the TOML file, then
VERISCORE_SECTION__KEY environment variables, then --set overrides, then
dedicated CLI flags. Unknown sections or keys are rejected rather than
ignored so a typo cannot silently fall back to a default.

The seed has no default on purpose. Every run must state one; a
wall-clock fallback would make "same command, same bytes" impossible to
promise.

The config hash covers the resolved configuration except run.output_dir
and run.threads: where artifacts land and how many threads run must not
change what gets computed.
"""

from __future__ import annotations

import hashlib
import json
import os

import tomli

ENV_PREFIX = "VERISCORE_"

DEFAULTS: dict = {
    "run": {
        "seed": None,
        "output_dir": "out",
        # reserved; every kernel in this package is single-threaded
        "threads": 1,
    },
    "data": {
        "profiles": "data/profiles.jsonl",
        "tweets": "data/tweets.jsonl",
        "timeseries": "data/timeseries.jsonl",
        "external": "data/external.jsonl",
        "window_start": "",
        "window_end": "",
        "snapshot": "",
    },
    "features": {
        "min_doc_freq": 5,
        "test_fraction": 0.2,
    },
    "topics": {
        "candidates": [2, 10, 50],
        "n_sweeps": 200,
        "alpha_mode": "inverse",
        "beta": 0.01,
        "fold_in_sweeps": 50,
    },
    "span": {
        "gamma": 1.0,
        "beta": 1e-4,
        "n_sweeps": 100,
    },
    "rebalance": {
        "method": "adasyn",
        "k": 5,
        "beta": 1.0,
    },
    "train": {
        "n_rounds": 200,
        "max_depth": 6,
        "learning_rate": 0.2,
        "l2": 1.0,
        "gamma": 0.0,
        "min_child_weight": 1.0,
        "subsample": 1.0,
        "colsample": 1.0,
        "early_stopping_rounds": 20,
        "validation_fraction": 0.2,
        "logistic_l2": 1e-4,
        "logistic_learning_rate": 0.5,
        "logistic_max_epochs": 5000,
    },
    "evaluate": {
        "topic_model_depth": 5,
        "topic_model_learning_rate": 0.3,
    },
    "importance": {
        "n_repeats": 100,
        "n_rounds": 50,
        "max_depth": 4,
    },
    "selection": {
        "n_iter": 100,
        "alpha": 0.05,
        "n_rounds": 50,
        "max_depth": 4,
    },
    "cluster": {
        "top_features": 30,
        "k_min": 2,
        "k_max": 10,
        "n_seeds": 10,
        "unit_norm": False,
    },
}

HASH_EXCLUDE = {("run", "output_dir"), ("run", "threads")}


class ConfigError(ValueError):
    """Unusable configuration: unknown key, bad type, or missing seed."""


def _parse_scalar(raw: str):
    """Interpret an override string as a TOML value, else keep the string."""
    try:
        return tomli.loads(f"v = {raw}")["v"]
    except tomli.TOMLDecodeError:
        return raw


def _check_and_set(cfg: dict, section: str, key: str, value, origin: str) -> None:
    if section not in DEFAULTS:
        raise ConfigError(f"unknown config section [{section}] (from {origin})")
    if key not in DEFAULTS[section]:
        raise ConfigError(f"unknown config key {section}.{key} (from {origin})")
    default = DEFAULTS[section][key]
    if default is not None and not isinstance(default, str):
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(f"{section}.{key} must be a boolean (from {origin})")
        elif isinstance(default, int):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{section}.{key} must be an integer (from {origin})")
        elif isinstance(default, float):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{section}.{key} must be a number (from {origin})")
            value = float(value)
        elif isinstance(default, list):
            if not isinstance(value, list):
                raise ConfigError(f"{section}.{key} must be a list (from {origin})")
    if section == "run" and key == "seed":
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise ConfigError(f"run.seed must be a non-negative integer (from {origin})")
    cfg[section][key] = value


def load_config(
    config_path: str | None = None,
    env: dict | None = None,
    overrides: list[str] | None = None,
    seed: int | None = None,
    output_dir: str | None = None,
) -> dict:
    """Resolve the full configuration or raise ConfigError."""
    cfg = {section: dict(values) for section, values in DEFAULTS.items()}

    if config_path is not None:
        try:
            with open(config_path, "rb") as fh:
                file_cfg = tomli.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {config_path}")
        except tomli.TOMLDecodeError as exc:
            raise ConfigError(f"config file is not valid TOML: {exc}")
        for section, values in file_cfg.items():
            if not isinstance(values, dict):
                raise ConfigError(f"top-level config entries must be sections, got {section}")
            for key, value in values.items():
                _check_and_set(cfg, section, key, value, config_path)

    env = env if env is not None else dict(os.environ)
    for name in sorted(env):
        if not name.startswith(ENV_PREFIX):
            continue
        rest = name[len(ENV_PREFIX):]
        if "__" not in rest:
            continue
        section, key = rest.split("__", 1)
        _check_and_set(
            cfg, section.lower(), key.lower(), _parse_scalar(env[name]), f"env {name}"
        )

    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        dotted, raw = item.split("=", 1)
        if "." not in dotted:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        section, key = dotted.split(".", 1)
        _check_and_set(cfg, section, key, _parse_scalar(raw), f"--set {item}")

    if seed is not None:
        _check_and_set(cfg, "run", "seed", seed, "--seed")
    if output_dir is not None:
        _check_and_set(cfg, "run", "output_dir", output_dir, "--output-dir")

    if cfg["run"]["seed"] is None:
        raise ConfigError("run.seed is required; pass --seed or set it in the config")
    return cfg


def config_hash(cfg: dict) -> str:
    """sha256 over the canonical JSON of the hash-relevant configuration."""
    reduced = {
        section: {
            key: value
            for key, value in values.items()
            if (section, key) not in HASH_EXCLUDE
        }
        for section, values in cfg.items()
    }
    blob = json.dumps(reduced, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
