"""Defaults and the key-value configuration file shared by the CLI commands.

The capability numbers are documentation examples (urban-plausible), not part
of any formula; every command accepts a config file and flag overrides.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .core import EgoCapabilities, WorldAssumptions

DEFAULT_CAPABILITIES = EgoCapabilities(
    reaction_time=1.0,
    guaranteed_brake=4.0,
    guaranteed_lateral_brake=4.0,
    guaranteed_accel=1.5,
)
DEFAULT_WORLD = WorldAssumptions(max_accel=3.0)
DEFAULT_THRESHOLD = 0.005

_FLOAT_KEYS = ("reaction_time", "guaranteed_brake", "guaranteed_lateral_brake",
               "guaranteed_accel", "max_accel", "threshold", "tangential_angle_deg")
_BOOL_KEYS = ("enable_rtt_prime",)


@dataclass(frozen=True)
class Settings:
    """Resolved run settings: capability model plus filter/test knobs."""

    caps: EgoCapabilities = DEFAULT_CAPABILITIES
    world: WorldAssumptions = DEFAULT_WORLD
    threshold: float = DEFAULT_THRESHOLD
    tangential_angle_deg: float = 45.0
    enable_rtt_prime: bool = False


def parse_config(path: str | Path) -> dict:
    """Read ``key = value`` lines; '#' starts a comment, blank lines ignored."""
    values: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in _FLOAT_KEYS:
            values[key] = float(value)
        elif key in _BOOL_KEYS:
            if value.lower() not in ("0", "1", "true", "false"):
                raise ValueError(f"{path}:{lineno}: {key} must be 0/1/true/false")
            values[key] = value.lower() in ("1", "true")
        else:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
    return values


def resolve_settings(config: dict | None = None, overrides: dict | None = None) -> Settings:
    """Layer defaults < config file < explicit overrides (None means unset)."""
    merged = dict(config or {})
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    unknown = set(merged) - set(_FLOAT_KEYS) - set(_BOOL_KEYS)
    if unknown:
        raise ValueError(f"unknown settings: {sorted(unknown)}")
    caps = EgoCapabilities(
        reaction_time=merged.get("reaction_time", DEFAULT_CAPABILITIES.reaction_time),
        guaranteed_brake=merged.get("guaranteed_brake", DEFAULT_CAPABILITIES.guaranteed_brake),
        guaranteed_lateral_brake=merged.get(
            "guaranteed_lateral_brake", DEFAULT_CAPABILITIES.guaranteed_lateral_brake),
        guaranteed_accel=merged.get("guaranteed_accel", DEFAULT_CAPABILITIES.guaranteed_accel),
    )
    world = WorldAssumptions(max_accel=merged.get("max_accel", DEFAULT_WORLD.max_accel))
    return Settings(
        caps=caps,
        world=world,
        threshold=merged.get("threshold", DEFAULT_THRESHOLD),
        tangential_angle_deg=merged.get("tangential_angle_deg", 45.0),
        enable_rtt_prime=merged.get("enable_rtt_prime", False),
    )
