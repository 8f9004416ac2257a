"""Simulated tool environments and their JSON configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..core import SpecError
from .base import CounterEnv, Environment, Observation, SteppedAfterTerminal, check_call, env_step
from .criteria import (
    BookingRules,
    HomeSearchConfig,
    TripBookingConfig,
    criteria_set,
    execute_home_search,
    execute_trip_booking,
)
from .rest import CurlRequest, RouteTable, execute_rest, parse_curl
from .virtualhome import execute_virtualhome

__all__ = [
    "BookingRules",
    "CounterEnv",
    "CurlRequest",
    "EnvConfig",
    "Environment",
    "HomeSearchConfig",
    "Observation",
    "RouteTable",
    "SteppedAfterTerminal",
    "TripBookingConfig",
    "check_call",
    "criteria_set",
    "env_config_from_json",
    "env_step",
    "execute_home_search",
    "execute_rest",
    "execute_trip_booking",
    "execute_virtualhome",
    "load_env_config",
    "parse_curl",
]

ENV_KINDS = ("home_search", "trip_booking", "virtualhome", "rest", "counter")


@dataclass(frozen=True)
class EnvConfig:
    kind: str
    settings: Any = None


def env_config_from_json(obj: dict) -> EnvConfig:
    kind = obj.get("kind")
    try:
        if kind == "home_search":
            return EnvConfig(
                kind,
                HomeSearchConfig(
                    prefix=tuple(obj.get("prefix", HomeSearchConfig.prefix)),
                    search=obj.get("search", HomeSearchConfig.search),
                    prefix_ordered=bool(obj.get("prefix_ordered", False)),
                ),
            )
        if kind == "trip_booking":
            types = {
                name: BookingRules(
                    required=frozenset(r["required"]),
                    optional=frozenset(r.get("optional", [])),
                    order=tuple(tuple(pair) for pair in r.get("order", [])),
                )
                for name, r in obj["booking_types"].items()
            }
            return EnvConfig(
                kind,
                TripBookingConfig(
                    booking_types=types,
                    booking_type_function=obj.get("booking_type_function", "select_booking_type"),
                    search=obj.get("search", "search"),
                ),
            )
        if kind == "rest":
            return EnvConfig(kind, RouteTable.from_json(obj))
        if kind in ("virtualhome", "counter"):
            return EnvConfig(kind)
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"bad {kind} env config: {exc}") from None
    raise SpecError(f"unknown env kind {kind!r}; expected one of {ENV_KINDS}")


def load_env_config(path: str | Path) -> EnvConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return env_config_from_json(obj)
