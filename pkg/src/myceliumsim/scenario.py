"""Scenario files: a network reference, simulation config and injections.

Format (`myceliumsim/scenario/v1`):

    myceliumsim/scenario/v1
    network net.mycelium
    config speed_mm_s 0.5
    config collision_rule annihilate
    inject NODE TIME_S AMPLITUDE_MV

The network path is resolved relative to the scenario file's directory.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

from .errors import ParseError
from .network import MyceliumNetwork, load_network
from .propagation import COLLISION_RULES, SimConfig

SCENARIO_FORMAT = "myceliumsim/scenario/v1"

_CONFIG_FLOAT_KEYS = ("speed_mm_s", "window_s", "refractory_s", "horizon_s")


@dataclass(frozen=True)
class Injection:
    node_id: int
    time_s: float
    amplitude_mv: float


@dataclass(frozen=True)
class Scenario:
    network_path: str  # absolute after load; written as given
    config: SimConfig
    injections: tuple[Injection, ...]

    def load_network(self) -> MyceliumNetwork:
        return load_network(self.network_path)


def load_scenario(path) -> Scenario:
    path = str(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != SCENARIO_FORMAT:
        raise ParseError(f"expected header {SCENARIO_FORMAT!r}", path=path, line=1)
    network_path: str | None = None
    config_kwargs: dict[str, object] = {}
    injections: list[Injection] = []
    for ln, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if toks[0] == "network":
            if len(toks) != 2:
                raise ParseError("network line needs one path", path=path, line=ln)
            if network_path is not None:
                raise ParseError("duplicate network line", path=path, line=ln)
            network_path = toks[1]
        elif toks[0] == "config":
            if len(toks) != 3:
                raise ParseError("config line needs: config KEY VALUE", path=path, line=ln)
            key, value = toks[1], toks[2]
            if key in config_kwargs:
                raise ParseError(f"duplicate config key {key!r}", path=path, line=ln)
            if key in _CONFIG_FLOAT_KEYS:
                try:
                    config_kwargs[key] = float(value)
                except ValueError:
                    raise ParseError(f"bad value for {key}: {value!r}", path=path, line=ln) from None
            elif key == "max_events":
                try:
                    config_kwargs[key] = int(value)
                except ValueError:
                    raise ParseError(f"bad value for {key}: {value!r}", path=path, line=ln) from None
            elif key == "collision_rule":
                if value not in COLLISION_RULES:
                    raise ParseError(f"unknown collision rule {value!r}", path=path, line=ln)
                config_kwargs[key] = value
            else:
                raise ParseError(f"unknown config key {key!r}", path=path, line=ln)
        elif toks[0] == "inject":
            if len(toks) != 4:
                raise ParseError("inject line needs: inject NODE TIME_S AMPLITUDE_MV", path=path, line=ln)
            try:
                injections.append(Injection(int(toks[1]), float(toks[2]), float(toks[3])))
            except ValueError:
                raise ParseError(f"bad inject line {line!r}", path=path, line=ln) from None
        else:
            raise ParseError(f"unknown record {toks[0]!r}", path=path, line=ln)
    if network_path is None:
        raise ParseError("scenario has no network line", path=path)
    resolved = os.path.normpath(os.path.join(os.path.dirname(os.path.abspath(path)), network_path))
    return Scenario(resolved, SimConfig(**config_kwargs), tuple(injections))


def save_scenario(scenario: Scenario, path) -> None:
    defaults = SimConfig()
    lines = [SCENARIO_FORMAT, f"network {scenario.network_path}"]
    for f in dataclasses.fields(SimConfig):
        value = getattr(scenario.config, f.name)
        if value != getattr(defaults, f.name):
            text = value if f.name == "collision_rule" else repr(value)
            lines.append(f"config {f.name} {text}")
    for inj in scenario.injections:
        lines.append(f"inject {inj.node_id} {repr(inj.time_s)} {repr(inj.amplitude_mv)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
