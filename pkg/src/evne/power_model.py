"""Server and routing-card power accounting.

A node draws its idle power plus a CPU-proportional share up to peak, plus a
constant routing-card draw while it relays any embedded path.  Per-class
figures live in a small key-value profile file; two HP ProLiant classes ship
as defaults with SPECpower_ssj2008 (Q1 2011) idle/peak numbers.
"""

from __future__ import annotations

import functools
import importlib.resources
import os
from dataclasses import dataclass

from .net_model import (Mapping, ParseError, SubstrateNetwork, SubstrateNode,
                        VneError, VNRequest, validate_structure)

ENV_PROFILE_PATH = "VNE_POWER_PROFILES"


class UnknownProfile(VneError):
    """A node references a server profile that is not configured."""


@dataclass(frozen=True)
class ServerProfile:
    name: str
    p_idle: float
    p_max: float
    p_routing: float
    cpu_mips: float | None = None  # substrate capacity of this server class

    def __post_init__(self):
        if not (0 <= self.p_idle <= self.p_max):
            raise ValueError(f"profile {self.name}: need 0 <= idle <= max power")
        if self.p_routing < 0:
            raise ValueError(f"profile {self.name}: negative routing power")


@dataclass(frozen=True)
class PowerConfig:
    profiles: tuple[ServerProfile, ...]

    def __post_init__(self):
        if not self.profiles:
            raise ValueError("power configuration needs at least one profile")

    def get(self, index: int) -> ServerProfile:
        if 0 <= index < len(self.profiles):
            return self.profiles[index]
        raise UnknownProfile(f"no server profile with index {index}")

    def index_of(self, name: str) -> int:
        for i, prof in enumerate(self.profiles):
            if prof.name == name:
                return i
        raise UnknownProfile(f"no server profile named {name!r}")


def node_power(node: SubstrateNode, cfg: PowerConfig) -> float:
    """Current draw of one substrate node in watts; 0 when powered off."""
    prof = cfg.get(node.profile)
    if not node.power_on:
        return 0.0
    watts = prof.p_idle + (prof.p_max - prof.p_idle) * node.utilization()
    if node.routing_enabled:
        watts += prof.p_routing
    return watts


def network_power(sn: SubstrateNetwork, cfg: PowerConfig) -> float:
    """Total draw of the substrate in watts."""
    return sum(node_power(node, cfg) for node in sn.nodes)


def incremental_node_power(node: SubstrateNode, cpu_demand: float,
                           cfg: PowerConfig) -> float:
    """Extra watts for hosting one more virtual node on ``node`` as-is."""
    prof = cfg.get(node.profile)
    watts = (prof.p_max - prof.p_idle) * (cpu_demand / node.cpu_capacity)
    if not node.power_on:
        watts += prof.p_idle
    return watts


def embedding_power(sn: SubstrateNetwork, vnr: VNRequest, m: Mapping,
                    cfg: PowerConfig) -> float:
    """Marginal network power of applying ``m``, without mutating ``sn``.

    Accounting is sequential over virtual nodes then virtual links: a node
    activated by an earlier term counts as already on (and routing-enabled)
    for later terms, so the result equals the exact network-power delta of
    applying the mapping.
    """
    vn = vnr.vn
    validate_structure(sn, vn, m)
    on = {node.id for node in sn.nodes if node.power_on}
    enabled = {node.id for node in sn.nodes if node.routing_enabled}
    total = 0.0
    for vnode, host in zip(vn.nodes, m.node_map):
        node = sn.nodes[host]
        prof = cfg.get(node.profile)
        if host not in on:
            total += prof.p_idle
            on.add(host)
        total += (prof.p_max - prof.p_idle) * (vnode.cpu_demand / node.cpu_capacity)
    for path in m.link_map:
        for nid in path:
            if nid in enabled:
                continue
            prof = cfg.get(sn.nodes[nid].profile)
            if nid not in on:
                total += prof.p_idle + prof.p_routing
                on.add(nid)
            else:
                total += prof.p_routing
            enabled.add(nid)
    return total


_PROFILE_KEYS = ("p_idle_watts", "p_max_watts", "p_routing_watts")


def _finish_profile(entry: dict, path, line_no: int) -> ServerProfile:
    for key in _PROFILE_KEYS:
        if key not in entry:
            raise ParseError(path, line_no, f"profile {entry['name']!r} lacks {key}")
    try:
        return ServerProfile(entry["name"], entry["p_idle_watts"],
                             entry["p_max_watts"], entry["p_routing_watts"],
                             entry.get("cpu_mips"))
    except ValueError as exc:
        raise ParseError(path, line_no, str(exc)) from exc


def parse_power_profiles(text: str, path="<string>") -> PowerConfig:
    """Parse ``key = value`` profile blocks; each block starts at ``name``."""
    profiles: list[ServerProfile] = []
    entry: dict | None = None
    start_line = 0
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(path, line_no, "expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "name":
            if entry is not None:
                profiles.append(_finish_profile(entry, path, start_line))
            entry = {"name": value}
            start_line = line_no
        elif key in _PROFILE_KEYS or key == "cpu_mips":
            if entry is None:
                raise ParseError(path, line_no, f"{key} before any 'name' entry")
            try:
                entry[key] = float(value)
            except ValueError:
                raise ParseError(path, line_no, f"{key}: not a number: {value!r}")
        else:
            raise ParseError(path, line_no, f"unknown entry {key!r}")
    if entry is not None:
        profiles.append(_finish_profile(entry, path, start_line))
    if not profiles:
        raise ParseError(path, 0, "no profiles defined")
    return PowerConfig(tuple(profiles))


def load_power_profiles(path) -> PowerConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_power_profiles(fh.read(), path)


@functools.lru_cache(maxsize=1)
def default_power_config() -> PowerConfig:
    """Built-in two-profile configuration shipped with the package."""
    text = (importlib.resources.files("evne") / "data" / "default.profiles").read_text()
    return parse_power_profiles(text, "<builtin default.profiles>")


def resolve_power_config(path=None) -> PowerConfig:
    """Profile file from an explicit path, $VNE_POWER_PROFILES, or built-ins."""
    if path is not None:
        return load_power_profiles(path)
    env = os.environ.get(ENV_PROFILE_PATH)
    if env:
        return load_power_profiles(env)
    return default_power_config()
