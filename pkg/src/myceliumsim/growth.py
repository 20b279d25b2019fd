"""Tip-based mycelium growth on a substrate field.

Each step, every live tip advances one fixed increment along a tropism
direction (previous heading plus attractant pull minus repellent push, then
angular noise) and may branch apically with probability proportional to the
local nutrient concentration. Growth never enters masked-off cells; a tip
whose advance is rejected three consecutive times is blocked for good.

All randomness comes from a caller-supplied numpy Generator, and tips are
processed in ascending node id, so a fixed seed reproduces the network
byte-for-byte.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError, NotFoundError
from .network import MyceliumNetwork
from .substrate import SubstrateField

_BLOCK_LIMIT = 3  # consecutive rejected advances before a tip stops trying


@dataclass(frozen=True)
class GrowthParams:
    """Knobs for the stepping rule.

    branch_boost multiplies the branching probability while
    boost_start_step <= step < boost_stop_step, mimicking externally driven
    branching bursts.
    """

    step_mm: float = 1.0
    branching_coeff: float = 0.5
    attractant_weight: float = 1.0
    repellent_weight: float = 1.0
    noise_sigma_rad: float = 0.1
    branch_angle_rad: float = math.pi / 4
    max_steps: int = 100
    max_nodes: int = 100_000
    branch_boost: float = 1.0
    boost_start_step: int = 0
    boost_stop_step: int = 0

    def __post_init__(self):
        if self.step_mm <= 0:
            raise ConfigError("step_mm must be > 0")
        if self.branching_coeff < 0:
            raise ConfigError("branching_coeff must be >= 0")
        if self.attractant_weight < 0 or self.repellent_weight < 0:
            raise ConfigError("tropism weights must be >= 0")
        if self.noise_sigma_rad < 0:
            raise ConfigError("noise_sigma_rad must be >= 0")
        if not 0 < self.branch_angle_rad < math.pi:
            raise ConfigError("branch_angle_rad must lie in (0, pi)")
        if self.max_steps < 0:
            raise ConfigError("max_steps must be >= 0")
        if self.max_nodes < 1:
            raise ConfigError("max_nodes must be >= 1")
        if self.branch_boost < 0:
            raise ConfigError("branch_boost must be >= 0")

    def boost_factor(self, step: int) -> float:
        if self.boost_start_step <= step < self.boost_stop_step:
            return self.branch_boost
        return 1.0


@dataclass
class GrowthResult:
    network: MyceliumNetwork
    reason: str  # max-steps | max-nodes | all-tips-blocked | no-live-tips
    steps_run: int


def _normalize(v: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    if norm < 1e-12:
        raise ValueError("zero direction")
    return v / norm


def _rotate2(v: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def _perp_basis(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # any stable orthonormal pair perpendicular to d
    helper = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = _normalize(np.cross(d, helper))
    w = np.cross(d, u)
    return u, w


def _tilt(d: np.ndarray, angle: float, azimuth: float) -> np.ndarray:
    u, w = _perp_basis(d)
    lateral = u * math.cos(azimuth) + w * math.sin(azimuth)
    return d * math.cos(angle) + lateral * math.sin(angle)


def _deflect(d: np.ndarray, angle: float, rng: np.random.Generator) -> np.ndarray:
    """Rotate d by `angle`; in 3D the rotation plane azimuth is drawn from rng."""
    if d.shape[0] == 2:
        return _rotate2(d, angle)
    azimuth = float(rng.uniform(0.0, 2.0 * math.pi))
    return _tilt(d, angle, azimuth)


def _live_tips(net: MyceliumNetwork) -> list[int]:
    return sorted(
        nid for nid, n in net.nodes.items() if n.kind == "tip" and n.blocked < _BLOCK_LIMIT
    )


def grow_step(
    network: MyceliumNetwork,
    field: SubstrateField,
    params: GrowthParams,
    rng: np.random.Generator,
    step: int = 0,
) -> MyceliumNetwork:
    """Advance every live tip once; returns a new network, input untouched."""
    if network.nodes and field.ndim != network.ndim:
        raise DimensionError(f"{network.ndim}D network on a {field.ndim}D substrate")
    out = network.copy()
    tips = _live_tips(out)
    if not tips:
        warnings.warn("no live tips to grow", stacklevel=2)
        return out
    boost = params.boost_factor(step)
    for tip_id in tips:
        node = out.nodes[tip_id]
        pos = np.array(node.position)
        prev = np.array(node.direction) if node.direction is not None else None
        if prev is None:
            prev = np.zeros(field.ndim)
            prev[0] = 1.0
        drive = (
            prev
            + params.attractant_weight * field.attractant_gradient_at(node.position)
            - params.repellent_weight * field.repellent_gradient_at(node.position)
        )
        if float(np.linalg.norm(drive)) < 1e-12:
            drive = prev
        heading = _normalize(drive)
        noise = float(rng.normal(0.0, params.noise_sigma_rad)) if params.noise_sigma_rad > 0 else 0.0
        heading = _deflect(heading, noise, rng) if noise != 0.0 else heading
        target = pos + params.step_mm * heading
        if not field.is_growable(tuple(target)):
            node.blocked += 1
            continue
        node.blocked = 0
        p_branch = min(1.0, params.branching_coeff * field.nutrient_at(node.position) * boost)
        wants_branch = bool(rng.uniform() < p_branch) if p_branch > 0 else False
        branch_target = None
        branch_heading = None
        if wants_branch:
            if field.ndim == 2:
                sign = 1.0 if rng.uniform() < 0.5 else -1.0
                branch_heading = _rotate2(heading, sign * params.branch_angle_rad)
            else:
                branch_heading = _tilt(heading, params.branch_angle_rad, float(rng.uniform(0.0, 2.0 * math.pi)))
            candidate = pos + params.step_mm * branch_heading
            if field.is_growable(tuple(candidate)):
                branch_target = candidate
        needed = 2 if branch_target is not None else 1
        remaining = params.max_nodes - len(out.nodes)
        if remaining < 1:
            continue
        if remaining < needed:
            branch_target = None  # advance still fits
        node.kind = "junction"
        new_tip = out.add_node(tuple(target), "tip", direction=tuple(heading))
        out.add_strand(node.id, new_tip.id)
        if branch_target is not None:
            side = out.add_node(tuple(branch_target), "tip", direction=tuple(branch_heading))
            out.add_strand(node.id, side.id)
    return out


def grow(
    network: MyceliumNetwork,
    field: SubstrateField,
    params: GrowthParams,
    rng: np.random.Generator,
) -> GrowthResult:
    """Run grow_step until a budget or blocking condition stops it."""
    net = network.copy()
    if not _live_tips(net):
        warnings.warn("network has no live tips, nothing to grow", stacklevel=2)
        return GrowthResult(net, "no-live-tips", 0)
    steps_run = 0
    reason = "max-steps"
    for step in range(params.max_steps):
        if len(net.nodes) >= params.max_nodes:
            reason = "max-nodes"
            break
        if not _live_tips(net):
            reason = "all-tips-blocked"
            break
        net = grow_step(net, field, params, rng, step=step)
        steps_run += 1
    else:
        if params.max_steps > 0 and not _live_tips(net):
            reason = "all-tips-blocked"
    return GrowthResult(net, reason, steps_run)


def electrical_prune(network: MyceliumNetwork, strand_ids, mode: str) -> MyceliumNetwork:
    """Mark strands in response to simulated electrical conditioning.

    mode="abandon": listed strands become abandoned.
    mode="enhance": listed strands become enhanced and every other strand
    sharing an endpoint with a listed strand becomes abandoned.
    """
    if mode not in ("abandon", "enhance"):
        raise ConfigError(f"unknown prune mode {mode!r}")
    ids = list(strand_ids)
    missing = sorted(sid for sid in ids if sid not in network.strands)
    if missing:
        raise NotFoundError(f"no such strand(s): {missing}")
    out = network.copy()
    chosen = set(ids)
    if mode == "abandon":
        for sid in sorted(chosen):
            out.strands[sid].state = "abandoned"
        return out
    for sid in sorted(chosen):
        out.strands[sid].state = "enhanced"
    touched = set()
    for sid in chosen:
        touched.add(out.strands[sid].a)
        touched.add(out.strands[sid].b)
    for nid in sorted(touched):
        for other_sid in out.incident_strands(nid):
            if other_sid not in chosen:
                out.strands[other_sid].state = "abandoned"
    return out
