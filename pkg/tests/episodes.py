"""Worst-case episode builders driving the time-stepping oracle in tests.

These re-derive the maneuver sequences from the scenario descriptions (phase
structure only, no margin algebra) so the oracle runs stay an independent
check on the closed-form margins.
"""

import math

from relkit.core import EgoCapabilities, WorldAssumptions
from relkit.criteria import PassingGeometry
from relkit.oracle import Phase, PhasePlan


def static_target_episode(caps: EgoCapabilities, world: WorldAssumptions,
                          extents: float) -> PhasePlan:
    """Ego drifts at the world bound through the reaction window, then brakes
    to rest; the obstacle stands still."""
    return PhasePlan(
        ego=(Phase(world.max_accel, duration=caps.reaction_time),
             Phase(caps.guaranteed_brake, brake=True)),
        other=(Phase(0.0),),
        extents=extents)


def mutual_approach_episode(caps: EgoCapabilities, world: WorldAssumptions,
                            extents: float) -> PhasePlan:
    """Both agents accelerate toward each other during the reaction window;
    the ego then brakes to rest while the opponent keeps accelerating."""
    return PhasePlan(
        ego=(Phase(world.max_accel, duration=caps.reaction_time),
             Phase(caps.guaranteed_brake, brake=True)),
        other=(Phase(world.max_accel),),
        extents=extents)


def passing_episode(geom: PassingGeometry, caps: EgoCapabilities,
                    world: WorldAssumptions) -> PhasePlan:
    """Full passing sequence: brake during reaction, swing out at constant
    radial speed, accelerate alongside the obstacle until clear of it
    (distance-triggered), swing back, then the mutual-approach tail."""
    accel = caps.guaranteed_accel
    lane_change = 2.0 * math.sqrt((geom.obstacle_extent_lateral + geom.ego_half_length) / accel)
    clearance = 2.0 * geom.ego_half_length + 2.0 * geom.obstacle_extent_radial
    return PhasePlan(
        ego=(Phase(-world.max_accel, duration=caps.reaction_time),
             Phase(0.0, duration=lane_change),
             Phase(accel, until_distance=clearance),
             Phase(0.0, duration=lane_change),
             Phase(world.max_accel, duration=caps.reaction_time),
             Phase(caps.guaranteed_brake, brake=True)),
        other=(Phase(world.max_accel),),
        extents=geom.ego_half_length + geom.opposing_half_length)


def lateral_gate_episode(caps: EgoCapabilities, world: WorldAssumptions) -> PhasePlan:
    """Lateral axis toward the other vehicle's travel line: ego holds its
    lateral speed through the reaction window and then brakes laterally; the
    opponent accelerates laterally from rest for the episode duration."""
    return PhasePlan(
        ego=(Phase(0.0, duration=caps.reaction_time),
             Phase(caps.guaranteed_lateral_brake, brake=True)),
        other=(Phase(world.max_accel),),
        extents=0.0)


def lateral_gate_duration(perp_speed: float, caps: EgoCapabilities,
                          world: WorldAssumptions) -> float:
    """Episode length of the lateral gate: the ego's lateral braking-time bound."""
    return caps.reaction_time + (perp_speed + caps.reaction_time * world.max_accel) \
        / caps.guaranteed_lateral_brake
