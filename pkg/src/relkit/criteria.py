"""Closed-form worst-case relevance margins and the scene-level relevance filter.

Every margin is a distance in meters: the slack between the current gap and
the distance the pair can close under worst-case behavior (adversarial motion
during the ego's reaction time, guaranteed response afterwards). An object is
relevant for a scenario when its margin is <= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .core import (
    MIN_GAP,
    CapabilityError,
    Category,
    EgoCapabilities,
    GeometryError,
    ObjectState,
    RadialTangentialState,
    Scene,
    ScenarioClass,
    Vec2,
    WorldAssumptions,
    classify_scenario,
    decompose_relative_state,
    region_filter,
)


class ExtendedScenario(Enum):
    """Urban extensions on top of the base pairwise classes."""

    R_TT_PRIME = "R.TT'"   # passing a static obstacle via the opposite lane
    T_XT_PRIME = "T.XT'"   # intersection merge behind the lateral gate


@dataclass(frozen=True)
class PassingGeometry:
    """Initial configuration of the passing scenario: ego behind a static
    obstacle, opposing vehicle approaching from beyond it."""

    obstacle_gap: float            # m, ego center to static obstacle center
    opposing_gap: float            # m, ego center to opposing vehicle center
    ego_half_length: float         # m
    opposing_half_length: float    # m
    obstacle_extent_radial: float  # m, obstacle half extent along the approach line
    obstacle_extent_lateral: float  # m, obstacle half extent across the approach line
    ego_speed: float               # m/s, ego approach speed toward the obstacle
    opposing_speed: float          # m/s, opposing approach speed toward the ego

    def __post_init__(self) -> None:
        for name in ("obstacle_gap", "opposing_gap", "ego_half_length",
                     "opposing_half_length", "obstacle_extent_radial",
                     "obstacle_extent_lateral", "ego_speed", "opposing_speed"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        if self.opposing_gap <= self.obstacle_gap:
            raise ValueError("opposing vehicle must lie beyond the static obstacle")


@dataclass(frozen=True)
class ManeuverTimeline:
    """Distances, speeds and durations of the worst-case passing maneuver."""

    brake_time: float          # s, braking within the reaction window ends here
    brake_distance: float      # m covered while braking
    speed_after_brake: float   # m/s, >= 0
    lane_change_time: float    # s, one lateral move to/from the opposite lane
    accel_time: float          # s, acceleration phase alongside the obstacle
    accel_distance: float      # m covered while accelerating
    speed_after_accel: float   # m/s
    ego_distance: float        # m, total ego travel over the maneuver
    total_time: float          # s, reaction + two lane changes + acceleration
    opposing_distance: float | None = None  # m, filled in by the opponent step
    opposing_final_speed: float | None = None

    def __post_init__(self) -> None:
        for name in ("brake_time", "lane_change_time", "accel_time", "total_time"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        if self.speed_after_brake < 0.0:
            raise ValueError("speed_after_brake must be >= 0")
        if self.ego_distance < self.brake_distance:
            raise ValueError("ego_distance cannot undercut the braking distance")


@dataclass(frozen=True)
class RelevanceVerdict:
    """Per-object outcome of the scene-level relevance evaluation."""

    object_id: str
    relevant: bool
    triggering_scenarios: frozenset
    margins: dict

    def __post_init__(self) -> None:
        if self.relevant != bool(self.triggering_scenarios):
            raise ValueError("relevant must mirror a nonempty triggering set")


def rta_margin(gap: float, approach_speed: float, ego_extent: float,
               obstacle_extent: float, caps: EgoCapabilities,
               world: WorldAssumptions) -> float:
    """Margin toward a static obstacle ahead.

    Worst case: the ego accelerates at the world bound through its reaction
    time, then brakes with its guaranteed deceleration; the margin is the gap
    minus extents minus reaction-plus-braking distance.
    """
    if gap < 0.0 or approach_speed < 0.0 or ego_extent < 0.0 or obstacle_extent < 0.0:
        raise ValueError("rta_margin requires non-negative gap, speed and extents")
    t_r = caps.reaction_time
    a = world.max_accel
    v_end = approach_speed + a * t_r
    reach = approach_speed * t_r + 0.5 * a * t_r ** 2 + v_end ** 2 / (2.0 * caps.guaranteed_brake)
    return gap - ego_extent - obstacle_extent - reach


def rtt_margin(gap: float, ego_speed: float, obj_speed: float, ego_extent: float,
               obj_extent: float, caps: EgoCapabilities, world: WorldAssumptions,
               opponent_horizon: float | None = None) -> float:
    """Mutual-approach margin: the opponent accelerates toward the ego for the
    whole time the ego needs to come to rest (reaction drift + braking), or for
    an explicitly supplied horizon."""
    if ego_speed < 0.0 or obj_speed < 0.0:
        raise ValueError("rtt_margin requires non-negative approach speeds")
    t_r = caps.reaction_time
    a = world.max_accel
    v_end = ego_speed + a * t_r
    ego_reach = ego_speed * t_r + 0.5 * a * t_r ** 2 + v_end ** 2 / (2.0 * caps.guaranteed_brake)
    horizon = t_r + v_end / caps.guaranteed_brake if opponent_horizon is None else opponent_horizon
    obj_reach = obj_speed * horizon + 0.5 * a * horizon ** 2
    return gap - ego_extent - obj_extent - ego_reach - obj_reach


def worst_case_closest_approach(gap: float, ego_speed: float, obj_speed: float,
                                ego_extent: float, obj_extent: float,
                                caps: EgoCapabilities, world: WorldAssumptions) -> float:
    """Exact minimum gap over the worst-case episode, signed initial speeds.

    Both agents accelerate toward each other at the world bound during the
    reaction time (sign reversal allowed), then the ego decelerates to rest at
    its guaranteed brake while the opponent keeps accelerating. With receding
    speeds the closest approach may fall strictly inside the braking phase, so
    the minimum is taken over the piecewise-quadratic gap curve rather than
    read off the final state.
    """
    t_r = caps.reaction_time
    a = world.max_accel
    b = caps.guaranteed_brake
    closing0 = ego_speed + obj_speed
    g_react_end = gap - closing0 * t_r - a * t_r ** 2  # both drift at a for t_r
    candidates = [gap, g_react_end]

    v_after = ego_speed + a * t_r
    tau = abs(v_after) / b
    obj_speed_after = obj_speed + a * t_r

    def gap_brake(s: float) -> float:
        ego_dist = v_after * s - math.copysign(0.5 * b, v_after) * s ** 2
        obj_dist = obj_speed_after * s + 0.5 * a * s ** 2
        return g_react_end - ego_dist - obj_dist

    if tau > 0.0:
        candidates.append(gap_brake(tau))
        if v_after > 0.0 and b > a:
            s_crit = (v_after + obj_speed_after) / (b - a)
            if 0.0 < s_crit < tau:
                candidates.append(gap_brake(s_crit))
    return min(candidates) - ego_extent - obj_extent


def txt_prime_gate_threshold(perp_speed: float, caps: EgoCapabilities,
                             world: WorldAssumptions) -> float:
    """Largest lateral offset at which a merging interaction is still possible:
    ego lateral stopping distance plus the opponent's worst-case lateral reach
    over the ego's lateral braking time."""
    if perp_speed < 0.0:
        raise ValueError("perp_speed must be >= 0")
    t_r = caps.reaction_time
    a = world.max_accel
    b_lat = caps.guaranteed_lateral_brake
    t_brake = t_r + (perp_speed + t_r * a) / b_lat
    return perp_speed * t_r + perp_speed ** 2 / (2.0 * b_lat) + 0.5 * a * t_brake ** 2


def txt_prime_lateral_gate(perp_speed: float, lateral_offset: float,
                           caps: EgoCapabilities, world: WorldAssumptions) -> bool:
    """True when the merging scenario must be evaluated for this pair."""
    if lateral_offset < 0.0:
        raise ValueError("lateral_offset must be >= 0")
    return lateral_offset < txt_prime_gate_threshold(perp_speed, caps, world)


def rtt_prime_applicable(ego: ObjectState, opposing: ObjectState,
                         static_obj: ObjectState, caps: EgoCapabilities,
                         world: WorldAssumptions) -> bool:
    """Does the passing scenario apply to (ego, opposing) around ``static_obj``?

    Requires: ego moving toward the obstacle, opposing moving toward the
    obstacle, the two on opposite sides of it, and the obstacle itself already
    relevant as a static target ahead.
    """
    if static_obj.category is not Category.STATIC_OBSTACLE:
        raise ValueError("rtt_prime applicability needs a static obstacle")
    to_static_ego = static_obj.position - ego.position
    to_static_opp = static_obj.position - opposing.position
    if to_static_ego.dot(ego.velocity) <= 0.0:
        return False
    if to_static_opp.dot(opposing.velocity) <= 0.0:
        return False
    if to_static_ego.dot(to_static_opp) >= 0.0:
        return False
    gap = to_static_ego.norm()
    axis = to_static_ego.scaled(1.0 / gap)
    margin = rta_margin(gap, ego.velocity.dot(axis), ego.extent_along(axis),
                        static_obj.extent_along(axis), caps, world)
    return margin <= 0.0


def rtt_prime_ego_maneuver(geom: PassingGeometry, caps: EgoCapabilities,
                           world: WorldAssumptions) -> ManeuverTimeline:
    """Worst-case ego timeline for passing the obstacle via the opposite lane:
    brake during the reaction window, swing out, accelerate past, swing back."""
    accel = caps.guaranteed_accel
    if accel <= 0.0:
        raise CapabilityError("passing needs a positive guaranteed acceleration")
    t_r = caps.reaction_time
    a = world.max_accel
    v0 = geom.ego_speed
    brake_time = min(t_r, v0 / a) if a > 0.0 else t_r
    brake_distance = v0 * brake_time - 0.5 * a * brake_time ** 2
    v_b = max(0.0, v0 - a * brake_time)  # exact-stop rounding can leave -1e-16
    lane_change_time = 2.0 * math.sqrt((geom.obstacle_extent_lateral + geom.ego_half_length) / accel)
    accel_distance = 2.0 * geom.ego_half_length + 2.0 * geom.obstacle_extent_radial
    accel_time = (-v_b + math.sqrt(2.0 * accel * accel_distance + v_b ** 2)) / accel
    v_a = v_b + accel * accel_time
    ego_distance = brake_distance + v_b * lane_change_time + accel_distance + v_a * lane_change_time
    return ManeuverTimeline(
        brake_time=brake_time,
        brake_distance=brake_distance,
        speed_after_brake=v_b,
        lane_change_time=lane_change_time,
        accel_time=accel_time,
        accel_distance=accel_distance,
        speed_after_accel=v_a,
        ego_distance=ego_distance,
        total_time=t_r + 2.0 * lane_change_time + accel_time,
    )


def rtt_prime_opponent_state(timeline: ManeuverTimeline, opposing_speed: float,
                             world: WorldAssumptions,
                             caps: EgoCapabilities) -> tuple[float, float]:
    """Opposing vehicle's travel and speed while the ego completes the maneuver,
    under maximum acceleration toward the ego throughout."""
    t_e = timeline.total_time
    a = world.max_accel
    return (opposing_speed * t_e + 0.5 * a * t_e ** 2,
            opposing_speed + a * t_e)


def rtt_prime_margin(geom: PassingGeometry, caps: EgoCapabilities,
                     world: WorldAssumptions,
                     opponent_horizon: str = "ego_stop_time") -> float:
    """Margin of the full passing scenario against the opposing vehicle.

    After the maneuver the remaining gap, the ego's exit speed and the
    opponent's boosted speed seed the mutual-approach margin. The opponent's
    horizon in that final phase defaults to the ego's post-reaction time to
    standstill; "initial_brake_time" instead reuses the reaction-window
    braking duration.
    """
    timeline = rtt_prime_ego_maneuver(geom, caps, world)
    opposing_distance, opposing_final_speed = rtt_prime_opponent_state(
        timeline, geom.opposing_speed, world, caps)
    inner_gap = geom.opposing_gap - timeline.ego_distance - opposing_distance
    if opponent_horizon == "ego_stop_time":
        horizon = None
    elif opponent_horizon == "initial_brake_time":
        horizon = timeline.brake_time
    else:
        raise ValueError(f"unknown opponent_horizon {opponent_horizon!r}")
    return rtt_margin(inner_gap, timeline.speed_after_accel, opposing_final_speed,
                      geom.ego_half_length, geom.opposing_half_length, caps, world,
                      opponent_horizon=horizon)


def _txt_prime_eval(state: RadialTangentialState, ego_extent: float, obj_extent: float,
                    caps: EgoCapabilities, world: WorldAssumptions) -> tuple[bool, float]:
    """Gate plus merging margin along the object's travel line."""
    threshold = txt_prime_gate_threshold(state.ego_perp_speed, caps, world)
    if state.lateral_offset >= threshold:
        return False, state.lateral_offset - threshold
    direction = 1.0 if state.travel_gap >= 0.0 else -1.0
    margin = worst_case_closest_approach(
        abs(state.travel_gap),
        -direction * state.ego_travel_speed,
        direction * state.obj_travel_speed,
        ego_extent, obj_extent, caps, world)
    return margin <= 0.0, margin


def base_pairwise_relevant(scenario: ScenarioClass, state: RadialTangentialState,
                           ego_extent: float, obj_extent: float,
                           caps: EgoCapabilities, world: WorldAssumptions,
                           travel_extents: tuple[float, float] | None = None,
                           ) -> tuple[bool, float]:
    """Relevance flag and margin for one classified pair.

    ``travel_extents`` are the footprint half-extents projected on the
    object's travel line, used by the tangential merge; they default to the
    connecting-line extents.
    """
    if scenario is ScenarioClass.R_TA:
        margin = rta_margin(state.gap, state.ego_radial_speed, ego_extent,
                            obj_extent, caps, world)
    elif scenario is ScenarioClass.R_TT:
        margin = rtt_margin(state.gap, state.ego_radial_speed, state.obj_radial_speed,
                            ego_extent, obj_extent, caps, world)
    elif scenario is ScenarioClass.T_XT:
        e1, e2 = travel_extents if travel_extents is not None else (ego_extent, obj_extent)
        return _txt_prime_eval(state, e1, e2, caps, world)
    else:  # R_AT, R_AA, T_XA: relevant only if still closing under worst case
        margin = worst_case_closest_approach(state.gap, state.ego_radial_speed,
                                             state.obj_radial_speed, ego_extent,
                                             obj_extent, caps, world)
    return margin <= 0.0, margin


def _passing_geometry(ego: ObjectState, opposing: ObjectState,
                      static_obj: ObjectState) -> PassingGeometry | None:
    """Project a scene triple onto the passing-scenario parameters; None when
    the configuration cannot satisfy the geometry invariants."""
    to_static = static_obj.position - ego.position
    to_opposing = opposing.position - ego.position
    obstacle_gap = to_static.norm()
    opposing_gap = to_opposing.norm()
    if obstacle_gap <= MIN_GAP or opposing_gap <= obstacle_gap:
        return None
    u_static = to_static.scaled(1.0 / obstacle_gap)
    u_opposing = to_opposing.scaled(1.0 / opposing_gap)
    ego_speed = ego.velocity.dot(u_static)
    opposing_speed = -opposing.velocity.dot(u_opposing)
    if ego_speed < 0.0 or opposing_speed < 0.0:
        return None
    lateral = Vec2(-u_static.y, u_static.x)
    return PassingGeometry(
        obstacle_gap=obstacle_gap,
        opposing_gap=opposing_gap,
        ego_half_length=ego.half_extent_long,
        opposing_half_length=opposing.half_extent_long,
        obstacle_extent_radial=static_obj.extent_along(u_static),
        obstacle_extent_lateral=static_obj.extent_along(lateral),
        ego_speed=ego_speed,
        opposing_speed=opposing_speed,
    )


def relevant_objects(scene: Scene, caps: EgoCapabilities, world: WorldAssumptions,
                     enable_rtt_prime: bool = False,
                     tangential_angle_deg: float = 45.0) -> list[RelevanceVerdict]:
    """Evaluate every in-region object against the ego and return verdicts,
    sorted by object id (order-independent of the scene's object ordering).

    The passing extension is off by default: it needs a known ego intention
    to pass, which recorded scenes do not carry.
    """
    scn = region_filter(scene)
    ego = scene.ego
    triggers: dict[str, set] = {}
    margins: dict[str, dict] = {}

    for obj in scn.objects:
        triggers[obj.id] = set()
        margins[obj.id] = {}
        try:
            state = decompose_relative_state(ego, obj)
        except GeometryError:
            # Overlapping centers: trivially relevant, no classification possible.
            triggers[obj.id].add(ScenarioClass.R_TA)
            margins[obj.id][ScenarioClass.R_TA] = -(ego.half_extent_long + obj.half_extent_long)
            continue
        scenario = classify_scenario(state, tangential_angle_deg)
        axis = (obj.position - ego.position).scaled(1.0 / state.gap)
        travel = obj.heading_unit()
        travel_extents = (ego.extent_along(travel), obj.extent_along(travel))
        relevant, margin = base_pairwise_relevant(
            scenario, state, ego.extent_along(axis), obj.extent_along(axis),
            caps, world, travel_extents=travel_extents)
        margins[obj.id][scenario] = margin
        if relevant:
            triggers[obj.id].add(scenario)
        if scenario in (ScenarioClass.T_XT, ScenarioClass.T_XA):
            prime_rel, prime_margin = _txt_prime_eval(state, *travel_extents, caps, world)
            margins[obj.id][ExtendedScenario.T_XT_PRIME] = prime_margin
            if prime_rel:
                triggers[obj.id].add(ExtendedScenario.T_XT_PRIME)

    if enable_rtt_prime:
        statics = [o for o in scn.objects if o.category is Category.STATIC_OBSTACLE]
        for static_obj in statics:
            for obj in scn.objects:
                if obj.id == static_obj.id or obj.category is Category.STATIC_OBSTACLE:
                    continue
                if not rtt_prime_applicable(ego, obj, static_obj, caps, world):
                    continue
                geom = _passing_geometry(ego, obj, static_obj)
                if geom is None:
                    continue
                margin = rtt_prime_margin(geom, caps, world)
                previous = margins[obj.id].get(ExtendedScenario.R_TT_PRIME)
                if previous is None or margin < previous:
                    margins[obj.id][ExtendedScenario.R_TT_PRIME] = margin
                if margin <= 0.0:
                    triggers[obj.id].add(ExtendedScenario.R_TT_PRIME)

    return [RelevanceVerdict(object_id=oid,
                             relevant=bool(triggers[oid]),
                             triggering_scenarios=frozenset(triggers[oid]),
                             margins=margins[oid])
            for oid in sorted(triggers)]
