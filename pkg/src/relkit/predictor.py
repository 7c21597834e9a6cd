"""Seeded multi-modal surrogate predictor and a synthetic urban scene generator.

The predictor rolls the target agent forward with a car-following law against
the nearest same-direction object ahead in a narrow corridor (free-road
acceleration when none) and spreads ten modes by sampling acceleration offsets
and waypoint jitter from the given seed. Removing the interacting object
changes the rollout; removing anything else leaves it bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Category, ObjectState, Scene, Vec2

STEP_SECONDS = 0.5
HORIZON_STEPS = 12   # 6 s at 2 Hz
NUM_MODES = 10


@dataclass(frozen=True)
class PredictorParams:
    """Car-following and mode-spread parameters of the surrogate."""

    desired_speed: float = 12.0      # m/s
    time_headway: float = 1.5        # s
    jam_distance: float = 2.0        # m
    comfort_accel: float = 1.5       # m/s^2
    comfort_brake: float = 2.0       # m/s^2
    hard_brake: float = 4.0          # m/s^2, rollout clamp
    accel_cap: float = 2.5           # m/s^2, rollout clamp
    interaction_range: float = 25.0  # m, leads beyond this are ignored
    corridor_half_width: float = 2.0  # m
    heading_tolerance: float = math.pi / 4.0
    accel_spread: float = 0.30       # m/s^2, per-mode acceleration offset sigma
    waypoint_jitter: float = 0.18    # m, per-waypoint noise sigma


DEFAULT_PREDICTOR_PARAMS = PredictorParams()


@dataclass(frozen=True)
class Trajectory:
    """Fixed-horizon future: 12 waypoints at 0.5 s spacing."""

    waypoints: tuple[Vec2, ...]

    def as_array(self) -> np.ndarray:
        return np.array([[w.x, w.y] for w in self.waypoints])


@dataclass(frozen=True)
class PredictionSet:
    """Exactly ten trajectory modes, most confident first."""

    modes: tuple[Trajectory, ...]

    def __post_init__(self) -> None:
        if len(self.modes) != NUM_MODES:
            raise ValueError(f"prediction set needs exactly {NUM_MODES} modes")


def find_lead(objects, target: ObjectState, params: PredictorParams = DEFAULT_PREDICTOR_PARAMS,
              ) -> ObjectState | None:
    """Nearest same-direction vehicle/obstacle ahead of the target, in-corridor."""
    h = target.heading_unit()
    best = None
    best_lon = math.inf
    for obj in objects:
        if obj.id == target.id:
            continue
        if obj.category not in (Category.VEHICLE, Category.STATIC_OBSTACLE):
            continue
        rel = obj.position - target.position
        lon = rel.dot(h)
        if not 0.0 < lon <= params.interaction_range:
            continue
        if abs(h.cross(rel)) > params.corridor_half_width:
            continue
        if h.dot(obj.heading_unit()) < math.cos(params.heading_tolerance):
            continue
        if lon < best_lon:
            best, best_lon = obj, lon
    return best


def _idm_accel(speed: float, gap: float, closing_speed: float,
               params: PredictorParams) -> float:
    s = max(gap, 0.1)
    desired_gap = params.jam_distance + max(
        0.0, speed * params.time_headway
        + speed * closing_speed / (2.0 * math.sqrt(params.comfort_accel * params.comfort_brake)))
    return params.comfort_accel * (1.0 - (speed / params.desired_speed) ** 4
                                   - (desired_gap / s) ** 2)


def _rollout(target: ObjectState, lead: ObjectState | None, accel_offset: float,
             params: PredictorParams) -> np.ndarray:
    """Forward-integrate the target along its heading; returns (HORIZON_STEPS, 2)."""
    h = target.heading_unit()
    direction = np.array([h.x, h.y])
    pos = np.array([target.position.x, target.position.y])
    speed = max(0.0, target.velocity.dot(h))
    if lead is not None:
        lead_pos = np.array([lead.position.x, lead.position.y])
        lead_vel = np.array([lead.velocity.x, lead.velocity.y])
        lead_speed = lead.velocity.dot(h)
        length_margin = target.half_extent_long + lead.extent_along(h)
    out = np.empty((HORIZON_STEPS, 2))
    for k in range(HORIZON_STEPS):
        if lead is not None:
            gap = float((lead_pos - pos).dot(direction)) - length_margin
            accel = _idm_accel(speed, gap, speed - lead_speed, params)
        else:
            accel = params.comfort_accel * (1.0 - (speed / params.desired_speed) ** 4)
        accel = min(params.accel_cap, max(-params.hard_brake, accel + accel_offset))
        speed = max(0.0, speed + accel * STEP_SECONDS)
        pos = pos + direction * (speed * STEP_SECONDS)
        if lead is not None:
            lead_pos = lead_pos + lead_vel * STEP_SECONDS
        out[k] = pos
    return out


def predict_modes(scene: Scene, seed: int,
                  params: PredictorParams = DEFAULT_PREDICTOR_PARAMS) -> PredictionSet:
    """Deterministic ten-mode prediction for the scene's target agent.

    All random draws happen up front with fixed shapes, so predictions depend
    only on (target, chosen lead, seed): deleting non-interacting context
    leaves the output bit-identical.
    """
    target = scene.target()
    rng = np.random.default_rng(seed)
    offsets = rng.normal(0.0, params.accel_spread, NUM_MODES)
    jitter = rng.normal(0.0, params.waypoint_jitter, (NUM_MODES, HORIZON_STEPS, 2))
    lead = find_lead(scene.objects, target, params)
    order = np.argsort(np.abs(offsets), kind="stable")  # small offset = high confidence
    modes = []
    for idx in order:
        points = _rollout(target, lead, float(offsets[idx]), params) + jitter[idx]
        modes.append(Trajectory(tuple(Vec2(float(p[0]), float(p[1])) for p in points)))
    return PredictionSet(modes=tuple(modes))


def min_ade_topk(prediction: PredictionSet, truth: Trajectory) -> float:
    """Minimum over modes of the mean Euclidean waypoint displacement."""
    truth_arr = truth.as_array()
    best = math.inf
    for mode in prediction.modes:
        arr = mode.as_array()
        if arr.shape != truth_arr.shape:
            raise ValueError("prediction and ground truth horizons differ")
        ade = float(np.mean(np.linalg.norm(arr - truth_arr, axis=1)))
        best = min(best, ade)
    return best


@dataclass(frozen=True)
class GeneratorParams:
    """Scene mix of the synthetic corpus."""

    ego_speed: tuple[float, float] = (9.0, 14.0)
    target_longitudinal: tuple[float, float] = (4.0, 10.0)
    target_speed: tuple[float, float] = (4.0, 9.0)
    lead_probability: float = 0.55
    lead_longitudinal: tuple[float, float] = (6.0, 18.0)
    lead_speed: tuple[float, float] = (2.0, 8.0)
    oncoming_probability: float = 0.4
    static_probability: float = 0.15
    truth_accel_sigma: float = 0.25
    truth_jitter: float = 0.10


DEFAULT_GENERATOR_PARAMS = GeneratorParams()


def _vehicle(rng, obj_id, position, heading, speed, category=Category.VEHICLE,
             extents=None) -> ObjectState:
    if extents is None:
        extents = (rng.uniform(2.0, 2.5), rng.uniform(0.85, 1.05))
    velocity = Vec2.unit(heading).scaled(speed)
    return ObjectState(id=obj_id, category=category, position=position, heading=heading,
                       velocity=velocity, half_extent_long=extents[0],
                       half_extent_lat=extents[1])


def generate_synthetic_dataset(n_scenes: int, seed: int,
                               params: GeneratorParams = DEFAULT_GENERATOR_PARAMS,
                               predictor_params: PredictorParams = DEFAULT_PREDICTOR_PARAMS,
                               ) -> list[Scene]:
    """Seeded urban-like corpus: a target with a ground-truth future rolled out
    from the same interaction law plus noise, surrounded by 3-15 context
    objects (lead, oncoming, crossing, clutter, occasional static obstacles).

    Leads stay inside the target's interaction corridor and close to the ego
    axis so corridor-deletion conditions measurably change predictions.
    """
    if n_scenes < 1:
        raise ValueError("n_scenes must be >= 1")
    scenes = []
    for index in range(n_scenes):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, index)))
        ego_heading = rng.uniform(-math.pi, math.pi)
        ego_origin = Vec2(rng.uniform(-150.0, 150.0), rng.uniform(-150.0, 150.0))
        along = Vec2.unit(ego_heading)
        across = Vec2(-along.y, along.x)

        def place(lon: float, lat: float) -> Vec2:
            return ego_origin + along.scaled(lon) + across.scaled(lat)

        ego = _vehicle(rng, "ego", ego_origin, ego_heading, rng.uniform(*params.ego_speed),
                       extents=(2.3, 1.0))
        target_lat = float(np.clip(rng.normal(0.0, 0.8), -2.0, 2.0))
        target = _vehicle(rng, "t00", place(rng.uniform(*params.target_longitudinal), target_lat),
                          ego_heading + rng.normal(0.0, 0.05), rng.uniform(*params.target_speed))
        context: list[ObjectState] = []
        t_along = target.heading_unit()
        t_across = Vec2(-t_along.y, t_along.x)
        if rng.random() < params.lead_probability:
            lon = rng.uniform(*params.lead_longitudinal)
            lat = float(np.clip(rng.normal(0.0, 0.5), -1.5, 1.5))
            pos = target.position + t_along.scaled(lon) + t_across.scaled(lat)
            context.append(_vehicle(rng, f"c{len(context):02d}", pos,
                                    target.heading + rng.normal(0.0, 0.05),
                                    rng.uniform(*params.lead_speed)))
        if rng.random() < params.oncoming_probability:
            pos = place(rng.uniform(15.0, 70.0), rng.uniform(2.8, 5.5))
            context.append(_vehicle(rng, f"c{len(context):02d}", pos,
                                    ego_heading + math.pi + rng.normal(0.0, 0.05),
                                    rng.uniform(4.0, 10.0)))
        for _ in range(rng.integers(0, 3)):
            side = rng.choice([-1.0, 1.0])
            pos = place(rng.uniform(10.0, 60.0), side * rng.uniform(5.0, 40.0))
            heading = ego_heading - side * math.pi / 2.0 + rng.normal(0.0, 0.15)
            context.append(_vehicle(rng, f"c{len(context):02d}", pos, heading,
                                    rng.uniform(2.0, 8.0)))
        if rng.random() < params.static_probability:
            pos = place(rng.uniform(5.0, 45.0), rng.choice([-1.0, 1.0]) * rng.uniform(2.5, 6.0))
            # kept >= 45 deg off-axis so a static never reads as a lead
            heading = ego_heading + rng.choice([-1.0, 1.0]) * rng.uniform(math.pi / 4 + 0.05,
                                                                          3 * math.pi / 4)
            size = rng.uniform(0.4, 1.5)
            context.append(ObjectState(id=f"c{len(context):02d}",
                                       category=Category.STATIC_OBSTACLE, position=pos,
                                       heading=heading, velocity=Vec2(0.0, 0.0),
                                       half_extent_long=size, half_extent_lat=size))
        low = max(1, 3 - len(context))
        high = min(6, 15 - len(context))
        for _ in range(rng.integers(low, high + 1)):
            lon = rng.uniform(-18.0, 92.0)
            lat = rng.choice([-1.0, 1.0]) * rng.uniform(12.0, 58.0)
            heading = rng.uniform(-math.pi, math.pi)
            kind = rng.random()
            if kind < 0.2:
                context.append(_vehicle(rng, f"c{len(context):02d}", place(lon, lat), heading,
                                        rng.uniform(0.0, 2.0), category=Category.PEDESTRIAN,
                                        extents=(0.3, 0.3)))
            else:
                category = Category.VEHICLE if kind < 0.9 else Category.OTHER
                context.append(_vehicle(rng, f"c{len(context):02d}", place(lon, lat), heading,
                                        rng.uniform(0.0, 8.0), category=category))

        objects = (target, *context)
        truth_lead = find_lead(objects, target, predictor_params)
        truth_points = _rollout(target, truth_lead, float(rng.normal(0.0, params.truth_accel_sigma)),
                                predictor_params)
        truth_points = truth_points + rng.normal(0.0, params.truth_jitter, truth_points.shape)
        future = tuple(Vec2(float(p[0]), float(p[1])) for p in truth_points)
        scenes.append(Scene(token=f"s{seed}-{index:05d}", ego=ego, objects=objects,
                            target_agent=target.id, ground_truth_future=future))
    return scenes
