"""Scene representation and radial/tangential decomposition of ego-object pairs.

All positions are meters in an arbitrary fixed scene frame, velocities are m/s
in the same frame, headings are radians (math convention, 0 = +x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

MIN_GAP = 1e-9

# Input crop used by the prediction pipeline, expressed in the target agent's
# frame: longitudinal [-20, 80] m, lateral [-50, 50] m.
REGION_LONGITUDINAL = (-20.0, 80.0)
REGION_LATERAL = (-50.0, 50.0)


class GeometryError(ValueError):
    """Raised when a geometric operation degenerates (coincident positions)."""


class CapabilityError(ValueError):
    """Raised when an ego capability makes a required maneuver impossible."""


@dataclass(frozen=True)
class Vec2:
    """2D vector; meters for positions, m/s for velocities."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite vector components ({self.x}, {self.y})")

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Vec2") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def scaled(self, factor: float) -> "Vec2":
        return Vec2(self.x * factor, self.y * factor)

    def rotated(self, angle: float) -> "Vec2":
        c, s = math.cos(angle), math.sin(angle)
        return Vec2(c * self.x - s * self.y, s * self.x + c * self.y)

    @staticmethod
    def unit(angle: float) -> "Vec2":
        return Vec2(math.cos(angle), math.sin(angle))


@dataclass(frozen=True)
class EgoCapabilities:
    """Guaranteed ego response: reaction delay, braking, lateral braking, acceleration.

    Magnitudes are positive; braking values are deceleration magnitudes.
    """

    reaction_time: float      # s, no response possible before this elapses
    guaranteed_brake: float   # m/s^2, longitudinal deceleration always available
    guaranteed_lateral_brake: float  # m/s^2, lateral deceleration always available
    guaranteed_accel: float   # m/s^2, acceleration always available

    def __post_init__(self) -> None:
        for name in ("reaction_time", "guaranteed_brake",
                     "guaranteed_lateral_brake", "guaranteed_accel"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be > 0, got {value}")
        if self.reaction_time > 10.0:
            raise ValueError(f"reaction_time {self.reaction_time} s fails sanity bound (<= 10 s)")


@dataclass(frozen=True)
class WorldAssumptions:
    """Universal bound on any participant's acceleration magnitude, any direction."""

    max_accel: float  # m/s^2

    def __post_init__(self) -> None:
        # >= 0 so degenerate no-disturbance worlds remain expressible.
        if not (math.isfinite(self.max_accel) and self.max_accel >= 0.0):
            raise ValueError(f"max_accel must be >= 0, got {self.max_accel}")


class Category(Enum):
    VEHICLE = "vehicle"
    PEDESTRIAN = "pedestrian"
    STATIC_OBSTACLE = "static_obstacle"
    OTHER = "other"


@dataclass(frozen=True)
class ObjectState:
    """Pose, velocity and footprint half-extents of one traffic participant."""

    id: str
    category: Category
    position: Vec2
    heading: float            # rad
    velocity: Vec2
    half_extent_long: float   # m, half length along heading
    half_extent_lat: float    # m, half width across heading

    def __post_init__(self) -> None:
        if self.half_extent_long < 0.0 or self.half_extent_lat < 0.0:
            raise ValueError("half extents must be >= 0")
        if not math.isfinite(self.heading):
            raise ValueError("heading must be finite")
        if self.category is Category.STATIC_OBSTACLE and self.velocity.norm() > 0.0:
            raise ValueError("static obstacles must have zero velocity")

    def heading_unit(self) -> Vec2:
        return Vec2.unit(self.heading)

    def extent_along(self, axis: Vec2) -> float:
        """Half-extent of the oriented footprint projected on unit vector ``axis``."""
        h = self.heading_unit()
        return (self.half_extent_long * abs(axis.dot(h))
                + self.half_extent_lat * abs(axis.cross(h)))


@dataclass(frozen=True)
class Scene:
    """One prediction instance: ego, surrounding objects, and the target's true future."""

    token: str
    ego: ObjectState
    objects: tuple[ObjectState, ...]
    target_agent: str
    ground_truth_future: tuple[Vec2, ...]
    capabilities: EgoCapabilities | None = None  # per-scene override, else campaign default

    def __post_init__(self) -> None:
        if not any(o.id == self.target_agent for o in self.objects):
            raise ValueError(f"target agent {self.target_agent!r} not among scene objects")

    def target(self) -> ObjectState:
        for obj in self.objects:
            if obj.id == self.target_agent:
                return obj
        raise AssertionError("unreachable: validated at construction")

    def with_objects(self, objects: tuple[ObjectState, ...]) -> "Scene":
        return replace(self, objects=objects)


@dataclass(frozen=True)
class RadialTangentialState:
    """Relative ego-object state split along / across the connecting line.

    ``gap`` and the two radial speeds follow the connecting-line polar
    decomposition; the ``travel_*`` fields express the ego relative to the
    line the object travels on (through its position, along its heading).
    """

    gap: float                 # m, center distance ego-object
    ego_radial_speed: float    # m/s, ego velocity component toward the object (signed)
    obj_radial_speed: float    # m/s, object velocity component toward the ego (signed)
    ego_perp_speed: float      # m/s, |ego velocity component across the connecting line|
    lateral_offset: float      # m, ego center distance to the object's travel line
    obj_tangential_speed: float  # m/s, object velocity component across the connecting line (signed)
    travel_gap: float          # m, ego projection ahead (+) of the object along its travel line
    ego_travel_speed: float    # m/s, ego velocity component along the object's heading
    obj_travel_speed: float    # m/s, object velocity component along its own heading

    def __post_init__(self) -> None:
        if self.gap < 0.0 or self.lateral_offset < 0.0 or self.ego_perp_speed < 0.0:
            raise ValueError("gap, lateral_offset and ego_perp_speed must be >= 0")


class ScenarioClass(Enum):
    """Interaction classes: R = radial, T = tangential; suffix letters say whether the
    ego (second letter) and the object (third letter) move Toward or Away."""

    R_TA = "R.TA"
    R_AT = "R.AT"
    R_TT = "R.TT"
    R_AA = "R.AA"
    T_XT = "T.XT"
    T_XA = "T.XA"


def decompose_relative_state(ego: ObjectState, obj: ObjectState) -> RadialTangentialState:
    """Split the ego-object relative state into radial/tangential components.

    Raises GeometryError when the two positions coincide (no connecting line).
    """
    offset = obj.position - ego.position
    gap = offset.norm()
    if gap <= MIN_GAP:
        raise GeometryError(f"coincident positions for ego and object {obj.id!r}")
    u = offset.scaled(1.0 / gap)           # ego -> object
    u_perp = Vec2(-u.y, u.x)
    travel = obj.heading_unit()
    rel = ego.position - obj.position
    return RadialTangentialState(
        gap=gap,
        ego_radial_speed=ego.velocity.dot(u),
        obj_radial_speed=-obj.velocity.dot(u),
        ego_perp_speed=abs(ego.velocity.dot(u_perp)),
        lateral_offset=abs(travel.cross(rel)),
        obj_tangential_speed=obj.velocity.dot(u_perp),
        travel_gap=rel.dot(travel),
        ego_travel_speed=ego.velocity.dot(travel),
        obj_travel_speed=obj.velocity.dot(travel),
    )


def classify_scenario(state: RadialTangentialState,
                      tangential_angle_deg: float = 45.0) -> ScenarioClass:
    """Assign the unique interaction class for a decomposed pair.

    The pair is tangential when the object's velocity points more than
    ``tangential_angle_deg`` away from the connecting line (zero velocity
    classifies radial); otherwise radial, with Toward/Away letters taken
    from the signs of the radial speeds.
    """
    threshold = math.tan(math.radians(tangential_angle_deg))
    if abs(state.obj_tangential_speed) > threshold * abs(state.obj_radial_speed):
        return ScenarioClass.T_XT if state.obj_radial_speed > 0.0 else ScenarioClass.T_XA
    if state.ego_radial_speed > 0.0:
        return ScenarioClass.R_TT if state.obj_radial_speed > 0.0 else ScenarioClass.R_TA
    return ScenarioClass.R_AT if state.obj_radial_speed > 0.0 else ScenarioClass.R_AA


def in_region(target: ObjectState, obj: ObjectState,
              longitudinal: tuple[float, float] = REGION_LONGITUDINAL,
              lateral: tuple[float, float] = REGION_LATERAL) -> bool:
    """True if ``obj`` lies inside the crop box expressed in ``target``'s frame."""
    rel = obj.position - target.position
    h = target.heading_unit()
    lon = rel.dot(h)
    lat = h.cross(rel)
    return longitudinal[0] <= lon <= longitudinal[1] and lateral[0] <= lat <= lateral[1]


def region_filter(scene: Scene,
                  longitudinal: tuple[float, float] = REGION_LONGITUDINAL,
                  lateral: tuple[float, float] = REGION_LATERAL) -> Scene:
    """Drop objects outside the prediction input crop around the target agent.

    Applied before every condition filter; idempotent. The target agent sits
    at its own frame origin and is always kept.
    """
    target = scene.target()
    kept = tuple(o for o in scene.objects if in_region(target, o, longitudinal, lateral))
    return scene.with_objects(kept)
