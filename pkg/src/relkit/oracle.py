"""Numeric time-stepping reference for the worst-case closing maneuvers.

Each episode is reduced to one axis: both agents move toward each other in
their own coordinate, the gap shrinks by the sum of the distances covered.
The simulator integrates piecewise-constant-acceleration phase plans on a
uniform time grid and reports the smallest observed gap minus the collision
extents; it is deliberately independent of the closed-form margin algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Phase:
    """One motion phase. Exactly one termination applies:

    - ``duration`` seconds (forward motion braked to rest stays at rest), or
    - ``brake=True``: decelerate at |accel| toward standstill, end there, or
    - ``until_distance``: hold ``accel`` until the phase has covered that many
      meters (requires forward progress), or
    - all unset: run until the episode ends (valid only as the opponent's
      last phase).
    """

    accel: float
    duration: float | None = None
    until_distance: float | None = None
    brake: bool = False

    def __post_init__(self) -> None:
        given = [self.duration is not None, self.until_distance is not None, self.brake]
        if sum(given) > 1:
            raise ValueError("phase may specify only one of duration/until_distance/brake")
        if self.duration is not None and self.duration < 0.0:
            raise ValueError("phase duration must be >= 0")
        if self.until_distance is not None and self.until_distance < 0.0:
            raise ValueError("until_distance must be >= 0")


@dataclass(frozen=True)
class PhasePlan:
    """Maneuver sequences for the two agents plus the summed collision extents."""

    ego: tuple[Phase, ...]
    other: tuple[Phase, ...]
    extents: float = 0.0


def _segments(phases: tuple[Phase, ...], v0: float, allow_open: bool) -> tuple[list, float, float]:
    """Resolve phases into (duration, entry_speed, accel) segments.

    Returns (segments, total_time, exit_speed); open phases get duration None
    and must be last.
    """
    segs: list[tuple[float | None, float, float]] = []
    v = v0
    total = 0.0
    for i, ph in enumerate(phases):
        if ph.brake:
            rate = abs(ph.accel)
            if v != 0.0:
                if rate <= 0.0:
                    raise ValueError("brake phase needs a nonzero deceleration")
                dur = abs(v) / rate
                segs.append((dur, v, -math.copysign(rate, v)))
                total += dur
            v = 0.0
        elif ph.until_distance is not None:
            target = ph.until_distance
            if target > 0.0:
                a = ph.accel
                if v < 0.0 or (v == 0.0 and a <= 0.0):
                    raise ValueError("until_distance phase requires forward progress")
                if a == 0.0:
                    dur = target / v
                elif a < 0.0 and v * v / (2.0 * -a) < target:
                    raise ValueError("phase decelerates to rest before covering until_distance")
                else:
                    dur = (-v + math.sqrt(v * v + 2.0 * a * target)) / a
                segs.append((dur, v, a))
                total += dur
                v += a * dur
        elif ph.duration is not None:
            dur = ph.duration
            a = ph.accel
            if a < 0.0 and v >= 0.0 and v + a * dur < 0.0:
                t_cross = v / -a  # forward motion braked to rest mid-phase stays at rest
                if t_cross > 0.0:
                    segs.append((t_cross, v, a))
                segs.append((dur - t_cross, 0.0, 0.0))
                v = 0.0
            else:
                segs.append((dur, v, a))
                v += a * dur
            total += dur
        else:
            if not allow_open or i != len(phases) - 1:
                raise ValueError("open-ended phase only allowed as the opponent's last phase")
            segs.append((None, v, ph.accel))
            return segs, total, v
    return segs, total, v


def _positions(segs: list, end_time: float, times: np.ndarray) -> np.ndarray:
    """Sample the covered distance at ``times`` for a resolved segment list."""
    x = np.empty_like(times)
    x0 = 0.0
    t0 = 0.0
    done = 0
    for dur, v, a in segs:
        seg_end = end_time if dur is None else min(t0 + dur, end_time)
        upto = int(np.searchsorted(times, seg_end, side="right"))
        tau = times[done:upto] - t0
        x[done:upto] = x0 + v * tau + 0.5 * a * tau * tau
        done = upto
        span = seg_end - t0
        x0 += v * span + 0.5 * a * span * span
        t0 = seg_end
        if t0 >= end_time or done >= times.size:
            break
    if done < times.size:  # plan exhausted early: hold last speed
        v_hold = segs[-1][1] + segs[-1][2] * segs[-1][0] if segs and segs[-1][0] is not None else 0.0
        tau = times[done:] - t0
        x[done:] = x0 + v_hold * tau
    return x


def simulate_min_gap(plan: PhasePlan, gap0: float, ego_speed: float,
                     other_speed: float, dt: float, min_duration: float = 0.0) -> float:
    """Integrate both agents' phase plans and return min(gap) - extents.

    The gap is sampled on a uniform dt grid including the exact episode end;
    the episode lasts until the ego plan completes (at least ``min_duration``).
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    ego_segs, ego_total, _ = _segments(plan.ego, ego_speed, allow_open=False)
    other_segs, _, _ = _segments(plan.other, other_speed, allow_open=True)
    end_time = max(ego_total, min_duration)
    n = int(math.floor(end_time / dt))
    times = np.arange(n + 1, dtype=float) * dt
    if end_time - times[-1] > 1e-15:
        times = np.append(times, end_time)
    gap = gap0 - _positions(ego_segs, end_time, times) - _positions(other_segs, end_time, times)
    return float(gap.min()) - plan.extents
