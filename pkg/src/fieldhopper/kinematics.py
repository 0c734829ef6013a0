"""Drone travel kinematics: per-hop times and tour travel times.

Between stops the drone accelerates at ``accel``, cruises at ``speed`` when
the hop is long enough, and decelerates at ``decel`` so it arrives with zero
velocity.  Short hops never reach cruise speed; their duration follows from
constant-acceleration kinematics and is continuous with the cruising branch
at the ramp distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .tours import Tour


@dataclass(frozen=True)
class DroneSpec:
    """Airframe performance limits, all SI.

    speed:       maximum horizontal speed [m/s]
    accel/decel: acceleration / deceleration magnitude [m/s^2]
    reconf_time: per-stop overhead after arrival and before departure [s]
    beamwidth:   antenna cone angle [rad]; ties coverage radius to altitude
    """

    speed: float
    accel: float
    decel: float
    reconf_time: float = 0.0
    beamwidth: float = math.pi / 2

    def __post_init__(self) -> None:
        if self.speed <= 0 or self.accel <= 0 or self.decel <= 0:
            raise ValueError("speed, accel and decel must be positive")
        if self.reconf_time < 0:
            raise ValueError("reconf_time must be non-negative")
        if not 0 < self.beamwidth < math.pi:
            raise ValueError("beamwidth must lie in (0, pi)")

    @property
    def ramp_up_time(self) -> float:
        return self.speed / self.accel

    @property
    def ramp_down_time(self) -> float:
        return self.speed / self.decel

    @property
    def ramp_up_distance(self) -> float:
        return 0.5 * self.accel * self.ramp_up_time**2

    @property
    def ramp_down_distance(self) -> float:
        return 0.5 * self.decel * self.ramp_down_time**2

    @property
    def ramp_distance(self) -> float:
        """Minimum hop length on which cruise speed is reached."""
        return self.ramp_up_distance + self.ramp_down_distance

    def altitude_for_radius(self, radius: float) -> float:
        """Hover height whose antenna cone covers a ground disk of ``radius``."""
        return radius / math.tan(self.beamwidth / 2)


def hop_time(u: float, drone: DroneSpec, paper_literal: bool = False) -> float:
    """Time to fly a hop of length ``u`` starting and ending at rest.

    ``paper_literal`` switches the short-hop branch to sqrt(u/(accel+decel)),
    which is discontinuous at the ramp distance; the default branch
    sqrt(2u(1/accel+1/decel)) is the kinematically consistent one.
    """
    if u < 0:
        raise ValueError("hop length must be non-negative")
    if u == 0:
        return 0.0
    ramp = drone.ramp_distance
    if u >= ramp:
        return (
            drone.ramp_up_time
            + drone.ramp_down_time
            + (u - ramp) / drone.speed
        )
    if paper_literal:
        return math.sqrt(u / (drone.accel + drone.decel))
    return math.sqrt(2.0 * u * (1.0 / drone.accel + 1.0 / drone.decel))


def travel_time(tour: Tour, drone: DroneSpec, paper_literal: bool = False) -> float:
    """Total traveling time of a closed tour: hop times plus per-stop overhead."""
    hops = sum(hop_time(u, drone, paper_literal) for u in tour.hop_distances)
    return hops + tour.num_stops * drone.reconf_time


@dataclass(frozen=True)
class ApproxTravelTime:
    """Closed-form travel time for fields large enough to reach cruise speed."""

    value: float
    size_bound: float
    area_side: float

    @property
    def bound_ok(self) -> bool:
        return self.area_side >= self.size_bound


def field_size_bound(m: int, alpha: float, drone: DroneSpec) -> float:
    """Smallest field side on which the average hop allows full acceleration."""
    if alpha <= 0:
        return math.inf
    return (
        m
        * drone.speed**2
        * (1.0 / drone.accel + 1.0 / drone.decel)
        / (2.0 * alpha)
    )


def travel_time_approx(
    m: int,
    area_side: float,
    drone: DroneSpec,
    alpha: float,
) -> ApproxTravelTime:
    """Closed-form travel time from the normalized tour length ``alpha``.

    Valid when every hop is long enough to reach cruise speed; the result is
    flagged (not rejected) when ``area_side`` is below that bound.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    t_stop = drone.ramp_up_time + drone.ramp_down_time + drone.reconf_time
    value = (alpha * area_side - m * drone.ramp_distance) / drone.speed + m * t_stop
    return ApproxTravelTime(
        value=value,
        size_bound=field_size_bound(m, alpha, drone),
        area_side=area_side,
    )
