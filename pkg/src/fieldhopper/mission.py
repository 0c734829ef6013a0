"""Top-level mission planners.

For every candidate number of hovering locations M the planner pulls the
cached covering layout, derives the hover geometry, optimizes the link
parameters, prices the hover and travel times, and keeps the M with the
smallest total.  Hover time falls with M (smaller disks hear their sensors
better) while travel time grows, so the total has an interior minimum; the
sweep stops after the total has risen for three consecutive M to ride out
heuristic-coverage noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .channel import (
    HoverGeometry,
    RadioSpec,
    aggregation_slots,
    optimal_aloha,
    optimal_beta,
    slot_duration,
    success_probability,
)
from .covering import NormalizedCoverageTable
from .field import CovarianceSpec, EstimationInfeasible, optimal_slots_estimation
from .kinematics import DroneSpec, travel_time
from .search import golden_min
from .tours import Tour, solve_minmax_mdmtsp, solve_tsp

__all__ = [
    "FieldSpec",
    "MissionRecord",
    "MissionReport",
    "UavBreakdown",
    "plan_aggregation",
    "plan_estimation",
    "multi_uav_total",
    "optimal_m_vs_area",
]


@dataclass(frozen=True)
class FieldSpec:
    """The deployment area: square side length [m] and sensor density [1/m^2]."""

    side: float
    density: float

    def __post_init__(self) -> None:
        if self.side <= 0 or self.density < 0:
            raise ValueError("side must be positive and density non-negative")


@dataclass(frozen=True)
class UavBreakdown:
    stops: int
    travel_time: float
    total_time: float


@dataclass
class MissionRecord:
    """Everything the planner computed for one candidate M."""

    m: int
    radius: float
    altitude: float
    beta: float
    aloha: float
    p_success: float
    slots_per_hl: float
    hover_per_hl: float
    hover_total: float
    travel: float
    total: float
    feasible: bool = True
    r_mse: float | None = None
    rho: float | None = None
    p_edge_success: float | None = None
    per_uav: list[UavBreakdown] | None = None
    bottleneck_uav: int | None = None

    def to_dict(self) -> dict:
        out = {
            "M": self.m,
            "radius_m": self.radius,
            "altitude_m": self.altitude,
            "beta": self.beta,
            "aloha": self.aloha,
            "p_success": self.p_success,
            "slots_per_hl": self.slots_per_hl,
            "hover_per_hl_s": self.hover_per_hl,
            "hover_total_s": self.hover_total,
            "travel_s": self.travel,
            "total_s": self.total,
            "feasible": self.feasible,
        }
        if self.r_mse is not None:
            out.update(r_mse_m=self.r_mse, rho=self.rho,
                       p_edge_success=self.p_edge_success)
        if self.per_uav is not None:
            out["per_uav"] = [
                {"stops": u.stops, "travel_s": u.travel_time, "total_s": u.total_time}
                for u in self.per_uav
            ]
            out["bottleneck_uav"] = self.bottleneck_uav
        return out


@dataclass
class MissionReport:
    kind: str
    field: FieldSpec
    uavs: int
    records: list[MissionRecord] = dc_field(default_factory=list)

    @property
    def feasible_records(self) -> list[MissionRecord]:
        return [r for r in self.records if r.feasible]

    @property
    def best(self) -> MissionRecord:
        candidates = self.feasible_records
        if not candidates:
            raise EstimationInfeasible("no feasible M in the evaluated range")
        return min(candidates, key=lambda r: r.total)

    @property
    def best_m(self) -> int:
        return self.best.m

    def to_dict(self) -> dict:
        out = {
            "mission": self.kind,
            "field_side_m": self.field.side,
            "density_per_m2": self.field.density,
            "uavs": self.uavs,
            "records": [r.to_dict() for r in self.records],
        }
        if self.feasible_records:
            out["best"] = self.best.to_dict()
        return out


def multi_uav_total(
    tours: Sequence[Tour],
    hover_per_hl: float,
    drone: DroneSpec,
    paper_literal: bool = False,
) -> tuple[float, list[UavBreakdown], int]:
    """Mission time when tours run in parallel: the slowest UAV sets it."""
    per_uav = []
    for tour in tours:
        t_travel = travel_time(tour, drone, paper_literal)
        per_uav.append(
            UavBreakdown(
                stops=tour.num_stops,
                travel_time=t_travel,
                total_time=t_travel + tour.num_stops * hover_per_hl,
            )
        )
    worst = int(np.argmax([u.total_time for u in per_uav]))
    return per_uav[worst].total_time, per_uav, worst


def _link_for_aggregation(
    geom: HoverGeometry,
    radio: RadioSpec,
    fixed_beta: float | None,
    fixed_aloha: float | None,
) -> RadioSpec:
    if fixed_beta is not None and fixed_aloha is not None:
        return radio.with_(beta=fixed_beta, aloha=fixed_aloha)
    if fixed_beta is not None:
        trial = radio.with_(beta=fixed_beta)
        return trial.with_(aloha=optimal_aloha(geom, trial))
    best = optimal_beta(
        geom, radio, optimize_a=fixed_aloha is None
    )
    aloha = best.aloha if fixed_aloha is None else fixed_aloha
    return radio.with_(beta=best.beta, aloha=aloha)


def _tours_and_travel(
    centers: np.ndarray,
    depots: np.ndarray,
    k: int,
    drone: DroneSpec,
    hover_per_hl: float,
    paper_literal: bool,
    seed: int,
) -> tuple[float, float, list[UavBreakdown] | None, int | None]:
    """(total travel-or-mission residual, travel, per-uav, bottleneck)."""
    if k == 1:
        tour = solve_tsp(centers, depots[0])
        t_travel = travel_time(tour, drone, paper_literal)
        total = len(centers) * hover_per_hl + t_travel
        return total, t_travel, None, None
    stop_cost = drone.speed * (hover_per_hl + drone.reconf_time)
    tours = solve_minmax_mdmtsp(centers, depots, k, stop_cost=stop_cost, seed=seed)
    total, per_uav, worst = multi_uav_total(tours, hover_per_hl, drone, paper_literal)
    return total, per_uav[worst].travel_time, per_uav, worst


def _default_depots(field: FieldSpec, depots) -> np.ndarray:
    if depots is None:
        return np.array([[field.side / 2.0, field.side / 2.0]])
    return np.atleast_2d(np.asarray(depots, dtype=float))


def _sweep(records: list[MissionRecord], stop_after: int = 3) -> bool:
    """True when the total has been rising for ``stop_after`` consecutive M."""
    feasible = [r for r in records if r.feasible]
    if len(feasible) <= stop_after:
        return False
    tail = feasible[-(stop_after + 1):]
    return all(b.total > a.total for a, b in zip(tail[:-1], tail[1:]))


def plan_aggregation(
    field: FieldSpec,
    drone: DroneSpec,
    radio: RadioSpec,
    zeta: float,
    m_range: Sequence[int] = range(1, 25),
    k: int = 1,
    depots=None,
    table: NormalizedCoverageTable | None = None,
    fixed_beta: float | None = None,
    fixed_aloha: float | None = None,
    paper_literal_kinematics: bool = False,
    seed: int = 0,
) -> MissionReport:
    """Minimize total mission time while collecting ``zeta`` samples on average.

    Hover time per location is the expected slot count zeta/(M P_s) times the
    slot length, so the per-location hover budget is equal across locations
    and scales linearly with zeta.
    """
    if zeta < 0:
        raise ValueError("zeta must be non-negative")
    table = table if table is not None else NormalizedCoverageTable(seed=seed)
    depots_arr = _default_depots(field, depots)
    report = MissionReport(kind="aggregation", field=field, uavs=k)
    for m in m_range:
        if k > m:
            continue
        plan = table.plan(m, field.side, drone.beamwidth)
        geom = HoverGeometry(plan.radius, plan.altitude, field.density)
        link = _link_for_aggregation(geom, radio, fixed_beta, fixed_aloha)
        p = success_probability(geom, link)
        slots = aggregation_slots(m, zeta, p)
        hover = slots * slot_duration(link) if math.isfinite(slots) else math.inf
        record = MissionRecord(
            m=m, radius=plan.radius, altitude=plan.altitude,
            beta=link.beta, aloha=link.aloha, p_success=p,
            slots_per_hl=slots, hover_per_hl=hover,
            hover_total=m * hover, travel=math.nan, total=math.inf,
            feasible=math.isfinite(hover),
        )
        if record.feasible:
            total, travel, per_uav, worst = _tours_and_travel(
                plan.centers, depots_arr, k, drone, hover,
                paper_literal_kinematics, seed,
            )
            record.travel = travel
            record.total = total
            record.per_uav = per_uav
            record.bottleneck_uav = worst
        report.records.append(record)
        if _sweep(report.records):
            break
    return report


def _link_for_estimation(
    geom: HoverGeometry,
    radio: RadioSpec,
    cov: CovarianceSpec,
    delta: float,
    fixed_beta: float | None,
    fixed_aloha: float | None,
    beta_max: float = 20.0,
):
    """Pick beta (and aloha) minimizing per-hover time J* x slot length."""

    def budget_for(link: RadioSpec):
        return optimal_slots_estimation(geom, link, cov, delta)

    def aloha_for(link: RadioSpec) -> float:
        if fixed_aloha is not None:
            return fixed_aloha
        return optimal_aloha(geom, link)

    if fixed_beta is not None:
        link = radio.with_(beta=fixed_beta)
        link = link.with_(aloha=aloha_for(link))
        return link, budget_for(link)

    # seed the transmit probability at a mid-range threshold, then line-search
    # beta on the true objective, then re-tune the transmit probability once
    seed_link = radio.with_(beta=1.8)
    a0 = aloha_for(seed_link)

    def hover_at(log_beta: float) -> float:
        link = radio.with_(beta=math.exp(log_beta), aloha=a0)
        try:
            return budget_for(link).hover_time
        except EstimationInfeasible:
            return math.inf

    log_best, _ = golden_min(hover_at, 0.0, math.log(beta_max), tol=5e-3)
    link = radio.with_(beta=math.exp(log_best), aloha=a0)
    if fixed_aloha is None:
        link = link.with_(aloha=optimal_aloha(geom, link))
    return link, budget_for(link)


def plan_estimation(
    field: FieldSpec,
    drone: DroneSpec,
    radio: RadioSpec,
    cov: CovarianceSpec,
    delta: float,
    m_range: Sequence[int] = range(1, 25),
    k: int = 1,
    depots=None,
    table: NormalizedCoverageTable | None = None,
    fixed_beta: float | None = None,
    fixed_aloha: float | None = None,
    paper_literal_kinematics: bool = False,
    seed: int = 0,
) -> MissionReport:
    """Minimize mission time subject to the field-estimation MSE target.

    Per-hover slot counts come from the edge-MSE budget (probe radius line
    search), so unlike aggregation the hover time does not shrink with 1/M.
    """
    if not 0.0 < delta < cov.sigma2:
        raise ValueError("delta must lie in (0, sigma2)")
    table = table if table is not None else NormalizedCoverageTable(seed=seed)
    depots_arr = _default_depots(field, depots)
    report = MissionReport(kind="estimation", field=field, uavs=k)
    for m in m_range:
        if k > m:
            continue
        plan = table.plan(m, field.side, drone.beamwidth)
        geom = HoverGeometry(plan.radius, plan.altitude, field.density)
        try:
            link, budget = _link_for_estimation(
                geom, radio, cov, delta, fixed_beta, fixed_aloha
            )
        except EstimationInfeasible:
            report.records.append(
                MissionRecord(
                    m=m, radius=plan.radius, altitude=plan.altitude,
                    beta=radio.beta, aloha=radio.aloha, p_success=0.0,
                    slots_per_hl=math.inf, hover_per_hl=math.inf,
                    hover_total=math.inf, travel=math.nan, total=math.inf,
                    feasible=False,
                )
            )
            continue
        hover = budget.hover_time
        record = MissionRecord(
            m=m, radius=plan.radius, altitude=plan.altitude,
            beta=link.beta, aloha=link.aloha,
            p_success=success_probability(geom, link),
            slots_per_hl=budget.j_star, hover_per_hl=hover,
            hover_total=m * hover, travel=math.nan, total=math.inf,
            r_mse=budget.r_mse, rho=budget.rho,
            p_edge_success=budget.p_edge_success,
        )
        total, travel, per_uav, worst = _tours_and_travel(
            plan.centers, depots_arr, k, drone, hover,
            paper_literal_kinematics, seed,
        )
        record.travel = travel
        record.total = total
        record.per_uav = per_uav
        record.bottleneck_uav = worst
        report.records.append(record)
        if _sweep(report.records):
            break
    return report


def optimal_m_vs_area(
    sides: Sequence[float],
    kind: str,
    field_density: float,
    drone: DroneSpec,
    radio: RadioSpec,
    table: NormalizedCoverageTable,
    zeta: float | None = None,
    cov: CovarianceSpec | None = None,
    delta: float | None = None,
    strict: bool = False,
    **kwargs,
) -> list[tuple[float, MissionReport]]:
    """Best M per field size; M* should not shrink as the field grows."""
    if len(sides) < 2:
        raise ValueError("need at least two field sizes")
    out: list[tuple[float, MissionReport]] = []
    for side in sides:
        fld = FieldSpec(side=side, density=field_density)
        if kind == "aggregation":
            rep = plan_aggregation(fld, drone, radio, zeta, table=table, **kwargs)
        elif kind == "estimation":
            rep = plan_estimation(fld, drone, radio, cov, delta, table=table, **kwargs)
        else:
            raise ValueError(f"unknown mission kind {kind!r}")
        out.append((side, rep))
    if strict:
        best = [rep.best_m for _, rep in sorted(out, key=lambda t: t[0])]
        if any(b < a for a, b in zip(best[:-1], best[1:])):
            raise RuntimeError(f"optimal M not monotone in area: {best}")
    return out
