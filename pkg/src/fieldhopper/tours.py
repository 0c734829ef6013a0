"""Closed-tour construction over hovering locations.

Small instances are solved exactly with bitmask dynamic programming; larger
ones fall back to nearest-neighbor construction polished by 2-opt.  The
multi-vehicle variant splits the stops into balanced clusters, one per
vehicle, and exchanges stops between clusters while doing so shortens the
longest (cost-weighted) tour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

EXACT_LIMIT = 15  # stops; above this the heuristic solver takes over


@dataclass(frozen=True)
class Tour:
    """A closed route through stops, optionally via a distinct depot.

    ``order`` is a permutation of the stop indices in visit sequence.
    ``hop_distances`` are the consecutive leg lengths, including the legs to
    and from the depot when the depot does not coincide with a stop.
    """

    order: tuple[int, ...]
    hop_distances: tuple[float, ...]
    depot: tuple[float, float] | None = None
    points: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def total_distance(self) -> float:
        return float(sum(self.hop_distances))

    @property
    def num_stops(self) -> int:
        return len(self.order)


def _distance_matrix(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt((diff**2).sum(axis=2))


def held_karp(dist: np.ndarray) -> tuple[list[int], float]:
    """Exact minimum closed tour through all nodes, starting at node 0."""
    n = dist.shape[0]
    if n == 1:
        return [0], 0.0
    if n == 2:
        return [0, 1], float(dist[0, 1] + dist[1, 0])
    m = n - 1  # nodes 1..n-1 relative to the start node
    size = 1 << m
    sub = dist[1:, 1:]
    dp = np.full((size, m), np.inf)
    parent = np.full((size, m), -1, dtype=np.int32)
    dp[np.arange(m) * 0 + (1 << np.arange(m)), np.arange(m)] = dist[0, 1:]
    members = [np.flatnonzero((np.arange(size) >> j) & 1) for j in range(m)]
    for mask in range(1, size):
        js = [j for j in range(m) if mask & (1 << j)]
        if len(js) < 2:
            continue
        for j in js:
            prev = mask ^ (1 << j)
            cand = dp[prev] + sub[:, j]
            k = int(np.argmin(cand))
            if math.isfinite(cand[k]):
                dp[mask, j] = cand[k]
                parent[mask, j] = k
    full = size - 1
    closing = dp[full] + dist[1:, 0]
    j = int(np.argmin(closing))
    best = float(closing[j])
    path = [j]
    mask = full
    while parent[mask, j] >= 0:
        k = parent[mask, j]
        mask ^= 1 << j
        j = int(k)
        path.append(j)
    path.reverse()
    return [0] + [p + 1 for p in path], best


def nearest_neighbor(dist: np.ndarray, start: int = 0, first: int | None = None) -> list[int]:
    n = dist.shape[0]
    unvisited = set(range(n))
    unvisited.discard(start)
    order = [start]
    if first is not None and first in unvisited:
        order.append(first)
        unvisited.discard(first)
    while unvisited:
        here = order[-1]
        nxt = min(unvisited, key=lambda j: dist[here, j])
        order.append(nxt)
        unvisited.discard(nxt)
    return order


def tour_length(dist: np.ndarray, order: Sequence[int]) -> float:
    idx = np.asarray(order)
    return float(dist[idx, np.roll(idx, -1)].sum())


def two_opt(dist: np.ndarray, order: Sequence[int]) -> list[int]:
    """Best-improvement 2-opt passes until no exchange shortens the tour."""
    order = list(order)
    n = len(order)
    if n < 4:
        return order
    improved = True
    while improved:
        improved = False
        idx = np.asarray(order)
        nxt = np.roll(idx, -1)
        d_edge = dist[idx, nxt]
        # delta[i, j] = gain of reversing order[i+1..j]
        a = dist[np.ix_(idx, idx)]
        b = dist[np.ix_(nxt, nxt)]
        delta = a + b - d_edge[:, None] - d_edge[None, :]
        iu = np.triu_indices(n, k=2)
        gains = delta[iu]
        k = int(np.argmin(gains))
        if gains[k] < -1e-12:
            i, j = int(iu[0][k]), int(iu[1][k])
            order[i + 1 : j + 1] = reversed(order[i + 1 : j + 1])
            improved = True
    return order


def _closed_tour(nodes: np.ndarray) -> tuple[list[int], float]:
    dist = _distance_matrix(nodes)
    n = len(nodes)
    if n <= EXACT_LIMIT + 1:
        return held_karp(dist)
    best_order: list[int] | None = None
    best_len = np.inf
    firsts = np.argsort(dist[0])[1 : 11]
    for first in firsts:
        order = two_opt(dist, nearest_neighbor(dist, 0, int(first)))
        length = tour_length(dist, order)
        if length < best_len:
            best_len = length
            best_order = order
    assert best_order is not None
    # rotate so the tour starts at node 0
    k = best_order.index(0)
    return best_order[k:] + best_order[:k], float(best_len)


def solve_tsp(centers: np.ndarray, depot: Sequence[float]) -> Tour:
    """Shortest closed route visiting every center, from and to the depot.

    Exact for up to 15 centers; otherwise nearest-neighbor plus 2-opt from
    ten different first moves.  A depot coinciding with a center is treated
    as that center rather than inserted as an extra node.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if len(centers) < 1:
        raise ValueError("need at least one center")
    depot = np.asarray(depot, dtype=float)
    d_to_centers = np.sqrt(((centers - depot) ** 2).sum(axis=1))
    depot_idx = int(np.argmin(d_to_centers))
    depot_is_center = d_to_centers[depot_idx] <= 1e-12

    if len(centers) == 1:
        if depot_is_center:
            return Tour(order=(0,), hop_distances=(), depot=tuple(depot), points=centers)
        leg = float(d_to_centers[0])
        return Tour(order=(0,), hop_distances=(leg, leg), depot=tuple(depot), points=centers)

    if depot_is_center:
        nodes = np.vstack([centers[depot_idx], np.delete(centers, depot_idx, axis=0)])
        relabel = [depot_idx] + [i for i in range(len(centers)) if i != depot_idx]
        node_order, _ = _closed_tour(nodes)
        order = tuple(relabel[i] for i in node_order)
        pts = centers[list(order)]
        hops = tuple(
            float(np.linalg.norm(pts[(i + 1) % len(pts)] - pts[i]))
            for i in range(len(pts))
        )
        return Tour(order=order, hop_distances=hops, depot=tuple(depot), points=centers)

    nodes = np.vstack([depot[None, :], centers])
    node_order, _ = _closed_tour(nodes)
    order = tuple(i - 1 for i in node_order[1:])
    pts = np.vstack([depot, centers[list(order)], depot])
    hops = tuple(float(np.linalg.norm(pts[i + 1] - pts[i])) for i in range(len(pts) - 1))
    return Tour(order=order, hop_distances=hops, depot=tuple(depot), points=centers)


def _tour_cost(tour: Tour, stop_cost: float) -> float:
    return tour.total_distance + stop_cost * tour.num_stops


def solve_minmax_mdmtsp(
    centers: np.ndarray,
    depots: Sequence[Sequence[float]],
    k: int,
    stop_cost: float = 0.0,
    seed: int = 0,
) -> list[Tour]:
    """Split stops over ``k`` vehicles minimizing the longest tour.

    Heuristic: balanced clustering seeded at the depots, an exact-or-2-opt
    tour per cluster, then single-stop relocations and pairwise swaps that
    reduce the bottleneck cost.  ``stop_cost`` (distance-equivalent cost per
    stop) lets callers minimize the longest mission rather than the longest
    path; with the default 0 the objective is pure tour length.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    m = len(centers)
    if k < 1:
        raise ValueError("need at least one vehicle")
    if k > m:
        raise ValueError(f"cannot split {m} stops across {k} vehicles")
    depots = np.atleast_2d(np.asarray(depots, dtype=float))
    uav_depots = depots[np.arange(k) % len(depots)]
    if k == 1:
        return [solve_tsp(centers, uav_depots[0])]

    rng = np.random.default_rng(seed)
    if len(depots) >= k:
        seeds = uav_depots.copy()
    else:
        seeds = centers[rng.choice(m, size=k, replace=False)].astype(float)
    assign = np.zeros(m, dtype=int)
    for _ in range(25):
        d = np.linalg.norm(centers[:, None, :] - seeds[None, :, :], axis=2)
        assign = np.argmin(d, axis=1)
        for c in range(k):
            pts = centers[assign == c]
            if len(pts):
                seeds[c] = pts.mean(axis=0)
    cap = math.ceil(m / k)
    d = np.linalg.norm(centers[:, None, :] - seeds[None, :, :], axis=2)
    counts = np.bincount(assign, minlength=k)
    while counts.max() > cap:
        c = int(np.argmax(counts))
        members = np.flatnonzero(assign == c)
        open_clusters = np.flatnonzero(counts < cap)
        # move the member that loses least by switching to an open cluster
        penalties = d[np.ix_(members, open_clusters)] - d[members, c][:, None]
        i, j = np.unravel_index(np.argmin(penalties), penalties.shape)
        assign[members[i]] = open_clusters[j]
        counts = np.bincount(assign, minlength=k)

    def build(c: int, members: np.ndarray) -> Tour:
        return solve_tsp(centers[members], uav_depots[c])

    groups = [np.flatnonzero(assign == c) for c in range(k)]
    tours = [build(c, g) for c, g in enumerate(groups)]

    def relabel(tour: Tour, members: np.ndarray) -> Tour:
        order = tuple(int(members[i]) for i in tour.order)
        return Tour(order=order, hop_distances=tour.hop_distances,
                    depot=tour.depot, points=centers)

    improved = True
    rounds = 0
    while improved and rounds < 200:
        improved = False
        rounds += 1
        costs = [_tour_cost(t, stop_cost) for t in tours]
        worst = int(np.argmax(costs))
        best_max = max(costs)
        if len(groups[worst]) > 1:
            for stop in list(groups[worst]):
                for other in range(k):
                    if other == worst:
                        continue
                    g_w = groups[worst][groups[worst] != stop]
                    g_o = np.append(groups[other], stop)
                    t_w, t_o = build(worst, g_w), build(other, g_o)
                    trial = costs.copy()
                    trial[worst] = _tour_cost(t_w, stop_cost)
                    trial[other] = _tour_cost(t_o, stop_cost)
                    if max(trial) < best_max - 1e-9:
                        groups[worst], groups[other] = g_w, g_o
                        tours[worst], tours[other] = t_w, t_o
                        improved = True
                        break
                if improved:
                    break
        if improved:
            continue
        for stop in list(groups[worst]):
            for other in range(k):
                if other == worst:
                    continue
                for swap in list(groups[other]):
                    g_w = np.append(groups[worst][groups[worst] != stop], swap)
                    g_o = np.append(groups[other][groups[other] != swap], stop)
                    t_w, t_o = build(worst, g_w), build(other, g_o)
                    trial = costs.copy()
                    trial[worst] = _tour_cost(t_w, stop_cost)
                    trial[other] = _tour_cost(t_o, stop_cost)
                    if max(trial) < best_max - 1e-9:
                        groups[worst], groups[other] = g_w, g_o
                        tours[worst], tours[other] = t_w, t_o
                        improved = True
                        break
                if improved:
                    break
            if improved:
                break
    return [relabel(t, g) for t, g in zip(tours, groups)]
