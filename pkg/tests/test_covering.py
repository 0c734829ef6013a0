import math

import numpy as np
import pytest

from fieldhopper.covering import (
    AlphaFit,
    NormalizedCoverageTable,
    TableRow,
    cover_radius,
    fit_alpha,
    solve_coverage,
)


def grid_gap(centers, side, n=500):
    """Brute-force covering radius on a dense grid (lower bound on exact)."""
    ticks = np.linspace(0.0, side, n)
    xx, yy = np.meshgrid(ticks, ticks)
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    d = np.linalg.norm(pts[:, None, :] - centers[None, :, :], axis=2)
    return float(d.min(axis=1).max())


def test_single_disk_closed_form():
    plan = solve_coverage(1, 1.0, seed=0)
    assert plan.radius == pytest.approx(math.sqrt(0.5), rel=1e-12)
    assert plan.centers[0] == pytest.approx([0.5, 0.5])


def test_four_disks_quadrant_grid():
    plan = solve_coverage(4, 1.0, seed=3, restarts=20)
    assert plan.radius == pytest.approx(math.sqrt(2.0) / 4.0, abs=1e-3)


def test_seven_disks_near_optimal():
    plan = solve_coverage(7, 1.0, seed=11, restarts=50)
    assert plan.radius <= 0.280


def test_exact_radius_vs_grid_oracle(rng):
    for m in (3, 6, 12):
        centers = rng.random((m, 2))
        exact = cover_radius(centers)
        grid = grid_gap(centers, 1.0, n=400)
        cell = math.sqrt(2.0) / 2.0 / 399.0
        assert grid <= exact + 1e-12
        assert exact <= grid + cell


@pytest.mark.parametrize("m", [2, 5, 9])
def test_union_covers_square(m):
    plan = solve_coverage(m, 100.0, seed=m, restarts=25)
    assert plan.covers(grid=400, tol_factor=1e-6)
    assert plan.max_gap(grid=400) <= plan.radius + 1e-6 * plan.area_side


def test_altitude_ties_radius_to_beamwidth():
    plan = solve_coverage(3, 50.0, seed=2, restarts=15, beamwidth=math.radians(60.0))
    assert plan.radius == pytest.approx(
        plan.altitude * math.tan(plan.beamwidth / 2.0), rel=1e-12
    )


def test_scale_equivariance():
    a = solve_coverage(5, 1.0, seed=9, restarts=20)
    b = solve_coverage(5, 250.0, seed=9, restarts=20)
    # same normalized layout, scaled: solved once in unit coordinates
    assert np.array_equal(a.centers * 250.0, b.centers)
    assert b.radius == pytest.approx(a.radius * 250.0, rel=1e-15)


def test_table_monotone_and_anchors(table):
    deltas = [table.delta(m) for m in range(1, table.max_m + 1)]
    assert deltas[0] == pytest.approx(math.sqrt(0.5), rel=1e-9)
    assert table.alpha(1) == 0.0
    for a, b in zip(deltas[:-1], deltas[1:]):
        assert b <= a * 1.005  # non-increasing within heuristic slack


def test_table_round_trip(tmp_path, table):
    path = tmp_path / "table.csv"
    table.save(path)
    again = NormalizedCoverageTable.load(path)
    assert again.max_m == table.max_m
    for m in range(1, table.max_m + 1):
        assert again.delta(m) == table.delta(m)
        assert again.alpha(m) == table.alpha(m)
        assert np.array_equal(again.centers(m), table.centers(m))
    before = path.read_bytes()
    again.save(path)
    assert path.read_bytes() == before


def test_plan_from_table_scales(table):
    plan = table.plan(6, 100.0)
    assert plan.radius == pytest.approx(table.delta(6) * 100.0)
    assert plan.covers()


def test_fit_recovers_synthetic_coefficients():
    rows = {}
    for m in range(1, 25):
        alpha = math.sqrt(1.35 * m) - 0.4
        rows[m] = TableRow(m=m, delta=1.0 / m, alpha=alpha, centers=np.zeros((m, 2)))
    fit = fit_alpha(NormalizedCoverageTable(rows))
    assert fit.c == pytest.approx(1.35, rel=1e-9)
    assert fit.d == pytest.approx(-0.4, rel=1e-9)
    assert fit.rel_error == pytest.approx(0.0, abs=1e-12)


def test_fit_predicts_m16_value():
    fit = AlphaFit(c=1.35, d=-0.4, rel_error=0.0)
    assert float(fit(16)) == pytest.approx(4.25, abs=5e-3)  # tabulated 4.26


def test_fit_ignores_zero_tour_row():
    rows = {
        m: TableRow(m=m, delta=1.0 / m, alpha=(math.sqrt(2.0 * m) if m > 1 else 0.0),
                    centers=np.zeros((m, 2)))
        for m in range(1, 11)
    }
    fit = fit_alpha(NormalizedCoverageTable(rows))
    assert fit.c == pytest.approx(2.0, rel=1e-9)
    assert fit.d == pytest.approx(0.0, abs=1e-9)


def test_solver_rejects_bad_input():
    with pytest.raises(ValueError):
        solve_coverage(0, 1.0, seed=0)
    with pytest.raises(ValueError):
        solve_coverage(3, -1.0, seed=0)
