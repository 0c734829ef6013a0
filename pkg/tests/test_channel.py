import math

import numpy as np
import pytest

from fieldhopper import channel
from fieldhopper.channel import (
    HoverGeometry,
    RadioSpec,
    edge_success_probability,
    hover_time_aggregation,
    laplace_derivative,
    laplace_interference,
    optimal_aloha,
    optimal_beta,
    slot_duration,
    success_probability,
    theta_lens,
)


def test_radio_validation():
    good = dict(power=1e-6, noise=1e-11, eta=3.0, m=1, bandwidth=2e5, packet_bits=40960)
    RadioSpec(**good)
    with pytest.raises(ValueError):
        RadioSpec(**{**good, "m": 0})
    with pytest.raises(ValueError):
        RadioSpec(**{**good, "m": 1.5})
    with pytest.raises(ValueError):
        RadioSpec(**good, beta=0.5)
    with pytest.raises(ValueError):
        RadioSpec(**good, aloha=1.2)
    with pytest.raises(ValueError):
        RadioSpec(**{**good, "eta": 2.0})


def test_geometry_slant():
    geom = HoverGeometry(radius=20.0, altitude=20.0, density=0.1)
    assert geom.slant**2 == pytest.approx(geom.radius**2 + geom.altitude**2, rel=1e-15)
    assert geom.mean_nodes == pytest.approx(0.1 * math.pi * 400.0)


def test_laplace_at_zero_is_one(geom20, radio):
    assert laplace_interference(0.0, geom20, radio) == pytest.approx(1.0, rel=1e-12)


def test_laplace_no_transmitters_is_noise_only(geom20, radio):
    quiet = radio.with_(aloha=0.0)
    for s in (0.0, 1e3, 1e5):
        want = math.exp(-s * quiet.noise / quiet.power)
        assert laplace_interference(s, geom20, quiet) == pytest.approx(want, rel=1e-10)


def test_laplace_decreasing_in_unit_interval(geom20, radio):
    s = np.logspace(1, 6, 30)
    values = laplace_interference(s, geom20, radio)
    assert np.all(values > 0.0) and np.all(values <= 1.0)
    assert np.all(np.diff(values) < 0.0)


def test_laplace_vs_monte_carlo(geom20, radio, rng):
    # E[exp(-s I)] over fresh node fields, transmit masks and fades
    s = 1.8 * 24.0**3  # threshold at a mid-disk slant range
    n_draws = 100_000
    total = 0.0
    noise_ratio = radio.noise / radio.power
    for _ in range(20):
        k = n_draws // 20
        n = rng.poisson(geom20.mean_nodes, size=k)
        nmax = n.max()
        radii = geom20.radius * np.sqrt(rng.random((k, nmax)))
        slant = np.sqrt(radii**2 + geom20.altitude**2)
        active = rng.random((k, nmax)) < radio.aloha
        active &= np.arange(nmax)[None, :] < n[:, None]
        gains = rng.standard_gamma(radio.m, (k, nmax)) / radio.m
        interference = (gains * slant ** (-radio.eta) * active).sum(axis=1)
        total += np.exp(-s * (interference + noise_ratio)).sum()
    empirical = total / n_draws
    assert laplace_interference(s, geom20, radio) == pytest.approx(empirical, rel=0.01)


def test_derivative_order_zero_is_value(geom20, radio):
    r2 = radio.with_(m=2)
    s = 5e4
    assert laplace_derivative(0, s, geom20, r2) == pytest.approx(
        laplace_interference(s, geom20, r2), rel=1e-12
    )


def test_derivative_rejects_high_order(geom20, radio):
    with pytest.raises(ValueError):
        laplace_derivative(1, 10.0, geom20, radio)  # m = 1 has only order 0
    with pytest.raises(ValueError):
        laplace_derivative(3, 10.0, geom20, radio.with_(m=3))


def test_derivative_no_interference_closed_form(geom20, radio):
    quiet = radio.with_(aloha=0.0, m=2)
    for s in (1e3, 1e5):
        want = -(quiet.noise / quiet.power) * math.exp(-s * quiet.noise / quiet.power)
        assert laplace_derivative(1, s, geom20, quiet) == pytest.approx(want, rel=1e-10)


@pytest.mark.parametrize("m,k", [(2, 1), (3, 1), (3, 2)])
def test_derivatives_match_finite_differences(geom20, radio, m, k):
    spec = radio.with_(m=m)
    for s in (2e3, 5e4, 3e5):
        h = 5e-6 * s if k == 1 else 5e-5 * s
        if k == 1:
            fd = (
                laplace_interference(s + h, geom20, spec)
                - laplace_interference(s - h, geom20, spec)
            ) / (2.0 * h)
        else:
            fd = (
                laplace_interference(s + h, geom20, spec)
                - 2.0 * laplace_interference(s, geom20, spec)
                + laplace_interference(s - h, geom20, spec)
            ) / h**2
        got = laplace_derivative(k, s, geom20, spec)
        assert got == pytest.approx(fd, rel=1e-4)


def test_success_zero_cases(geom20, radio):
    assert success_probability(geom20, radio.with_(aloha=0.0)) == 0.0
    empty = HoverGeometry(radius=20.0, altitude=20.0, density=0.0)
    assert success_probability(empty, radio) == 0.0


def test_success_within_unit_interval(geom20, radio):
    for beta in (1.0, 3.0, 10.0):
        p = success_probability(geom20, radio.with_(beta=beta))
        assert 0.0 <= p <= 1.0


def test_success_decreasing_in_radius(radio):
    values = []
    for r in (10.0, 20.0, 30.0, 45.0, 60.0):
        geom = HoverGeometry(radius=r, altitude=r, density=0.1)
        values.append(success_probability(geom, radio))
    assert all(b < a for a, b in zip(values[:-1], values[1:]))


def test_noise_factor_monotone_in_aloha(geom20, radio):
    s = 5e4
    scaled = []
    for a in (0.0, 0.01, 0.05, 0.2, 1.0):
        val = laplace_interference(s, geom20, radio.with_(aloha=a))
        scaled.append(val * math.exp(s * radio.noise / radio.power))
    assert all(b <= a + 1e-12 for a, b in zip(scaled[:-1], scaled[1:]))


def test_optimal_aloha_degenerate_sparse_field(radio):
    sparse = HoverGeometry(radius=20.0, altitude=20.0, density=5e-4)  # ~0.6 nodes
    assert optimal_aloha(sparse, radio) == 1.0


def test_optimal_aloha_beats_collision_design(geom20, radio):
    a_star = optimal_aloha(geom20, radio)
    conventional = 1.0 / geom20.mean_nodes
    assert a_star > conventional
    p_star = success_probability(geom20, radio.with_(aloha=a_star))
    for eps in (-0.01, 0.01):
        a = min(max(a_star + eps, 1e-6), 1.0)
        assert p_star >= success_probability(geom20, radio.with_(aloha=a)) - 1e-6


def test_optimal_beta_unimodal_neighborhood(geom20, radio):
    best = optimal_beta(geom20, radio, optimize_a=True)
    assert 1.0 <= best.beta <= 20.0

    def objective(beta):
        trial = radio.with_(beta=beta)
        a = optimal_aloha(geom20, trial)
        return success_probability(geom20, trial.with_(aloha=a)) * math.log2(1 + beta)

    assert best.objective >= objective(max(best.beta / 1.5, 1.0)) - 1e-3
    assert best.objective >= objective(min(best.beta * 1.5, 20.0)) - 1e-3


def test_optimal_beta_constant_success_goes_to_cap(geom20, radio, monkeypatch):
    monkeypatch.setattr(channel, "success_probability", lambda g, r: 0.5)
    best = optimal_beta(geom20, radio, optimize_a=False, beta_max=20.0)
    assert best.beta == 20.0


def test_optimal_beta_rejects_unknown_objective(geom20, radio):
    with pytest.raises(ValueError):
        optimal_beta(geom20, radio, objective="latency")


def test_theta_lens_regions():
    # probe disk smaller than the covered disk
    assert theta_lens(0.0, 20.0, 10.0) == 0.0
    assert theta_lens(5.0, 20.0, 10.0) == 0.0  # inside the uncovered core
    assert theta_lens(10.0, 20.0, 10.0) == pytest.approx(0.0, abs=1e-9)  # tangent
    # probe disk engulfing the covered disk: full angle out to R_mse - R
    assert theta_lens(5.0, 20.0, 60.0) == pytest.approx(2 * math.pi)
    assert theta_lens(20.0, 20.0, 40.0) == pytest.approx(2 * math.pi, rel=1e-12)
    # generic lens angle against the planar construction
    w, R, rm = 15.0, 20.0, 10.0
    want = 2.0 * math.acos((R**2 + w**2 - rm**2) / (2 * R * w))
    assert theta_lens(w, R, rm) == pytest.approx(want, rel=1e-12)


def test_edge_success_limits(geom20, radio):
    full = edge_success_probability(geom20, radio, 2.0 * geom20.radius)
    assert full == pytest.approx(success_probability(geom20, radio), rel=1e-6)
    tiny = edge_success_probability(geom20, radio, 0.05)
    assert tiny < 1e-4
    with pytest.raises(ValueError):
        edge_success_probability(geom20, radio, 0.0)


def test_edge_success_bounded_by_total(geom20, radio):
    for r_mse in (5.0, 15.0, 25.0, 40.0):
        pe = edge_success_probability(geom20, radio, r_mse)
        assert 0.0 <= pe <= success_probability(geom20, radio) + 1e-9


def test_slot_duration_reference(radio):
    assert slot_duration(radio.with_(beta=1.0)) == pytest.approx(0.2048)


def test_hover_time_unit_case(geom20, radio, monkeypatch):
    monkeypatch.setattr(channel, "success_probability", lambda g, r: 1.0)
    m = 4
    t = channel.hover_time_aggregation(m, float(m), geom20, radio)
    assert t == pytest.approx(slot_duration(radio))


def test_hover_time_infeasible_is_infinite(geom20, radio):
    assert math.isinf(hover_time_aggregation(3, 100.0, geom20, radio.with_(aloha=0.0)))
