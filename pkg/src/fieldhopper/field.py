"""Spatially correlated field model: covariance, sampling, kriging.

The measured quantity is a zero-mean Gaussian field with a Matern covariance
(`nu = 0.5` gives the exponential kernel used by the estimation mission).
Prediction at unobserved points is simple kriging; the per-point posterior
variance is what the mission budget is written against.

The hovering-duration machinery bounds the worst-case (edge-of-disk) MSE by
the probability that no sample arrives from within a probe disk of radius
``r_mse`` centered on the disk edge, and picks the probe radius / slot count
pair that meets the target with the fewest slots.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg, special

from . import quadrature
from .channel import (
    HoverGeometry,
    RadioSpec,
    edge_success_probability,
    slot_duration,
    success_probability,
    theta_lens,
)
from .search import golden_min

__all__ = [
    "CovarianceSpec",
    "ObservationSet",
    "MseBudget",
    "DegenerateObservations",
    "EstimationInfeasible",
    "covariance",
    "covariance_matrix",
    "krige",
    "sample_field",
    "edge_mse_bound",
    "no_success_probability",
    "area_ratio_rho",
    "probe_radius_limit",
    "estimation_slots",
    "optimal_slots_estimation",
    "required_total_observations",
]

MAX_FACTOR_POINTS = 5000
JITTER_FACTOR = 1e-10


class DegenerateObservations(Exception):
    """Observation covariance not positive definite even after jitter."""


class EstimationInfeasible(Exception):
    """No probe radius / slot count can reach the requested MSE."""


@dataclass(frozen=True)
class CovarianceSpec:
    """Stationary isotropic Matern covariance: variance, smoothness, range."""

    sigma2: float
    nu: float
    b: float

    def __post_init__(self) -> None:
        if self.sigma2 <= 0 or self.nu <= 0 or self.b <= 0:
            raise ValueError("sigma2, nu and b must all be positive")


def covariance(spec: CovarianceSpec, dist):
    """Covariance between two points ``dist`` apart; sigma2 at zero lag."""
    d = np.asarray(dist, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be non-negative")
    x = d / spec.b
    with np.errstate(invalid="ignore"):
        val = (
            spec.sigma2
            * (2.0 ** (1.0 - spec.nu) / special.gamma(spec.nu))
            * x**spec.nu
            * special.kv(spec.nu, x)
        )
    val = np.where(d == 0.0, spec.sigma2, val)
    return float(val) if np.ndim(dist) == 0 else val


def covariance_matrix(spec: CovarianceSpec, a: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = a if b is None else np.atleast_2d(np.asarray(b, dtype=float))
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return covariance(spec, d)


class ObservationSet:
    """Field readings tied to their ground locations.

    Locations closer than 1e-9 m are merged (same sensor heard again reports
    the same value) so the kriging system stays well posed.
    """

    def __init__(self, locations, values, source_hl=None):
        locations = np.atleast_2d(np.asarray(locations, dtype=float))
        values = np.atleast_1d(np.asarray(values, dtype=float))
        if len(locations) != len(values):
            raise ValueError("need one value per location")
        source = (
            np.zeros(len(values), dtype=int)
            if source_hl is None
            else np.atleast_1d(np.asarray(source_hl, dtype=int))
        )
        keep: list[int] = []
        for i in range(len(locations)):
            dup = False
            for j in keep:
                if np.linalg.norm(locations[i] - locations[j]) <= 1e-9:
                    dup = True
                    break
            if not dup:
                keep.append(i)
        self.locations = locations[keep]
        self.values = values[keep]
        self.source_hl = source[keep]

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def empty(cls) -> "ObservationSet":
        return cls(np.empty((0, 2)), np.empty(0))


def krige(
    obs: ObservationSet,
    targets,
    spec: CovarianceSpec,
    prior_mean: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Simple-kriging estimates and per-target MSE.

    With no observations the prior is returned: mean everywhere, variance
    sigma2.  The observation covariance gets a relative jitter of 1e-10 on
    its diagonal; if its factorization still fails the input is degenerate.
    """
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    t = len(targets)
    if len(obs) == 0:
        return np.full(t, prior_mean), np.full(t, spec.sigma2)
    sigma_oo = covariance_matrix(spec, obs.locations)
    sigma_oo[np.diag_indices_from(sigma_oo)] += JITTER_FACTOR * spec.sigma2
    try:
        factor = linalg.cho_factor(sigma_oo, lower=True)
    except linalg.LinAlgError as exc:
        raise DegenerateObservations(
            "observation covariance is not positive definite"
        ) from exc
    sigma_to = covariance_matrix(spec, targets, obs.locations)
    weights = linalg.cho_solve(factor, sigma_to.T)
    estimates = prior_mean + weights.T @ (obs.values - prior_mean)
    mse = spec.sigma2 - np.einsum("ij,ji->i", sigma_to, weights)
    return estimates, np.maximum(mse, 0.0)


def sample_field(locations, spec: CovarianceSpec, seed) -> np.ndarray:
    """One exact draw of the field at the given locations (zero mean).

    Dense factorization, so the location count is capped; tile larger
    requests into conditional blocks instead.
    """
    locations = np.atleast_2d(np.asarray(locations, dtype=float))
    n = len(locations)
    if n > MAX_FACTOR_POINTS:
        raise ValueError(
            f"{n} locations exceed the dense-factorization cap of "
            f"{MAX_FACTOR_POINTS}; sample in tiles instead"
        )
    if n == 0:
        return np.empty(0)
    cov = covariance_matrix(spec, locations)
    cov[np.diag_indices_from(cov)] += JITTER_FACTOR * spec.sigma2
    chol = np.linalg.cholesky(cov)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return chol @ rng.standard_normal(n)


# ---------------------------------------------------------------------------
# edge-MSE budget

def edge_mse_bound(p_ns: float, r_mse: float, spec: CovarianceSpec) -> float:
    """Upper bound on mean MSE at a disk-edge point (exponential covariance).

    ``p_ns`` is the probability that no sample arrived from within ``r_mse``
    of the point.  Negative values (possible for sigma2 < 1, outside the
    bound's intended regime) are clamped to zero.
    """
    if not 0.0 <= p_ns <= 1.0:
        raise ValueError("p_ns must be a probability")
    if spec.sigma2 != 1.0:
        warnings.warn(
            "edge MSE bound is calibrated for unit field variance",
            stacklevel=2,
        )
    close = spec.sigma2 - math.exp(-2.0 * r_mse / spec.b) / spec.sigma2
    return max(spec.sigma2 * p_ns + (1.0 - p_ns) * close, 0.0)


def no_success_probability(p_e_s: float, j: float, rho: float) -> float:
    """Probability that ``j`` slots deliver nothing from the whole probe disk.

    The part of the probe disk outside the hover disk is assumed covered by
    one neighboring disk with the same per-slot statistics, which turns the
    in-lens miss probability into an exponent 1/rho.
    """
    if not 0.0 <= p_e_s <= 1.0:
        raise ValueError("p_e_s must be a probability")
    if j < 0 or not 0.0 < rho <= 1.0:
        raise ValueError("need j >= 0 and 0 < rho <= 1")
    return (1.0 - p_e_s) ** (j / rho)


def area_ratio_rho(cover_radius: float, r_mse: float) -> float:
    """|lens| / |probe disk| for a probe disk centered on the hover-disk edge."""
    if cover_radius <= 0 or r_mse <= 0:
        raise ValueError("radii must be positive")

    def integrand(w: np.ndarray) -> np.ndarray:
        return w * theta_lens(w, cover_radius, r_mse)

    breaks = sorted({0.0, cover_radius} | {
        w for w in (abs(r_mse - cover_radius), r_mse - cover_radius)
        if 0.0 < w < cover_radius
    })
    lens = float(quadrature.integrate_segments(integrand, breaks, rel_tol=1e-10))
    return lens / (math.pi * r_mse**2)


def probe_radius_limit(spec: CovarianceSpec, delta: float) -> float:
    """Largest admissible probe radius for an MSE target ``delta``."""
    if not 0.0 < delta < spec.sigma2:
        raise ValueError("delta must lie in (0, sigma2)")
    arg = (spec.sigma2 - delta) * spec.sigma2
    if arg >= 1.0:
        return 0.0
    return 0.5 * spec.b * math.log(1.0 / arg)


def estimation_slots(
    r_mse: float,
    geom: HoverGeometry,
    radio: RadioSpec,
    spec: CovarianceSpec,
    delta: float,
) -> float:
    """Real-valued slot count meeting the edge-MSE target at probe radius."""
    p_edge = edge_success_probability(geom, radio, r_mse)
    if p_edge <= 0.0 or p_edge >= 1.0:
        return math.inf
    target = 1.0 + (delta - spec.sigma2) * spec.sigma2 * math.exp(2.0 * r_mse / spec.b)
    if target <= 0.0:
        return math.inf
    rho = area_ratio_rho(geom.radius, r_mse)
    return rho * math.log(target) / math.log1p(-p_edge)


@dataclass(frozen=True)
class MseBudget:
    """Probe radius, lens ratio and slot count meeting an edge-MSE target."""

    delta: float
    r_mse: float
    rho: float
    j_star: int
    p_edge_success: float
    hover_time: float


def optimal_slots_estimation(
    geom: HoverGeometry,
    radio: RadioSpec,
    spec: CovarianceSpec,
    delta: float,
    grid: int = 64,
) -> MseBudget:
    """Fewest slots per hover that keep the edge MSE below ``delta``.

    The slot count diverges at both ends of the admissible probe-radius
    interval and has a single interior minimum; a coarse grid brackets it
    and golden-section search refines the real-valued count before the
    final ceiling.
    """
    upper = probe_radius_limit(spec, delta)
    if upper <= 0.0:
        raise EstimationInfeasible(
            f"MSE target {delta} unreachable for field variance {spec.sigma2}"
        )
    radii = upper * (np.arange(1, grid + 1) - 0.5) / grid

    def objective(r: float) -> float:
        return estimation_slots(r, geom, radio, spec, delta)

    values = np.array([objective(r) for r in radii])
    if not np.any(np.isfinite(values)):
        raise EstimationInfeasible("no probe radius yields a nonzero sample rate")
    k = int(np.argmin(values))
    lo = radii[max(k - 1, 0)]
    hi = radii[min(k + 1, grid - 1)]
    r_star, j_real = golden_min(objective, lo, hi, tol=upper * 1e-4)
    if values[k] < j_real:
        r_star, j_real = float(radii[k]), float(values[k])
    j_star = max(int(math.ceil(j_real)), 1)
    return MseBudget(
        delta=delta,
        r_mse=float(r_star),
        rho=area_ratio_rho(geom.radius, r_star),
        j_star=j_star,
        p_edge_success=edge_success_probability(geom, radio, r_star),
        hover_time=j_star * slot_duration(radio),
    )


def required_total_observations(
    geom: HoverGeometry, radio: RadioSpec, j_star: float, area: float
) -> float:
    """Expected field-wide captured samples when every hover runs j_star slots."""
    p = success_probability(geom, radio)
    return p * j_star * area / (math.pi * geom.radius**2)
