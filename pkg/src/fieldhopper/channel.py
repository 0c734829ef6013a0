"""Analytic uplink model for a drone hovering over a random sensor field.

Sensors form a Poisson field; during a hover every covered sensor transmits
in each slot with probability ``aloha`` over a Nakagami-m fading channel, and
the packet with the highest SINR is captured when it clears the threshold
``beta``.  The capture probability follows from the Laplace transform of the
normalized interference-plus-noise power; for integer m the Gamma tail turns
into a finite sum over its derivatives, which are evaluated through an exact
exponential recurrence (no finite differences).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import quadrature
from .search import golden_max

__all__ = [
    "RadioSpec",
    "HoverGeometry",
    "laplace_interference",
    "laplace_derivative",
    "success_probability",
    "edge_success_probability",
    "theta_lens",
    "optimal_aloha",
    "optimal_beta",
    "OptimalBeta",
    "slot_duration",
    "hover_time_aggregation",
]

_REL_TOL = 1e-9


@dataclass(frozen=True)
class RadioSpec:
    """Link-layer parameters, all SI (watts, hertz, bits).

    ``m`` is the Nakagami shape (integer; 1 is Rayleigh), ``beta`` the SINR
    capture threshold (>= 1 so at most one packet per slot can clear it) and
    ``aloha`` the per-slot transmit probability.
    """

    power: float
    noise: float
    eta: float
    m: int
    bandwidth: float
    packet_bits: float
    beta: float = 1.8
    aloha: float = 0.01

    def __post_init__(self) -> None:
        if self.power <= 0 or self.noise < 0:
            raise ValueError("power must be positive and noise non-negative")
        if self.eta <= 2:
            raise ValueError("path-loss exponent must exceed 2")
        if not (isinstance(self.m, (int, np.integer)) and self.m >= 1):
            raise ValueError("Nakagami m must be a positive integer")
        if self.beta < 1:
            raise ValueError("SINR threshold must be at least 1")
        if not 0.0 <= self.aloha <= 1.0:
            raise ValueError("ALOHA probability must lie in [0, 1]")
        if self.bandwidth <= 0 or self.packet_bits <= 0:
            raise ValueError("bandwidth and packet size must be positive")

    def with_(self, **kwargs) -> "RadioSpec":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class HoverGeometry:
    """One hovering disk: ground radius, drone altitude, sensor density."""

    radius: float
    altitude: float
    density: float

    def __post_init__(self) -> None:
        if self.radius <= 0 or self.altitude <= 0:
            raise ValueError("radius and altitude must be positive")
        if self.density < 0:
            raise ValueError("density must be non-negative")

    @property
    def slant(self) -> float:
        """Distance from the drone to the edge of the covered disk."""
        return math.hypot(self.radius, self.altitude)

    @property
    def mean_nodes(self) -> float:
        return self.density * math.pi * self.radius**2


# ---------------------------------------------------------------------------
# Laplace transform of normalized interference + noise

def _q_derivative(j: int, s: np.ndarray, geom: HoverGeometry, radio: RadioSpec) -> np.ndarray:
    """j-th derivative in s of the interference exponent integral.

    Q_0(s) = int_h^d (1 - (1 + s r^-eta / m)^-m) r dr and, for j >= 1,
    Q_0^(j)(s) = (-1)^(j+1) (m)_j m^-j int r^(1-eta*j) (1+s r^-eta/m)^(-m-j) dr.
    """
    h, d = geom.altitude, geom.slant
    m, eta = radio.m, radio.eta
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if j == 0:
        def f(r: np.ndarray) -> np.ndarray:
            x = r[None, :] ** (-eta) / m
            return (1.0 - (1.0 + s[:, None] * x) ** (-m)) * r[None, :]
        return quadrature.integrate(f, h, d, rel_tol=_REL_TOL)
    rising = 1.0
    for i in range(j):
        rising *= m + i
    sign = 1.0 if j % 2 else -1.0

    def f(r: np.ndarray) -> np.ndarray:
        x = r[None, :] ** (-eta) / m
        return x**j * (1.0 + s[:, None] * x) ** (-(m + j)) * r[None, :]

    return sign * rising * quadrature.integrate(f, h, d, rel_tol=_REL_TOL)


def _log_laplace_derivatives(
    s: np.ndarray, geom: HoverGeometry, radio: RadioSpec, max_order: int
) -> list[np.ndarray]:
    """[g, g', ..., g^(max_order)] for g(s) = log L_I(s), vectorized over s."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    noise_ratio = radio.noise / radio.power
    area_rate = 2.0 * math.pi * geom.density * radio.aloha
    out = [-s * noise_ratio - area_rate * _q_derivative(0, s, geom, radio)]
    for j in range(1, max_order + 1):
        g_j = -area_rate * _q_derivative(j, s, geom, radio)
        if j == 1:
            g_j = g_j - noise_ratio
        out.append(g_j)
    return out


def _laplace_derivatives(
    s: np.ndarray, geom: HoverGeometry, radio: RadioSpec, max_order: int
) -> list[np.ndarray]:
    """[L, L', ..., L^(max_order)] via the exponential recurrence.

    L = exp(g) gives L^(k) = sum_j C(k-1, j) g^(k-j) L^(j), which is exact;
    only the g^(j) involve integrals.
    """
    g = _log_laplace_derivatives(s, geom, radio, max_order)
    ell = [np.exp(g[0])]
    for k in range(1, max_order + 1):
        acc = np.zeros_like(ell[0])
        for j in range(k):
            acc = acc + math.comb(k - 1, j) * g[k - j] * ell[j]
        ell.append(acc)
    return ell


def laplace_interference(s, geom: HoverGeometry, radio: RadioSpec):
    """Laplace transform of normalized interference-plus-noise at ``s`` >= 0."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s_arr < 0):
        raise ValueError("s must be non-negative")
    value = _laplace_derivatives(s_arr, geom, radio, 0)[0]
    return float(value[0]) if np.isscalar(s) or np.ndim(s) == 0 else value


def laplace_derivative(k: int, s, geom: HoverGeometry, radio: RadioSpec):
    """Exact k-th derivative of the interference Laplace transform.

    Only orders up to m-1 are meaningful for the capture expressions, so
    k >= m is rejected.
    """
    if k < 0 or k >= radio.m:
        raise ValueError(f"derivative order must satisfy 0 <= k <= m-1, got {k}")
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    value = _laplace_derivatives(s_arr, geom, radio, k)[k]
    return float(value[0]) if np.isscalar(s) or np.ndim(s) == 0 else value


# ---------------------------------------------------------------------------
# capture probabilities

def _capture_kernel(r: np.ndarray, geom: HoverGeometry, radio: RadioSpec) -> np.ndarray:
    """Per-transmitter capture probability at slant range r (Gamma tail).

    Equals sum_{k<m} ((-m beta r^eta)^k / k!) L^(k)(m beta r^eta); every term
    is non-negative because (-1)^k L^(k) = E[I^k exp(-sI)].
    """
    s = radio.m * radio.beta * r**radio.eta
    ell = _laplace_derivatives(s, geom, radio, radio.m - 1)
    total = np.zeros_like(s)
    fact = 1.0
    for k in range(radio.m):
        if k > 0:
            fact *= k
        total = total + ((-s) ** k / fact) * ell[k]
    return total


def success_probability(geom: HoverGeometry, radio: RadioSpec) -> float:
    """Probability that a slot delivers one packet from the covered disk."""
    if radio.aloha == 0.0 or geom.density == 0.0:
        return 0.0

    def integrand(r: np.ndarray) -> np.ndarray:
        return _capture_kernel(r, geom, radio) * r

    value = quadrature.integrate(integrand, geom.altitude, geom.slant, rel_tol=1e-7)
    p = 2.0 * radio.aloha * math.pi * geom.density * float(np.sum(value))
    return min(max(p, 0.0), 1.0)


def theta_lens(w, cover_radius: float, probe_radius: float):
    """Angle subtended inside the edge probe disk at in-disk radius ``w``.

    The probe disk of radius ``probe_radius`` is centered on the boundary of
    the covered disk (radius ``cover_radius``); a circle of radius ``w``
    around the disk center intersects it over this angle.
    """
    w = np.asarray(w, dtype=float)
    out = np.zeros_like(w)
    inner = probe_radius - cover_radius
    if inner > 0:
        out = np.where(w <= inner, 2.0 * math.pi, out)
    lo, hi = abs(inner), probe_radius + cover_radius
    band = (w >= lo) & (w <= hi) & (w > 0)
    if np.any(band):
        wb = w[band]
        arg = (cover_radius**2 + wb**2 - probe_radius**2) / (2.0 * cover_radius * wb)
        out[band] = 2.0 * np.arccos(np.clip(arg, -1.0, 1.0))
    return out


def edge_success_probability(geom: HoverGeometry, radio: RadioSpec, r_mse: float) -> float:
    """Probability that a slot delivers a packet sent from within the edge lens.

    The lens is the part of the covered disk within ``r_mse`` of a point on
    its boundary; for r_mse >= 2R it is the whole disk and this reduces to
    :func:`success_probability`.
    """
    if r_mse <= 0:
        raise ValueError("probe radius must be positive")
    if radio.aloha == 0.0 or geom.density == 0.0:
        return 0.0
    h, d, cover = geom.altitude, geom.slant, geom.radius

    def integrand(r: np.ndarray) -> np.ndarray:
        w = np.sqrt(np.maximum(r**2 - h**2, 0.0))
        return _capture_kernel(r, geom, radio) * r * theta_lens(w, cover, r_mse)

    breaks = sorted({h, d} | {
        math.hypot(h, w)
        for w in (abs(r_mse - cover), r_mse - cover, r_mse + cover)
        if 0.0 < w < cover
    })
    value = quadrature.integrate_segments(integrand, breaks, rel_tol=1e-7)
    p = radio.aloha * geom.density * float(np.sum(value))
    return min(max(p, 0.0), 1.0)


# ---------------------------------------------------------------------------
# parameter optimization and hover time

def optimal_aloha(geom: HoverGeometry, radio: RadioSpec, tol: float = 1e-4) -> float:
    """Transmit probability maximizing the capture probability, capped at 1.

    The saddle-point condition has no closed solution once the noise term is
    kept, so the maximum is located by golden-section search on (0, 1].
    """
    def f(a: float) -> float:
        return success_probability(geom, radio.with_(aloha=a))

    a_star, p_star = golden_max(f, tol, 1.0, tol=tol)
    if f(1.0) >= p_star:
        return 1.0
    return a_star


@dataclass(frozen=True)
class OptimalBeta:
    beta: float
    aloha: float
    objective: float  # success probability x spectral efficiency [bit/s/Hz]


def optimal_beta(
    geom: HoverGeometry,
    radio: RadioSpec,
    objective: str = "aggregation",
    beta_max: float = 20.0,
    optimize_a: bool = True,
    tol: float = 1e-3,
) -> OptimalBeta:
    """SINR threshold minimizing hover time per collected sample.

    Hover time scales as 1/(P_s log2(1+beta)), so both supported objectives
    ("aggregation" and "throughput") maximize P_s log2(1+beta).  The search
    runs on log beta over [1, beta_max]; the transmit probability is
    re-optimized per beta unless ``optimize_a`` is False.
    """
    if objective not in ("aggregation", "throughput"):
        raise ValueError(f"unknown objective {objective!r}")

    def value(log_beta: float) -> tuple[float, float]:
        beta = math.exp(log_beta)
        trial = radio.with_(beta=beta)
        a = optimal_aloha(geom, trial, tol=1e-3) if optimize_a else radio.aloha
        p = success_probability(geom, trial.with_(aloha=a))
        return p * math.log2(1.0 + beta), a

    log_best, obj = golden_max(lambda t: value(t)[0], 0.0, math.log(beta_max), tol=tol)
    # the capacity term grows without bound, so check the upper edge too
    edge_obj, edge_a = value(math.log(beta_max))
    if edge_obj >= obj:
        return OptimalBeta(beta=beta_max, aloha=edge_a, objective=edge_obj)
    beta = math.exp(log_best)
    obj, a = value(log_best)
    return OptimalBeta(beta=beta, aloha=a, objective=obj)


def slot_duration(radio: RadioSpec) -> float:
    """Slot length carrying one packet at the Shannon rate for ``beta``."""
    return radio.packet_bits / (radio.bandwidth * math.log2(1.0 + radio.beta))


def aggregation_slots(m: int, zeta: float, p_success: float) -> float:
    """Expected slots per hover to average zeta/M captured samples."""
    if p_success <= 0.0:
        return math.inf
    return zeta / (m * p_success)


def hover_time_aggregation(
    m: int, zeta: float, geom: HoverGeometry, radio: RadioSpec
) -> float:
    """Hover duration per location for the sample-collection mission.

    Infinite (infeasible) when the capture probability is zero; not an error.
    """
    p = success_probability(geom, radio)
    return aggregation_slots(m, zeta, p) * slot_duration(radio)
