"""Unit conversions used at the package boundary.

Everything inside the library is SI: meters, seconds, watts, hertz, bits,
radians.  Configuration files and the CLI accept the units that deployment
notes are usually written in (dBm, km/h, kB, kHz, degrees) and convert once,
here.  Keeping the conversions in a single module makes them round-trip
exactly, which the CLI relies on when echoing configuration back to disk.
"""

from __future__ import annotations

import math

KMH = 1000.0 / 3600.0           # km/h -> m/s
KMH_PER_S = 1000.0 / 3600.0     # (km/h)/s -> m/s^2
KMH2 = 1000.0 / 3600.0 ** 2     # km/h^2 -> m/s^2
KIB = 1024                      # kB -> bytes (binary, 5 kB packet = 40960 bit)


def dbm_to_watts(dbm: float) -> float:
    return 1e-3 * 10.0 ** (dbm / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0.0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * math.log10(watts / 1e-3)


def kmh_to_mps(kmh: float) -> float:
    return kmh * KMH


def mps_to_kmh(mps: float) -> float:
    return mps / KMH


def kmh_per_s_to_mps2(q: float) -> float:
    """Acceleration given as km/h gained per second."""
    return q * KMH_PER_S


def kmh2_to_mps2(q: float) -> float:
    """Acceleration given literally in km/h^2 (rarely what is meant)."""
    return q * KMH2


def kb_to_bits(kb: float) -> float:
    return kb * KIB * 8


def bits_to_kb(bits: float) -> float:
    return bits / (KIB * 8)


def khz_to_hz(khz: float) -> float:
    return khz * 1e3


def hz_to_khz(hz: float) -> float:
    return hz / 1e3


def parse_dbm(text: str) -> float:
    """Parse a power like ``"-30 dBm"`` into watts."""
    value = text.strip()
    if not value.lower().endswith("dbm"):
        raise ValueError(f"expected a dBm quantity, got {text!r}")
    return dbm_to_watts(float(value[:-3].strip()))


def format_dbm(watts: float) -> str:
    """Format watts as a dBm string; inverse of :func:`parse_dbm`."""
    return f"{watts_to_dbm(watts):g} dBm"
