"""Rotation-angle arithmetic shared by the parser, scheduler and Rz bank.

Angles are always stored canonicalized to [0, 2*pi). An angle is treated as
Clifford when it sits within ``CLIFFORD_TOL`` of a multiple of pi/2; such
rotations never consume a magic state. Dictionary keys for per-angle state
pools are quantized via :func:`angle_key` so that two floats describing the
same rotation land in the same pool.
"""

from __future__ import annotations

import math

TAU = 2.0 * math.pi
HALF_PI = math.pi / 2.0

#: Tolerance for deciding that an angle is a multiple of pi/2.
CLIFFORD_TOL = 1e-9

#: Clifford rotation names by multiple of pi/2 (mod 2*pi).
CLIFFORD_NAMES = {0: "id", 1: "s", 2: "z", 3: "sdg"}


def canonical(theta: float) -> float:
    """Map ``theta`` into [0, 2*pi)."""
    if not math.isfinite(theta):
        raise ValueError(f"rotation angle must be finite, got {theta!r}")
    reduced = math.fmod(theta, TAU)
    if reduced < 0.0:
        reduced += TAU
    if reduced >= TAU:  # fmod rounding at the boundary
        reduced = 0.0
    return reduced


def clifford_multiple(theta: float) -> int | None:
    """The k in {0,1,2,3} with theta = k*pi/2 (mod 2*pi), or None.

    Uses ``CLIFFORD_TOL`` as the matching tolerance.
    """
    theta = canonical(theta)
    k = round(theta / HALF_PI)
    if abs(theta - k * HALF_PI) <= CLIFFORD_TOL:
        return k % 4
    return None


def is_clifford(theta: float) -> bool:
    return clifford_multiple(theta) is not None


def doubled(theta: float) -> float:
    """The canonical fixup angle 2*theta for a failed Rz(theta) injection."""
    return canonical(2.0 * theta)


def angle_key(theta: float) -> float:
    """Quantized canonical angle used to key per-angle state pools.

    Rounding to 12 decimals is far finer than ``CLIFFORD_TOL``, so distinct
    non-Clifford angles stay distinct while floating-point noise from
    expression evaluation collapses onto one key.
    """
    key = round(canonical(theta), 12)
    return 0.0 if key >= TAU else key
