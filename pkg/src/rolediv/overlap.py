"""Circular observation-disk overlap geometry.

The overlap fraction between two equal-radius vision disks is the lens
intersection area divided by the area of one disk, so it lives in [0, 1]
and is scale invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ObservationDisk:
    """A circular observable region: center in world coordinates, radius > 0."""

    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be > 0")


def lens_area(l: float, r: float) -> float:
    """Intersection area of two radius-``r`` disks with center distance ``l``.

    Uses the isoceles triangle with sides (l, r, r): semi-perimeter
    p = (l + 2r) / 2, Heron area, and the lens as twice the circular
    segment: 2 * acos(l / 2r) * r^2 - 2 * triangle_area.
    """
    if l <= 0.0:
        return math.pi * r * r
    if l >= 2.0 * r:
        return 0.0
    p = (l + 2.0 * r) / 2.0
    # The product can underflow to a tiny negative near l -> 2r.
    herons = max(p * (p - l) * (p - r) * (p - r), 0.0)
    triangle = math.sqrt(herons)
    return 2.0 * math.acos(l / (2.0 * r)) * r * r - 2.0 * triangle


def observation_overlap(a: ObservationDisk, b: ObservationDisk) -> float:
    """Fraction of one vision disk covered by the other (equal radii only).

    Returns 1.0 for coincident centers, 0.0 once the disks are disjoint
    (center distance >= 2r).
    """
    if a.radius != b.radius:
        raise ValueError("unequal-radius")
    r = a.radius
    dx = a.center[0] - b.center[0]
    dy = a.center[1] - b.center[1]
    l = math.hypot(dx, dy)
    if l <= 0.0:
        return 1.0
    if l >= 2.0 * r:
        return 0.0
    frac = lens_area(l, r) / (math.pi * r * r)
    return min(max(frac, 0.0), 1.0)


def overlap_fraction(l: float, r: float) -> float:
    """``observation_overlap`` on center distance / radius directly."""
    return observation_overlap(
        ObservationDisk((0.0, 0.0), r), ObservationDisk((l, 0.0), r)
    )
