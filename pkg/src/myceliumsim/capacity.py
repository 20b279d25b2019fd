"""Processing-element capacity bounds for a colonized volume.

Counts are exact rational numbers (fractions.Fraction) so that scaling the
volume scales the bounds with zero rounding error; rounding to whole
processors is a presentation step, not part of the arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import ConfigError

MM3_PER_M3 = Fraction(10) ** 9


def as_fraction(value) -> Fraction:
    """Exact conversion; floats go through str() so '1.5' means 3/2, not its
    binary neighbour."""
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, (str, int, Rational)):
        return Fraction(value)
    raise ConfigError(f"cannot interpret {value!r} as an exact number")


@dataclass(frozen=True)
class DensitySpec:
    """Observed tip density range and the volume to extrapolate over.

    tips_min..tips_max tips are found per per_volume_mm3_min..per_volume_mm3_max
    mm^3 of substrate; junctions_per_tip converts tip density to processing
    elements (junctions act as the collision gates).
    """

    tips_min: Fraction
    tips_max: Fraction
    per_volume_mm3_min: Fraction
    per_volume_mm3_max: Fraction
    volume_m3: Fraction
    junctions_per_tip: Fraction = Fraction(1)

    def __post_init__(self):
        for name in (
            "tips_min",
            "tips_max",
            "per_volume_mm3_min",
            "per_volume_mm3_max",
            "volume_m3",
            "junctions_per_tip",
        ):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if not 0 < self.tips_min <= self.tips_max:
            raise ConfigError("need 0 < tips_min <= tips_max")
        if not 0 < self.per_volume_mm3_min <= self.per_volume_mm3_max:
            raise ConfigError("need 0 < per_volume_mm3_min <= per_volume_mm3_max")
        if self.volume_m3 <= 0:
            raise ConfigError("volume_m3 must be > 0")
        if self.junctions_per_tip <= 0:
            raise ConfigError("junctions_per_tip must be > 0")


def processor_count(spec: DensitySpec) -> tuple[Fraction, Fraction]:
    """Exact (lower, upper) processing-element bounds for the volume.

    The lower bound pairs the sparsest reading (fewest tips in the largest
    sample volume), the upper the densest.
    """
    volume_mm3 = spec.volume_m3 * MM3_PER_M3
    low = spec.tips_min / spec.per_volume_mm3_max * volume_mm3 * spec.junctions_per_tip
    high = spec.tips_max / spec.per_volume_mm3_min * volume_mm3 * spec.junctions_per_tip
    return low, high


def rounded_processor_count(spec: DensitySpec) -> tuple[int, int]:
    """Whole-processor view (round half to even, as round() does)."""
    low, high = processor_count(spec)
    return round(low), round(high)


def format_count(value: Fraction) -> str:
    """3 significant figures, scientific when large."""
    return f"{float(value):.3g}"
