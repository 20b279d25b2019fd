from fractions import Fraction

import pytest

from myceliumsim import (
    ConfigError,
    DensitySpec,
    as_fraction,
    format_count,
    processor_count,
    rounded_processor_count,
)


def observed_density(volume_m3=1, junctions_per_tip=1):
    # 10-20 tips in every 1.5-3 mm^3 of colonized substrate
    return DensitySpec(10, 20, 1.5, 3, volume_m3, junctions_per_tip)


def test_as_fraction_reads_decimals_exactly():
    assert as_fraction(1.5) == Fraction(3, 2)
    assert as_fraction(0.1) == Fraction(1, 10)  # not 0.1's binary neighbour
    assert as_fraction("2/3") == Fraction(2, 3)
    assert as_fraction(7) == Fraction(7)
    assert as_fraction(Fraction(5, 4)) == Fraction(5, 4)


def test_as_fraction_rejects_junk():
    with pytest.raises(ConfigError):
        as_fraction(None)
    with pytest.raises(ConfigError):
        as_fraction(1 + 2j)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(tips_min=0, tips_max=20, per_volume_mm3_min=1.5, per_volume_mm3_max=3, volume_m3=1),
        dict(tips_min=20, tips_max=10, per_volume_mm3_min=1.5, per_volume_mm3_max=3, volume_m3=1),
        dict(tips_min=10, tips_max=20, per_volume_mm3_min=3, per_volume_mm3_max=1.5, volume_m3=1),
        dict(tips_min=10, tips_max=20, per_volume_mm3_min=0, per_volume_mm3_max=3, volume_m3=1),
        dict(tips_min=10, tips_max=20, per_volume_mm3_min=1.5, per_volume_mm3_max=3, volume_m3=0),
        dict(tips_min=10, tips_max=20, per_volume_mm3_min=1.5, per_volume_mm3_max=3, volume_m3=1, junctions_per_tip=0),
    ],
)
def test_density_spec_validation(kwargs):
    with pytest.raises(ConfigError):
        DensitySpec(**kwargs)


def test_unit_density_over_unit_volume():
    spec = DensitySpec(1, 1, 1, 1, Fraction(1, 10**9))  # 1 mm^3 expressed in m^3
    assert processor_count(spec) == (Fraction(1), Fraction(1))


def test_bounds_pair_conservatively():
    low, high = processor_count(observed_density(volume_m3=Fraction(3, 10**9)))
    # sparsest reading: 10 tips / 3 mm^3; densest: 20 / 1.5 over 3 mm^3
    assert low == Fraction(10)
    assert high == Fraction(40)


def test_cubic_metre_of_substrate():
    low, high = processor_count(observed_density())
    assert low == Fraction(10, 3) * 10**9
    assert high == Fraction(40, 3) * 10**9
    assert format_count(low) == "3.33e+09"
    assert format_count(high) == "1.33e+10"
    assert rounded_processor_count(observed_density()) == (3333333333, 13333333333)


def test_junction_ratio_scales_counts():
    base_low, base_high = processor_count(observed_density())
    low, high = processor_count(observed_density(junctions_per_tip=2.5))
    assert low == base_low * Fraction(5, 2)
    assert high == base_high * Fraction(5, 2)


def test_linearity_in_volume_is_exact():
    unit_low, unit_high = processor_count(observed_density())
    for k in range(1, 11):
        scale = Fraction(k, 7)
        low, high = processor_count(observed_density(volume_m3=scale))
        assert low == unit_low * scale
        assert high == unit_high * scale


def test_rounding_is_presentation_only():
    # the rounded view must not feed back into scaling: round(k*x) != k*round(x)
    spec1 = observed_density()
    spec7 = observed_density(volume_m3=7)
    exact1, _ = processor_count(spec1)
    exact7, _ = processor_count(spec7)
    assert exact7 == 7 * exact1
    assert rounded_processor_count(spec7)[0] != 7 * rounded_processor_count(spec1)[0]


def test_format_count_small_numbers():
    assert format_count(Fraction(1)) == "1"
    assert format_count(Fraction(25, 2)) == "12.5"
    assert format_count(Fraction(123456)) == "1.23e+05"
