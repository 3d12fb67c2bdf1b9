import math

import pytest
from hypothesis import given, strategies as st

import oracles
from spinfield.errors import DomainError, UsageError
from spinfield.units import (
    CODATA2018,
    QUANTITY_KINDS,
    UnitSystem,
    compton_radius,
    convert,
    joules_to_ev,
    momentum_transfer_scale,
    rotation_frequency,
)

ME = CODATA2018.electron_mass
masses = st.floats(min_value=1e-32, max_value=1e-24, allow_nan=False)


def test_constants_match_independent_table():
    assert CODATA2018.h == oracles.H
    assert CODATA2018.hbar == pytest.approx(1.054571817e-34, rel=1e-9)
    assert CODATA2018.c == oracles.C
    assert CODATA2018.electron_mass == oracles.M_E
    assert CODATA2018.elementary_charge == oracles.E_CHARGE
    assert CODATA2018.hbar == pytest.approx(oracles.HBAR, rel=1e-15)


def test_compton_radius_electron():
    r = compton_radius(ME)
    assert r == pytest.approx(oracles.compton_radius(), rel=1e-14)
    assert round(r, 17) == pytest.approx(3.8616e-13, abs=1e-17)
    assert round(r * 1e12, 1) == 0.4  # "~0.4 pm"


def test_compton_radius_inverse_mass():
    assert compton_radius(2 * ME) == pytest.approx(0.5 * compton_radius(ME), rel=1e-15)


@pytest.mark.parametrize("fn", [compton_radius, rotation_frequency, momentum_transfer_scale])
@pytest.mark.parametrize("bad", [0.0, -1e-30, float("nan"), float("inf")])
def test_nonpositive_mass_rejected(fn, bad):
    with pytest.raises(DomainError):
        fn(bad)


def test_rotation_frequency_electron():
    f = rotation_frequency(ME)
    assert f.cyclic == pytest.approx(oracles.rotation_cyclic(), rel=1e-14)
    assert f.angular == pytest.approx(oracles.rotation_angular(), rel=1e-14)
    assert f"{f.cyclic:.4e}" == "1.2356e+20"
    assert f"{f.angular:.4e}" == "7.7634e+20"
    assert f.angular / f.cyclic == pytest.approx(2 * math.pi, rel=1e-15)


def test_momentum_transfer_electron():
    p = momentum_transfer_scale(ME)
    assert p.mev_per_c == pytest.approx(oracles.momentum_mev(), rel=1e-14)
    assert f"{p.mev_per_c:.4g}" == "1.605"
    assert abs(p.mev_per_c / 1.5 - 1) < 0.1  # quoted "~1.5 MeV/c"
    assert momentum_transfer_scale(2 * ME).mev_per_c == pytest.approx(2 * p.mev_per_c, rel=1e-15)
    assert p.si == pytest.approx(math.pi * oracles.M_E * oracles.C, rel=1e-15)


@given(masses)
def test_radius_times_angular_is_c(m):
    assert compton_radius(m) * rotation_frequency(m).angular == pytest.approx(CODATA2018.c, rel=1e-14)


@given(masses)
def test_momentum_scale_is_pi_hbar_over_radius(m):
    expected = math.pi * CODATA2018.hbar / compton_radius(m)
    assert momentum_transfer_scale(m).si == pytest.approx(expected, rel=1e-14)


def test_energy_unit_conversion():
    e = convert(1.0, "energy", UnitSystem.natural(), UnitSystem.si())
    assert e == pytest.approx(oracles.M_E * oracles.C**2, rel=1e-14)
    assert f"{e:.4e}" == "8.1871e-14"


def test_length_unit_is_compton_radius():
    assert convert(1.0, "length", UnitSystem.natural(), UnitSystem.si()) == compton_radius(ME)


def test_magnetic_moment_unit():
    # natural moment unit e*hbar/m is twice the Bohr magneton
    mu = convert(0.5, "magnetic_moment", UnitSystem.natural(), UnitSystem.si())
    assert mu == pytest.approx(oracles.bohr_magneton(), rel=1e-14)


@pytest.mark.parametrize("kind", QUANTITY_KINDS)
def test_identity_conversion_returns_input(kind):
    for system in (UnitSystem.si(), UnitSystem.natural()):
        x = 0.123456789
        assert convert(x, kind, system, system) is x


def test_unknown_kind():
    with pytest.raises(UsageError):
        convert(1.0, "temperature", UnitSystem.si(), UnitSystem.natural())


def test_natural_system_needs_positive_mass():
    with pytest.raises(DomainError):
        UnitSystem("natural", -1.0)
    with pytest.raises(UsageError):
        UnitSystem("si", 1.0)


@given(
    st.floats(min_value=-1e30, max_value=1e30, allow_nan=False).filter(lambda x: x != 0),
    st.sampled_from(QUANTITY_KINDS),
    masses,
    masses,
)
def test_conversion_round_trip(x, kind, m1, m2):
    systems = [UnitSystem.si(), UnitSystem.natural(m1), UnitSystem.natural(m2)]
    for a in systems:
        for b in systems:
            back = convert(convert(x, kind, a, b), kind, b, a)
            assert back == pytest.approx(x, rel=1e-14)


def test_box_energy_in_ev():
    # hbar^2 pi^2 / (2 m L^2) at L = 1 nm, through the natural-unit path
    length = convert(1e-9, "length", UnitSystem.si(), UnitSystem.natural())
    e_nat = (math.pi / length) ** 2 / 2
    e_j = convert(e_nat, "energy", UnitSystem.natural(), UnitSystem.si())
    assert e_j == pytest.approx(oracles.box_energy_joules(1, 1e-9), rel=1e-13)
    assert f"{e_j:.4e}" == "6.0247e-20"
    assert f"{joules_to_ev(e_j):.4f}" == "0.3760"
