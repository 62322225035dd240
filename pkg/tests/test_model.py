import math

import pytest
from hypothesis import given, strategies as st

from rabiq import DegenerateScaleError, InvalidParams, ModelParams, SpectralCollapse, derive_scales, parse_coupling, validate


def test_zero_coupling_scales():
    s = derive_scales(ModelParams(omega=0.001))
    assert s.g_s == pytest.approx(0.0158114, rel=1e-5)
    assert s.g_t == 0.0005
    assert s.mass_plus == s.mass_minus == 1.0
    assert s.varpi_plus == s.varpi_minus == 1.0
    assert s.bias_plus == s.bias_minus == 0.0
    assert s.eps0 == pytest.approx(-0.0005)


def test_critical_linear_coupling_eps0():
    p = ModelParams(omega=0.001, g1=math.sqrt(0.001) / 2)
    s = derive_scales(p)
    assert s.g1_prime**2 == pytest.approx(500.0)
    assert s.eps0 == pytest.approx(-0.2505)


def test_stark_term_masses_and_frequencies():
    s = derive_scales(ModelParams(omega=0.1, g2=0.01, chi=1.0))
    assert s.g2_prime == pytest.approx(0.2)
    assert s.mass_plus == pytest.approx(1.0) and s.mass_minus == pytest.approx(1.0)
    assert s.varpi_plus == pytest.approx(math.sqrt(1.2**2 - 0.04))
    assert s.varpi_minus == pytest.approx(math.sqrt(0.8**2 - 0.04))
    assert s.varpi_plus == pytest.approx(1.18322, abs=1e-5)
    assert s.varpi_minus == pytest.approx(0.77460, abs=1e-5)
    assert s.mass_plus * s.varpi_plus**2 == pytest.approx(1.4)
    assert s.mass_minus * s.varpi_minus**2 == pytest.approx(0.6)


@pytest.mark.parametrize(
    "chi,g2,ok",
    [(0.0, 0.04, True), (0.0, 0.06, False), (1.0, 0.024, True), (1.0, 0.026, False)],
)
def test_validate_stability_window(chi, g2, ok):
    p = ModelParams(omega=0.1, g2=g2, chi=chi)
    if ok:
        validate(p)
    else:
        with pytest.raises(SpectralCollapse):
            validate(p)


@pytest.mark.parametrize("omega,Omega", [(0.0, 1.0), (-1.0, 1.0), (0.1, 0.0)])
def test_nonpositive_frequencies_rejected(omega, Omega):
    with pytest.raises(InvalidParams):
        derive_scales(ModelParams(omega=omega, Omega=Omega))


def test_degenerate_scale_at_unit_g2_prime():
    with pytest.raises(DegenerateScaleError):
        derive_scales(ModelParams(omega=0.1, g1=0.01, g2=0.05))


valid_params = st.builds(
    lambda om, Om, gb1, gb2, chi: ModelParams.from_reduced(om, gb1, gb2, Omega=Om, chi=chi),
    st.floats(1e-4, 2.0),
    st.floats(0.1, 5.0),
    st.floats(-3.0, 3.0),
    st.floats(-0.99, 0.99),
    st.sampled_from([0.0, 1.0, 0.5]),
)


@given(valid_params)
def test_mass_frequency_identity(p):
    s = derive_scales(p)
    for sig in (1, -1):
        assert s.mass(sig) * s.varpi(sig) ** 2 == pytest.approx(1 + sig * s.g2_tilde_prime, abs=1e-12)


@given(valid_params)
def test_reduced_couplings_exact(p):
    s = derive_scales(p)
    assert s.g2_tilde == (1 + p.chi) * p.g2
    assert s.gbar2 == s.g2_tilde / s.g_t
    assert derive_scales(p) == s


@pytest.mark.parametrize(
    "text,expected",
    [("1.5gs", 1.5 * math.sqrt(0.001) / 2), ("-1e-10gt", -5e-14), ("0.25", 0.25), (" 2 gt ", 0.001), (".5gs", 0.5 * math.sqrt(0.001) / 2)],
)
def test_parse_coupling(text, expected):
    assert parse_coupling(text, 0.001) == pytest.approx(expected, rel=1e-15)


def test_parse_coupling_uses_Omega():
    assert parse_coupling("1gs", 0.1, 4.0) == pytest.approx(math.sqrt(0.4) / 2)


@pytest.mark.parametrize("bad", ["gs", "1.5 g s", "1.5gx", "", "1e", "--1"])
def test_parse_coupling_rejects(bad):
    with pytest.raises(InvalidParams):
        parse_coupling(bad, 0.001)
