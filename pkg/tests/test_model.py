"""Layer stack, wavenumbers, and the reflection recursion."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fdem1d.model import (MU0, InstrumentConfig, KernelPoint, LayeredModel,
                          _g_core, integrand_g, kernel_point, reflection_r0,
                          wavenumbers)

from conftest import ORACLES

OMEGA_10K = 2.0 * math.pi * 1.0e4


def test_wavenumber_branch():
    model = LayeredModel(sigma=(0.333, 0.02, 0.1), h=(2.5, 0.5))
    k = wavenumbers(model, OMEGA_10K)
    assert np.all(k.real > 0.0) and np.all(k.imag < 0.0)
    # k^2 = -i omega mu sigma
    assert np.allclose(k**2, -1j * OMEGA_10K * MU0 * np.asarray(model.sigma),
                       rtol=1e-14)


@pytest.mark.parametrize("lam,key", [
    (0.3, "r0_lam0.3"), (1.0, "r0_lam1.0"), (2.0, "r0_lam2.0")])
def test_surface_reflection_against_reference(section333, lam, key):
    r0 = reflection_r0(section333, OMEGA_10K, lam)
    assert r0 == pytest.approx(ORACLES[key], rel=1e-12)


def test_reflection_scalar_in_scalar_out(section333):
    assert isinstance(reflection_r0(section333, OMEGA_10K, 0.5), complex)
    arr = reflection_r0(section333, OMEGA_10K, np.array([0.5, 1.0]))
    assert arr.shape == (2,)


def test_halfspace_core_is_exactly_zero():
    model = LayeredModel(sigma=(0.1,), h=())
    lam = np.linspace(0.0, 5.0, 11)
    assert np.all(_g_core(model, OMEGA_10K, MU0, lam) == 0.0)


def test_equal_adjacent_layers_collapse(section333):
    # splitting one layer into two with the same conductivity is a no-op
    merged = LayeredModel(sigma=(0.333, 0.02), h=(2.5,))
    split = LayeredModel(sigma=(0.333, 0.02, 0.02), h=(2.5, 0.3))
    lam = np.array([0.2, 0.7, 1.5, 3.0])
    a = reflection_r0(merged, OMEGA_10K, lam)
    b = reflection_r0(split, OMEGA_10K, lam)
    assert np.allclose(a, b, rtol=1e-12)


def test_core_identity_against_naive_difference(section333):
    # the rearranged two-layer-equivalent form avoids the cancellation in
    # R0 - Psi1; both must agree where the naive form keeps digits
    lam = np.array([0.3, 0.8, 1.6, 2.4])
    k = wavenumbers(section333, OMEGA_10K)
    u1 = np.sqrt(lam**2 - k[0] ** 2)
    psi1 = (lam - u1) / (lam + u1)
    naive = reflection_r0(section333, OMEGA_10K, lam) - psi1
    core = _g_core(section333, OMEGA_10K, MU0, lam)
    assert np.allclose(core, naive, rtol=1e-8)


def test_kernel_point_fields(section333):
    kp = kernel_point(section333, OMEGA_10K, 0.7)
    assert isinstance(kp, KernelPoint)
    assert kp.lam == 0.7
    assert len(kp.u) == 4 and len(kp.psi) == 3 and len(kp.r) == 4
    # u0 = lam in the air half space; the recursion bottoms out at zero
    assert kp.u[0] == pytest.approx(0.7 + 0j, rel=1e-14)
    assert kp.r[-1] == 0.0
    assert kp.r[0] == pytest.approx(
        reflection_r0(section333, OMEGA_10K, 0.7), rel=1e-13)


def test_integrand_g_vanishes_at_origin_and_decays(section333):
    assert integrand_g(section333, OMEGA_10K, 0.0, 0, 2.0) == 0.0
    small = abs(integrand_g(section333, OMEGA_10K, 8.0, 0, 2.0))
    mid = abs(integrand_g(section333, OMEGA_10K, 1.0, 0, 2.0))
    assert small < 1e-10 * mid


def test_integrand_arguments_policed(section333):
    with pytest.raises(ValueError):
        integrand_g(section333, OMEGA_10K, 0.5, 2, 2.0)
    with pytest.raises(ValueError):
        integrand_g(section333, OMEGA_10K, 0.5, 0, -1.0)
    with pytest.raises(ValueError):
        integrand_g(section333, OMEGA_10K, -0.5, 0, 2.0)


def test_huge_lambda_does_not_overflow(section333):
    # interface decay underflows but the surface factor only falls off
    # algebraically (|Psi1| ~ omega mu sigma / (4 lam^2))
    val = reflection_r0(section333, OMEGA_10K, 1.0e6)
    assert np.isfinite(val.real) and np.isfinite(val.imag)
    assert abs(val) < 1e-12


@given(st.floats(0.05, 6.0), st.floats(0.05, 6.0))
def test_reflection_magnitude_bounded(lam, scale):
    model = LayeredModel(sigma=(0.05 * scale, 0.3, 0.01), h=(1.0, 2.0))
    r0 = reflection_r0(model, OMEGA_10K, lam)
    assert abs(r0) <= 1.0 + 1e-12


@given(st.floats(0.3, 3.0))
def test_core_decays_with_first_layer_depth(lam):
    shallow = LayeredModel(sigma=(0.1, 0.02), h=(0.5,))
    deep = LayeredModel(sigma=(0.1, 0.02), h=(3.0,))
    assert (abs(_g_core(deep, OMEGA_10K, MU0, np.array([lam]))[0])
            <= abs(_g_core(shallow, OMEGA_10K, MU0, np.array([lam]))[0]) + 1e-300)


def test_model_validation():
    with pytest.raises(ValueError):
        LayeredModel(sigma=(), h=())
    with pytest.raises(ValueError):
        LayeredModel(sigma=(0.1, -0.2), h=(1.0,))
    with pytest.raises(ValueError):
        LayeredModel(sigma=(0.1, 0.2), h=(0.0,))
    with pytest.raises(ValueError):
        LayeredModel(sigma=(0.1, 0.2), h=(1.0, 2.0))


def test_model_json_round_trip(tmp_path, section333):
    path = tmp_path / "m.json"
    section333.to_json(path)
    back = LayeredModel.from_json(path)
    assert back == section333
    d = section333.to_dict()
    assert d["sigma_mS_per_m"] == [333.0, 20.0, 100.0]
    assert d["h_m"] == [2.5, 0.5]


def test_instrument_defaults_and_offsets():
    inst = InstrumentConfig()
    assert inst.frequency == pytest.approx(1.0e4)
    assert inst.offsets_for("hcp") == (2.0, 4.0, 6.0, 8.0)
    assert inst.common_offsets == (2.0, 4.0, 6.0, 8.0)
    assert inst.omega == pytest.approx(2.0 * math.pi * 1.0e4)
    with pytest.raises(ValueError):
        inst.offsets_for("slant")
    uneven = InstrumentConfig(offsets_prp=(2.1, 4.1, 6.1, 8.1))
    with pytest.raises(ValueError):
        uneven.common_offsets


def test_instrument_validation():
    with pytest.raises(ValueError):
        InstrumentConfig(frequency=0.0)
    with pytest.raises(ValueError):
        InstrumentConfig(offsets_hcp=())
    with pytest.raises(ValueError):
        InstrumentConfig(offsets_hcp=(2.0, -4.0))
