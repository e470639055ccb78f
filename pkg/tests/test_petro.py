"""Conductivity mixing rule and the preset sections built from it."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fdem1d.petro import (DEFAULT_MATERIALS, PetroLayer, crim_conductivity,
                          preset_composition, preset_model)

# mixing-rule outputs for the six reference compositions (mS/m),
# computed once with the default phase conductivities and pinned
EXPECTED_MS_PER_M = {
    ("model1", 0): 49.6054,
    ("model1", 1): 4.9029,
    ("model1", 2): 18.3873,
    ("model2", 0): 76.8572,
    ("model2", 1): 32.3732,
    ("model2", 2): 50.0835,
}


def test_reference_compositions_reproduce_pinned_values():
    for (name, idx), want in EXPECTED_MS_PER_M.items():
        layers, _ = preset_composition(name)
        got = 1e3 * crim_conductivity(layers[idx])
        assert got == pytest.approx(want, rel=1e-4)


def test_single_phase_limits():
    # all pore space water, no clay: sigma -> a two-phase mix
    layer = PetroLayer(clay_content=0.0, porosity=0.3, water_saturation=1.0)
    want = (0.7 * np.sqrt(0.01) + 0.3 * np.sqrt(0.1)) ** 2
    assert crim_conductivity(layer) == pytest.approx(want, rel=1e-12)


def test_gamma_one_is_arithmetic_mean():
    layer = PetroLayer(clay_content=0.4, porosity=0.25, water_saturation=0.6,
                       gamma=1.0)
    want = (0.75 * 0.6 * 0.01 + 0.75 * 0.4 * 0.2
            + 0.25 * 0.6 * 0.1 + 0.25 * 0.4 * 0.0001)
    assert crim_conductivity(layer) == pytest.approx(want, rel=1e-12)


@given(st.floats(0.0, 1.0), st.floats(0.05, 0.6))
def test_more_water_means_more_conductive(sw, phi):
    dry = PetroLayer(clay_content=0.2, porosity=phi, water_saturation=0.0)
    wet = PetroLayer(clay_content=0.2, porosity=phi, water_saturation=sw)
    assert crim_conductivity(wet) >= crim_conductivity(dry)


@given(st.floats(0.0, 1.0))
def test_more_clay_means_more_conductive(c):
    base = PetroLayer(clay_content=0.0, porosity=0.3, water_saturation=0.5)
    clayey = PetroLayer(clay_content=c, porosity=0.3, water_saturation=0.5)
    assert crim_conductivity(clayey) >= crim_conductivity(base)


def test_conductivity_bounded_by_phases():
    layer = PetroLayer(clay_content=0.5, porosity=0.2, water_saturation=0.5)
    sig = crim_conductivity(layer)
    assert DEFAULT_MATERIALS["sigma_a"] < sig < DEFAULT_MATERIALS["sigma_c"]


def test_layer_validation():
    with pytest.raises(ValueError):
        PetroLayer(clay_content=1.2, porosity=0.3, water_saturation=0.5)
    with pytest.raises(ValueError):
        PetroLayer(clay_content=0.2, porosity=0.0, water_saturation=0.5)
    with pytest.raises(ValueError):
        PetroLayer(clay_content=0.2, porosity=0.3, water_saturation=-0.1)
    with pytest.raises(ValueError):
        PetroLayer(clay_content=0.2, porosity=0.3, water_saturation=0.5,
                   sigma_w=0.0)
    with pytest.raises(ValueError):
        PetroLayer(clay_content=0.2, porosity=0.3, water_saturation=0.5,
                   gamma=0.0)


def test_presets_share_compositions_not_thicknesses():
    m1, meta1 = preset_model("model1")
    m3, meta3 = preset_model("model3")
    assert m1.sigma == m3.sigma
    assert m1.h == (2.5, 0.5) and m3.h == (3.0, 2.0)
    assert meta1["lithology"] == ["clayey silt", "clean sand", "silty sand"]
    m2, _ = preset_model("model2")
    m4, _ = preset_model("model4")
    assert m2.sigma == m4.sigma
    assert all(w > d for w, d in zip(m2.sigma, m1.sigma))


def test_preset_metadata_consistent():
    model, meta = preset_model("model2")
    assert meta["name"] == "model2"
    assert meta["sigma_mS_per_m"] == pytest.approx(
        [1e3 * s for s in model.sigma])
    assert meta["h_m"] == [2.5, 0.5]
    assert meta["water_saturation"] == [0.92, 0.98, 0.98]


def test_unknown_preset_and_material_keys_rejected():
    with pytest.raises(ValueError, match="model9"):
        preset_composition("model9")
    with pytest.raises(ValueError):
        preset_model("model1", materials={"sigma_x": 1.0})


def test_material_override_moves_conductivities():
    base, _ = preset_model("model2")
    salty, _ = preset_model("model2", materials={"sigma_w": 1.0})
    assert all(s > b for s, b in zip(salty.sigma, base.sigma))
