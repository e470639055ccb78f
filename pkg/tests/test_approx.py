"""Closed-form response: reduction chain, trends, and the recorded envelope."""

import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fdem1d.approx import ApproxResponse, approx_n2, approx_n3, approx_response
from fdem1d.forward import QuadratureSettings, halfspace_fields, split_field
from fdem1d.model import InstrumentConfig, LayeredModel
from fdem1d.petro import preset_model

OMEGA_10K = 2.0 * math.pi * 1.0e4
ENVELOPE_PATH = Path(__file__).parent / "data" / "approx_envelope.json"


# -------------------------------------------------------------- reduction chain

def test_three_layer_collapses_to_two_layer_when_middle_matches_top():
    # sigma1 == sigma2 merges the top two layers; only the attenuation
    # factorisation exp(a)exp(b) vs exp(a+b) separates the two routes
    lz3, lr3 = approx_n3(0.05, 0.05, 0.2, 1.5, 0.8, OMEGA_10K, r=4.0)
    lz2, lr2 = approx_n2(0.05, 0.2, 2.3, OMEGA_10K, r=4.0)
    assert lz3 == pytest.approx(lz2, rel=1e-14)
    assert lr3 == pytest.approx(lr2, rel=1e-14)


def test_uniform_three_layer_is_exactly_the_half_space_imaginary_part():
    hz, hr = halfspace_fields(0.1, OMEGA_10K, 1.0, 3.0)
    lz, lr = approx_n3(0.1, 0.1, 0.1, 1.0, 2.0, OMEGA_10K, r=3.0)
    assert lz == hz.imag
    assert lr == hr.imag
    lz, lr = approx_n2(0.1, 0.1, 5.0, OMEGA_10K, r=3.0)
    assert lz == hz.imag
    assert lr == hr.imag


@given(
    sigma1=st.floats(0.005, 0.5),
    sigma3=st.floats(0.005, 0.5),
    h1=st.floats(0.3, 3.0),
    h2=st.floats(0.3, 3.0),
    r=st.floats(2.0, 8.0),
)
def test_collapse_holds_across_the_parameter_box(sigma1, sigma3, h1, h2, r):
    lz3, lr3 = approx_n3(sigma1, sigma1, sigma3, h1, h2, OMEGA_10K, r=r)
    lz2, lr2 = approx_n2(sigma1, sigma3, h1 + h2, OMEGA_10K, r=r)
    assert lz3 == pytest.approx(lz2, rel=1e-12, abs=1e-300)
    assert lr3 == pytest.approx(lr2, rel=1e-12, abs=1e-300)


# ---------------------------------------------------------------------- trends

@given(
    sigma3a=st.floats(0.005, 0.5),
    sigma3b=st.floats(0.005, 0.5),
    h1=st.floats(0.3, 3.0),
    h2=st.floats(0.3, 3.0),
)
def test_basement_conductivity_moves_the_two_components_oppositely(
        sigma3a, sigma3b, h1, h2):
    # d12 > 2(h1+h2), so the L_rho interface weight keeps its sign
    lo, hi = sorted((sigma3a, sigma3b))
    if hi - lo < 1e-6:
        return
    lz_lo, lr_lo = approx_n3(0.05, 0.05, lo, h1, h2, OMEGA_10K)
    lz_hi, lr_hi = approx_n3(0.05, 0.05, hi, h1, h2, OMEGA_10K)
    assert lz_hi < lz_lo
    assert lr_hi > lr_lo


def test_interface_correction_decays_with_offset():
    radii = np.linspace(2.0, 8.0, 13)
    last = math.inf
    for r in radii:
        hz, _ = halfspace_fields(0.1, OMEGA_10K, 1.0, r)
        lz, _ = approx_n2(0.1, 0.01, 1.0, OMEGA_10K, r=r)
        corr = abs(lz - hz.imag)
        assert corr < last
        last = corr


def test_rejects_nonpositive_arguments():
    with pytest.raises(ValueError, match="sigma2"):
        approx_n2(0.1, 0.0, 1.0, OMEGA_10K)
    with pytest.raises(ValueError, match="h2"):
        approx_n3(0.1, 0.1, 0.1, 1.0, -0.5, OMEGA_10K)


# ------------------------------------------------------------- batched wrapper

def test_response_matches_the_scalar_routes(instrument):
    model, _ = preset_model("model1")
    resp = approx_response(model, instrument)
    assert resp.offsets_hcp == instrument.offsets_hcp
    for i, r in enumerate(resp.offsets_hcp):
        lz, lr = approx_n3(*model.sigma, *model.h, instrument.omega, r=r)
        assert resp.lz[i] == lz
        assert resp.lrho[i] == lr


def test_response_handles_distinct_offsets_per_geometry():
    inst = InstrumentConfig(offsets_hcp=(2.0, 4.0), offsets_prp=(3.0, 5.0, 7.0))
    model = LayeredModel(sigma=(0.1, 0.02), h=(1.5,))
    resp = approx_response(model, inst)
    assert len(resp.lz) == 2 and len(resp.lrho) == 3
    lz, _ = approx_n2(0.1, 0.02, 1.5, inst.omega, r=4.0)
    _, lr = approx_n2(0.1, 0.02, 1.5, inst.omega, r=5.0)
    assert resp.lz[1] == lz
    assert resp.lrho[1] == lr


def test_response_covers_one_and_rejects_four_layers(instrument):
    uniform = LayeredModel(sigma=(0.25,))
    resp = approx_response(uniform, instrument)
    hz, hr = halfspace_fields(0.25, instrument.omega, 1.0, 6.0)
    assert resp.lz[2] == hz.imag
    assert resp.lrho[2] == hr.imag
    four = LayeredModel(sigma=(0.1, 0.2, 0.1, 0.3), h=(1.0, 1.0, 1.0))
    with pytest.raises(ValueError, match="3 layers"):
        approx_response(four, instrument)


def test_response_container_validates_shapes():
    with pytest.raises(ValueError, match="lz length"):
        ApproxResponse(offsets_hcp=(2.0, 4.0), lz=np.zeros(3),
                       offsets_prp=(2.0,), lrho=np.zeros(1))
    with pytest.raises(ValueError, match="finite"):
        ApproxResponse(offsets_hcp=(2.0,), lz=np.array([math.nan]),
                       offsets_prp=(2.0,), lrho=np.zeros(1))


# ----------------------------------------------------------- recorded envelope

def test_deviation_envelope_matches_the_recorded_asset(instrument):
    """Replay scripts/record_approx_envelope.py on a subsample."""
    recorded = json.loads(ENVELOPE_PATH.read_text())
    quad = QuadratureSettings(rel_tol=1e-10)
    for name in ("model1", "model2"):
        rec = recorded[name]
        model, _ = preset_model(name)
        for idx in (0, 4, 8, 12):  # r = 2, 4, 6, 8 m
            r = rec["r_m"][idx]
            lz, lrho = approx_n3(*model.sigma, *model.h,
                                 instrument.omega, r=r)
            hz = split_field(model, instrument, quad, "hcp", r).value
            hr = split_field(model, instrument, quad, "prp", r).value
            dev_h = abs(lz - hz.imag) / abs(hz.imag)
            dev_p = abs(lrho - hr.imag) / abs(hr.imag)
            assert dev_h == pytest.approx(rec["hcp"][idx], rel=1e-9)
            assert dev_p == pytest.approx(rec["prp"][idx], rel=1e-9)


def test_recorded_envelope_prefers_prp_at_every_offset():
    recorded = json.loads(ENVELOPE_PATH.read_text())
    for name, rec in recorded.items():
        hcp = np.array(rec["hcp"])
        prp = np.array(rec["prp"])
        assert np.all(prp < hcp), name
        assert np.all(hcp < 1.0) and np.all(prp < 0.1)
