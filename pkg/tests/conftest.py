"""Shared fixtures and independently derived reference values.

The ORACLES table was computed with 30-digit complex arithmetic (mpmath:
the layer recursion evaluated directly, the closed half-space forms on
the line z = i*k*r/2, and oscillatory Hankel integrals summed between
consecutive Bessel zeros with sequence averaging).  Values are frozen
here as literals so the tests do not depend on the code under test.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fdem1d.model import InstrumentConfig, LayeredModel
from fdem1d.petro import preset_model

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

ORACLES = {
    # reflection coefficient at the surface for sigma=(333,20,100) mS/m,
    # h=(2.5,0.5) m, f=10 kHz, at three wavenumbers
    "r0_lam0.3": complex(-0.005676849893039958, -0.06004358719259785),
    "r0_lam1.0": complex(-8.335421772970726e-05, -0.006534164174857279),
    "r0_lam2.0": complex(-5.398231511789451e-06, -0.0016431992957720120),
    # half-space (sigma=333 mS/m, f=10 kHz, m=1, r=2 m) closed forms,
    # cross-checked against zero-interval summation of the oscillatory
    # integrals to ~1e-11
    "halfspace_hz": complex(-0.0099983608676247958, -1.98429775135606858e-04),
    "halfspace_hr": complex(1.39240668350029622e-05, 2.56289109153250439e-04),
    # free-space vertical field -m/(4 pi r^3) at r=2
    "freespace_hz": -0.00994718394324345849,
    # special-function spot values
    "i1k1_at_1": 0.3401733509048675,
    "i2k2_at_1": 0.2205680942365663,
    "j0_first_zero": 2.404825557695773,
}

SIGMA_333 = (0.333, 0.020, 0.100)
H_333 = (2.5, 0.5)


@pytest.fixture(scope="session")
def instrument() -> InstrumentConfig:
    return InstrumentConfig()


@pytest.fixture(scope="session")
def section333() -> LayeredModel:
    """Three-layer model used for the reflection and sweep references."""
    return LayeredModel(sigma=SIGMA_333, h=H_333)


@pytest.fixture(scope="session")
def presets() -> dict:
    return {name: preset_model(name)[0]
            for name in ("model1", "model2", "model3", "model4")}
