"""Closed-form small-induction approximations of the imaginary field parts.

Each buried interface contributes one image-like term: a conductivity
contrast weighted by exponential attenuation through the overburden and
a geometric spreading factor in the interface depth.  The uniform
half-space imaginary part is added back exactly, so the approximations
are exact when all contrasts vanish.

Only the imaginary (quadrature) component is modelled; it is the part a
small-loop conductivity meter reads and the part the inversion fits.
These formulas are cheap enough to serve as the first-stage surrogate of
the two-stage inversion; L_z and L_rho name the approximate Im H_z and
Im H_rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .forward import halfspace_fields
from .model import MU0, InstrumentConfig, LayeredModel

__all__ = ["ApproxResponse", "approx_n2", "approx_n3", "approx_response"]


@dataclass(frozen=True)
class ApproxResponse:
    """Per-offset surrogate values L_z, L_rho (A/m, imaginary parts)."""

    offsets_hcp: tuple[float, ...]
    lz: np.ndarray
    offsets_prp: tuple[float, ...]
    lrho: np.ndarray

    def __post_init__(self):
        lz = np.asarray(self.lz, dtype=float)
        lrho = np.asarray(self.lrho, dtype=float)
        if lz.shape != (len(self.offsets_hcp),):
            raise ValueError("lz length must match offsets_hcp")
        if lrho.shape != (len(self.offsets_prp),):
            raise ValueError("lrho length must match offsets_prp")
        if not (np.all(np.isfinite(lz)) and np.all(np.isfinite(lrho))):
            raise ValueError("surrogate values must be finite")
        object.__setattr__(self, "lz", lz)
        object.__setattr__(self, "lrho", lrho)


def _positive(**vals):
    for name, v in vals.items():
        if not v > 0.0:
            raise ValueError(f"{name} must be > 0")


def approx_n2(sigma1: float, sigma2: float, h1: float, omega: float,
              mu: float = MU0, m: float = 1.0,
              r: float = 2.0) -> tuple[float, float]:
    """(L_z, L_rho) for a layer of thickness h1 over a half space."""
    _positive(sigma1=sigma1, sigma2=sigma2, h1=h1, omega=omega, mu=mu,
              m=m, r=r)
    atten = math.exp(-h1 * math.sqrt(2.0 * omega * mu * sigma1))
    d1 = math.sqrt(4.0 * h1 * h1 + r * r)
    hz1, hr1 = halfspace_fields(sigma1, omega, m, r, mu)
    scale = m / (4.0 * math.pi) * omega * mu * (sigma1 - sigma2) * atten
    lz = scale / (4.0 * d1) + hz1.imag
    lrho = -scale * (d1 - 2.0 * h1) / (4.0 * r * d1) + hr1.imag
    return lz, lrho


def approx_n3(sigma1: float, sigma2: float, sigma3: float, h1: float,
              h2: float, omega: float, mu: float = MU0, m: float = 1.0,
              r: float = 2.0) -> tuple[float, float]:
    """(L_z, L_rho) for two layers over a half space.

    Collapses to approx_n2 when sigma2 == sigma3 and to the half-space
    imaginary parts when additionally sigma1 == sigma2.
    """
    _positive(sigma1=sigma1, sigma2=sigma2, sigma3=sigma3, h1=h1, h2=h2,
              omega=omega, mu=mu, m=m, r=r)
    atten1 = math.exp(-h1 * math.sqrt(2.0 * omega * mu * sigma1))
    atten2 = math.exp(-h2 * math.sqrt(2.0 * omega * mu * sigma2))
    d1 = math.sqrt(4.0 * h1 * h1 + r * r)
    d12 = math.sqrt(4.0 * (h1 + h2) ** 2 + r * r)
    hz1, hr1 = halfspace_fields(sigma1, omega, m, r, mu)
    pref = m / (4.0 * math.pi) * omega * mu * atten1
    lz = pref / 4.0 * ((sigma2 - sigma3) * atten2 / d12
                       + (sigma1 - sigma2) / d1) + hz1.imag
    lrho = -pref / (4.0 * r) * (
        (sigma2 - sigma3) * atten2 * (d12 - 2.0 * (h1 + h2)) / d12
        + (sigma1 - sigma2) * (d1 - 2.0 * h1) / d1
    ) + hr1.imag
    return lz, lrho


def _approx_pair(model: LayeredModel, instrument: InstrumentConfig,
                 r: float) -> tuple[float, float]:
    omega, mu, m = instrument.omega, instrument.mu, instrument.moment
    if model.nlayers == 1:
        hz1, hr1 = halfspace_fields(model.sigma[0], omega, m, r, mu)
        return hz1.imag, hr1.imag
    if model.nlayers == 2:
        return approx_n2(model.sigma[0], model.sigma[1], model.h[0],
                         omega, mu, m, r)
    if model.nlayers == 3:
        return approx_n3(model.sigma[0], model.sigma[1], model.sigma[2],
                         model.h[0], model.h[1], omega, mu, m, r)
    raise ValueError("approximation defined for at most 3 layers")


def approx_response(model: LayeredModel,
                    instrument: InstrumentConfig) -> ApproxResponse:
    """Surrogate response at all instrument offsets (1 to 3 layers)."""
    if instrument.offsets_hcp == instrument.offsets_prp:
        pairs = [_approx_pair(model, instrument, r)
                 for r in instrument.offsets_hcp]
        lz = [p[0] for p in pairs]
        lrho = [p[1] for p in pairs]
    else:
        lz = [_approx_pair(model, instrument, r)[0]
              for r in instrument.offsets_hcp]
        lrho = [_approx_pair(model, instrument, r)[1]
                for r in instrument.offsets_prp]
    return ApproxResponse(offsets_hcp=instrument.offsets_hcp,
                          lz=np.array(lz),
                          offsets_prp=instrument.offsets_prp,
                          lrho=np.array(lrho))
