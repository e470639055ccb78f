"""Layered-earth model, instrument description, and Hankel-integrand kernels.

A model is a stack of N homogeneous conductive layers below a free-space
half space, excited by a small vertical magnetic dipole on the surface.
The surface fields are Hankel integrals over a reflection factor R0(lam)
built by a downward-to-upward recursion over the stack.

The integrands come in two flavours:

* ``integrand_q``: half-space-like part, carries the free-space and
  first-layer contribution and decays only algebraically,
* ``integrand_g``: the remainder carrying everything below the first
  interface; it decays like exp(-2 h1 lam) and is the part integrated
  numerically on a short interval.

``integrand_g`` is evaluated through an algebraically equivalent ratio
form that avoids the subtractive cancellation of R0 - Psi1 at large lam.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import bessel_j

__all__ = [
    "MU0",
    "LayeredModel",
    "InstrumentConfig",
    "KernelPoint",
    "wavenumbers",
    "kernel_point",
    "reflection_r0",
    "integrand_g",
    "integrand_q",
]

MU0 = 4.0e-7 * math.pi

# exp(-x) underflows anyway near x ~ 745; clamp a bit earlier so the
# complex factor is an exact zero instead of a denormal times a phase.
_EXP_CLAMP = 700.0


@dataclass(frozen=True)
class LayeredModel:
    """Conductivity stack: N conductivities (S/m) and N-1 thicknesses (m).

    The last layer is a half space and has no thickness.
    """

    sigma: tuple[float, ...]
    h: tuple[float, ...] = ()

    def __post_init__(self):
        sigma = tuple(float(s) for s in self.sigma)
        h = tuple(float(t) for t in self.h)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "h", h)
        if len(sigma) < 1:
            raise ValueError("need at least one layer")
        if len(h) != len(sigma) - 1:
            raise ValueError(
                f"{len(sigma)} layers require {len(sigma) - 1} thicknesses, got {len(h)}"
            )
        if any(not math.isfinite(s) or s <= 0.0 for s in sigma):
            raise ValueError("conductivities must be finite and > 0")
        if any(not math.isfinite(t) or t <= 0.0 for t in h):
            raise ValueError("thicknesses must be finite and > 0")

    @property
    def nlayers(self) -> int:
        return len(self.sigma)

    def to_dict(self) -> dict:
        return {
            "sigma_mS_per_m": [1e3 * s for s in self.sigma],
            "h_m": list(self.h),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LayeredModel":
        try:
            sigma = tuple(1e-3 * float(s) for s in data["sigma_mS_per_m"])
            h = tuple(float(t) for t in data["h_m"])
        except (KeyError, TypeError) as exc:
            raise ValueError(
                "model dict needs keys 'sigma_mS_per_m' and 'h_m'"
            ) from exc
        return cls(sigma=sigma, h=h)

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "LayeredModel":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class InstrumentConfig:
    """Dipole source and measurement layout.

    frequency in Hz, moment in A m^2 (the dipole moment; note some
    instrument sheets quote A/m^2), offsets in m per coil geometry
    (source-receiver separations on the surface, strictly increasing).
    Vertical coplanar loops read H_z (hcp), perpendicular ones H_rho
    (prp); commercial meters may use different offsets per geometry.
    """

    frequency: float = 1.0e4
    moment: float = 1.0
    mu: float = MU0
    offsets_hcp: tuple[float, ...] = (2.0, 4.0, 6.0, 8.0)
    offsets_prp: tuple[float, ...] = (2.0, 4.0, 6.0, 8.0)

    def __post_init__(self):
        for name in ("offsets_hcp", "offsets_prp"):
            offs = tuple(float(r) for r in getattr(self, name))
            object.__setattr__(self, name, offs)
            if len(offs) == 0:
                raise ValueError("need at least one offset")
            if any(r <= 0.0 for r in offs):
                raise ValueError("offsets must be > 0")
            if any(b <= a for a, b in zip(offs, offs[1:])):
                raise ValueError("offsets must be strictly increasing")
        if self.frequency <= 0.0 or not math.isfinite(self.frequency):
            raise ValueError("frequency must be finite and > 0")
        if self.moment <= 0.0 or not math.isfinite(self.moment):
            raise ValueError("moment must be finite and > 0")
        if self.mu <= 0.0 or not math.isfinite(self.mu):
            raise ValueError("mu must be finite and > 0")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.frequency

    def offsets_for(self, geometry: str) -> tuple[float, ...]:
        if geometry == "hcp":
            return self.offsets_hcp
        if geometry == "prp":
            return self.offsets_prp
        raise ValueError(f"unknown geometry {geometry!r}")

    @property
    def common_offsets(self) -> tuple[float, ...]:
        """Shared offsets when both geometries sample the same radii."""
        if self.offsets_hcp != self.offsets_prp:
            raise ValueError("hcp and prp offsets differ; no common list")
        return self.offsets_hcp


@dataclass(frozen=True)
class KernelPoint:
    """Reflection recursion state at a single transform variable lam.

    u[j] is the vertical decay constant in region j (j = 0 is air),
    psi[j-1] the interface coefficient at the top of layer j, and
    r[j] the recursed reflection term (r[0] is the surface factor R0).
    """

    lam: float
    u: tuple[complex, ...]
    psi: tuple[complex, ...]
    r: tuple[complex, ...]


def wavenumbers(model: LayeredModel, omega: float, mu: float = MU0) -> np.ndarray:
    """Layer wavenumbers k_j = sqrt(-i omega mu sigma_j).

    Principal square root: Re k > 0 > Im k, so exp(-i k r) decays.
    """
    if omega <= 0.0:
        raise ValueError("omega must be > 0")
    sigma = np.asarray(model.sigma, dtype=float)
    return np.sqrt(-1j * omega * mu * sigma)


def _vertical_u(model, omega, mu, lam):
    """u_j(lam) = sqrt(lam^2 - k_j^2) for each layer, plus u_0 = lam in air."""
    lam = np.asarray(lam, dtype=float)
    k2 = -1j * omega * mu * np.asarray(model.sigma, dtype=float)
    lam2 = lam * lam
    u = [lam.astype(complex)]
    for j in range(model.nlayers):
        u.append(np.sqrt(lam2 - k2[j]))
    return lam, u, k2


def _reflection_parts(model, omega, mu, lam):
    """Vectorised recursion; returns (u, psi, r) as lists of arrays.

    r[j] is the reflection term of interface j with its propagation
    factor already applied; r[0] is the surface factor R0.
    """
    lam, u, k2 = _vertical_u(model, omega, mu, lam)
    n = model.nlayers
    psi = [(u[j - 1] - u[j]) / (u[j - 1] + u[j]) for j in range(1, n + 1)]
    r = [np.zeros_like(u[0]) for _ in range(n + 1)]
    for j in range(n - 1, 0, -1):
        core = (r[j + 1] + psi[j]) / (r[j + 1] * psi[j] + 1.0)
        expo = 2.0 * u[j] * model.h[j - 1]
        decay = np.where(expo.real > _EXP_CLAMP, 0.0, np.exp(-np.minimum(expo.real, _EXP_CLAMP) - 1j * expo.imag))
        r[j] = core * decay
    r[0] = (r[1] + psi[0]) / (r[1] * psi[0] + 1.0)
    return u, psi, r, k2


def kernel_point(model: LayeredModel, omega: float, lam: float,
                 mu: float = MU0) -> KernelPoint:
    """Full recursion state at one lam (diagnostic / test hook)."""
    if lam < 0.0:
        raise ValueError("lam must be >= 0")
    u, psi, r, _ = _reflection_parts(model, omega, mu, float(lam))
    return KernelPoint(
        lam=float(lam),
        u=tuple(complex(x) for x in u),
        psi=tuple(complex(x) for x in psi),
        r=tuple(complex(x) for x in r),
    )


def reflection_r0(model: LayeredModel, omega: float, lam,
                  mu: float = MU0) -> complex | np.ndarray:
    """Surface reflection factor R0(lam).  Scalar in, scalar out."""
    scalar = np.isscalar(lam)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam_arr < 0.0):
        raise ValueError("lam must be >= 0")
    _, _, r, _ = _reflection_parts(model, omega, mu, lam_arr)
    return complex(r[0][0]) if scalar else r[0]


def _g_core(model, omega, mu, lam):
    """(R0 - Psi1) without forming the difference.

    Uses the identity R0 - Psi1 = 4 R1 u1 lam / (R1 k1^2 + (lam + u1)^2),
    exact for every stack, which keeps the exponentially small remainder
    free of cancellation at large lam.  Identically zero for N = 1.
    """
    u, _, r, k2 = _reflection_parts(model, omega, mu, lam)
    lam_c = u[0]
    denom = r[1] * k2[0] + (lam_c + u[1]) ** 2
    return 4.0 * r[1] * u[1] * lam_c / denom


def integrand_g(model: LayeredModel, omega: float, lam, order: int, r: float,
                mu: float = MU0) -> complex | np.ndarray:
    """Exponentially decaying integrand g_l = (R0 - Psi1) lam^2 J_l(lam r)."""
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    if r <= 0.0:
        raise ValueError("offset r must be > 0")
    scalar = np.isscalar(lam)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam_arr < 0.0):
        raise ValueError("lam must be >= 0")
    val = _g_core(model, omega, mu, lam_arr) * lam_arr**2 * bessel_j(order, lam_arr * r)
    return complex(val[0]) if scalar else val


def integrand_q(model: LayeredModel, omega: float, lam, order: int, r: float,
                mu: float = MU0) -> complex | np.ndarray:
    """Slowly decaying integrand q_l = (1 + (-1)^l Psi1) lam^2 J_l(lam r).

    Integrated in closed form through the uniform-half-space fields; kept
    here for cross checks against direct oscillatory quadrature.
    """
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    if r <= 0.0:
        raise ValueError("offset r must be > 0")
    scalar = np.isscalar(lam)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam_arr < 0.0):
        raise ValueError("lam must be >= 0")
    u, psi, _, _ = _reflection_parts(model, omega, mu, lam_arr)
    sign = 1.0 if order == 0 else -1.0
    val = (1.0 + sign * psi[0]) * lam_arr**2 * bessel_j(order, lam_arr * r)
    return complex(val[0]) if scalar else val
