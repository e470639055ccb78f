"""Surface magnetic fields of a vertical magnetic dipole on a layered earth.

Two production evaluation routes:

* ``split_field`` / ``field_batch``: the integrand is split into a
  uniform-half-space part, integrated in closed form, plus an
  exponentially decaying remainder integrated adaptively on the short
  interval [0, s].  A computable bound on the discarded tail
  accompanies every value.
* ``filter_field``: classical digital linear filter on a logarithmic
  abscissa grid; no error estimate, used as an independent cross check.

Geometries: ``hcp`` is the vertical field H_z (coaxial vertical loops),
``prp`` the radial field H_rho.  Both are per unit moment times the
configured moment, in A/m.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import (MU0, InstrumentConfig, LayeredModel, _g_core,
                    reflection_r0, wavenumbers)
from .quadrature import integrate_vector_gk
from .specfun import bessel_ik_product, bessel_j

__all__ = [
    "GEOMETRIES",
    "QuadratureSettings",
    "FieldEntry",
    "FieldResponse",
    "FilterTable",
    "FilterTableError",
    "load_filter_table",
    "halfspace_fields",
    "halfspace_fields_from_k",
    "split_field",
    "field_batch",
    "filter_field",
    "filter_batch",
    "tail_bound",
]

GEOMETRIES = ("hcp", "prp")

_ORDER_OF = {"hcp": 0, "prp": 1}
# sign of the remainder integral in the split representation:
# H_z = + (m/4pi) int g0 + H_z(1),  H_rho = - (m/4pi) int g1 + H_rho(1)
_SIGN_OF = {"hcp": +1.0, "prp": -1.0}

_KR_LIMIT = 1.0e4


@dataclass(frozen=True)
class QuadratureSettings:
    """Truncation points and tolerances for the remainder integrals.

    s0 and s1 are the upper integration limits (in 1/m) for the vertical
    and radial remainder kernels.  The discarded tail is reported through
    the tail bound, which is only valid when 2*h1*s > 1.
    """

    s0: float = 3.0
    s1: float = 3.0
    rel_tol: float = 1.0e-8
    abs_tol: float = 1.0e-16
    max_subdivisions: int = 200

    def __post_init__(self):
        if self.s0 <= 0.0 or self.s1 <= 0.0:
            raise ValueError("truncation points must be > 0")
        if not (0.0 < self.rel_tol < 1.0):
            raise ValueError("rel_tol must lie in (0, 1)")
        if self.abs_tol < 0.0:
            raise ValueError("abs_tol must be >= 0")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")

    def s_for(self, order: int) -> float:
        return self.s0 if order == 0 else self.s1


@dataclass(frozen=True)
class FieldEntry:
    """One field value at one offset and geometry.

    tail_estimate is an upper bound (same units as value) on the
    truncated-tail contribution for the quadrature route, 0 for the
    filter route, and inf when the bound's validity condition fails.
    """

    r: float
    geometry: str
    value: complex
    tail_estimate: float
    method: str

    def __post_init__(self):
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"geometry must be one of {GEOMETRIES}")
        if not self.tail_estimate >= 0.0:
            raise ValueError("tail_estimate must be >= 0")


@dataclass(frozen=True)
class FieldResponse:
    """Field entries for one model under one instrument."""

    entries: tuple[FieldEntry, ...]

    def value(self, geometry: str, r: float) -> complex:
        for e in self.entries:
            if e.geometry == geometry and e.r == r:
                return e.value
        raise KeyError(f"no entry for geometry={geometry!r} r={r!r}")

    def imag_vector(self, geometry: str) -> np.ndarray:
        return np.array([e.value.imag for e in self.entries
                         if e.geometry == geometry])

    def offsets(self, geometry: str) -> tuple[float, ...]:
        return tuple(e.r for e in self.entries if e.geometry == geometry)


def halfspace_fields_from_k(k: complex, moment: float, r: float) -> tuple[complex, complex]:
    """Closed-form surface H_z, H_rho over a uniform half space, from k.

    k must be the decaying branch (Re k > 0 > Im k) so that exp(-i k r)
    attenuates with distance; the other square root is rejected.
    """
    k = complex(k)
    if r <= 0.0:
        raise ValueError("offset r must be > 0")
    if not (k.real > 0.0 and k.imag < 0.0):
        raise ValueError("wavenumber must satisfy Re k > 0 > Im k "
                         "(decaying branch)")
    kr = k * r
    if abs(kr) > _KR_LIMIT:
        raise ValueError(f"|k r| = {abs(kr):.3g} beyond supported range "
                         f"{_KR_LIMIT:.0e}")
    ikr = 1j * kr
    hz = moment / (2.0 * math.pi * k**2 * r**5) * (
        9.0 - (9.0 + 9.0 * ikr - 4.0 * kr**2 - 1j * kr**3) * np.exp(-ikr)
    )
    z = ikr / 2.0
    hrho = -moment * k**2 / (4.0 * math.pi * r) * (
        bessel_ik_product(1, z) - bessel_ik_product(2, z)
    )
    return complex(hz), complex(hrho)


def halfspace_fields(sigma: float, omega: float, moment: float, r: float,
                     mu: float = MU0) -> tuple[complex, complex]:
    """Closed-form surface H_z, H_rho over a uniform half space."""
    if sigma <= 0.0:
        raise ValueError("sigma must be > 0")
    if omega <= 0.0:
        raise ValueError("omega must be > 0")
    k = complex(np.sqrt(-1j * omega * mu * sigma))
    return halfspace_fields_from_k(k, moment, r)


def tail_bound(model: LayeredModel, omega: float, s: float,
               r: float, mu: float = MU0) -> float:
    """Bound on |int_s^inf g_l| for the truncated remainder kernel.

    Sum over interfaces of |k_{j+1}^2 - k_j^2| / gamma_j *
    exp(-gamma_j s) / sqrt(8 pi r s), with gamma_j twice the depth of
    interface j.  Valid when gamma_1 * s > 1 (raises otherwise).  The
    bound is per unit moment without the m/(4 pi) field prefactor.
    """
    if model.nlayers < 2:
        return 0.0
    if s <= 0.0 or r <= 0.0:
        raise ValueError("s and r must be > 0")
    gamma1 = 2.0 * model.h[0]
    if gamma1 * s <= 1.0:
        raise ValueError("tail bound requires 2 * h1 * s > 1")
    k = wavenumbers(model, omega, mu)
    k2 = k**2
    depth = np.cumsum(model.h)
    gamma = 2.0 * depth
    terms = np.abs(np.diff(k2)) / gamma * np.exp(-gamma * s)
    return float(math.sqrt(1.0 / (8.0 * math.pi * r)) * terms.sum() / math.sqrt(s))


def _tail_estimate_field(model, omega, s, r, moment, mu) -> float:
    """Field-scaled tail bound; inf when the validity condition fails."""
    if model.nlayers < 2:
        return 0.0
    if 2.0 * model.h[0] * s <= 1.0:
        return math.inf
    return moment / (4.0 * math.pi) * tail_bound(model, omega, s, r, mu)


def _split_batch(model: LayeredModel, instrument: InstrumentConfig,
                 settings: QuadratureSettings, geometry: str,
                 offsets: tuple[float, ...]) -> list[FieldEntry]:
    """Remainder integrals for all offsets of one geometry in one pass.

    The reflection kernel is offset independent, so a single adaptive
    session integrates one vector integrand whose components are the
    per-offset Bessel-weighted kernels.
    """
    order = _ORDER_OF[geometry]
    sign = _SIGN_OF[geometry]
    omega = instrument.omega
    m = instrument.moment
    mu = instrument.mu
    prefactor = m / (4.0 * math.pi)

    base = []
    for r in offsets:
        hz1, hr1 = halfspace_fields(model.sigma[0], omega, m, r, mu)
        base.append(hz1 if geometry == "hcp" else hr1)

    if model.nlayers == 1:
        return [
            FieldEntry(r=r, geometry=geometry, value=v, tail_estimate=0.0,
                       method="quad")
            for r, v in zip(offsets, base)
        ]

    rs = np.asarray(offsets, dtype=float)

    def integrand(lam):
        core = _g_core(model, omega, mu, lam) * lam**2
        return core[None, :] * bessel_j(order, lam[None, :] * rs[:, None])

    s = settings.s_for(order)
    res = integrate_vector_gk(
        integrand, 0.0, s, rel_tol=settings.rel_tol,
        abs_tol=settings.abs_tol, max_subdivisions=settings.max_subdivisions,
    )
    entries = []
    for i, r in enumerate(offsets):
        value = base[i] + sign * prefactor * complex(res.value[i])
        tail = _tail_estimate_field(model, omega, s, r, m, mu)
        entries.append(FieldEntry(r=float(r), geometry=geometry, value=value,
                                  tail_estimate=tail, method="quad"))
    return entries


def split_field(model: LayeredModel, instrument: InstrumentConfig,
                settings: QuadratureSettings | None, geometry: str,
                r: float) -> FieldEntry:
    """Field at a single offset via the split (closed form + remainder) route."""
    if geometry not in GEOMETRIES:
        raise ValueError(f"geometry must be one of {GEOMETRIES}")
    settings = settings or QuadratureSettings()
    return _split_batch(model, instrument, settings, geometry, (float(r),))[0]


def field_batch(model: LayeredModel, instrument: InstrumentConfig,
                settings: QuadratureSettings | None = None,
                geometries: tuple[str, ...] = GEOMETRIES) -> FieldResponse:
    """All offsets and geometries of the instrument in batched passes."""
    settings = settings or QuadratureSettings()
    entries = []
    for geometry in geometries:
        if geometry not in GEOMETRIES:
            raise ValueError(f"geometry must be one of {GEOMETRIES}")
        entries.extend(_split_batch(model, instrument, settings, geometry,
                                    instrument.offsets_for(geometry)))
    return FieldResponse(entries=tuple(entries))


class FilterTableError(RuntimeError):
    """Missing, malformed, or checksum-failing filter table asset."""


@dataclass(frozen=True)
class FilterTable:
    """Digital linear filter on a log-spaced abscissa grid.

    Approximates int_0^inf f(lam) J_order(lam r) dlam by
    (1/r) * sum_j w_j f(b_j / r) with b_j = exp(j * spacing - shift).
    """

    order: int
    spacing: float
    shift: float
    weights: np.ndarray

    def __post_init__(self):
        if self.order not in (0, 1):
            raise ValueError("order must be 0 or 1")
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or len(w) < 2:
            raise ValueError("weights must be a 1-D array with >= 2 entries")
        object.__setattr__(self, "weights", w)

    @property
    def count(self) -> int:
        return len(self.weights)

    @property
    def base(self) -> np.ndarray:
        j = np.arange(self.count)
        return np.exp(j * self.spacing - self.shift)

    def apply(self, f, r: float) -> complex:
        """Transform of f against J_order at offset r."""
        if r <= 0.0:
            raise ValueError("offset r must be > 0")
        lam = self.base / r
        return complex(np.sum(self.weights * f(lam)) / r)

    @classmethod
    def load(cls, path, expect_sha256: str | None = None) -> "FilterTable":
        path = Path(path)
        if not path.is_file():
            raise FilterTableError(f"filter table not found: {path}")
        raw = path.read_bytes()
        if expect_sha256 is not None:
            digest = hashlib.sha256(raw).hexdigest()
            if digest != expect_sha256:
                raise FilterTableError(
                    f"checksum mismatch for {path}: {digest} != {expect_sha256}"
                )
        lines = raw.decode().splitlines()
        if not lines or not lines[0].startswith("# hankel-filter"):
            raise FilterTableError(f"bad filter table header in {path}")
        parts = lines[0].split()
        try:
            order = {"J0": 0, "J1": 1}[parts[2]]
            count = int(parts[3])
            spacing = float(parts[4])
            shift = float(parts[5])
        except (IndexError, KeyError, ValueError) as exc:
            raise FilterTableError(f"bad filter table header in {path}") from exc
        weights = [float(ln) for ln in lines[1:] if ln and not ln.startswith("#")]
        if len(weights) != count:
            raise FilterTableError(
                f"{path}: header promises {count} weights, found {len(weights)}"
            )
        return cls(order=order, spacing=spacing, shift=shift,
                   weights=np.array(weights))


def _filter_dir() -> Path:
    env = os.environ.get("FDEM1D_FILTERS")
    if env:
        return Path(env)
    return Path(__file__).parent / "filters"


def load_filter_table(order: int, directory=None) -> FilterTable:
    """Load the packaged (or FDEM1D_FILTERS-overridden) table for one order.

    Integrity is checked against the sha256 entries in MANIFEST.json next
    to the table files.
    """
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    directory = Path(directory) if directory is not None else _filter_dir()
    name = f"hankel_j{order}_201.txt"
    manifest_path = directory / "MANIFEST.json"
    if not manifest_path.is_file():
        raise FilterTableError(f"filter manifest not found: {manifest_path}")
    manifest = json.loads(manifest_path.read_text())
    if name not in manifest:
        raise FilterTableError(f"{name} missing from {manifest_path}")
    return FilterTable.load(directory / name,
                            expect_sha256=manifest[name]["sha256"])


def filter_field(model: LayeredModel, instrument: InstrumentConfig,
                 table: FilterTable, geometry: str, r: float) -> FieldEntry:
    """Field at one offset via the digital filter route.

    The filter covers the full semi-infinite integral; no splitting and
    no tail estimate.  The table order must match the geometry kernel
    (J0 for hcp, J1 for prp).
    """
    if geometry not in GEOMETRIES:
        raise ValueError(f"geometry must be one of {GEOMETRIES}")
    order = _ORDER_OF[geometry]
    if table.order != order:
        raise ValueError(
            f"geometry {geometry!r} needs a J{order} table, got J{table.order}"
        )
    omega = instrument.omega
    mu = instrument.mu
    sign = 1.0 if order == 0 else -1.0

    def kernel(lam):
        r0 = reflection_r0(model, omega, lam, mu)
        return (1.0 + sign * r0) * lam**2

    value = instrument.moment / (4.0 * math.pi) * table.apply(kernel, r)
    return FieldEntry(r=float(r), geometry=geometry, value=value,
                      tail_estimate=0.0, method="filter")


def filter_batch(model: LayeredModel, instrument: InstrumentConfig,
                 tables: dict[int, FilterTable] | None = None,
                 geometries: tuple[str, ...] = GEOMETRIES) -> FieldResponse:
    """Filter-route response over all instrument offsets."""
    if tables is None:
        tables = {0: load_filter_table(0), 1: load_filter_table(1)}
    entries = []
    for geometry in geometries:
        table = tables[_ORDER_OF[geometry]]
        for r in instrument.offsets_for(geometry):
            entries.append(filter_field(model, instrument, table, geometry, r))
    return FieldResponse(entries=tuple(entries))
