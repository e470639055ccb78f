"""Petrophysical bridge from lithology to layer conductivity (CRIM).

A layer is described by clay content C, porosity phi, and water
saturation S_w; the solid fraction splits into quartz and clay, the pore
space into water and air.  The complex-refractive-index mixing rule with
exponent gamma = 1/2 combines the phase conductivities:

    sigma = [ (1-phi)(1-C) sigma_q^g + (1-phi) C sigma_c^g
              + phi S_w sigma_w^g + phi (1-S_w) sigma_a^g ]^(1/g)

With no clay and non-conducting matrix and air this collapses to
Archie's law sigma = phi^2 S_w^2 sigma_w.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .model import LayeredModel

__all__ = [
    "DEFAULT_MATERIALS",
    "PetroLayer",
    "crim_conductivity",
    "preset_model",
    "preset_composition",
    "PRESET_NAMES",
]

# phase conductivities in S/m: clay, quartz, pore water, air
DEFAULT_MATERIALS = {
    "sigma_c": 0.2,
    "sigma_q": 0.01,
    "sigma_w": 0.1,
    "sigma_a": 0.0001,
}


@dataclass(frozen=True)
class PetroLayer:
    """Volumetric composition of one layer plus its phase conductivities.

    clay_content is the clay fraction of the solid phase, porosity the
    pore fraction of the bulk, water_saturation the water-filled pore
    fraction; all in [0, 1] (see individual bounds below).  The four
    sigma_* fields are the quartz, clay, water, and air conductivities
    in S/m; gamma is the mixing exponent.
    """

    clay_content: float
    porosity: float
    water_saturation: float
    sigma_q: float = DEFAULT_MATERIALS["sigma_q"]
    sigma_c: float = DEFAULT_MATERIALS["sigma_c"]
    sigma_w: float = DEFAULT_MATERIALS["sigma_w"]
    sigma_a: float = DEFAULT_MATERIALS["sigma_a"]
    gamma: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.clay_content <= 1.0:
            raise ValueError("clay_content must lie in [0, 1]")
        if not 0.0 < self.porosity < 1.0:
            raise ValueError("porosity must lie in (0, 1)")
        if not 0.0 <= self.water_saturation <= 1.0:
            raise ValueError("water_saturation must lie in [0, 1]")
        for name in ("sigma_q", "sigma_c", "sigma_w", "sigma_a"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")


def _materials_kwargs(materials: dict | None) -> dict:
    if not materials:
        return {}
    unknown = set(materials) - set(DEFAULT_MATERIALS)
    if unknown:
        raise ValueError(f"unknown material keys: {sorted(unknown)}")
    return dict(materials)


def crim_conductivity(layer: PetroLayer) -> float:
    """Bulk conductivity (S/m) of one layer by the mixing rule."""
    c, phi, sw = layer.clay_content, layer.porosity, layer.water_saturation
    g = layer.gamma
    mix = (
        (1.0 - phi) * (1.0 - c) * layer.sigma_q ** g
        + (1.0 - phi) * c * layer.sigma_c ** g
        + phi * sw * layer.sigma_w ** g
        + phi * (1.0 - sw) * layer.sigma_a ** g
    )
    return mix ** (1.0 / g)


# Reference three-layer test sections.  The dry set has near-drained
# pores, the wet set near-saturated ones; thin vs thick variants change
# only the layer thicknesses.  Lithologies, top to bottom: clayey silt,
# clean sand, silty sand.
_DRY = (
    PetroLayer(clay_content=0.50, porosity=0.20, water_saturation=0.03),
    PetroLayer(clay_content=0.01, porosity=0.37, water_saturation=0.01),
    PetroLayer(clay_content=0.25, porosity=0.30, water_saturation=0.02),
)
_WET = (
    PetroLayer(clay_content=0.50, porosity=0.20, water_saturation=0.92),
    PetroLayer(clay_content=0.01, porosity=0.37, water_saturation=0.98),
    PetroLayer(clay_content=0.25, porosity=0.30, water_saturation=0.98),
)

_PRESETS = {
    "model1": (_DRY, (2.5, 0.5)),
    "model2": (_WET, (2.5, 0.5)),
    "model3": (_DRY, (3.0, 2.0)),
    "model4": (_WET, (3.0, 2.0)),
}

PRESET_NAMES = tuple(_PRESETS)

_LITHOLOGY = ("clayey silt", "clean sand", "silty sand")


def preset_composition(name: str) -> tuple[tuple[PetroLayer, ...], tuple[float, ...]]:
    """Layer compositions and thicknesses of a named preset."""
    try:
        return _PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown preset {name!r}; choose from {PRESET_NAMES}"
        ) from None


def preset_model(name: str,
                 materials: dict | None = None) -> tuple[LayeredModel, dict]:
    """Named preset as a conductivity model plus lithology metadata.

    Conductivities are computed from the compositions by the mixing
    rule, not stored.  materials optionally overrides the phase
    conductivities (keys as in DEFAULT_MATERIALS, values in S/m).
    """
    layers, h = preset_composition(name)
    overrides = _materials_kwargs(materials)
    if overrides:
        layers = tuple(replace(lay, **overrides) for lay in layers)
    sigma = tuple(crim_conductivity(layer) for layer in layers)
    model = LayeredModel(sigma=sigma, h=h)
    meta = {
        "name": name,
        "lithology": list(_LITHOLOGY),
        "clay_content": [lay.clay_content for lay in layers],
        "porosity": [lay.porosity for lay in layers],
        "water_saturation": [lay.water_saturation for lay in layers],
        "sigma_mS_per_m": [1e3 * s for s in model.sigma],
        "h_m": list(h),
    }
    return model, meta
