"""Frequency-domain electromagnetic induction over a horizontally layered earth.

Forward modelling of the vertical magnetic dipole response (vertical and
radial magnetic field at the surface), analytic small-contrast surrogates,
a CRIM petrophysical bridge from lithology to conductivity, and two-stage
inversion of imaginary-part data.
"""

from .model import LayeredModel, InstrumentConfig, KernelPoint
from .forward import (
    QuadratureSettings,
    FieldEntry,
    FieldResponse,
    FilterTable,
    halfspace_fields,
    split_field,
    field_batch,
    filter_field,
    tail_bound,
)
from .approx import ApproxResponse, approx_n2, approx_n3, approx_response
from .petro import PetroLayer, crim_conductivity, preset_model, PRESET_NAMES
from .inverse import (
    Bounds,
    SolverSettings,
    ObservationVector,
    InversionResult,
    objective,
    synth_observations,
    minimize_bfgs,
    minimize_sa,
    invert_sa,
    invert_two_stage,
    error_study,
)

__version__ = "0.1.0"

__all__ = [
    "LayeredModel",
    "InstrumentConfig",
    "KernelPoint",
    "QuadratureSettings",
    "FieldEntry",
    "FieldResponse",
    "FilterTable",
    "halfspace_fields",
    "split_field",
    "field_batch",
    "filter_field",
    "tail_bound",
    "ApproxResponse",
    "approx_n2",
    "approx_n3",
    "approx_response",
    "PetroLayer",
    "crim_conductivity",
    "preset_model",
    "PRESET_NAMES",
    "Bounds",
    "SolverSettings",
    "ObservationVector",
    "InversionResult",
    "objective",
    "synth_observations",
    "minimize_bfgs",
    "minimize_sa",
    "invert_sa",
    "invert_two_stage",
    "error_study",
    "__version__",
]
