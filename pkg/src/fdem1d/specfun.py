"""Special functions needed by the field kernels.

Thin validated wrappers around scipy.special.  Two families are used:

* Bessel functions of the first kind J0, J1 on the non-negative real axis
  (Hankel-transform kernels).
* Modified Bessel functions I_v, K_v of orders 1 and 2 at complex argument
  (closed-form radial half-space field).  The arguments that occur are of
  the form i*k*r/2 with Re > 0, Im > 0, and only the product I_v*K_v is
  needed, which stays O(1/|z|) while the factors overflow/underflow.  The
  scaled product path is therefore the one the physics uses.
"""

from __future__ import annotations

import numpy as np
from scipy import special as _sp

__all__ = ["bessel_j", "bessel_ik", "bessel_ik_product"]

_J_FUNCS = {0: _sp.j0, 1: _sp.j1}

# iv overflows roughly past Re(z) ~ 700; stay well clear for the unscaled pair.
_UNSCALED_LIMIT = 600.0


def bessel_j(order: int, x):
    """Bessel function of the first kind, order 0 or 1, on x >= 0.

    Accepts scalars or arrays.  Negative arguments are rejected: the
    transform kernels are only ever evaluated on the half line.
    """
    if order not in _J_FUNCS:
        raise ValueError(f"order must be 0 or 1, got {order!r}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("bessel_j argument must be >= 0")
    return _J_FUNCS[order](x)


def _check_ik_args(order: int, z: complex) -> complex:
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order!r}")
    z = complex(z)
    if z == 0:
        raise ValueError("bessel_ik argument must be nonzero")
    if z.real < 0.0 and z.imag == 0.0:
        raise ValueError("bessel_ik is not defined on the negative real axis")
    return z


def bessel_ik(order: int, z: complex) -> tuple[complex, complex]:
    """Pair (I_order(z), K_order(z)) for order 1 or 2.

    Raises OverflowError for |Re z| beyond the unscaled range; use
    bessel_ik_product for the large-argument product.
    """
    z = _check_ik_args(order, z)
    if abs(z.real) > _UNSCALED_LIMIT:
        raise OverflowError(
            "unscaled I/K pair overflows for |Re z| > "
            f"{_UNSCALED_LIMIT:.0f}; use bessel_ik_product"
        )
    return complex(_sp.iv(order, z)), complex(_sp.kv(order, z))


def bessel_ik_product(order: int, z: complex) -> complex:
    """Stable product I_order(z) * K_order(z).

    Computed from the scaled functions ive = I*exp(-|Re z|) and
    kve = K*exp(z); the residual factor exp(|Re z| - z) is a pure phase
    whenever Re z >= 0, so the product never overflows.
    """
    z = _check_ik_args(order, z)
    scale = abs(z.real) - z
    return complex(_sp.ive(order, z) * _sp.kve(order, z) * np.exp(scale))
