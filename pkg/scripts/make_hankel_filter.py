#!/usr/bin/env python3
"""Design the packaged 201-point Hankel filter tables and their manifest.

The filter approximates F(r) = int_0^inf f(lam) J_l(lam r) dlam by
(1/r) sum_j w_j f(b_j / r) on a log-spaced abscissa grid b_j.  Weights
come from a least-squares fit over two analytic transform families
(Gaussian and exponential kernels, known closed-form transforms) with
heavily weighted moment constraints, plus an exact repair of the
lambda^2 moment distributed over the large-abscissa nodes.  The moment
constraints pin the regularised power integrals
  J0: sum w = 1, sum w b = 0, sum w b^2 = -1
  J1: sum w = 1, sum w b = 1, sum w b^2 = 0
so polynomial-like kernel pieces (free-space limits) come out exact.

Run from the repository root:
    python3 scripts/make_hankel_filter.py --out src/fdem1d/filters
    python3 scripts/make_hankel_filter.py --validate
"""

import argparse
import hashlib
import json
import math
from pathlib import Path

import numpy as np

N_POINTS = 201
LG_LO = -4.0
LG_HI = 3.0
FAMILY_SIZE = 900
MOMENT_WEIGHT = 1.0e6
RCOND = 1.0e-13
REPAIR_B_MIN = 50.0

SPACING = (LG_HI - LG_LO) / (N_POINTS - 1) * math.log(10.0)
SHIFT = -LG_LO * math.log(10.0)


def abscissae() -> np.ndarray:
    j = np.arange(N_POINTS)
    return np.exp(j * SPACING - SHIFT)


def design(order: int) -> np.ndarray:
    b = abscissae()
    rows, rhs = [], []
    # Gaussian kernels: closed-form transforms at r = 1
    for a in 10.0 ** np.linspace(-1.6, 5.0, FAMILY_SIZE):
        if order == 0:
            rows.append(b * np.exp(-a * b * b))
            rhs.append(math.exp(-1.0 / (4.0 * a)) / (2.0 * a))
        else:
            rows.append(b * b * np.exp(-a * b * b))
            rhs.append(math.exp(-1.0 / (4.0 * a)) / (4.0 * a * a))
    # exponential kernels
    for a in 10.0 ** np.linspace(-2.3, 3.0, FAMILY_SIZE):
        rows.append(np.exp(-a * b))
        s = math.hypot(a, 1.0)
        rhs.append(1.0 / s if order == 0 else (s - a) / s)
    a_mat = np.array(rows)
    y = np.array(rhs)
    # relative residuals, then unit row norms
    a_mat /= y[:, None]
    y = np.ones_like(y)
    norms = np.linalg.norm(a_mat, axis=1)
    a_mat /= norms[:, None]
    y /= norms
    if order == 0:
        moments = [(np.ones_like(b), 1.0), (b, 0.0), (b * b, -1.0)]
    else:
        moments = [(np.ones_like(b), 1.0), (b, 1.0), (b * b, 0.0)]
    for kernel, target in moments:
        # normalise before weighting so the rcond cutoff, which scales
        # with the largest singular value, does not swallow the fit rows
        scale = MOMENT_WEIGHT / np.linalg.norm(kernel)
        a_mat = np.vstack([a_mat, scale * kernel[None, :]])
        y = np.append(y, scale * target)
    w, *_ = np.linalg.lstsq(a_mat, y, rcond=RCOND)
    # exact lambda^2-moment repair confined to the large-b tail
    target = moments[2][1]
    mask = b >= REPAIR_B_MIN
    c = (b * b)[mask]
    residual = target - float(w @ (b * b))
    w[mask] += c * residual / float(c @ c)
    return w


def write_tables(out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {}
    for order in (0, 1):
        w = design(order)
        name = f"hankel_j{order}_201.txt"
        lines = [f"# hankel-filter J{order} {N_POINTS} "
                 f"{SPACING:.17e} {SHIFT:.17e}"]
        lines += [f"{v:.17e}" for v in w]
        text = "\n".join(lines) + "\n"
        path = out_dir / name
        path.write_text(text)
        manifest[name] = {
            "sha256": hashlib.sha256(text.encode()).hexdigest(),
            "points": N_POINTS,
        }
        print(f"wrote {path}")
    (out_dir / "MANIFEST.json").write_text(
        json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {out_dir / 'MANIFEST.json'}")


def validate(out_dir: Path):
    """Worst relative error of the filter route against the split route."""
    from fdem1d.forward import (QuadratureSettings, FilterTable, field_batch,
                                filter_batch, halfspace_fields)
    from fdem1d.model import InstrumentConfig, LayeredModel
    from fdem1d.petro import preset_model

    tables = {o: FilterTable.load(out_dir / f"hankel_j{o}_201.txt")
              for o in (0, 1)}
    instrument = InstrumentConfig()
    models = {name: preset_model(name)[0]
              for name in ("model1", "model2", "model3", "model4")}
    models["section333"] = LayeredModel(sigma=(0.333, 0.020, 0.100),
                                        h=(2.5, 0.5))
    worst = 0.0
    quad = QuadratureSettings(s0=6.0, s1=6.0, rel_tol=1e-10)
    for name, model in models.items():
        ref = field_batch(model, instrument, quad)
        flt = filter_batch(model, instrument, tables)
        for e_ref, e_flt in zip(ref.entries, flt.entries):
            rel = abs(e_flt.value - e_ref.value) / abs(e_ref.value)
            worst = max(worst, rel)
            print(f"{name:10s} {e_ref.geometry} r={e_ref.r:.0f}  "
                  f"rel={rel:.3e}")
    for sigma in (0.003, 0.0333, 0.333, 1.0):
        model = LayeredModel(sigma=(sigma,))
        flt = filter_batch(model, instrument, tables)
        for e in flt.entries:
            hz, hr = halfspace_fields(sigma, instrument.omega,
                                      instrument.moment, e.r)
            ref = hz if e.geometry == "hcp" else hr
            rel = abs(e.value - ref) / abs(ref)
            worst = max(worst, rel)
    print(f"worst relative error over all checks: {worst:.3e}")
    return worst


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="src/fdem1d/filters",
                    help="output directory for the tables")
    ap.add_argument("--validate", action="store_true",
                    help="check the written tables against quadrature")
    args = ap.parse_args()
    out_dir = Path(args.out)
    if args.validate:
        validate(out_dir)
    else:
        write_tables(out_dir)


if __name__ == "__main__":
    main()
