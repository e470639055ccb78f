#!/usr/bin/env python3
"""Record the surrogate-vs-quadrature deviation envelope as a test asset.

For the two shallow-interface presets the closed-form response is
compared with the split-quadrature imaginary parts over a dense offset
grid, and the relative deviations are written to
tests/data/approx_envelope.json.  The regression test replays the same
computation and compares against this file, so the envelope (and with
it the PRP-beats-HCP ordering) is pinned, not just spot-checked.

Run from the repository root:
    python3 scripts/record_approx_envelope.py
"""

import argparse
import json
from pathlib import Path

from fdem1d.approx import approx_n3
from fdem1d.forward import QuadratureSettings, split_field
from fdem1d.model import InstrumentConfig
from fdem1d.petro import preset_model

R_GRID = [2.0 + 0.5 * k for k in range(13)]
MODELS = ("model1", "model2")


def envelope() -> dict:
    instrument = InstrumentConfig()
    quad = QuadratureSettings(rel_tol=1e-10)
    out = {}
    for name in MODELS:
        model, _ = preset_model(name)
        hcp, prp = [], []
        for r in R_GRID:
            lz, lrho = approx_n3(*model.sigma, *model.h,
                                 instrument.omega, r=r)
            hz = split_field(model, instrument, quad, "hcp", r).value
            hr = split_field(model, instrument, quad, "prp", r).value
            hcp.append(abs(lz - hz.imag) / abs(hz.imag))
            prp.append(abs(lrho - hr.imag) / abs(hr.imag))
        out[name] = {"r_m": R_GRID, "hcp": hcp, "prp": prp}
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="tests/data/approx_envelope.json")
    args = ap.parse_args()
    data = envelope()
    for name, rec in data.items():
        for r, dh, dp in zip(rec["r_m"], rec["hcp"], rec["prp"]):
            print(f"{name} r={r:.1f}  hcp={dh:.4f}  prp={dp:.4f}")
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
