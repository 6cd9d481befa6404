"""
Figure sweeps from the shipped presets
======================================

Runs the three preset sweeps (task length, transmit power, user CPU speed),
writes CSV and SVG files to ./figures and prints the analytic columns.
"""

from pathlib import Path

from nomamec.experiments import McSettings, reproduce

out = Path("figures")
for name in ("fig2", "fig3", "fig4"):
    # a small Monte Carlo run keeps the demo quick; drop mc= for the preset's own count
    rows, paths = reproduce(name, out, mc=McSettings(20_000, seed=1))
    print(f"== {name}: {', '.join(str(p) for p in paths)}")
    schemes = list(dict.fromkeys(r.scheme for r in rows))
    values = sorted({r.sweep_value for r in rows})
    print(f"{rows[0].sweep_var:>12} " + " ".join(f"{s:>24}" for s in schemes))
    for v in values:
        line = {r.scheme: r.ps_analytic for r in rows if r.sweep_value == v}
        print(f"{v:12.4g} " + " ".join(f"{line[s]:24.6f}" for s in schemes))
    if name == "fig4":
        print("latency (ms): " + " ".join(f"{r.latency * 1e3:.3f}" for r in rows))
