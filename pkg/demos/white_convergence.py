"""Proportionate vs plain delayed LMS on a sparse echo path with white input.

    python demos/white_convergence.py [OUTDIR]
"""
import sys
from pathlib import Path

from ptlms.harness import ExperimentSpec, first_crossing, run, speedup
from ptlms.harness.emit import emit

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
base = dict(system="sparse", source="white", iterations=8000, trials=20, mu=0.25, delay=5)

curves = {}
for algo in ("dlms", "dplms", "dmplms"):
    c = run(ExperimentSpec(algorithm=algo, label=algo.upper(), **base))
    curves[c.label] = c
    print(f"{c.label:<8} -20 dB at {first_crossing(c, -20)}, steady state {c.steady_state_db():.1f} dB")

print(f"DMPLMS over DLMS: {speedup(curves['DMPLMS'], curves['DLMS']):.2f}x")
csv, svg = emit(curves, out / "white_convergence", title="Sparse path, white input")
print("wrote", csv, svg)
