"""16-bit datapath next to its floating-point reference.

Signals and weights are Q1.14, error and gains Q3.12, and the gradient
product goes through the Mitchell log/antilog pair.
"""
from ptlms.harness.presets import fig5_specs
from ptlms.harness import fixed_vs_float

for name, spec in fig5_specs(trials=4).items():
    cmp = fixed_vs_float(spec)
    print(f"{name}: float {cmp.float_curve.steady_state_db():.2f} dB, "
          f"fixed {cmp.fixed_curve.steady_state_db():.2f} dB, "
          f"deviation {cmp.steady_state_deviation_db():.2f} dB, "
          f"saturations {cmp.saturation_events}")
