"""Sparseness of the three echo-path profiles in several transform domains."""
from ptlms.harness.presets import SPARSITY_COLUMNS, sparsity_table
from ptlms.signals import block_system

print(f"{'profile':<12}" + "".join(f"{c:>28}" for c in SPARSITY_COLUMNS))
for profile, vals in sparsity_table().items():
    print(f"{profile:<12}" + "".join(f"{v:>28.4f}" for v in vals))

# 64 active taps out of 512: equal magnitudes versus a geometric decay
print("block, equal taps:   ", round(block_system(512, 64).sparseness, 4))
print("block, decay 0.8794: ", round(block_system(512, 64, decay=0.8794).sparseness, 4))
