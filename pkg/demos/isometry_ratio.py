"""Lift random data to the upper half space and check that the norm ratio is one constant."""

import numpy as np

from artifact.isometry import isometry_ratio
from artifact.suites import random_expansion

rng = np.random.default_rng(11)
s = 0.4
ratios = [isometry_ratio(random_expansion(1, 6, rng), s, j_cutoff=120) for _ in range(5)]
for r in ratios:
    print(f"{r:.12f}")
print(f"relative spread {np.ptp(ratios) / np.mean(ratios):.2e}")
