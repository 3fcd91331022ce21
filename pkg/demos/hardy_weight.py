"""Tabulate the Hardy weight and compare the inequality's two sides on random data."""

import numpy as np

from artifact.hardy import HardyWeight, hardy_check, hardy_weight_value
from artifact.suites import random_expansion

w = HardyWeight(1, 0.5)
t = np.geomspace(1e-3, 50, 8)
for ti, wi in zip(t, hardy_weight_value(w, t)):
    print(f"w({ti:9.4f}) = {wi:.10f}")

rng = np.random.default_rng(7)
for _ in range(5):
    rep = hardy_check(random_expansion(1, 12, rng), 1, 0.5, 1.0)
    print(f"lhs {rep.lhs:.6e}  rhs {rep.rhs:.6e}  ratio {rep.lhs / rep.rhs:.4f}")
