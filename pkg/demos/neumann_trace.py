"""Solve the extension problem for a small Hermite expansion and read off its Neumann trace."""

from artifact import ExtensionParams, HermiteExpansion, neumann_trace
from artifact.extension import neumann_constant

f = HermiteExpansion(1, 6, "gaussian", {(0,): 1.0, (2,): -0.5, (5,): 0.25})

for s in (0.3, 0.5, 0.7):
    res = neumann_trace(f, ExtensionParams("L", s, 1))
    print(f"s={s}: boundary constant {neumann_constant(s):+.6f}, max rel err {res.max_rel_err:.2e}")
    for k, (got, want) in enumerate(zip(res.shell_limits, res.shell_expected)):
        if want != 0:
            print(f"    shell {k}: limit {got:+.8f}  predicted {want:+.8f}")
