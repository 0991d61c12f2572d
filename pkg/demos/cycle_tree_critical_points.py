"""
Four critical points on the cycle-substituted tree
===================================================

Every edge of the d-regular tree becomes a cycle of length 2n, glued at
antipodal points.  On a single cycle each representation has an explicit
two-point function, so the critical point solves f(x) = 1/(d - 1).  Loop,
FK-Ising and the double current have closed forms; the single current is
solved numerically.
"""

from graphreps.trees import cnd_critical_closed, cnd_critical_numeric

models = ["loop", "single", "double", "rc"]

for n in (1, 2, 4):
    print(f"\ncycle length 2n = {2 * n}")
    print("  d   " + "  ".join(f"{m:>8s}" for m in models))
    for d in range(4, 9):
        xc = [cnd_critical_numeric(m, d, n) for m in models]
        print(f"  {d}   " + "  ".join(f"{v:8.5f}" for v in xc))

# the closed forms agree with bisection
d, n = 6, 2
for m in ("loop", "rc", "double"):
    print(m, cnd_critical_closed(m, d, n) - cnd_critical_numeric(m, d, n))

# as the cycles grow the single current creeps up to the loop value
for n in (1, 4, 16, 64):
    print(n, cnd_critical_closed("loop", 5, n) - cnd_critical_numeric("single", 5, n))
