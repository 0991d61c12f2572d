"""
A loop model whose phase transition is not unique
==================================================

Replace every edge of the 5-regular tree by the theta gadget G(12, 2): two
hub vertices joined by two paths of length 12 and two of length 2, with the
marked pair sitting in the middle of the short paths.  Because the gadget
copies only meet at cut vertices, the loop O(1) model on the big graph
projects onto Bernoulli percolation of the tree with parameter f(x), the
gadget's terminal two-point function.  The tree percolates when
f(x) > 1/(d - 1) = 1/4.
"""

import numpy as np

from graphreps import Loop, effective_param, loop_two_point, regime_scan, theta_gadget

gadget = theta_gadget(12, 2)
a, b = gadget.terminals
print(f"gadget: {gadget.vertex_count} vertices, {gadget.edge_count} edges, terminals {a}, {b}")

# f is a ratio of two sums over the 8 even subgraphs of the gadget
xs = np.linspace(0.5, 1.0, 11)
for x, fx in zip(xs, loop_two_point(gadget, xs, a, b)):
    bar = "#" * int(200 * fx)
    print(f"x = {x:.2f}  f = {fx:.4f}  {bar}")

# f climbs above 1/4 and then falls back to exactly 1/4 at x = 1
print("f(0.85)  =", float(effective_param(gadget, Loop, 0.85)))
print("f(0.965) =", float(effective_param(gadget, Loop, 0.965)))
print("f(1)     =", float(effective_param(gadget, Loop, 1.0)))

report = regime_scan(gadget, Loop, d=5)
print("percolation regime:", report.intervals)
print("complement:", report.complement())
print("unique transition?", report.is_unique)
