"""
Couplings between the representations, checked exactly and by sampling
=======================================================================
"""

import numpy as np

from graphreps import RC, DoubleCurrent, complete_graph, halve_edges, model_distribution, theta_gadget
from graphreps.mcmc import McConfig, fk_heat_bath, loop_sampler
from graphreps.models import connection_table, fk_distribution, fk_parameter, rc_oracle_two_point, tv_distance
from graphreps.reliability import two_terminal_reliability

g = theta_gadget(2, 1)
x = 0.5

# loop O(1) united with Bernoulli(x) is FK-Ising with p = 2x/(1+x)
print("TV(loop u Bern, FK):", tv_distance(model_distribution(g, RC(x)), fk_distribution(g, fk_parameter(x))))

# and the FK two-point function squared is the double-current two-point function
a, b = g.terminals
phi = rc_oracle_two_point(g, x, a, b)
dbl = model_distribution(g, DoubleCurrent(x)).probability(connection_table(g, a, b))
print("phi^2 =", phi**2, " double current =", dbl)

# heat-bath dynamics reproduce the FK law on a triangle
tri = complete_graph(3)
cfg = McConfig(seed=0, samples=50_000)
S = fk_heat_bath(tri, x, cfg)
emp = np.bincount(S.astype(int) @ [1, 2, 4], minlength=8) / len(S)
print("heat-bath TV:", 0.5 * np.abs(emp - fk_distribution(tri, fk_parameter(x)).probs).sum())

# a uniform even subgraph of each FK sample is a loop O(1) sample;
# the full triangle should show up with probability x^3 / (1 + x^3)
L = loop_sampler(tri, x, cfg)
print("full triangle:", L.all(axis=1).mean(), "exact:", x**3 / (1 + x**3))

# halving every edge squares the connection probabilities
half, _ = halve_edges(tri)
p = 0.6
print(two_terminal_reliability(half.vertex_count, half.edges, p, 0, 1),
      two_terminal_reliability(tri.vertex_count, tri.edges, p * p, 0, 1))
