"""Exact enumeration and Monte Carlo for the graphical representations of
the Ising model (loop O(1), FK-Ising, random currents, uniform even
subgraphs, Bernoulli percolation, arboreal gas) on finite multigraphs and
on trees with gadget-substituted edges."""

from .cycles import (
    CycleBasis,
    RankCapError,
    cycle_basis,
    enumerate_even,
    halving_iso,
    halving_iso_inverse,
    is_even,
    sample_ueg,
    ueg_edge_marginals,
    ueg_of_config,
)
from .graph import (
    BlockPartition,
    Multigraph,
    arc_chain,
    block_decomposition,
    complete_graph,
    cycle_graph,
    halve_edges,
    path_graph,
    read_graph,
    substitute_edges,
    theta_gadget,
    tree_ball,
    wired_quotient,
    write_graph,
)
from .models import (
    RC,
    ArborealGas,
    Bernoulli,
    DoubleCurrent,
    EdgeCapError,
    Loop,
    SingleCurrent,
    Sprinkled,
    loop_two_point,
    model_distribution,
    model_two_point,
)
from .trees import (
    RegimeReport,
    cnd_critical_closed,
    cnd_critical_numeric,
    effective_param,
    gw_survival,
    regime_scan,
)

__all__ = [
    "CycleBasis",
    "RankCapError",
    "cycle_basis",
    "enumerate_even",
    "halving_iso",
    "halving_iso_inverse",
    "is_even",
    "sample_ueg",
    "ueg_edge_marginals",
    "ueg_of_config",
    "BlockPartition",
    "Multigraph",
    "arc_chain",
    "block_decomposition",
    "complete_graph",
    "cycle_graph",
    "halve_edges",
    "path_graph",
    "read_graph",
    "substitute_edges",
    "theta_gadget",
    "tree_ball",
    "wired_quotient",
    "write_graph",
    "RC",
    "ArborealGas",
    "Bernoulli",
    "DoubleCurrent",
    "EdgeCapError",
    "Loop",
    "SingleCurrent",
    "Sprinkled",
    "loop_two_point",
    "model_distribution",
    "model_two_point",
    "RegimeReport",
    "cnd_critical_closed",
    "cnd_critical_numeric",
    "effective_param",
    "gw_survival",
    "regime_scan",
]

__version__ = "0.1.0"
