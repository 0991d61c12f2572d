"""Small named graphs bundled with the package for verification runs."""

from __future__ import annotations

from importlib import resources

from .graph import Multigraph, complete_graph, cycle_graph, parse_graph, theta_gadget

__all__ = ["FIXTURE_NAMES", "build_fixture", "load_fixture", "load_fixtures"]


def _glued_triangles() -> Multigraph:
    # two triangles sharing vertex 0
    return Multigraph(5, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)], terminals=(1, 3))


def _block_chain() -> Multigraph:
    # triangle, bridge, square
    edges = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6), (6, 3)]
    return Multigraph(7, edges, terminals=(0, 5))


def _loopy() -> Multigraph:
    # parallel pair, a self-loop and a pendant edge
    return Multigraph(4, [(0, 1), (0, 1), (1, 2), (2, 2), (2, 0), (2, 3)], terminals=(0, 3))


_BUILDERS = {
    "triangle": lambda: complete_graph(3),
    "c4": lambda: cycle_graph(2),
    "k4": lambda: complete_graph(4),
    "theta_2_1": lambda: theta_gadget(2, 1),
    "theta_2_2": lambda: theta_gadget(2, 2),
    "theta_3_2": lambda: theta_gadget(3, 2),
    "glued_triangles": _glued_triangles,
    "block_chain": _block_chain,
    "loopy": _loopy,
}

FIXTURE_NAMES = tuple(_BUILDERS)


def build_fixture(name: str) -> Multigraph:
    return _BUILDERS[name]()


def load_fixture(name: str) -> Multigraph:
    """Read a bundled fixture from its ``.graph`` file."""
    text = resources.files("graphreps").joinpath("fixtures").joinpath(f"{name}.graph").read_text()
    return parse_graph(text)


def load_fixtures() -> dict[str, Multigraph]:
    return {name: load_fixture(name) for name in FIXTURE_NAMES}
