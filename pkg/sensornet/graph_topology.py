"""
Labeled connected graphs used as GA genomes and Hamiltonian skeletons.

Nodes are 0-based integers 0..n-1. Edges are normalized to (u, v) with u < v
and kept sorted, so equal graphs always compare and hash equal. Graphs are
immutable; every mutator returns a new instance.
"""
import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import networkx as nx
import numpy as np
import orjson

from .errors import ConfigurationError, DisconnectedGraphError, PersistenceError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


class GraphKind(str, Enum):
    """Standard graph families"""
    PATH = "path"
    CYCLE = "cycle"
    COMPLETE = "complete"


def _normalize_edges(n: int, edges: Iterable[Sequence[int]]) -> Tuple[Edge, ...]:
    normalized = set()
    for edge in edges:
        u, v = int(edge[0]), int(edge[1])
        if u == v:
            raise ConfigurationError(f"Self-loop ({u},{v}) is not allowed")
        if not (0 <= u < n and 0 <= v < n):
            raise ConfigurationError(f"Edge ({u},{v}) has an endpoint outside [0, {n - 1}]")
        normalized.add((min(u, v), max(u, v)))
    return tuple(sorted(normalized))


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes 0..n-1"""
    n: int
    edges: Tuple[Edge, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError(f"Graph needs at least one node, got n={self.n}")
        object.__setattr__(self, "edges", _normalize_edges(self.n, self.edges))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def missing_edges(self) -> List[Edge]:
        """Complement edge set in lexicographic order"""
        present = set(self.edges)
        return [pair for pair in itertools.combinations(range(self.n), 2) if pair not in present]

    def with_edges(self, extra: Iterable[Edge]) -> "Graph":
        return Graph(self.n, self.edges + tuple(extra))

    def relabel(self, permutation: Sequence[int]) -> "Graph":
        """Return the graph with node i renamed to permutation[i]"""
        if sorted(permutation) != list(range(self.n)):
            raise ConfigurationError(f"Not a permutation of 0..{self.n - 1}: {list(permutation)}")
        return Graph(self.n, tuple((permutation[u], permutation[v]) for u, v in self.edges))

    def to_networkx(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(range(self.n))
        G.add_edges_from(self.edges)
        return G

    @classmethod
    def from_networkx(cls, G: nx.Graph) -> "Graph":
        nodes = sorted(G.nodes)
        if nodes != list(range(len(nodes))):
            G = nx.convert_node_labels_to_integers(G, ordering="sorted")
        return cls(G.number_of_nodes(), tuple(G.edges))

    def to_dict(self) -> Dict:
        return {"n": self.n, "edges": [list(edge) for edge in self.edges]}

    @classmethod
    def from_dict(cls, data: Dict) -> "Graph":
        try:
            return cls(int(data["n"]), tuple(tuple(edge) for edge in data["edges"]))
        except (KeyError, TypeError, IndexError) as e:
            raise ConfigurationError(f"Malformed graph description: {e}") from e

    def __str__(self) -> str:
        return f"Graph(n={self.n}, edges={list(self.edges)})"


def standard_graph(kind: Union[GraphKind, str], n: int) -> Graph:
    """Path, cycle or complete graph on n nodes"""
    kind = GraphKind(kind)
    if n < 1:
        raise ConfigurationError(f"Graph size must be at least 1, got {n}")

    if kind is GraphKind.PATH:
        edges = [(i, i + 1) for i in range(n - 1)]
    elif kind is GraphKind.CYCLE:
        edges = [(i, i + 1) for i in range(n - 1)]
        if n > 1:
            edges.append((0, n - 1))
    else:
        edges = list(itertools.combinations(range(n), 2))

    return Graph(n, tuple(edges))


def is_connected(g: Graph) -> bool:
    """True iff the graph has a single connected component"""
    if g.n == 1:
        return True
    return nx.is_connected(g.to_networkx())


def require_connected(g: Graph) -> None:
    if not is_connected(g):
        raise DisconnectedGraphError(f"Physics operations need a connected graph: {g}")


def canonical_key(g: Graph) -> List[Edge]:
    """Sorted list of normalized edges; equal graphs have equal keys"""
    return list(g.edges)


def add_random_missing_edge(g: Graph, rng: np.random.Generator) -> Graph:
    """Add one uniformly chosen absent edge, or return g if it is complete"""
    missing = g.missing_edges()
    if not missing:
        return g
    return g.with_edges([missing[int(rng.integers(len(missing)))]])


def random_connected_init(n: int, extra_edge_budget: int, rng: np.random.Generator) -> Graph:
    """Path graph plus k uniformly chosen extra edges, k uniform in 0..budget"""
    if extra_edge_budget < 0:
        raise ConfigurationError(f"extra_edge_budget must be non-negative, got {extra_edge_budget}")
    g = standard_graph(GraphKind.PATH, n)

    k = int(rng.integers(extra_edge_budget + 1))
    missing = g.missing_edges()
    k = min(k, len(missing))
    if k == 0:
        return g

    chosen = rng.choice(len(missing), size=k, replace=False)
    return g.with_edges(missing[i] for i in sorted(int(c) for c in chosen))


def connect_components(g: Graph, rng: np.random.Generator) -> Graph:
    """Add uniformly chosen edges between distinct components until connected"""
    while not is_connected(g):
        component_of = {}
        for label, component in enumerate(nx.connected_components(g.to_networkx())):
            for node in component:
                component_of[node] = label
        bridges = [
            (u, v) for u, v in g.missing_edges() if component_of[u] != component_of[v]
        ]
        g = g.with_edges([bridges[int(rng.integers(len(bridges)))]])
    return g


def enumerate_connected_graphs(n: int) -> Iterable[Graph]:
    """Every labeled connected graph on n nodes, in edge-bitmask order"""
    pairs = list(itertools.combinations(range(n), 2))
    if not pairs:
        yield Graph(n)
        return
    for mask in range(1 << len(pairs)):
        g = Graph(n, tuple(pair for bit, pair in enumerate(pairs) if mask >> bit & 1))
        if is_connected(g):
            yield g


def write_graph(g: Graph, path: Union[str, Path]) -> None:
    path = Path(path)
    try:
        path.write_bytes(orjson.dumps(g.to_dict()))
    except OSError as e:
        raise PersistenceError(f"Failed to write graph ({e})", path) from e


def read_graph(path: Union[str, Path]) -> Graph:
    path = Path(path)
    try:
        data = orjson.loads(path.read_bytes())
    except OSError as e:
        raise PersistenceError(f"Failed to read graph ({e})", path) from e
    except orjson.JSONDecodeError as e:
        raise ConfigurationError(f"Graph file is not valid JSON: {path}") from e
    return Graph.from_dict(data)
