"""Graph decomposition module.

Connectivity classes, the block tree of a connected graph and the tree of
bricks obtained from a 2-connected graph by repeated splits at separation
pairs.
"""
import dataclasses
import enum
import random
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from typing import Any

import networkx as nx

from .models import (
    ConnectivityClass,
    EmptyGraph,
    InvalidGraph,
    InvalidTree,
    NotConnected,
    NotTwoConnected,
    TooFewEdges,
    UnknownVertex,
)
from .util import get_logger

_LOGGER = get_logger("graphdecomp")

Edge = tuple[int, int, int]


def _normalize(edges: Iterable[Sequence[int]]) -> tuple[Edge, ...]:
    return tuple(
        sorted(((min(u, v), max(u, v), label) for u, v, label in edges), key=lambda e: e[2])
    )


@dataclasses.dataclass(frozen=True)
class Multigraph:
    """Labelled loopless multigraph on vertices 1..n_vertices."""

    n_vertices: int
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", _normalize(self.edges))
        if self.n_vertices < 0:
            raise InvalidGraph("Negative vertex count")
        labels = [label for _, _, label in self.edges]
        if len(set(labels)) != len(labels):
            raise InvalidGraph("Edge labels must be distinct")
        for u, v, label in self.edges:
            if label < 1:
                raise InvalidGraph(f"Edge label {label} is not positive")
            if u == v:
                raise InvalidGraph(f"Edge {label} is a loop at {u}")
            if u < 1 or v > self.n_vertices:
                raise InvalidGraph(f"Edge {label} has endpoint outside 1..{self.n_vertices}")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]]) -> "Multigraph":
        """Build with edge labels 1, 2, ... by position."""
        return cls(n, tuple((u, v, k) for k, (u, v) in enumerate(pairs, start=1)))

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Multigraph":
        """Build from {"n": int, "edges": [[u, v], ...]}."""
        try:
            return cls.from_pairs(int(data["n"]), [(int(u), int(v)) for u, v in data["edges"]])
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidGraph(f"Malformed graph: {e}") from e

    def to_json(self) -> dict[str, Any]:
        """Convert to the graph file layout (labels by position)."""
        return {"n": self.n_vertices, "edges": [[u, v] for u, v, _ in self.edges]}

    @property
    def vertices(self) -> range:
        """Vertex labels."""
        return range(1, self.n_vertices + 1)

    def simple_graph(self) -> nx.Graph:
        """Underlying simple graph."""
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from((u, v) for u, v, _ in self.edges)
        return graph

    def has_parallel_edges(self) -> bool:
        """True when two edges share both endpoints."""
        pairs = [(u, v) for u, v, _ in self.edges]
        return len(set(pairs)) != len(pairs)


def _two_connected(vertices: Iterable[int], edges: Sequence[Edge]) -> bool:
    graph = nx.Graph()
    graph.add_nodes_from(vertices)
    graph.add_edges_from((u, v) for u, v, _ in edges)
    if graph.number_of_nodes() < 2 or not nx.is_connected(graph):
        return False
    return not any(True for _ in nx.articulation_points(graph))


def _three_connected(vertices: Iterable[int], edges: Sequence[Edge]) -> bool:
    graph = nx.Graph()
    graph.add_nodes_from(vertices)
    graph.add_edges_from((u, v) for u, v, _ in edges)
    if graph.number_of_nodes() < 4 or graph.number_of_edges() != len(edges):
        return False
    return bool(nx.node_connectivity(graph) >= 3)


def connectivity_class(g: Multigraph) -> ConnectivityClass:
    """Strongest connectivity class of g."""
    if g.n_vertices == 0:
        raise EmptyGraph("Graph has no vertices")
    graph = g.simple_graph()
    if not nx.is_connected(graph):
        return ConnectivityClass.DISCONNECTED
    if g.n_vertices == 1 or any(True for _ in nx.articulation_points(graph)):
        return ConnectivityClass.CONNECTED
    # a parallel pair next to any other edge is a 2-separator
    if g.n_vertices >= 4 and not g.has_parallel_edges():
        if nx.node_connectivity(graph) >= 3:
            return ConnectivityClass.THREE_CONNECTED
    return ConnectivityClass.TWO_CONNECTED


@dataclasses.dataclass(frozen=True)
class Block:
    """Maximal 2-connected subgraph given by its edges."""

    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]

    def asdict(self) -> dict[str, Any]:
        """Convert to dict."""
        return {"vertices": list(self.vertices), "edges": [e[2] for e in self.edges]}


@dataclasses.dataclass(frozen=True)
class BvTree:
    """Incidence tree between blocks and vertices."""

    blocks: tuple[Block, ...]
    vertex_nodes: tuple[int, ...]
    incidences: tuple[tuple[int, int], ...]

    def node_count(self) -> int:
        """Blocks plus vertices."""
        return len(self.blocks) + len(self.vertex_nodes)

    def edge_count(self) -> int:
        """Block-vertex incidences."""
        return len(self.incidences)

    def graph(self) -> nx.Graph:
        """Tree as a networkx graph with nodes ("b", i) and ("v", label)."""
        tree = nx.Graph()
        tree.add_nodes_from(("b", i) for i in range(len(self.blocks)))
        tree.add_nodes_from(("v", v) for v in self.vertex_nodes)
        tree.add_edges_from((("b", b), ("v", v)) for b, v in self.incidences)
        return tree

    def is_tree(self) -> bool:
        """True when the incidence graph is a tree."""
        return bool(nx.is_tree(self.graph()))

    def asdict(self) -> dict[str, Any]:
        """Convert to dict."""
        return {
            "blocks": [block.asdict() for block in self.blocks],
            "vertices": list(self.vertex_nodes),
            "incidences": [list(i) for i in self.incidences],
        }


def block_tree(g: Multigraph) -> BvTree:
    """Bv-tree of a connected graph."""
    if g.n_vertices == 0:
        raise EmptyGraph("Graph has no vertices")
    graph = g.simple_graph()
    if not nx.is_connected(graph):
        raise NotConnected("Block tree needs a connected graph")
    blocks = []
    for nodes in nx.biconnected_components(graph):
        edges = tuple(e for e in g.edges if e[0] in nodes and e[1] in nodes)
        blocks.append(Block(tuple(sorted(nodes)), edges))
    blocks.sort(key=lambda b: b.edges[0][2])
    incidences = tuple(
        (index, v) for index, block in enumerate(blocks) for v in block.vertices
    )
    return BvTree(tuple(blocks), tuple(g.vertices), incidences)


class BrickType(enum.Enum):
    """Brick kinds."""

    R = "R"
    M = "M"
    T = "T"


@dataclasses.dataclass(frozen=True)
class Brick:
    """Split-free piece; negative edge labels are virtual edges."""

    kind: BrickType
    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]

    @property
    def real_edges(self) -> tuple[Edge, ...]:
        """Edges of the original graph."""
        return tuple(e for e in self.edges if e[2] > 0)

    @property
    def virtual_edges(self) -> tuple[Edge, ...]:
        """Edges added by splits."""
        return tuple(e for e in self.edges if e[2] < 0)

    def shape_ok(self) -> bool:
        """Check the brick is a ring, a multi-edge or 3-connected."""
        if len(self.edges) < 3:
            return False
        if self.kind == BrickType.M:
            return len(self.vertices) == 2
        if self.kind == BrickType.R:
            degrees: dict[int, int] = {}
            for u, v, _ in self.edges:
                degrees[u] = degrees.get(u, 0) + 1
                degrees[v] = degrees.get(v, 0) + 1
            return (
                len(self.vertices) == len(self.edges)
                and all(d == 2 for d in degrees.values())
                and _two_connected(self.vertices, self.edges)
            )
        return _three_connected(self.vertices, self.edges)

    def asdict(self) -> dict[str, Any]:
        """Convert to dict."""
        return {
            "type": self.kind.value,
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edges],
        }


Link = tuple[int, int, int, int]


def _link_graph(bricks: Sequence[Brick], links: Sequence[Link]) -> nx.MultiGraph:
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(len(bricks)))
    graph.add_edges_from((a, b) for a, _, b, _ in links)
    return graph


def _far_sides(bricks: Sequence[Brick], links: Sequence[Link]) -> dict[tuple[int, int], frozenset[int]]:
    """Real edge labels beyond each virtual edge, seen from each brick."""
    tree = nx.Graph()
    tree.add_nodes_from(range(len(bricks)))
    tree.add_edges_from((a, b) for a, _, b, _ in links)
    sides: dict[tuple[int, int], frozenset[int]] = {}
    for a, vid, b, _ in links:
        tree.remove_edge(a, b)
        for here, there in ((a, b), (b, a)):
            labels = frozenset(
                e[2] for k in nx.node_connected_component(tree, there) for e in bricks[k].real_edges
            )
            sides[(here, vid)] = labels
        tree.add_edge(a, b)
    return sides


@dataclasses.dataclass(frozen=True)
class RmtTree:
    """Tree of bricks glued along virtual edges."""

    bricks: tuple[Brick, ...]
    links: tuple[Link, ...]

    def check(self) -> None:
        """Raise InvalidTree unless all tree invariants hold."""
        _check_bricks(self.bricks, self.links)
        graph = _link_graph(self.bricks, self.links)
        if not nx.is_tree(graph):
            raise InvalidTree("Link graph is not a tree")
        for a, _, b, _ in self.links:
            kinds = {self.bricks[a].kind, self.bricks[b].kind}
            if kinds in ({BrickType.R}, {BrickType.M}):
                raise InvalidTree(f"Adjacent bricks {a} and {b} are both {kinds.pop().value}")

    def canonical(self) -> frozenset[Any]:
        """Label-independent form: virtual edges named by the real edges beyond them."""
        sides = _far_sides(self.bricks, self.links)
        return frozenset(
            (
                brick.kind,
                brick.vertices,
                frozenset(e[2] for e in brick.real_edges),
                frozenset(sides[(k, e[2])] for e in brick.virtual_edges),
            )
            for k, brick in enumerate(self.bricks)
        )

    def asdict(self) -> dict[str, Any]:
        """Convert to dict."""
        return {
            "bricks": [brick.asdict() for brick in self.bricks],
            "links": [list(link) for link in self.links],
        }


@dataclasses.dataclass(frozen=True)
class RestrictedRmtTree(RmtTree):
    """Bricks containing the pointed vertex and the links among them."""

    pointed_vertex: int = 0

    def check(self) -> None:
        """Raise InvalidTree unless the restricted tree is a tree."""
        if not all(self.pointed_vertex in b.vertices for b in self.bricks):
            raise InvalidTree("Brick without the pointed vertex")
        if not nx.is_tree(_link_graph(self.bricks, self.links)):
            raise InvalidTree("Restricted tree is not connected")

    def asdict(self) -> dict[str, Any]:
        """Convert to dict."""
        return {**super().asdict(), "pointed_vertex": self.pointed_vertex}


def _check_bricks(bricks: Sequence[Brick], links: Sequence[Link]) -> None:
    owners: dict[int, list[int]] = {}
    for k, brick in enumerate(bricks):
        if not brick.shape_ok():
            raise InvalidTree(f"Brick {k} is not a valid {brick.kind.value}-brick")
        for _, _, vid in brick.virtual_edges:
            owners.setdefault(vid, []).append(k)
    for vid, where in owners.items():
        if len(where) != 2:
            raise InvalidTree(f"Virtual edge {vid} appears in {len(where)} bricks")
    linked = {}
    for a, vid, b, vid_b in links:
        if vid != vid_b or sorted(owners.get(vid, [])) != sorted([a, b]):
            raise InvalidTree(f"Link {vid} does not match its bricks")
        linked[vid] = (a, b)
    if set(linked) != set(owners):
        raise InvalidTree("Dangling virtual edge")


def _separation_classes(edges: Sequence[Edge], u: int, v: int) -> list[list[Edge]]:
    parent: dict[int, int] = {}

    def find(a: int) -> int:
        while parent.setdefault(a, a) != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b, _ in edges:
        if a not in (u, v) and b not in (u, v):
            parent[find(a)] = find(b)
    classes: dict[Any, list[Edge]] = {}
    for edge in edges:
        a, b, label = edge
        if {a, b} == {u, v}:
            classes[("edge", label)] = [edge]
        else:
            inner = a if a not in (u, v) else b
            classes.setdefault(find(inner), []).append(edge)
    return list(classes.values())


Pair = tuple[int, int]
Split = tuple[list[Edge], list[Edge], int, int]


def _separation_pairs(g: Multigraph) -> list[Pair]:
    """Pairs that can split some piece: 2-vertex cuts and ends of parallel edges.

    A pair that does not split a piece splits none of the pieces cut from it,
    so these are computed once on the whole graph.
    """
    graph = g.simple_graph()
    pairs: set[Pair] = set()
    for a in graph.nodes:
        rest = graph.subgraph([x for x in graph.nodes if x != a])
        pairs.update((min(a, b), max(a, b)) for b in nx.articulation_points(rest))
    multiplicity = Counter((u, v) for u, v, _ in g.edges)
    pairs.update(pair for pair, count in multiplicity.items() if count >= 2)
    return sorted(pairs)


def _pair_splits(edges: Sequence[Edge], u: int, v: int, rng: random.Random | None) -> list[Split]:
    classes = _separation_classes(edges, u, v)
    if len(classes) < 2:
        return []
    found = []
    for index, first in enumerate(classes):
        rest = [e for k, c in enumerate(classes) if k != index for e in c]
        if len(first) < 2 or len(rest) < 2:
            continue
        if len(classes) == 2 and not _two_connected({u, v} | {x for e in rest for x in e[:2]}, rest):
            continue
        found.append((first, rest, u, v))
    if rng:
        rng.shuffle(found)
    else:
        found.sort(key=lambda c: min(e[2] for e in c[1]))
    return found


def _vertex_set(edges: Iterable[Edge]) -> set[int]:
    return {x for e in edges for x in e[:2]}


def _brick_key(brick: Brick) -> tuple[int, int]:
    if brick.real_edges:
        return 0, min(e[2] for e in brick.real_edges)
    return 1, min(-e[2] for e in brick.edges)


def _brick_type(vertices: Sequence[int], edges: Sequence[Edge]) -> BrickType:
    if len(vertices) == 2:
        return BrickType.M
    if len(vertices) == len(edges):
        return BrickType.R
    return BrickType.T


def rmt_tree(g: Multigraph, rng: random.Random | None = None) -> RmtTree:
    """Split a 2-connected graph into bricks.

    Without rng splits happen in canonical order, otherwise in a random one.
    """
    if connectivity_class(g) < ConnectivityClass.TWO_CONNECTED:
        raise NotTwoConnected("RMT-tree needs a 2-connected graph")
    if len(g.edges) < 3:
        raise TooFewEdges("RMT-tree needs at least 3 edges")
    pieces: list[list[Edge]] = [list(g.edges)]
    # pairs still to try in each piece, next one last
    pending: list[list[Pair]] = [_separation_pairs(g)[::-1]]
    if rng:
        rng.shuffle(pending[0])
    next_virtual = -1
    while True:
        open_pieces = [k for k, pairs in enumerate(pending) if pairs]
        if not open_pieces:
            break
        index = rng.choice(open_pieces) if rng else open_pieces[0]
        u, v = pending[index].pop()
        splits = _pair_splits(pieces[index], u, v, rng)
        if not splits:
            continue
        first, rest, _, _ = splits[0]
        virtual = (u, v, next_virtual)
        next_virtual -= 1
        remaining = pending[index] + [(u, v)]
        pieces[index] = rest + [virtual]
        pieces.append(first + [virtual])
        for k in (index, len(pieces) - 1):
            inside = _vertex_set(pieces[k])
            pairs = [p for p in remaining if p[0] in inside and p[1] in inside]
            if k == index:
                pending[k] = pairs
            else:
                pending.append(pairs)
    bricks = []
    for piece in pieces:
        vertices = tuple(sorted({x for e in piece for x in e[:2]}))
        bricks.append(Brick(_brick_type(vertices, piece), vertices, _normalize(piece)))
    bricks.sort(key=_brick_key)
    links = _links(bricks)
    tree = RmtTree(tuple(bricks), links)
    tree.check()
    _LOGGER.debug(f"RMT-tree with {len(bricks)} bricks for {len(g.edges)} edges")
    return tree


def _links(bricks: Sequence[Brick]) -> tuple[Link, ...]:
    owners: dict[int, list[int]] = {}
    for k, brick in enumerate(bricks):
        for _, _, vid in brick.virtual_edges:
            owners.setdefault(vid, []).append(k)
    return tuple(
        (where[0], vid, where[1], vid) for vid, where in sorted(owners.items(), reverse=True) if len(where) == 2
    )


def restricted_rmt_tree(g: Multigraph, v: int) -> RestrictedRmtTree:
    """Sub-tree of bricks containing v."""
    if v not in g.vertices:
        raise UnknownVertex(f"Vertex {v} not in 1..{g.n_vertices}")
    tree = rmt_tree(g)
    keep = [k for k, brick in enumerate(tree.bricks) if v in brick.vertices]
    index = {old: new for new, old in enumerate(keep)}
    links = tuple(
        (index[a], vid, index[b], vid_b)
        for a, vid, b, vid_b in tree.links
        if a in index and b in index
    )
    restricted = RestrictedRmtTree(tuple(tree.bricks[k] for k in keep), links, v)
    restricted.check()
    return restricted


def recompose(t: RmtTree) -> Multigraph:
    """Glue bricks along virtual edges and erase them."""
    t.check()
    edges = [e for brick in t.bricks for e in brick.real_edges]
    labels = [e[2] for e in edges]
    if len(set(labels)) != len(labels):
        raise InvalidTree("Real edge in more than one brick")
    n = max((x for brick in t.bricks for x in brick.vertices), default=0)
    return Multigraph(n, tuple(edges))
