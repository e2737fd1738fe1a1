"""Oracle module.

Brute force counts the grammar and the map pipeline are measured against:
exhaustive labelled graph enumeration with a planarity test, rotation system
enumeration of planar maps, and a census of decomposition tree sizes.
"""
import dataclasses
import itertools
import math
import random
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from fractions import Fraction
from typing import Any

import networkx as nx
from cachetools import LRUCache, cached

from .graphdecomp import (
    Block,
    BrickType,
    Multigraph,
    block_tree,
    connectivity_class,
    rmt_tree,
)
from .models import LEVEL_CLASSES, CountTable, Level, SizeLimit
from .series import BiSeries, Trunc
from .util import get_logger

_LOGGER = get_logger("oracle")

MAX_PLANARITY_VERTICES = 64
MAX_GRAPH_VERTICES = 7
MAX_MAP_EDGES = 4

Pair = frozenset[int]


def _fragments(
    graph: nx.Graph, embedded: set[int], embedded_edges: set[Pair]
) -> list[tuple[set[int], nx.Graph]]:
    """Bridges of graph relative to the embedded part: (contacts, fragment)."""
    result = []
    for u, v in graph.edges:
        if u in embedded and v in embedded and frozenset((u, v)) not in embedded_edges:
            fragment = nx.Graph()
            fragment.add_edge(u, v)
            result.append(({u, v}, fragment))
    rest = graph.subgraph(set(graph) - embedded)
    for component in nx.connected_components(rest):
        fragment = nx.Graph(graph.subgraph(component))
        contacts = set()
        for u in component:
            for v in graph[u]:
                if v in embedded:
                    contacts.add(v)
                    fragment.add_edge(u, v)
        result.append((contacts, fragment))
    return result


def _fragment_path(contacts: set[int], fragment: nx.Graph) -> list[int]:
    a, b = sorted(contacts)[:2]
    inner = fragment.subgraph((set(fragment) - contacts) | {a, b})
    return list(nx.shortest_path(inner, a, b))


def _split_face(face: list[int], path: list[int]) -> tuple[list[int], list[int]]:
    i, j = face.index(path[0]), face.index(path[-1])
    inner = path[1:-1]
    if i <= j:
        first = face[i:j + 1] + inner[::-1]
        second = face[j:] + face[:i + 1] + inner
    else:
        first = face[i:] + face[:j + 1] + inner[::-1]
        second = face[j:i + 1] + inner
    return first, second


def _planar_block(graph: nx.Graph) -> bool:
    """Path addition on a 2-connected simple graph."""
    n, m = graph.number_of_nodes(), graph.number_of_edges()
    if m < 9:
        return True
    if m > 3 * n - 6:
        return False
    cycle = [u for u, _ in nx.find_cycle(graph)]
    embedded = set(cycle)
    embedded_edges = {frozenset(e) for e in zip(cycle, cycle[1:] + cycle[:1])}
    faces = [cycle, cycle[::-1]]
    while len(embedded_edges) < m:
        candidates = []
        for contacts, fragment in _fragments(graph, embedded, embedded_edges):
            admissible = [k for k, face in enumerate(faces) if contacts <= set(face)]
            if not admissible:
                return False
            candidates.append((len(admissible), admissible[0], contacts, fragment))
        candidates.sort(key=lambda c: c[0])
        _, face_index, contacts, fragment = candidates[0]
        path = _fragment_path(contacts, fragment)
        first, second = _split_face(faces[face_index], path)
        faces[face_index:face_index + 1] = [first, second]
        embedded.update(path)
        embedded_edges.update(frozenset(e) for e in zip(path, path[1:]))
    return True


def is_planar(g: Multigraph) -> bool:
    """Planarity of the underlying simple graph, block by block."""
    if g.n_vertices > MAX_PLANARITY_VERTICES:
        raise SizeLimit(f"Planarity oracle is limited to {MAX_PLANARITY_VERTICES} vertices")
    graph = g.simple_graph()
    if graph.number_of_edges() < 9:
        return True
    for nodes in nx.biconnected_components(graph):
        if not _planar_block(nx.Graph(graph.subgraph(nodes))):
            return False
    return True


def kuratowski_planar(g: Multigraph) -> bool:
    """Planarity as decided by networkx."""
    planar, _ = nx.check_planarity(g.simple_graph())
    return bool(planar)


def _dense(block: Block) -> Multigraph:
    index = {v: k for k, v in enumerate(block.vertices, start=1)}
    return Multigraph(
        len(block.vertices), tuple((index[u], index[v], label) for u, v, label in block.edges)
    )


def two_connected_blocks(g: Multigraph) -> list[Multigraph]:
    """Blocks with at least 3 edges, relabelled on 1..k (edge labels kept)."""
    result = []
    graph = g.simple_graph()
    for component in nx.connected_components(graph):
        if len(component) < 2:
            continue
        sub_index = {v: k for k, v in enumerate(sorted(component), start=1)}
        sub = Multigraph(
            len(component),
            tuple((sub_index[u], sub_index[v], l) for u, v, l in g.edges if u in component),
        )
        result.extend(_dense(b) for b in block_tree(sub).blocks if len(b.edges) >= 3)
    return result


def is_series_parallel(g: Multigraph) -> bool:
    """No block has a 3-connected brick."""
    return all(
        all(brick.kind != BrickType.T for brick in rmt_tree(block).bricks)
        for block in two_connected_blocks(g)
    )


def is_forest(g: Multigraph) -> bool:
    """Acyclic."""
    return not g.has_parallel_edges() and bool(nx.is_forest(g.simple_graph()))


FAMILY_PREDICATES: dict[str, Callable[[Multigraph], bool]] = {
    "planar": is_planar,
    "series-parallel": is_series_parallel,
    "forest": is_forest,
}


def labelled_graphs(n: int) -> Iterator[Multigraph]:
    """All simple graphs on vertices 1..n."""
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    for mask in range(1 << len(pairs)):
        yield Multigraph.from_pairs(n, [p for k, p in enumerate(pairs) if mask >> k & 1])


def labelled_count_tables(
    n_max: int, accept: Callable[[Multigraph], bool]
) -> dict[Level, CountTable]:
    """Count accepted labelled simple graphs by (n, m) at every level."""
    if n_max > MAX_GRAPH_VERTICES:
        raise SizeLimit(f"Exhaustive enumeration is limited to {MAX_GRAPH_VERTICES} vertices")
    rows: dict[Level, dict[tuple[int, int], int]] = {level: {} for level in Level}
    for n in range(1, n_max + 1):
        for g in labelled_graphs(n):
            if not accept(g):
                continue
            strength = connectivity_class(g)
            key = (n, len(g.edges))
            for level in Level:
                if strength >= LEVEL_CLASSES[level]:
                    rows[level][key] = rows[level].get(key, 0) + 1
        _LOGGER.info(f"Enumerated graphs on {n} vertices: {sum(rows[Level.ALL].values())} accepted so far")
    return {level: CountTable(rows[level], level) for level in Level}


@cached(cache=LRUCache(maxsize=16))
def family_count_tables(family: str, n_max: int) -> dict[Level, CountTable]:
    """Count tables of a built-in family."""
    return labelled_count_tables(n_max, FAMILY_PREDICATES[family])


def _surjections(m: int, k: int) -> int:
    return sum((-1) ** i * math.comb(k, i) * (k - i) ** m for i in range(k + 1))


def multigraph_count_tables(
    simple_tables: Mapping[Level, CountTable], m_max: int
) -> dict[Level, CountTable]:
    """Lift simple graph counts to multigraphs with labelled edges.

    Each edge of the underlying simple graph carries a nonempty bundle of
    parallel edges. 3-connected graphs have no parallel edges.
    """
    lifted = {}
    for level, table in simple_tables.items():
        rows: dict[tuple[int, int], int] = {}
        for (n, k), count in table.rows.items():
            top = k if level == Level.THREE_CONNECTED else m_max
            for m in range(k, min(top, m_max) + 1):
                rows[(n, m)] = rows.get((n, m), 0) + count * _surjections(m, k)
        lifted[level] = CountTable(rows, table.class_tag)
    return lifted


def planar_count_tables(n_max: int) -> dict[Level, CountTable]:
    """Count tables of labelled planar graphs."""
    return family_count_tables("planar", n_max)


def _cycles(perm: Sequence[int]) -> list[list[int]]:
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cycle = []
        h = start
        while not seen[h]:
            seen[h] = True
            cycle.append(h)
            h = perm[h]
        cycles.append(cycle)
    return cycles


def _transitive(sigma: Sequence[int], alpha: Sequence[int]) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        h = stack.pop()
        for k in (sigma[h], alpha[h]):
            if k not in seen:
                seen.add(k)
                stack.append(k)
    return len(seen) == len(sigma)


def _code(sigma: Sequence[int], alpha: Sequence[int], root: int) -> tuple[tuple[int, int], ...]:
    order = [root]
    label = {root: 0}
    for h in order:
        for k in (sigma[h], alpha[h]):
            if k not in label:
                label[k] = len(order)
                order.append(k)
    return tuple((label[sigma[h]], label[alpha[h]]) for h in order)


@dataclasses.dataclass(frozen=True)
class MapClass:
    """Unlabelled planar map."""

    vertices: int
    faces: int
    automorphisms: int
    code: tuple[tuple[int, int], ...]


@dataclasses.dataclass(frozen=True)
class MapCensus:
    """Planar maps with m edges, by number of vertices."""

    m_edges: int
    labelled: dict[int, int]
    classes: tuple[MapClass, ...]

    @property
    def rooted(self) -> dict[int, int]:
        """Rooted maps: labelled maps times 2m/(2m)!."""
        factor = math.factorial(2 * self.m_edges - 1)
        return {v: count // factor for v, count in sorted(self.labelled.items())}

    def rooted_total(self) -> int:
        """All rooted maps."""
        return sum(self.rooted.values())

    def pointed(self) -> dict[int, Fraction]:
        """Vertex-pointed maps, exponential in half-edges."""
        factor = math.factorial(2 * self.m_edges)
        return {v: Fraction(v * count, factor) for v, count in sorted(self.labelled.items())}

    def rooted_series(self, trunc: Trunc) -> BiSeries:
        """Contribution x^(V-1) s^(2m) to the rooted map series."""
        return BiSeries({(v - 1, 2 * self.m_edges): c for v, c in self.rooted.items()}, trunc)

    def pointed_series(self, trunc: Trunc) -> BiSeries:
        """Contribution to the vertex-pointed map series."""
        return BiSeries({(v - 1, 2 * self.m_edges): c for v, c in self.pointed().items()}, trunc)

    def asdict(self) -> dict[str, Any]:
        """Convert to dict."""
        return {
            "edges": self.m_edges,
            "labelled": {str(v): c for v, c in self.labelled.items()},
            "rooted": {str(v): c for v, c in self.rooted.items()},
            "classes": [
                {"vertices": c.vertices, "faces": c.faces, "automorphisms": c.automorphisms}
                for c in self.classes
            ],
        }


def enum_rooted_maps(m_edges: int) -> MapCensus:
    """Enumerate planar rotation systems on 2m labelled half-edges.

    The edge involution is fixed to (0 1)(2 3)...; every other involution
    gives the same number of maps, hence the factor (2m-1)!!.
    """
    if m_edges > MAX_MAP_EDGES:
        raise SizeLimit(f"Map enumeration is limited to {MAX_MAP_EDGES} edges")
    if m_edges < 1:
        raise SizeLimit("Map enumeration needs at least one edge")
    half = 2 * m_edges
    alpha = [h ^ 1 for h in range(half)]
    matchings = math.prod(range(1, half, 2))
    labelled: dict[int, int] = {}
    codes: dict[tuple[tuple[int, int], ...], MapClass] = {}
    for sigma in itertools.permutations(range(half)):
        if not _transitive(sigma, alpha):
            continue
        vertices = len(_cycles(sigma))
        faces = _cycles([sigma[alpha[h]] for h in range(half)])
        if vertices - m_edges + len(faces) != 2:
            continue
        if sum(len(f) for f in faces) != half:
            raise ArithmeticError("Face degrees do not add up to the half-edges")
        labelled[vertices] = labelled.get(vertices, 0) + matchings
        all_codes = [_code(sigma, alpha, root) for root in range(half)]
        code = min(all_codes)
        if code not in codes:
            codes[code] = MapClass(vertices, len(faces), all_codes.count(code), code)
    census = MapCensus(m_edges, labelled, tuple(codes[c] for c in sorted(codes)))
    _LOGGER.info(
        f"Planar maps with {m_edges} edges: {census.rooted_total()} rooted, {len(codes)} classes"
    )
    return census


@dataclasses.dataclass
class DissymmetryReport:
    """Tree sizes: nodes minus edges must be 1 for every tree."""

    graphs: int = 0
    bv_trees: int = 0
    rmt_trees: int = 0
    failures: list[str] = dataclasses.field(default_factory=list)

    @property
    def passed(self) -> bool:
        """True without failures."""
        return not self.failures

    def asdict(self) -> dict[str, Any]:
        """Convert to dict."""
        return {
            "graphs": self.graphs,
            "bv_trees": self.bv_trees,
            "rmt_trees": self.rmt_trees,
            "failures": list(self.failures),
            "passed": self.passed,
        }


def dissymmetry_census(gs: Iterable[Multigraph]) -> DissymmetryReport:
    """Check nodes - edges = 1 on the Bv-tree and every block's RMT-tree."""
    report = DissymmetryReport()
    for g in gs:
        report.graphs += 1
        bv = block_tree(g)
        report.bv_trees += 1
        if bv.node_count() - bv.edge_count() != 1:
            report.failures.append(f"Bv-tree of {g.to_json()}")
        for block in two_connected_blocks(g):
            tree = rmt_tree(block)
            report.rmt_trees += 1
            if len(tree.bricks) - len(tree.links) != 1:
                report.failures.append(f"RMT-tree of block {block.to_json()}")
    _LOGGER.info(
        f"Dissymmetry census: {report.graphs} graphs, {report.rmt_trees} RMT-trees, "
        f"{len(report.failures)} failures"
    )
    return report


@dataclasses.dataclass(frozen=True)
class CrosscheckReport:
    """Per level comparison of grammar and oracle counts."""

    n_max: int
    m_max: int | None
    mismatches: dict[Level, None | tuple[tuple[int, int], int, int]]

    @property
    def passed(self) -> bool:
        """True when every level agrees."""
        return all(mismatch is None for mismatch in self.mismatches.values())

    def asdict(self) -> dict[str, Any]:
        """Convert to dict."""
        return {
            "n_max": self.n_max,
            "m_max": self.m_max,
            "passed": self.passed,
            "levels": {
                level.value: (
                    None
                    if mismatch is None
                    else {"n": mismatch[0][0], "m": mismatch[0][1], "grammar": mismatch[1], "oracle": mismatch[2]}
                )
                for level, mismatch in self.mismatches.items()
            },
        }


def crosscheck(
    grammar_tables: Mapping[Level, CountTable],
    oracle_tables: Mapping[Level, CountTable],
    n_max: int,
    m_max: int | None = None,
) -> CrosscheckReport:
    """Compare counts with 1 <= n <= n_max (and m <= m_max) at every common level."""
    mismatches = {}
    for level in Level:
        if level not in grammar_tables or level not in oracle_tables:
            continue
        ours = grammar_tables[level].restricted(n_max, m_max)
        theirs = oracle_tables[level].restricted(n_max, m_max)
        mismatches[level] = ours.first_mismatch(theirs)
        if mismatches[level] is not None:
            _LOGGER.warning(f"Count mismatch at level {level.value}: {mismatches[level]}")
    return CrosscheckReport(n_max, m_max, mismatches)


def random_two_connected(rng: random.Random, n: int) -> Multigraph:
    """Random 2-connected multigraph on n >= 2 vertices with at least 3 edges.

    Built from a cycle by adding ears; ears of length one add chords or
    parallel edges.
    """
    if n < 2:
        raise SizeLimit("A 2-connected multigraph needs 2 vertices")
    names = list(range(1, n + 1))
    rng.shuffle(names)
    start = rng.randint(2, n)
    used = names[:start]
    pairs = list(zip(used, used[1:] + used[:1]))
    remaining = names[start:]
    while remaining:
        a, b = rng.sample(used, 2)
        length = rng.randint(1, len(remaining))
        inner, remaining = remaining[:length], remaining[length:]
        path = [a] + inner + [b]
        pairs.extend(zip(path, path[1:]))
        used.extend(inner)
    for _ in range(rng.randint(0, n)):
        pairs.append(tuple(rng.sample(used, 2)))
    while len(pairs) < 3:
        pairs.append(pairs[0])
    rng.shuffle(pairs)
    return Multigraph.from_pairs(n, pairs)
