import random
from fractions import Fraction

import pytest

from tests import (
    ALL_GRAPH_TOTALS,
    CONNECTED_TOTALS,
    FOREST_TOTALS,
    K4_PAIRS,
    K5_PAIRS,
    K33_PAIRS,
    TREE_TOTALS,
)
from tutte.grammar import family_output
from tutte.graphdecomp import Multigraph, connectivity_class
from tutte.models import ConnectivityClass, Convention, CountTable, Level, SizeLimit
from tutte.oracle import (
    crosscheck,
    dissymmetry_census,
    enum_rooted_maps,
    family_count_tables,
    is_forest,
    is_planar,
    is_series_parallel,
    kuratowski_planar,
    labelled_count_tables,
    labelled_graphs,
    multigraph_count_tables,
    planar_count_tables,
    random_two_connected,
    two_connected_blocks,
)
from tutte.planarmaps import mobile_series, rooted_maps

PETERSEN_PAIRS = [
    (1, 2), (2, 3), (3, 4), (4, 5), (5, 1),
    (1, 6), (2, 7), (3, 8), (4, 9), (5, 10),
    (6, 8), (8, 10), (10, 7), (7, 9), (9, 6),
]


@pytest.mark.parametrize(
    "n, pairs, planar",
    [
        (4, K4_PAIRS, True),
        (5, K5_PAIRS, False),
        (6, K33_PAIRS, False),
        (10, PETERSEN_PAIRS, False),
        (8, [(1, 2), (2, 3), (3, 4), (4, 1), (5, 6), (6, 7), (7, 8), (8, 5),
             (1, 5), (2, 6), (3, 7), (4, 8)], True),
    ],
)
def test_is_planar(n, pairs, planar):
    g = Multigraph.from_pairs(n, pairs)
    assert is_planar(g) == planar
    assert kuratowski_planar(g) == planar


def test_is_planar_small_graphs():
    for n in range(1, 6):
        for g in labelled_graphs(n):
            assert is_planar(g) == kuratowski_planar(g)


def test_is_planar_random():
    rng = random.Random(64)
    for _ in range(200):
        n = rng.randint(6, 11)
        pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if rng.random() < 0.45]
        g = Multigraph.from_pairs(n, pairs)
        assert is_planar(g) == kuratowski_planar(g)


def test_family_predicates(theta):
    k4 = Multigraph.from_pairs(4, K4_PAIRS)
    assert not is_series_parallel(k4)
    assert is_series_parallel(theta)
    assert not is_forest(theta)
    assert is_forest(Multigraph.from_pairs(4, [(1, 2), (1, 3)]))
    assert not is_forest(Multigraph.from_pairs(2, [(1, 2), (1, 2)]))


def test_two_connected_blocks():
    g = Multigraph.from_pairs(6, K4_PAIRS + [(4, 5), (5, 6)])
    blocks = two_connected_blocks(g)
    assert len(blocks) == 1
    assert connectivity_class(blocks[0]) == ConnectivityClass.THREE_CONNECTED


def test_planar_count_tables():
    tables = planar_count_tables(5)
    assert tables[Level.ALL].totals() == ALL_GRAPH_TOTALS
    assert tables[Level.CONNECTED].totals() == CONNECTED_TOTALS
    assert tables[Level.TWO_CONNECTED].count(4, 5) == 6
    assert tables[Level.THREE_CONNECTED].count(5, 8) == 15
    assert tables[Level.THREE_CONNECTED].count(5, 9) == 10


def test_forest_count_tables():
    tables = family_count_tables("forest", 5)
    assert tables[Level.ALL].totals() == FOREST_TOTALS
    assert tables[Level.CONNECTED].totals() == TREE_TOTALS


def test_multigraph_count_tables():
    tables = multigraph_count_tables(planar_count_tables(4), 7)
    # every multigraph on 3 labelled vertices: each labelled edge picks one of 3 pairs
    assert [tables[Level.ALL].count(3, m) for m in range(5)] == [1, 3, 9, 27, 81]
    assert [tables[Level.TWO_CONNECTED].count(2, m) for m in range(1, 8)] == [1] * 7
    assert tables[Level.TWO_CONNECTED].count(3, 4) == 36
    assert tables[Level.THREE_CONNECTED].rows == {(4, 6): 720}


def test_count_tables_size_limit():
    with pytest.raises(SizeLimit):
        labelled_count_tables(8, is_planar)
    with pytest.raises(SizeLimit):
        is_planar(Multigraph(65, ()))


def test_map_census_one_edge():
    census = enum_rooted_maps(1)
    assert census.rooted == {1: 1, 2: 1}
    assert census.rooted_total() == 2
    assert census.pointed() == {1: Fraction(1, 2), 2: 1}
    assert len(census.classes) == 2
    assert all(c.automorphisms == 2 for c in census.classes)


def test_map_census_against_series():
    census = enum_rooted_maps(2)
    assert census.rooted == {1: 2, 2: 5, 3: 2}
    rooted = rooted_maps((3, 4))
    pointed = mobile_series((3, 4)).M_pointed
    for v in range(1, 4):
        assert census.rooted_series((3, 4))[v - 1, 4] == rooted[v - 1, 4]
        assert census.pointed_series((3, 4))[v - 1, 4] == pointed[v - 1, 4]
    assert census.asdict()["rooted"] == {"1": 2, "2": 5, "3": 2}


@pytest.mark.timeout(600)
def test_map_census_three_edges():
    census = enum_rooted_maps(3)
    rooted = rooted_maps((4, 6))
    assert census.rooted_total() == 54
    for v, count in census.rooted.items():
        assert rooted[v - 1, 6] == count


def test_map_census_size_limit():
    with pytest.raises(SizeLimit):
        enum_rooted_maps(5)
    with pytest.raises(SizeLimit):
        enum_rooted_maps(0)


@pytest.mark.timeout(600)
def test_dissymmetry_census(rng):
    graphs = [g for n in range(1, 6) for g in labelled_graphs(n) if connectivity_class(g) >= ConnectivityClass.CONNECTED]
    graphs += [random_two_connected(rng, rng.randint(2, 10)) for _ in range(50)]
    report = dissymmetry_census(graphs)
    assert report.passed
    assert report.graphs == 728 + 38 + 4 + 1 + 1 + 50
    assert report.asdict()["failures"] == []


def test_crosscheck_reports_mismatch():
    good = {Level.ALL: CountTable({(1, 0): 1, (2, 1): 1})}
    bad = {Level.ALL: CountTable({(1, 0): 1, (2, 1): 2})}
    assert crosscheck(good, good, 2).passed
    report = crosscheck(good, bad, 2)
    assert not report.passed
    assert report.asdict()["levels"]["all"] == {"n": 2, "m": 1, "grammar": 1, "oracle": 2}
    assert crosscheck(good, bad, 1).passed


def test_random_two_connected(rng):
    for _ in range(100):
        g = random_two_connected(rng, rng.randint(2, 15))
        assert len(g.edges) >= 3
        assert connectivity_class(g) >= ConnectivityClass.TWO_CONNECTED
    with pytest.raises(SizeLimit):
        random_two_connected(rng, 1)


@pytest.mark.parametrize("family, n_max", [("series-parallel", 5), ("forest", 5)])
def test_grammar_matches_enumeration(family, n_max):
    trunc = (n_max, n_max * (n_max - 1) // 2)
    counts = family_output(family, trunc).counts(Convention.VERTEX_LABELLED)
    assert crosscheck(counts, family_count_tables(family, n_max), n_max).passed


@pytest.mark.timeout(1800)
def test_planar_grammar_matches_enumeration():
    counts = family_output("planar", (6, 15)).counts(Convention.VERTEX_LABELLED)
    report = crosscheck(counts, planar_count_tables(6), 6)
    assert report.passed, report.asdict()
