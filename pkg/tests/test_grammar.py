import json
import os
from fractions import Fraction

import pytest
from testfixtures import LogCapture

from tests import ALL_GRAPH_TOTALS, CONNECTED_TOTALS, FOREST_TOTALS, TREE_TOTALS
from tutte.grammar import (
    Diagnostics,
    FamilyTerminals,
    extract_counts,
    family_output,
    grammar_checks,
)
from tutte.models import (
    Convention,
    DoubleRouteMismatch,
    InconsistentTerminals,
    Level,
    NonIntegerCount,
    UsageError,
)
from tutte.planarmaps import planar_terminals
from tutte.series import BiSeries, loads, monomial


def _totals(family, trunc, simple=True, convention=Convention.VERTEX_LABELLED):
    counts = family_output(family, trunc, simple).counts(convention)
    return {level: counts[level].restricted(trunc[0]).totals() for level in Level}


def test_planar_counts():
    totals = _totals("planar", (5, 10))
    assert totals[Level.ALL] == ALL_GRAPH_TOTALS
    assert totals[Level.CONNECTED] == CONNECTED_TOTALS
    assert totals[Level.TWO_CONNECTED] == {2: 1, 3: 1, 4: 10, 5: 237}
    assert totals[Level.THREE_CONNECTED] == {4: 1, 5: 25}


def test_planar_three_connected_rows():
    counts = family_output("planar", (5, 10)).counts(Convention.VERTEX_LABELLED)
    table = counts[Level.THREE_CONNECTED]
    assert table.count(4, 6) == 1
    assert table.count(5, 8) == 15
    assert table.count(5, 9) == 10
    assert table.count(5, 10) == 0


def test_forest_counts():
    totals = _totals("forest", (5, 10))
    assert totals[Level.ALL] == FOREST_TOTALS
    assert totals[Level.CONNECTED] == TREE_TOTALS
    assert totals[Level.TWO_CONNECTED] == {2: 1}


def test_series_parallel_counts():
    totals = _totals("series-parallel", (4, 6))
    assert totals[Level.ALL] == {1: 1, 2: 2, 3: 8, 4: 63}
    assert totals[Level.CONNECTED] == {1: 1, 2: 1, 3: 4, 4: 37}
    assert totals[Level.THREE_CONNECTED] == {}


def test_multigraph_bundles():
    output = family_output("series-parallel", (3, 4), simple=False)
    table = output.counts(Convention.EDGE_LABELLED)[Level.TWO_CONNECTED]
    for m in range(1, 5):
        assert table.count(2, m) == 1
    assert output.G2[2, 3] == Fraction(1, 12)


@pytest.mark.parametrize(
    "family, trunc, simple",
    [
        ("planar", (5, 10), True),
        ("planar", (4, 6), False),
        ("series-parallel", (4, 6), True),
        ("series-parallel", (3, 4), False),
        ("forest", (5, 6), True),
    ],
)
def test_grammar_checks(family, trunc, simple):
    diagnostics = grammar_checks(family_output(family, trunc, simple), Diagnostics())
    assert diagnostics.passed
    assert len(diagnostics.checks) >= 4


def test_integrality_planar_multigraphs():
    output = family_output("planar", (4, 6), simple=False)
    tables = output.counts(Convention.EDGE_LABELLED)
    assert tables[Level.ALL].count(2, 1) == 1
    assert tables[Level.THREE_CONNECTED].count(4, 6) == 720


def test_extract_counts_non_integer():
    with pytest.raises(NonIntegerCount):
        extract_counts(BiSeries({(1, 0): Fraction(1, 3)}, (2, 2)), Convention.VERTEX_LABELLED)
    with pytest.raises(NonIntegerCount):
        extract_counts(BiSeries({(1, 0): -1}, (2, 2)), Convention.VERTEX_LABELLED)


def test_terminals_check():
    bad = FamilyTerminals(monomial(3, 3, (4, 6)), monomial(2, 3, (3, 6)), monomial(1, 2, (2, 5)))
    with pytest.raises(InconsistentTerminals):
        bad.check()
    g3 = monomial(4, 6, (4, 6), Fraction(1, 24))
    with pytest.raises(InconsistentTerminals):
        FamilyTerminals(g3, monomial(0, 0, (3, 6), 0), monomial(2, 5, (2, 5), 1)).check()
    FamilyTerminals.zero((4, 6)).check()


def test_custom_family(tmp_path):
    planar_terminals((4, 6)).save(str(tmp_path))
    assert sorted(os.listdir(tmp_path)) == ["g3.json", "g3_pointed.json", "g3_rooted.json"]
    custom = family_output(f"custom:{tmp_path}", (4, 6))
    planar = family_output("planar", (4, 6))
    assert custom.counts(Convention.VERTEX_LABELLED) == planar.counts(Convention.VERTEX_LABELLED)


def test_custom_family_missing(tmp_path):
    with pytest.raises(UsageError):
        family_output(f"custom:{tmp_path}", (3, 3))
    with pytest.raises(UsageError):
        family_output("outerplanar", (3, 3))


def test_dump(tmp_path):
    output = family_output("forest", (3, 3))
    output.dump(str(tmp_path), {"family": "forest"})
    assert loads((tmp_path / "G.json").read_text()) == output.G
    assert json.loads((tmp_path / "config.json").read_text()) == {"family": "forest"}


def test_diagnostics():
    a, b = monomial(1, 1, (4, 4)), monomial(1, 2, (4, 4))
    with LogCapture() as l:
        diagnostics = Diagnostics(strict=False)
        assert diagnostics.compare("same", a, a)
        assert not diagnostics.compare("different", a, b)
        l.check_present(("grammar", "INFO", "Check same passed at (4, 4)"))
        assert any(level == "WARNING" for _, level, _ in l.actual())
    report = diagnostics.asdict()
    assert report["passed"] is False
    assert report["checks"][1]["first_difference"] == {"term": [1, 1], "left": "1", "right": "0"}
    with pytest.raises(DoubleRouteMismatch):
        Diagnostics(strict=True).compare("different", a, b)
