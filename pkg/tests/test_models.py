import pytest

from tutte.models import (
    ERRORS,
    EXIT_FAILURE,
    EXIT_USAGE,
    LEVEL_CLASSES,
    ConflictingFlags,
    ConnectivityClass,
    CountTable,
    DoubleRouteMismatch,
    Level,
    TutteError,
    UsageError,
    exit_code,
)


def test_count_table():
    table = CountTable({(2, 1): 1, (3, 2): 3, (3, 3): 1, (4, 0): 1}, Level.ALL)
    assert table.count(3, 2) == 3
    assert table.count(3, 1) == 0
    assert table.totals() == {2: 1, 3: 4, 4: 1}
    assert table.restricted(3).totals() == {2: 1, 3: 4}
    assert table.restricted(3, 2).rows == {(2, 1): 1, (3, 2): 3}


def test_count_table_mismatch():
    table = CountTable({(2, 1): 1, (3, 2): 3})
    assert table.first_mismatch(table) is None
    assert table.first_mismatch(CountTable({(2, 1): 1})) == ((3, 2), 3, 0)


def test_count_table_csv():
    csv = CountTable({(1, 0): 1, (2, 0): 1, (2, 1): 1}).to_csv({"family": "forest"})
    assert csv.splitlines() == [
        '# {"family": "forest"}',
        "n,m,count",
        "1,0,1",
        "1,total,1",
        "2,0,1",
        "2,1,1",
        "2,total,2",
    ]
    assert CountTable({(2, 1): 1}, Level.CONNECTED).asdict() == {
        "class": "connected",
        "rows": [[2, 1, 1]],
    }


def test_level_classes():
    assert LEVEL_CLASSES[Level.ALL] < LEVEL_CLASSES[Level.CONNECTED]
    assert LEVEL_CLASSES[Level.THREE_CONNECTED] == ConnectivityClass.THREE_CONNECTED


@pytest.mark.parametrize(
    "error, status",
    [
        (UsageError("bad"), EXIT_USAGE),
        (ConflictingFlags("bad"), EXIT_USAGE),
        (DoubleRouteMismatch("bad"), EXIT_FAILURE),
        (TutteError("bad"), EXIT_FAILURE),
    ],
)
def test_exit_code(error, status):
    assert exit_code(error) == status


def test_error_codes():
    assert ERRORS["CLI_CONFLICTING_FLAGS"] == "Mutually exclusive flags given together."
    assert ERRORS["CLI_USAGE"] == "Invalid command line usage."
    assert all(code.isupper() for code in ERRORS)
