import os
from unittest import mock

from tinydb import TinyDB

from tutte import data_dir, db
from tutte.series import monomial


def test_db_path():
    env = os.environ.copy()
    env.pop("DB_FILE")
    with mock.patch.dict(os.environ, env, clear=True):
        assert db._db_file() == os.path.join(data_dir, "tutte.db")


def test_series_db(clean_db):
    coarse = monomial(4, 6, (4, 6), 3)
    assert db.series_get("planar", "terminals", "g3", True, (4, 6)) is None

    db.series_put("planar", "terminals", "g3", True, coarse)
    assert db.series_get("planar", "terminals", "g3", True, (4, 6)) == coarse
    truncated = db.series_get("planar", "terminals", "g3", True, (3, 3))
    assert truncated is not None and truncated.is_zero() and truncated.trunc == (3, 3)
    assert db.series_get("planar", "terminals", "g3", True, (5, 6)) is None  # too coarse
    assert db.series_get("planar", "terminals", "g3", False, (4, 6)) is None

    fine = monomial(4, 6, (5, 8), 3)
    db.series_put("planar", "terminals", "g3", True, fine)
    assert db.series_get("planar", "terminals", "g3", True, (5, 8)) == fine

    db.series_put("planar", "terminals", "g3", True, coarse)  # keeps the finer one
    assert db.series_get("planar", "terminals", "g3", True, (5, 8)) == fine

    db_test = TinyDB("tests/tmp.db")
    assert len(db_test.table("series").all()) == 1
    db_test.close()


def test_runs_db(clean_db):
    first = db.run_add("dissymmetry", {"passed": True})
    second = db.run_add("double-routes", {"passed": False, "checks": []})
    assert first != second

    runs = db.run_list()
    assert len(runs) == 2
    assert [run["suite"] for run in db.run_list("double-routes")] == ["double-routes"]
    assert db.run_list("double-routes")[0]["passed"] is False
    assert db.run_list("dissymmetry")[0]["report"] == {"passed": True}
    assert db.run_list("grammar-vs-oracle") == []
