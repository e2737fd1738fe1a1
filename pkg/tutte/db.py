"""Database module."""
import os
from datetime import datetime
from typing import Any

from tinydb import Query, TinyDB
from tinydb.table import Document

import tutte

from .series import BiSeries, Trunc, from_json, to_json, truncate
from .util import get_logger

_LOGGER = get_logger("db")


def _db_file() -> str:
    return os.environ.get("DB_FILE") or _os_db_path()


def _os_db_path() -> str:
    return os.path.join(tutte.data_dir, "tutte.db")


def _db_get() -> TinyDB:
    # Will create the database if it doesn't exist
    db = TinyDB(_db_file())

    # Will create the tables if they don't exist
    db.table("series", cache_size=0)
    db.table("runs", cache_size=0)

    return db


def _series_query(family: str, stage: str, name: str, simple: bool) -> Any:
    Series = Query()
    return (
        (Series.family == family)
        & (Series.stage == stage)
        & (Series.name == name)
        & (Series.simple == simple)
    )


def series_get(
    family: str, stage: str, name: str, simple: bool, trunc: Trunc
) -> None | BiSeries:
    """Get cached series known at least to trunc."""
    series = _db_get().table("series")
    doc = series.get(_series_query(family, stage, name, simple))
    if not doc:
        return None
    stored = from_json(doc["series"])
    if stored.trunc[0] < trunc[0] or stored.trunc[1] < trunc[1]:
        _LOGGER.debug(f"Cached {family}/{stage}/{name} at {stored.trunc} too coarse for {trunc}")
        return None
    _LOGGER.info(f"Using cached {family}/{stage}/{name} at {stored.trunc}")
    return truncate(stored, trunc)


def series_put(family: str, stage: str, name: str, simple: bool, s: BiSeries) -> None:
    """Store series, keeping the more precise of old and new."""
    opendb = _db_get()
    with opendb:
        series = opendb.table("series")
        query = _series_query(family, stage, name, simple)
        old = series.get(query)
        if old and all(a >= b for a, b in zip(old["series"]["trunc"], s.trunc)):
            return
        series.upsert(
            {
                "family": family,
                "stage": stage,
                "name": name,
                "simple": simple,
                "series": to_json(s),
            },
            query,
        )
        _LOGGER.info(f"Cached {family}/{stage}/{name} at {s.trunc}")


def run_add(suite: str, report: dict[str, Any]) -> int:
    """Add verification run."""
    opendb = _db_get()
    with opendb:
        runs = opendb.table("runs")
        doc_id = runs.insert(
            {
                "suite": suite,
                "passed": bool(report.get("passed")),
                "created": datetime.now().isoformat(),
                "report": report,
            }
        )
    _LOGGER.info(f"Stored {suite} run {doc_id}")
    return int(doc_id)


def run_list(suite: str | None = None) -> list[Document]:
    """List verification runs, optionally of one suite."""
    runs = _db_get().table("runs")
    if suite is None:
        return list(runs.all())
    Run = Query()
    return list(runs.search(Run.suite == suite))

