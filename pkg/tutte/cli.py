"""Command line module."""
import argparse
import dataclasses
import json
import math
import os
import random
import sys
from collections.abc import Mapping
from typing import Any

import tutte
from tutte import db
from tutte.grammar import (
    FAMILIES,
    Diagnostics,
    FamilyTerminals,
    GrammarOutput,
    compute,
    custom_terminals,
    family_output,
    grammar_checks,
)
from tutte.graphdecomp import (
    Multigraph,
    block_tree,
    connectivity_class,
    restricted_rmt_tree,
    rmt_tree,
)
from tutte.models import (
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    ConflictingFlags,
    ConnectivityClass,
    Convention,
    Level,
    TutteError,
    UsageError,
    exit_code,
)
from tutte.oracle import (
    crosscheck,
    dissymmetry_census,
    enum_rooted_maps,
    family_count_tables,
    is_planar,
    multigraph_count_tables,
    labelled_graphs,
    random_two_connected,
)
from tutte.planarmaps import map_series_bundle, planar_terminals, planar_terminals_checked
from tutte.series import BiSeries, Trunc, to_json
from tutte.util import get_logger, write_atomic

_LOGGER = get_logger("cli")

STAGES = {
    "networks": ("D", "S", "P", "H"),
    "g2": ("G2", "G2_pointed"),
    "g1": ("G1", "C_pointed"),
    "g": ("G",),
}
SUITES = ("grammar-vs-oracle", "double-routes", "dissymmetry")
ORACLE_FAMILIES = ("planar", "series-parallel", "forest")
MAP_CENSUS_EDGES = 3
RANDOM_GRAPHS = 100
RANDOM_VERTICES = 12
CENSUS_VERTICES = 5

DEFAULTS: dict[str, Any] = {
    "family": tutte.default_family,
    "nmax": tutte.default_nmax,
    "mmax": None,
    "simple": True,
    "cache": True,
    "debug": False,
}


@dataclasses.dataclass(frozen=True)
class Config:
    """Effective configuration of a run."""

    family: str
    nmax: int
    mmax: int
    simple: bool
    cache: bool
    debug: bool

    @property
    def trunc(self) -> Trunc:
        """Truncation bounds (vertices, edges)."""
        return self.nmax, self.mmax

    @property
    def convention(self) -> Convention:
        """Simple graphs are counted with labelled vertices, multigraphs also with labelled edges."""
        return Convention.VERTEX_LABELLED if self.simple else Convention.EDGE_LABELLED

    def asdict(self) -> dict[str, Any]:
        """Convert to dict."""
        return {
            **dataclasses.asdict(self),
            "convention": self.convention.value,
            "trunc": list(self.trunc),
        }


def _env_int(env: Mapping[str, str], name: str) -> int | None:
    value = env.get(name)
    if not value:
        return None
    try:
        return int(value)
    except ValueError as e:
        raise UsageError(f"{name} must be an integer, got {value!r}") from e


def _env_flag(env: Mapping[str, str], name: str) -> bool | None:
    value = env.get(name)
    return None if not value else tutte.strtobool(value)


def _first(*values: Any) -> Any:
    return next(value for value in values if value is not None)


def config_resolution(
    flags: Mapping[str, Any],
    env: Mapping[str, str],
    defaults: Mapping[str, Any] = DEFAULTS,
) -> Config:
    """Resolve flags over TUTTE_* environment variables over defaults."""
    if flags.get("simple") and flags.get("multi"):
        raise ConflictingFlags("--simple and --multi are mutually exclusive")
    simple_flag = True if flags.get("simple") else False if flags.get("multi") else None
    cache_flag = False if flags.get("no_cache") else None
    debug_flag = True if flags.get("debug") else None
    nmax = _first(flags.get("nmax"), _env_int(env, "TUTTE_NMAX"), defaults["nmax"])
    if nmax < 1:
        raise UsageError(f"nmax must be positive, got {nmax}")
    mmax = _first(
        flags.get("mmax"), _env_int(env, "TUTTE_MMAX"), defaults["mmax"], math.comb(nmax, 2)
    )
    if mmax < 0:
        raise UsageError(f"mmax must not be negative, got {mmax}")
    family = _first(flags.get("family"), env.get("TUTTE_FAMILY") or None, defaults["family"])
    if family not in FAMILIES and not family.startswith("custom:"):
        raise UsageError(f"Unknown family {family}")
    return Config(
        family,
        nmax,
        mmax,
        _first(simple_flag, _env_flag(env, "TUTTE_SIMPLE"), defaults["simple"]),
        _first(cache_flag, _env_flag(env, "TUTTE_CACHE"), defaults["cache"]),
        _first(debug_flag, _env_flag(env, "TUTTE_DEBUG"), defaults["debug"]),
    )


def _terminals(config: Config, trunc: Trunc) -> FamilyTerminals:
    """Planar terminals, through the series table when caching is on."""
    if not config.cache:
        return planar_terminals(trunc)
    found = {
        name: db.series_get("planar", "terminals", name, True, trunc)
        for name in ("g3", "g3_pointed", "g3_rooted")
    }
    if all(s is not None for s in found.values()):
        g3, g3_pointed, g3_rooted = (s for s in found.values() if s is not None)
        return FamilyTerminals(g3, g3_pointed, g3_rooted, True)
    terminals = planar_terminals(trunc)
    for name in ("g3", "g3_pointed", "g3_rooted"):
        db.series_put("planar", "terminals", name, True, getattr(terminals, name))
    return terminals


def _output(config: Config) -> GrammarOutput:
    if config.family == "planar":
        terminals = dataclasses.replace(_terminals(config, config.trunc), simple=config.simple)
        return compute(terminals, config.trunc)
    return family_output(config.family, config.trunc, config.simple)


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _dump_json(data: Mapping[str, Any], out: str | None) -> None:
    _emit(json.dumps(data, sort_keys=True, indent=2) + "\n", out)


def _series_file(s: BiSeries, config: Config) -> str:
    return json.dumps({**to_json(s), "config": config.asdict()}, sort_keys=True) + "\n"


def cmd_count(args: argparse.Namespace, config: Config) -> int:
    """Count labelled graphs of a family."""
    level = Level(args.level)
    table = _output(config).counts(config.convention)[level]
    table = table.restricted(config.nmax, config.mmax)
    _emit(table.to_csv({**config.asdict(), "level": level.value}), args.out)
    _LOGGER.info(f"Counted {config.family} graphs at level {level.value} up to {config.trunc}")
    return EXIT_OK


def cmd_series(args: argparse.Namespace, config: Config) -> int:
    """Dump the series of one stage."""
    if not args.out:
        raise UsageError("series needs --out <directory>")
    if args.stage == "terminals":
        if config.family == "planar":
            terminals = _terminals(config, config.trunc)
        elif config.family.startswith("custom:"):
            terminals = custom_terminals(config.family, config.trunc, config.simple)
        else:
            terminals = FamilyTerminals.zero(config.trunc, config.simple)
        named = {name: getattr(terminals, name) for name in ("g3", "g3_pointed", "g3_rooted")}
    else:
        series = _output(config).series()
        named = {name: series[name] for name in STAGES[args.stage]}
    for name, s in named.items():
        write_atomic(os.path.join(args.out, f"{name}.json"), _series_file(s, config))
    _LOGGER.info(f"Wrote {len(named)} series of stage {args.stage} to {args.out}")
    return EXIT_OK


def _read_graph(path: str) -> Multigraph:
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"Cannot read graph {path}: {e}") from e
    return Multigraph.from_json(data)


def cmd_decompose(args: argparse.Namespace, config: Config) -> int:
    """Dump decomposition trees of a graph."""
    g = _read_graph(args.graph)
    strength = connectivity_class(g)
    result: dict[str, Any] = {
        "config": config.asdict(),
        "graph": g.to_json(),
        "connectivity": strength.name.lower(),
        "bv_tree": None,
        "rmt_tree": None,
    }
    if strength >= ConnectivityClass.CONNECTED:
        result["bv_tree"] = block_tree(g).asdict()
    if strength >= ConnectivityClass.TWO_CONNECTED and len(g.edges) >= 3:
        result["rmt_tree"] = rmt_tree(g).asdict()
    if args.point is not None:
        result["restricted_rmt_tree"] = restricted_rmt_tree(g, args.point).asdict()
    _dump_json(result, args.out)
    return EXIT_OK


def _grammar_vs_oracle(config: Config) -> dict[str, Any]:
    if config.family not in ORACLE_FAMILIES:
        raise UsageError(
            f"No oracle for family {config.family}, use one of {', '.join(ORACLE_FAMILIES)}"
        )
    if config.family == "forest" and not config.simple:
        raise UsageError("Forests have no multigraph variant")
    oracle_tables = family_count_tables(config.family, config.nmax)
    m_max: int | None = None
    if config.simple:
        checked = dataclasses.replace(config, mmax=math.comb(config.nmax, 2))
    else:
        checked = config
        m_max = config.mmax
        oracle_tables = multigraph_count_tables(oracle_tables, m_max)
    grammar_tables = _output(checked).counts(checked.convention)
    report = crosscheck(grammar_tables, oracle_tables, config.nmax, m_max)
    return {"family": config.family, "simple": config.simple, **report.asdict()}


def _map_census_checks(diagnostics: Diagnostics, m_rooted: BiSeries, m_pointed: BiSeries) -> None:
    for m in range(1, min(MAP_CENSUS_EDGES, m_rooted.trunc[1] // 2) + 1):
        census = enum_rooted_maps(m)
        degree = BiSeries(
            {k: v for k, v in m_rooted.terms() if k[1] == 2 * m}, m_rooted.trunc
        )
        diagnostics.compare(f"rooted maps with {m} edges: series = enumeration", degree, census.rooted_series(m_rooted.trunc))
        degree = BiSeries(
            {k: v for k, v in m_pointed.terms() if k[1] == 2 * m}, m_pointed.trunc
        )
        diagnostics.compare(f"pointed maps with {m} edges: series = enumeration", degree, census.pointed_series(m_pointed.trunc))


def _double_routes(config: Config) -> dict[str, Any]:
    diagnostics = Diagnostics(strict=False)
    bundle = map_series_bundle((config.nmax + 2, 2 * config.nmax), diagnostics)
    _map_census_checks(diagnostics, bundle.M_rooted, bundle.M_pointed)
    planar_terminals_checked(config.trunc, diagnostics)
    for simple in (True, False):
        checked = dataclasses.replace(config, simple=simple)
        grammar_checks(_output(checked), diagnostics)
    return diagnostics.asdict()


def _dissymmetry(config: Config) -> dict[str, Any]:
    rng = random.Random(0)
    graphs = [
        random_two_connected(rng, rng.randint(2, RANDOM_VERTICES)) for _ in range(RANDOM_GRAPHS)
    ]
    for n in range(1, min(config.nmax, CENSUS_VERTICES) + 1):
        graphs.extend(
            g
            for g in labelled_graphs(n)
            if connectivity_class(g) >= ConnectivityClass.CONNECTED and is_planar(g)
        )
    return dissymmetry_census(graphs).asdict()


SUITE_RUNNERS = {
    "grammar-vs-oracle": _grammar_vs_oracle,
    "double-routes": _double_routes,
    "dissymmetry": _dissymmetry,
}


def cmd_verify(args: argparse.Namespace, config: Config) -> int:
    """Run verification suites and store the report."""
    suites = SUITES if args.suite == "all" else (args.suite,)
    results = {}
    for suite in suites:
        _LOGGER.info(f"Running suite {suite}")
        results[suite] = SUITE_RUNNERS[suite](config)
    report = {
        "config": config.asdict(),
        "suites": results,
        "passed": all(result["passed"] for result in results.values()),
    }
    db.run_add(args.suite, report)
    _dump_json(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per pipeline stage."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", type=str, default=None, help="planar, series-parallel, forest or custom:<dir>")
    common.add_argument("--nmax", type=int, default=None, help="largest number of vertices")
    common.add_argument("--mmax", type=int, default=None, help="largest number of edges")
    common.add_argument("--simple", action="store_true", help="simple graphs")
    common.add_argument("--multi", action="store_true", help="multigraphs")
    common.add_argument("--no-cache", action="store_true", help="do not use the series cache")
    common.add_argument("--debug", action="store_true", help="enable debug logs")
    common.add_argument("--out", type=str, default=None, help="output file or directory")

    parser = argparse.ArgumentParser(prog="tutte")
    commands = parser.add_subparsers(dest="command", required=True)

    count = commands.add_parser("count", parents=[common], help="count labelled graphs")
    count.add_argument("--level", choices=[level.value for level in Level], default=Level.ALL.value)
    count.set_defaults(handler=cmd_count)

    series = commands.add_parser("series", parents=[common], help="dump counting series")
    series.add_argument("--stage", choices=["terminals", *STAGES], required=True)
    series.set_defaults(handler=cmd_series)

    decompose = commands.add_parser("decompose", parents=[common], help="decomposition trees of a graph")
    decompose.add_argument("--graph", type=str, required=True, help="graph JSON file")
    decompose.add_argument("--point", type=int, default=None, help="pointed vertex")
    decompose.set_defaults(handler=cmd_decompose)

    verify = commands.add_parser("verify", parents=[common], help="run verification suites")
    verify.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    verify.set_defaults(handler=cmd_verify)
    return parser


def _error(error: TutteError) -> None:
    sys.stderr.write(
        json.dumps({"error": error.code, "type": type(error).__name__, "message": str(error)})
        + "\n"
    )


def run(argv: list[str]) -> int:
    """Parse and run a command line, returning the exit status."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        config = config_resolution(vars(args), os.environ)
        _LOGGER.debug(f"Effective config: {config.asdict()}")
        return int(args.handler(args, config))
    except TutteError as e:
        _LOGGER.warning(f"{type(e).__name__}: {e}")
        _error(e)
        return exit_code(e)
    except Exception as e:
        _LOGGER.exception(e)
        sys.stderr.write(
            json.dumps({"error": "INTERNAL", "type": type(e).__name__, "message": str(e)}) + "\n"
        )
        return EXIT_FAILURE
