"""Grammar module.

Counting series of a family of graphs from the series of its 3-connected
members: networks, 2-connected, connected and general graphs.
"""
import dataclasses
import json
import math
import os
from collections.abc import Mapping
from fractions import Fraction
from typing import Any

from cachetools import LRUCache, cached

from .models import (
    Convention,
    CountTable,
    DoubleRouteMismatch,
    InconsistentTerminals,
    Level,
    NonIntegerCount,
    UsageError,
    Variable,
)
from .series import (
    BiSeries,
    Known,
    SeriesSystem,
    Trunc,
    Unknown,
    apply,
    constant,
    derivative,
    dumps,
    exp_at_least,
    exp_of,
    exp_series,
    first_difference,
    loga_at_least,
    loads,
    log_series,
    monomial,
    mul,
    restrict,
    shift,
    solve_fixed_point,
    substitute,
    substitute_into,
    truncate,
    zero,
)
from .util import get_logger, write_atomic

_LOGGER = get_logger("grammar")

FAMILIES = ("planar", "series-parallel", "forest")
TERMINAL_FILES = {
    "g3": "g3.json",
    "g3_pointed": "g3_pointed.json",
    "g3_rooted": "g3_rooted.json",
}


@dataclasses.dataclass(frozen=True)
class RouteCheck:
    """Outcome of comparing two computations of the same series."""

    name: str
    passed: bool
    trunc: Trunc
    first_difference: None | tuple[tuple[int, int], Fraction, Fraction] = None

    def asdict(self) -> dict[str, Any]:
        """Convert to dict."""
        diff = None
        if self.first_difference:
            (i, j), left, right = self.first_difference
            diff = {"term": [i, j], "left": str(left), "right": str(right)}
        return {
            "name": self.name,
            "passed": self.passed,
            "trunc": list(self.trunc),
            "first_difference": diff,
        }


class Diagnostics:
    """Collects route checks; strict mode raises on the first failure."""

    def __init__(self, strict: bool = True):
        self.strict = strict
        self.checks: list[RouteCheck] = []

    def compare(self, name: str, left: BiSeries, right: BiSeries) -> bool:
        """Compare two series within their common bounds."""
        trunc = (min(left.trunc[0], right.trunc[0]), min(left.trunc[1], right.trunc[1]))
        diff = first_difference(left, right)
        self.checks.append(RouteCheck(name, diff is None, trunc, diff))
        if diff is None:
            _LOGGER.info(f"Check {name} passed at {trunc}")
            return True
        _LOGGER.warning(f"Check {name} failed at {trunc}: {diff}")
        if self.strict:
            raise DoubleRouteMismatch(f"{name}: first difference at {diff[0]}")
        return False

    @property
    def passed(self) -> bool:
        """True when every check passed."""
        return all(check.passed for check in self.checks)

    def asdict(self) -> dict[str, Any]:
        """Convert to dict."""
        return {
            "passed": self.passed,
            "checks": [check.asdict() for check in self.checks],
        }


@dataclasses.dataclass(frozen=True)
class FamilyTerminals:
    """Series of the 3-connected members: plain, vertex-pointed and rooted."""

    g3: BiSeries
    g3_pointed: BiSeries
    g3_rooted: BiSeries
    simple: bool = True

    @property
    def trunc(self) -> Trunc:
        """Common truncation bounds."""
        series = (self.g3, self.g3_pointed, self.g3_rooted)
        return min(s.trunc[0] for s in series), min(s.trunc[1] for s in series)

    @classmethod
    def zero(cls, trunc: Trunc, simple: bool = True) -> "FamilyTerminals":
        """Terminals of a family without 3-connected members."""
        return cls(zero(trunc), zero(trunc), zero(trunc), simple)

    def check(self) -> None:
        """Raise InconsistentTerminals unless the derivative relations hold."""
        for (i, j), _ in self.g3.terms():
            if i < 4:
                raise InconsistentTerminals(
                    f"3-connected series has a term with {i} vertices (x^{i}*w^{j})"
                )
        if first_difference(derivative(self.g3, Variable.X), self.g3_pointed):
            raise InconsistentTerminals("Pointed series is not the x-derivative")
        if first_difference(derivative(self.g3, rooted=True), self.g3_rooted):
            raise InconsistentTerminals("Rooted series is not (2/x^2) d/dw")

    def truncated(self, trunc: Trunc) -> "FamilyTerminals":
        """Lower the bounds of all three series."""
        return FamilyTerminals(
            truncate(self.g3, trunc),
            truncate(self.g3_pointed, trunc),
            truncate(self.g3_rooted, trunc),
            self.simple,
        )

    def save(self, directory: str) -> None:
        """Write the three series as JSON files."""
        for field, filename in TERMINAL_FILES.items():
            write_atomic(os.path.join(directory, filename), dumps(getattr(self, field)) + "\n")

    @classmethod
    def load(cls, directory: str, simple: bool = True) -> "FamilyTerminals":
        """Read terminals written by save."""
        series = {}
        for field, filename in TERMINAL_FILES.items():
            path = os.path.join(directory, filename)
            if not os.path.exists(path):
                raise UsageError(f"Missing terminal series file {path}")
            with open(path, encoding="utf-8") as handle:
                series[field] = loads(handle.read())
        return cls(simple=simple, **series)


@dataclasses.dataclass(frozen=True)
class Networks:
    """Network series: all, series, parallel and polyhedral."""

    D: BiSeries
    S: BiSeries
    P: BiSeries
    H: BiSeries


@dataclasses.dataclass(frozen=True)
class GrammarOutput:
    """Every series computed from the terminals."""

    D: BiSeries
    S: BiSeries
    P: BiSeries
    H: BiSeries
    G2: BiSeries
    G2_pointed: BiSeries
    G1: BiSeries
    C_pointed: BiSeries
    G: BiSeries
    G3: BiSeries
    simple: bool
    trunc: Trunc

    def level(self, level: Level) -> BiSeries:
        """Series counting the given connectivity level."""
        return {
            Level.ALL: self.G,
            Level.CONNECTED: self.G1,
            Level.TWO_CONNECTED: self.G2,
            Level.THREE_CONNECTED: self.G3,
        }[level]

    def series(self) -> dict[str, BiSeries]:
        """All series by name."""
        return {
            field.name: getattr(self, field.name)
            for field in dataclasses.fields(self)
            if isinstance(getattr(self, field.name), BiSeries)
        }

    def counts(self, convention: Convention) -> dict[Level, CountTable]:
        """Count tables for all four levels."""
        return {
            level: extract_counts(self.level(level), convention, level) for level in Level
        }

    def dump(self, directory: str, header: Mapping[str, Any] | None = None) -> None:
        """Write every series as JSON into directory."""
        for name, series in self.series().items():
            write_atomic(os.path.join(directory, f"{name}.json"), dumps(series) + "\n")
        if header is not None:
            write_atomic(
                os.path.join(directory, "config.json"),
                json.dumps(dict(header), sort_keys=True, indent=2) + "\n",
            )


def _xy(trunc: Trunc) -> tuple[BiSeries, BiSeries]:
    return monomial(1, 0, trunc), monomial(0, 1, trunc)


def network_system(t: FamilyTerminals, trunc: Trunc) -> Networks:
    """Solve the network equations."""
    x, y = _xy(trunc)
    D, S, P = Unknown("D"), Unknown("S"), Unknown("P")
    if t.simple:
        rest = D - P - y
        parallel = y * apply(lambda a: exp_at_least(a, 1), rest, label="exp>=1") + apply(
            lambda a: exp_at_least(a, 2), rest, label="exp>=2"
        )
    else:
        parallel = apply(lambda a: exp_at_least(a, 2), D - P, label="exp>=2")
    system = SeriesSystem.from_mapping(
        {
            "S": (D - S) * x * D,
            "P": parallel,
            "H": substitute_into(t.g3_rooted, Known(x), D),
            "D": y + S + P + Unknown("H"),
        }
    )
    solution = solve_fixed_point(system, trunc)
    _LOGGER.info(f"Networks solved at {trunc}")
    return Networks(solution["D"], solution["S"], solution["P"], solution["H"])


def _link_series(trunc: Trunc, simple: bool) -> BiSeries:
    if simple:
        return BiSeries({(2, 1): Fraction(1, 2)}, trunc)
    return BiSeries({(2, 1): Fraction(1, 2), (2, 2): Fraction(1, 4)}, trunc)


def _pointed_link_series(trunc: Trunc, simple: bool) -> BiSeries:
    if simple:
        return BiSeries({(1, 1): 1}, trunc)
    return BiSeries({(1, 1): 1, (1, 2): Fraction(1, 2)}, trunc)


def two_connected_series(t: FamilyTerminals, nets: Networks, trunc: Trunc) -> BiSeries:
    """G2 from the networks."""
    x, y = _xy(trunc)
    D, S, P, H = nets.D, nets.S, nets.P, nets.H
    b_r = loga_at_least(shift(D - S, 1, 0), 3) / 2
    if t.simple:
        rest = D - P - y
        b_m = shift(y * exp_at_least(rest, 2) + exp_at_least(rest, 3), 2, 0) / 2
    else:
        b_m = shift(exp_at_least(D - P, 3), 2, 0) / 2
    b_t = substitute(t.g3, x, D)
    b_rm = shift(mul(S, P), 2, 0) / 2
    b_rt = shift(mul(S, H), 2, 0) / 2
    b_mt = shift(mul(P, H), 2, 0) / 2
    b_tt = shift(mul(H, H), 2, 0) / 4
    blocks = b_r + b_m + b_t - b_rm - b_rt - b_mt - b_tt
    return truncate(_link_series(trunc, t.simple) + blocks, trunc)


def pointed_two_connected_series(
    t: FamilyTerminals, nets: Networks, trunc: Trunc
) -> BiSeries:
    """G2' from the networks, using the bricks around the pointed vertex."""
    x, y = _xy(trunc)
    D, S, P, H = nets.D, nets.S, nets.P, nets.H
    v_r = shift(mul(mul(D - S, D - S), D), 2, 0) / 2
    if t.simple:
        rest = D - P - y
        v_m = shift(y * exp_at_least(rest, 2) + exp_at_least(rest, 3), 1, 0)
    else:
        v_m = shift(exp_at_least(D - P, 3), 1, 0)
    v_t = substitute(t.g3_pointed, x, D)
    v_rm = shift(mul(S, P), 1, 0)
    v_rt = shift(mul(S, H), 1, 0)
    v_mt = shift(mul(P, H), 1, 0)
    v_tt = shift(mul(H, H), 1, 0) / 2
    blocks = v_r + v_m + v_t - v_rm - v_rt - v_mt - v_tt
    return truncate(_pointed_link_series(trunc, t.simple) + blocks, trunc)


def connected_series(
    G2: BiSeries, G2_pointed: BiSeries, trunc: Trunc
) -> tuple[BiSeries, BiSeries]:
    """G1 and C' from the 2-connected series, in variables (z, y)."""
    z, y = _xy(trunc)
    C = Unknown("C")
    system = SeriesSystem(
        ("C",), (exp_of(substitute_into(G2_pointed, Known(z) * C, Known(y))),)
    )
    c_pointed = solve_fixed_point(system, trunc, {"C": constant(1, trunc)})["C"]
    x_of_z = mul(z, c_pointed)
    c_v = x_of_z
    c_b = substitute(G2, x_of_z, y)
    c_vb = mul(x_of_z, substitute(G2_pointed, x_of_z, y))
    _LOGGER.info(f"Connected series solved at {trunc}")
    return truncate(c_v + c_b - c_vb, trunc), c_pointed


def all_graphs_series(G1: BiSeries) -> BiSeries:
    """G = exp(G1)."""
    return exp_series(G1)


def extract_counts(
    s: BiSeries, convention: Convention, class_tag: Level = Level.ALL
) -> CountTable:
    """Turn coefficients into counts under the given labelling convention."""
    rows = {}
    for (n, m), value in s.terms():
        count = value * math.factorial(n)
        if convention == Convention.EDGE_LABELLED:
            count *= math.factorial(m)
        if count.denominator != 1 or count < 0:
            raise NonIntegerCount(
                f"Coefficient {value} of x^{n}*y^{m} gives count {count} ({convention.value})"
            )
        rows[(n, m)] = int(count)
    return CountTable(rows, class_tag)


def compute(t: FamilyTerminals, trunc: Trunc) -> GrammarOutput:
    """Run the whole system."""
    nets = network_system(t, trunc)
    g2 = two_connected_series(t, nets, trunc)
    g2_pointed = pointed_two_connected_series(t, nets, trunc)
    _LOGGER.info(f"2-connected series computed at {trunc}")
    g1, c_pointed = connected_series(g2, g2_pointed, trunc)
    g = all_graphs_series(g1)
    return GrammarOutput(
        nets.D, nets.S, nets.P, nets.H, g2, g2_pointed, g1, c_pointed, g,
        restrict(t.g3, trunc), t.simple, trunc,
    )


def forest_output(trunc: Trunc) -> GrammarOutput:
    """Family whose only block is the link graph."""
    g2 = _link_series(trunc, True)
    g2_pointed = _pointed_link_series(trunc, True)
    g1, c_pointed = connected_series(g2, g2_pointed, trunc)
    empty = zero(trunc)
    return GrammarOutput(
        monomial(0, 1, trunc), empty, empty, empty, g2, g2_pointed, g1, c_pointed,
        all_graphs_series(g1), empty, True, trunc,
    )


def grammar_checks(output: GrammarOutput, diagnostics: Diagnostics) -> Diagnostics:
    """Identities that tie the computed series together."""
    diagnostics.compare(
        "pointed 2-connected = d/dx 2-connected",
        output.G2_pointed,
        derivative(output.G2, Variable.X),
    )
    if not output.simple:
        diagnostics.compare(
            "rooted 2-connected = 1 + D",
            derivative(output.G2, rooted=True),
            1 + output.D,
        )
    diagnostics.compare("d/dz G1 = C'", derivative(output.G1, Variable.X), output.C_pointed)
    diagnostics.compare("log G = G1", log_series(output.G), output.G1)
    diagnostics.compare(
        "D = y + S + P + H",
        output.D,
        monomial(0, 1, output.trunc) + output.S + output.P + output.H,
    )
    return diagnostics


def custom_terminals(family: str, trunc: Trunc, simple: bool = True) -> FamilyTerminals:
    """Checked terminals of custom:<dir>, lowered to trunc."""
    terminals = FamilyTerminals.load(family[len("custom:"):], simple)
    terminals.check()
    return terminals.truncated(trunc)


@cached(cache=LRUCache(maxsize=16))
def family_output(family: str, trunc: Trunc, simple: bool = True) -> GrammarOutput:
    """Grammar output for a built-in family or custom:<terminals dir>."""
    if family == "forest":
        return forest_output(trunc)
    if family == "series-parallel":
        return compute(FamilyTerminals.zero(trunc, simple), trunc)
    if family == "planar":
        from .planarmaps import planar_terminals

        terminals = dataclasses.replace(planar_terminals(trunc), simple=simple)
        return compute(terminals, trunc)
    if family.startswith("custom:"):
        return compute(custom_terminals(family, trunc, simple), trunc)
    raise UsageError(f"Unknown family {family}")
