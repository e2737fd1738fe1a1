"""Planar maps module.

Series of planar maps (general, 2-connected, 3-connected) obtained from
mobiles and the algebraic systems that count them, and the 3-connected planar
graph series derived from them.

Conventions: maps are counted with labelled half-edges. Series in (x, s) are
exponential in the half-edge variable s, x marks vertices (the root or pointed
vertex unmarked), t is the half-edge variable of 2-connected maps, y = t^2 and
w mark edges.
"""
import dataclasses
from fractions import Fraction

from cachetools import LRUCache, cached

from .grammar import Diagnostics, FamilyTerminals
from .models import DivisibilityError, TruncationError, Variable
from .series import (
    BiSeries,
    SeriesSystem,
    Trunc,
    Unknown,
    apply,
    derivative,
    divide_by_monomial,
    is_even,
    loga_at_least,
    log_series,
    monomial,
    mul,
    power,
    reciprocal,
    reflect,
    restrict,
    shift,
    solve_fixed_point,
    spread_even,
    substitute,
    substitute_into,
    truncate,
)
from .util import get_logger

_LOGGER = get_logger("planarmaps")

Pair = tuple[BiSeries, BiSeries]


@dataclasses.dataclass(frozen=True)
class MotzkinBundle:
    """Motzkin bridges and excursions: t marks flat steps, u up-down pairs."""

    E: BiSeries
    B: BiSeries
    B_plus1: BiSeries
    B_hat: BiSeries


@dataclasses.dataclass(frozen=True)
class MobileBundle:
    """Mobile series in (x, s) at y = 1."""

    L_circ: BiSeries
    L_tri: BiSeries
    u: BiSeries
    T_bullet: BiSeries
    T_circ: BiSeries
    T_edges: BiSeries
    T: BiSeries
    M_pointed: BiSeries


@dataclasses.dataclass(frozen=True)
class EtaBundle:
    """Rooted 2-connected maps in (x, t)."""

    eta1: BiSeries
    eta2: BiSeries
    L_rooted: BiSeries


@dataclasses.dataclass(frozen=True)
class PointedMaps:
    """Vertex-pointed maps split by their 2-connected core."""

    Mp_f: BiSeries
    Mp_Bf: BiSeries
    Mp_B: BiSeries
    L_pointed: BiSeries


@dataclasses.dataclass(frozen=True)
class MapNetworks:
    """Embedded networks in (x, y)."""

    D: BiSeries
    S: BiSeries
    P: BiSeries
    H: BiSeries


@dataclasses.dataclass(frozen=True)
class GammaBundle:
    """Rooted 3-connected maps in (x, w)."""

    gamma1: BiSeries
    gamma2: BiSeries
    K_rooted: BiSeries


@dataclasses.dataclass(frozen=True)
class MapSeriesBundle:
    """Every map series of the pipeline."""

    beta1: BiSeries
    beta2: BiSeries
    M_rooted: BiSeries
    M_pointed: BiSeries
    Mp_f: BiSeries
    Mp_Bf: BiSeries
    Mp_B: BiSeries
    eta1: BiSeries
    eta2: BiSeries
    L_rooted: BiSeries
    L_pointed: BiSeries
    D_maps: BiSeries
    S_maps: BiSeries
    P_maps: BiSeries
    H_maps: BiSeries
    gamma1: BiSeries
    gamma2: BiSeries
    K_rooted: BiSeries
    K_pointed: BiSeries
    K_unrooted: BiSeries
    K_face: BiSeries

    def series(self) -> dict[str, BiSeries]:
        """All series by name."""
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}


def _xy(trunc: Trunc) -> tuple[BiSeries, BiSeries]:
    return monomial(1, 0, trunc), monomial(0, 1, trunc)


def _diagnostics(diagnostics: Diagnostics | None) -> Diagnostics:
    return diagnostics if diagnostics is not None else Diagnostics(strict=True)


def _inverse_square(a: BiSeries) -> BiSeries:
    return power(reciprocal(1 - a), 2)


@cached(cache=LRUCache(maxsize=32))
def motzkin_series(trunc: Trunc) -> MotzkinBundle:
    """E = 1 + tE + uE^2, B = 1 + (t + 2uE)B, B+1 = EB, B^ = log E."""
    t, u = _xy(trunc)
    E, B = Unknown("E"), Unknown("B")
    system = SeriesSystem.from_mapping(
        {"E": 1 + t * E + u * E * E, "B": 1 + (t + 2 * u * E) * B}
    )
    solution = solve_fixed_point(system, trunc)
    e, b = solution["E"], solution["B"]
    return MotzkinBundle(e, b, mul(e, b), log_series(e))


@cached(cache=LRUCache(maxsize=32))
def solve_beta(trunc: Trunc, with_y: bool = False) -> Pair:
    """Solve the beta system.

    With y = 1 the variables are (x, s). With with_y the system is taken at
    s = 1 in (x, y), x and y marking the two vertex colours; the coefficient
    of x^a y^b then belongs to s^(2(a+b)).
    """
    first, second = _xy(trunc)
    if with_y:
        white, black = first, second
    else:
        s2 = monomial(0, 2, trunc)
        white, black = mul(first, s2), s2
    b1, b2 = Unknown("beta1"), Unknown("beta2")
    system = SeriesSystem.from_mapping(
        {
            "beta1": white + b1 * b1 + 2 * b1 * b2,
            "beta2": black + b2 * b2 + 2 * b1 * b2,
        }
    )
    solution = solve_fixed_point(system, trunc)
    return solution["beta1"], solution["beta2"]


def regrade_coloured(a: BiSeries, trunc: Trunc) -> BiSeries:
    """Send x^a y^b of a two-coloured series to x^a s^(2(a+b)), up to trunc."""
    if a.trunc[0] < trunc[0] or a.trunc[1] < trunc[1] // 2:
        raise TruncationError(f"Series known to {a.trunc}, {trunc} requested in (x, s)")
    return BiSeries(
        {
            (i, 2 * (i + j)): v
            for (i, j), v in a.terms()
            if i <= trunc[0] and 2 * (i + j) <= trunc[1]
        },
        trunc,
    )


def _pointed_from_beta(beta1: BiSeries, beta2: BiSeries) -> BiSeries:
    one_minus = 1 - beta1 - beta2
    ratio = mul(divide_by_monomial(beta1, 1, 2), one_minus)
    return (
        -log_series(one_minus)
        + shift(log_series(ratio), 1, 0)
        - divide_by_monomial(beta2, 0, 2) / 2
        + Fraction(1, 2)
    )


def mobile_series(trunc: Trunc, diagnostics: Diagnostics | None = None) -> MobileBundle:
    """Mobiles by substitution of Motzkin series, checked against beta forms."""
    diagnostics = _diagnostics(diagnostics)
    inner = (trunc[0], trunc[1] + 2)
    x, _ = _xy(inner)
    s2 = monomial(0, 2, inner)
    order = (trunc[1] + 2) // 2 + 1
    motzkin = motzkin_series((order, order))
    tri, circ, u = Unknown("L_tri"), Unknown("L_circ"), Unknown("u")
    system = SeriesSystem.from_mapping(
        {
            "L_tri": s2 * substitute_into(motzkin.B, tri, u),
            "L_circ": s2 * substitute_into(motzkin.B_plus1, tri, u),
            "u": mul(x, s2) * apply(reciprocal, 1 - circ, label="reciprocal"),
        }
    )
    mobiles = solve_fixed_point(system, inner)
    l_tri, l_circ, u_s = mobiles["L_tri"], mobiles["L_circ"], mobiles["u"]
    e_sub = substitute(motzkin.E, l_tri, u_s)

    t_bullet = substitute(motzkin.B_hat, l_tri, u_s)
    t_circ = shift(-log_series(1 - l_circ), 1, 0)
    t_bb = divide_by_monomial(mul(l_tri, l_tri), 0, 2) / 2
    t_bc = divide_by_monomial(mul(u_s, l_circ), 0, 2)
    t_total = t_bullet + t_circ - t_bb - t_bc

    beta1, beta2 = solve_beta(inner)
    one_minus = 1 - beta1 - beta2
    ratio = mul(divide_by_monomial(beta1, 1, 2), one_minus)
    diagnostics.compare("mobile L_tri = beta2", l_tri, beta2)
    diagnostics.compare("mobile u E = beta1", mul(u_s, e_sub), beta1)
    diagnostics.compare("mobile E = 1/(1-beta1-beta2)", e_sub, reciprocal(one_minus))
    diagnostics.compare("mobile 1/(1-L_circ)", reciprocal(1 - l_circ), ratio)
    diagnostics.compare("mobile T_bullet", t_bullet, -log_series(one_minus))
    diagnostics.compare("mobile T_circ", t_circ, shift(log_series(ratio), 1, 0))
    diagnostics.compare(
        "mobile T_edges",
        t_bb + t_bc,
        divide_by_monomial(mul(beta2, beta2) / 2 + mul(beta1, beta2), 0, 2),
    )
    m_pointed = _pointed_from_beta(beta1, beta2)
    diagnostics.compare("mobile T = M'", t_total, m_pointed)
    return MobileBundle(
        *(
            restrict(series, trunc)
            for series in (l_circ, l_tri, u_s, t_bullet, t_circ, t_bb + t_bc, t_total)
        ),
        truncate(m_pointed, trunc),
    )


def _rooted_from_beta(beta1: BiSeries, beta2: BiSeries) -> BiSeries:
    return (
        mul(
            1 - 2 * beta1 - 2 * beta2,
            mul(reciprocal(1 - beta1 - 2 * beta2), reciprocal(1 - beta2 - 2 * beta1)),
        )
        - 1
    )


def rooted_maps(trunc: Trunc, diagnostics: Diagnostics | None = None) -> BiSeries:
    """Rooted maps, by both beta formulas."""
    diagnostics = _diagnostics(diagnostics)
    beta1, beta2 = solve_beta((trunc[0] + 1, trunc[1] + 4))
    product = mul(mul(beta1, beta2), 1 - 2 * beta1 - 2 * beta2)
    first = divide_by_monomial(product, 1, 4) - 1
    second = _rooted_from_beta(beta1, beta2)
    diagnostics.compare("rooted maps: two formulas", first, second)
    if not is_even(second):
        raise DivisibilityError("Rooted map series has odd powers of s")
    return truncate(second, trunc)


@cached(cache=LRUCache(maxsize=32))
def solve_eta(trunc: Trunc) -> Pair:
    """eta1 = xy/(1-eta2)^2, eta2 = y/(1-eta1)^2 in (x, y = t^2)."""
    x, y = _xy(trunc)
    e1, e2 = Unknown("eta1"), Unknown("eta2")
    system = SeriesSystem.from_mapping(
        {
            "eta1": mul(x, y) * apply(_inverse_square, e2, label="(1-a)^-2"),
            "eta2": y * apply(_inverse_square, e1, label="(1-a)^-2"),
        }
    )
    solution = solve_fixed_point(system, trunc)
    return solution["eta1"], solution["eta2"]


def _rooted_2conn(eta1: BiSeries, eta2: BiSeries) -> BiSeries:
    return eta1 + eta2 - 3 * mul(eta1, eta2)


def beta_from_eta(eta1: BiSeries, eta2: BiSeries) -> Pair:
    """beta_i = eta_i (1 - eta_j) / (1 + eta1 + eta2 - 3 eta1 eta2)."""
    denominator = reciprocal(1 + _rooted_2conn(eta1, eta2))
    return (
        mul(mul(eta1, 1 - eta2), denominator),
        mul(mul(eta2, 1 - eta1), denominator),
    )


def eta_from_beta(beta1: BiSeries, beta2: BiSeries) -> Pair:
    """eta1 = beta1/(1-beta1-2beta2), eta2 = beta2/(1-beta2-2beta1)."""
    return (
        mul(beta1, reciprocal(1 - beta1 - 2 * beta2)),
        mul(beta2, reciprocal(1 - beta2 - 2 * beta1)),
    )


def gamma_from_eta(eta1: BiSeries, eta2: BiSeries) -> Pair:
    """gamma = eta / (1 - eta1 - eta2)."""
    factor = reciprocal(1 - eta1 - eta2)
    return mul(eta1, factor), mul(eta2, factor)


def eta_from_gamma(gamma1: BiSeries, gamma2: BiSeries) -> Pair:
    """eta = gamma / (1 + gamma1 + gamma2)."""
    factor = reciprocal(1 + gamma1 + gamma2)
    return mul(gamma1, factor), mul(gamma2, factor)


def _root_change(m_rooted: BiSeries) -> BiSeries:
    """t = s (1 + M_rooted(x, s))."""
    return shift(1 + m_rooted, 0, 1)


def _in_s(series_t: BiSeries, t_of_s: BiSeries, trunc: Trunc) -> BiSeries:
    x, _ = _xy(t_of_s.trunc)
    return substitute(series_t, x, t_of_s, trunc)


def eta_series_and_rooted_2conn(
    trunc: Trunc, diagnostics: Diagnostics | None = None
) -> EtaBundle:
    """eta system and rooted 2-connected maps, in (x, t)."""
    diagnostics = _diagnostics(diagnostics)
    eta1, eta2 = solve_eta((trunc[0], trunc[1] // 2))
    rooted = _rooted_2conn(eta1, eta2)
    diagnostics.compare(
        "rooted maps at beta(eta) = rooted 2-connected maps",
        _rooted_from_beta(*beta_from_eta(eta1, eta2)),
        rooted,
    )
    beta1, beta2 = solve_beta(trunc)
    back1, back2 = beta_from_eta(*eta_from_beta(beta1, beta2))
    diagnostics.compare("beta -> eta -> beta (1)", back1, beta1)
    diagnostics.compare("beta -> eta -> beta (2)", back2, beta2)
    t_of_s = _root_change(rooted_maps((trunc[0], trunc[1] - 1), diagnostics))
    hat1, hat2 = eta_from_beta(beta1, beta2)
    diagnostics.compare(
        "eta1(x, s(1+M)) = eta1(beta)", _in_s(spread_even(eta1), t_of_s, trunc), hat1
    )
    diagnostics.compare(
        "eta2(x, s(1+M)) = eta2(beta)", _in_s(spread_even(eta2), t_of_s, trunc), hat2
    )
    diagnostics.compare(
        "rooted 2-connected maps at s(1+M) = rooted maps",
        _in_s(spread_even(rooted), t_of_s, trunc),
        _rooted_from_beta(beta1, beta2),
    )
    return EtaBundle(
        truncate(spread_even(eta1), trunc),
        truncate(spread_even(eta2), trunc),
        truncate(spread_even(rooted), trunc),
    )


def _pointed_2conn_closed(beta1: BiSeries, beta2: BiSeries) -> BiSeries:
    a = 1 - beta1 - 2 * beta2
    b = 1 - beta2 - 2 * beta1
    c = 1 - 2 * beta1 - 2 * beta2
    d = 1 - beta1 - beta2
    inv_a, inv_b = reciprocal(a), reciprocal(b)
    return (
        log_series(mul(mul(a, b), mul(reciprocal(c), reciprocal(d))))
        + shift(log_series(mul(d, inv_a)), 1, 0)
        + mul(1 - 3 * beta1 - 2 * beta2, mul(inv_a, inv_b)) / 2
        - Fraction(1, 2)
    )


def _pointed_2conn_from_eta(eta1: BiSeries, eta2: BiSeries) -> BiSeries:
    prod = mul(eta1, eta2)
    return (
        -log_series(1 - prod)
        + shift(log_series(mul(1 - prod, reciprocal(1 - eta2))), 1, 0)
        + eta1
        + eta2
        - 3 * prod
        - mul(2 * eta1 + eta2 - 3 * prod, reciprocal(1 - eta1)) / 2
    )


def pointed_2conn_maps(
    trunc: Trunc, diagnostics: Diagnostics | None = None
) -> PointedMaps:
    """Pointed maps with a fixed core versus the whole, and pointed 2-connected maps."""
    diagnostics = _diagnostics(diagnostics)
    m_pointed = mobile_series(trunc, diagnostics).M_pointed
    m_rooted = rooted_maps(trunc, diagnostics)
    mp_f = log_series(1 + m_rooted)
    mp_bf = m_rooted
    mp_b = m_pointed - mp_f + mp_bf
    beta1, beta2 = solve_beta(trunc)
    diagnostics.compare("pointed core maps: pipeline = closed form", mp_b, _pointed_2conn_closed(beta1, beta2))

    eta1, eta2 = solve_eta((trunc[0], trunc[1] // 2))
    pointed_xy = _pointed_2conn_from_eta(eta1, eta2)
    diagnostics.compare(
        "pointed 2-connected maps: substitution = closed form",
        _pointed_2conn_closed(*beta_from_eta(eta1, eta2)),
        pointed_xy,
    )
    pointed_t = spread_even(pointed_xy)
    diagnostics.compare(
        "pointed 2-connected maps at s(1+M) = pointed core maps",
        _in_s(pointed_t, _root_change(m_rooted), trunc),
        mp_b,
    )
    return PointedMaps(mp_f, mp_bf, truncate(mp_b, trunc), truncate(pointed_t, trunc))


def map_network_series(
    trunc: Trunc, diagnostics: Diagnostics | None = None
) -> MapNetworks:
    """Embedded networks from rooted 2-connected maps."""
    diagnostics = _diagnostics(diagnostics)
    wide = (trunc[0] + 1, trunc[1] + 1)
    x, y = _xy(wide)
    eta1, eta2 = solve_eta(wide)
    rooted = _rooted_2conn(eta1, eta2)
    d = divide_by_monomial(rooted - y - mul(x, y), 1, 1)
    x, y = _xy(trunc)
    D, S, P = d, Unknown("S"), Unknown("P")
    solution = solve_fixed_point(
        SeriesSystem.from_mapping({"S": (D - S) * mul(x, D), "P": (D - P) * D}), trunc
    )
    s, p = solution["S"], solution["P"]
    h = d - s - p - y
    diagnostics.compare("x y D + (1+x) y = rooted 2-connected maps", shift(d, 1, 1) + y + mul(x, y), rooted)
    diagnostics.compare("P = D^2/(1+D)", p, mul(mul(d, d), reciprocal(1 + d)))
    diagnostics.compare("S = xD^2/(1+xD)", s, mul(mul(x, mul(d, d)), reciprocal(1 + mul(x, d))))
    return MapNetworks(d, s, p, h)


@cached(cache=LRUCache(maxsize=32))
def solve_gamma(trunc: Trunc) -> Pair:
    """gamma1 = xw(1+gamma2)^2, gamma2 = w(1+gamma1)^2."""
    x, w = _xy(trunc)
    g1, g2 = Unknown("gamma1"), Unknown("gamma2")
    system = SeriesSystem.from_mapping(
        {
            "gamma1": mul(x, w) * (1 + g2) * (1 + g2),
            "gamma2": w * (1 + g1) * (1 + g1),
        }
    )
    solution = solve_fixed_point(system, trunc)
    return solution["gamma1"], solution["gamma2"]


def _rooted_3conn(gamma1: BiSeries, gamma2: BiSeries) -> BiSeries:
    x, w = _xy(gamma1.trunc)
    xw = mul(x, w)
    sigma = 1 + gamma1 + gamma2
    return (
        w
        - mul(mul(xw, w), reciprocal(1 + xw))
        - mul(mul(w, w), reciprocal(1 + w))
        - divide_by_monomial(mul(mul(gamma1, gamma2), power(reciprocal(sigma), 3)), 1, 1)
    )


def gamma_series_and_rooted_3conn(
    trunc: Trunc, diagnostics: Diagnostics | None = None
) -> GammaBundle:
    """gamma system and rooted 3-connected maps, in (x, w)."""
    diagnostics = _diagnostics(diagnostics)
    wide = (trunc[0] + 1, trunc[1] + 1)
    gamma1, gamma2 = solve_gamma(wide)
    k_rooted = _rooted_3conn(gamma1, gamma2)

    nets = map_network_series(trunc, diagnostics)
    x, y = _xy(trunc)
    d = nets.D
    diagnostics.compare(
        "rooted 3-connected maps: network route = closed form",
        substitute(k_rooted, x, d),
        d
        - mul(mul(x, mul(d, d)), reciprocal(1 + mul(x, d)))
        - mul(mul(d, d), reciprocal(1 + d))
        - y,
    )
    eta1, eta2 = solve_eta(trunc)
    from_eta = gamma_from_eta(eta1, eta2)
    diagnostics.compare("gamma1(x, D) = gamma1(eta)", substitute(gamma1, x, d), from_eta[0])
    diagnostics.compare("gamma2(x, D) = gamma2(eta)", substitute(gamma2, x, d), from_eta[1])
    back1, back2 = gamma_from_eta(*eta_from_gamma(gamma1, gamma2))
    diagnostics.compare("gamma -> eta -> gamma (1)", back1, gamma1)
    diagnostics.compare("gamma -> eta -> gamma (2)", back2, gamma2)
    diagnostics.compare("gamma1(1/x, xw) = gamma2", reflect(gamma1), gamma2)
    return GammaBundle(truncate(gamma1, trunc), truncate(gamma2, trunc), truncate(k_rooted, trunc))


def _pointed_3conn_closed(gamma1: BiSeries, gamma2: BiSeries) -> BiSeries:
    x, w = _xy(gamma1.trunc)
    xw = mul(x, w)
    sigma = 1 + gamma1 + gamma2
    inv = reciprocal(sigma)
    inv2 = mul(inv, inv)
    inv3 = mul(inv2, inv)
    q = mul(gamma1, gamma2)
    return (
        -log_series(1 - mul(q, inv2))
        + shift(
            log_series(1 + mul(mul(gamma2, 1 + gamma2), reciprocal(mul(sigma, 1 + gamma1)))),
            1,
            0,
        )
        - mul(1 + gamma2 / 2 + mul(xw, mul(1 + gamma1, 1 + gamma2)), inv)
        - 3 * mul(q, inv2)
        - divide_by_monomial(mul(q, mul(1 + 2 * x + 2 * xw, inv3)), 1, 1) / 2
        + divide_by_monomial(reciprocal(1 + xw) - 1, 1, 0) / 2
        + 1
        + w / 2
        + xw
        - mul(xw, w) / 2
        - shift(log_series(1 + w), 1, 0)
    )


def _face_pointed_3conn(gamma1: BiSeries, gamma2: BiSeries) -> BiSeries:
    """x K'(1/x, xw), written with gamma1 and gamma2 exchanged."""
    x, w = _xy(gamma1.trunc)
    xw = mul(x, w)
    x2 = mul(x, x)
    sigma = 1 + gamma1 + gamma2
    inv = reciprocal(sigma)
    inv2 = mul(inv, inv)
    q = mul(gamma1, gamma2)
    return (
        -shift(log_series(1 - mul(q, inv2)), 1, 0)
        + log_series(1 + mul(mul(gamma1, 1 + gamma1), reciprocal(mul(sigma, 1 + gamma2))))
        - shift(mul(1 + gamma1 / 2 + mul(w, mul(1 + gamma1, 1 + gamma2)), inv), 1, 0)
        - 3 * shift(mul(q, inv2), 1, 0)
        - divide_by_monomial(mul(q, mul(x + 2 + 2 * xw, mul(inv2, inv))), 0, 1) / 2
        - x2 / 2
        + x
        + mul(x2, w) / 2
        + xw
        - mul(x2, mul(w, w)) / 2
        + mul(x2, reciprocal(1 + w)) / 2
        - log_series(1 + xw)
    )


def pointed_3conn_maps(trunc: Trunc, diagnostics: Diagnostics | None = None) -> BiSeries:
    """Vertex-pointed 3-connected maps, by extraction and by closed form."""
    diagnostics = _diagnostics(diagnostics)
    gamma1, gamma2 = solve_gamma((trunc[0] + 1, trunc[1] + 1))
    closed = _pointed_3conn_closed(gamma1, gamma2)

    nets = map_network_series(trunc, diagnostics)
    eta1, eta2 = solve_eta(trunc)
    x, y = _xy(trunc)
    D, S, P, H = nets.D, nets.S, nets.P, nets.H
    v = (
        _pointed_2conn_from_eta(eta1, eta2)
        - mul(x, y)
        - y / 2
        - mul(x, mul(y, y)) / 2
    )
    v_r = shift(mul(mul(D - S, D - S), D), 2, 0) / 2
    v_m = shift(loga_at_least(D - P, 3), 1, 0)
    v_rm = shift(mul(S, P), 1, 0)
    v_rt = shift(mul(S, H), 1, 0)
    v_mt = shift(mul(P, H), 1, 0)
    v_tt = shift(mul(H, H), 1, 0) / 2
    in_y = v - v_r - v_m + v_rm + v_rt + v_mt + v_tt
    sigma = 1 + gamma1 + gamma2
    y_of_w = mul(mul(gamma2, power(1 + gamma2, 2)), power(reciprocal(sigma), 3))
    extracted = substitute(in_y, monomial(1, 0, trunc), y_of_w)
    diagnostics.compare("pointed 3-connected maps: extraction = closed form", extracted, closed)
    return truncate(closed, trunc)


def _planar_g3_closed(gamma1: BiSeries, gamma2: BiSeries) -> BiSeries:
    x, w = _xy(gamma1.trunc)
    xw = mul(x, w)
    sigma = 1 + gamma1 + gamma2
    inv = reciprocal(sigma)
    inv2 = mul(inv, inv)
    q = mul(gamma1, gamma2)
    first = -2 * log_series(1 - mul(q, inv2)) + shift(
        log_series(1 + mul(mul(gamma2, 1 + gamma2), reciprocal(mul(sigma, 1 + gamma1)))), 1, 0
    )
    swapped = log_series(1 + mul(mul(gamma1, 1 + gamma1), reciprocal(mul(sigma, 1 + gamma2))))
    middle = (
        Fraction(-1, 2)
        - 3 * inv / 2
        - mul(mul(w, 1 + x), mul(mul(1 + gamma1, 1 + gamma2), inv))
        - 6 * mul(q, inv2)
    )
    last = -mul(xw, w) / 2 + xw + w + 2 - shift(log_series(1 + w), 1, 0)
    return (
        shift(first + middle + last, 1, 0) / 4
        + swapped / 4
        - 3 * divide_by_monomial(mul(q, mul(1 + x + xw, mul(inv2, inv))), 0, 1) / 8
        - log_series(1 + xw) / 4
    )


def _terminals_with(
    trunc: Trunc, diagnostics: Diagnostics
) -> tuple[FamilyTerminals, BiSeries, BiSeries, BiSeries, BiSeries]:
    wide = (trunc[0] + 2, trunc[1] + 2)
    gamma1, gamma2 = solve_gamma(wide)
    k_rooted = _rooted_3conn(gamma1, gamma2)
    k_pointed = _pointed_3conn_closed(gamma1, gamma2)
    k_face = _face_pointed_3conn(gamma1, gamma2)
    k = shift(k_pointed - shift(k_rooted, 1, 1) / 2, 1, 0) / 2 + k_face / 2
    g3, g3_pointed, g3_rooted = k / 2, k_pointed / 2, k_rooted / 2

    diagnostics.compare("face-pointed = x K'(1/x, xw)", k_face, shift(reflect(k_pointed), 1, 0))
    diagnostics.compare("G3' = d/dx G3", g3_pointed, derivative(g3, Variable.X))
    diagnostics.compare("rooted G3 = (2/x^2) d/dw G3", g3_rooted, derivative(g3, rooted=True))
    diagnostics.compare("G3 = closed form", g3, _planar_g3_closed(gamma1, gamma2))
    terminals = FamilyTerminals(
        truncate(g3, trunc), truncate(g3_pointed, trunc), truncate(g3_rooted, trunc), True
    )
    terminals.check()
    return terminals, k_rooted, k_pointed, k, k_face


def planar_terminals_checked(trunc: Trunc, diagnostics: Diagnostics) -> FamilyTerminals:
    """Planar terminals, recording every check in diagnostics."""
    terminals = _terminals_with(trunc, diagnostics)[0]
    _LOGGER.info(f"Planar terminals computed at {trunc}")
    return terminals


@cached(cache=LRUCache(maxsize=16))
def planar_terminals(trunc: Trunc) -> FamilyTerminals:
    """3-connected planar graphs: G3 = K/2, G3' = K'/2, rooted G3 = rooted K/2."""
    return planar_terminals_checked(trunc, Diagnostics(strict=True))


def map_series_bundle(
    trunc: Trunc, diagnostics: Diagnostics | None = None
) -> MapSeriesBundle:
    """Run the whole pipeline; trunc bounds (x, s), edge series go to s/2."""
    diagnostics = _diagnostics(diagnostics)
    edges = (trunc[0], trunc[1] // 2)
    beta1, beta2 = solve_beta(trunc)
    coloured = solve_beta(edges, with_y=True)
    diagnostics.compare("beta1 with y at y = 1", regrade_coloured(coloured[0], trunc), beta1)
    diagnostics.compare("beta2 with y at y = 1", regrade_coloured(coloured[1], trunc), beta2)
    m_rooted = rooted_maps(trunc, diagnostics)
    mobiles = mobile_series(trunc, diagnostics)
    pointed = pointed_2conn_maps(trunc, diagnostics)
    etas = eta_series_and_rooted_2conn(trunc, diagnostics)
    nets = map_network_series(edges, diagnostics)
    gammas = gamma_series_and_rooted_3conn(edges, diagnostics)
    k_pointed = pointed_3conn_maps(edges, diagnostics)
    _, _, _, k, k_face = _terminals_with(edges, diagnostics)
    _LOGGER.info(f"Map series bundle computed at {trunc}")
    return MapSeriesBundle(
        beta1, beta2, m_rooted, mobiles.M_pointed,
        pointed.Mp_f, pointed.Mp_Bf, pointed.Mp_B,
        etas.eta1, etas.eta2, etas.L_rooted, pointed.L_pointed,
        nets.D, nets.S, nets.P, nets.H,
        gammas.gamma1, gammas.gamma2, gammas.K_rooted, k_pointed,
        truncate(k, edges), truncate(k_face, edges),
    )
