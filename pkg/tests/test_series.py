import random
from fractions import Fraction

import pytest

from tests import TRUNC
from tutte.models import (
    ConstantTermViolation,
    DivisibilityError,
    InvalidSystem,
    NonContractive,
    SeriesFormatError,
    TruncationError,
    ValuationError,
    Variable,
)
from tutte.series import (
    BiSeries,
    SeriesSystem,
    Unknown,
    agree,
    compress_even,
    constant,
    derivative,
    divide_by_monomial,
    dumps,
    euler_derivative,
    exp_at_least,
    exp_of,
    exp_series,
    first_difference,
    from_json,
    loads,
    loga_at_least,
    log_series,
    monomial,
    mul,
    power,
    reciprocal,
    reflect,
    scale,
    shift,
    solve_fixed_point,
    spread_even,
    substitute,
    swap_variables,
    truncate,
    variable,
    zero,
)


def _random_series(rng: random.Random, trunc, constant_term=None, density=0.4):
    coeffs = {}
    for i in range(trunc[0] + 1):
        for j in range(trunc[1] + 1):
            if rng.random() < density:
                coeffs[(i, j)] = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    if constant_term is not None:
        coeffs[(0, 0)] = Fraction(constant_term)
    return BiSeries(coeffs, trunc)


def test_coefficients_beyond_truncation():
    a = monomial(2, 3, TRUNC, 5)
    assert a[2, 3] == 5
    assert a.coefficient(0, 0) == 0
    with pytest.raises(TruncationError):
        a.coefficient(5, 0)
    assert BiSeries({(9, 0): 1}, TRUNC).is_zero()


def test_arithmetic():
    x, y = variable(Variable.X, TRUNC), variable(Variable.Y, TRUNC)
    assert (1 + x) * (1 - x) == 1 - x * x
    assert (x + y) * 2 == 2 * x + 2 * y
    assert (x + y) / 2 == x * Fraction(1, 2) + y * Fraction(1, 2)
    assert power(1 + x, 3)[2, 0] == 3
    assert mul(x, monomial(4, 0, TRUNC)).is_zero()
    assert (x - x) == zero(TRUNC)


def test_lowest_term():
    a = monomial(3, 1, TRUNC, 2) + monomial(1, 2, TRUNC, 7)
    assert a.lowest_term() == ((1, 2), 7)
    assert zero(TRUNC).lowest_term() is None


def test_reciprocal_and_exp():
    x = variable(Variable.X, TRUNC)
    assert reciprocal(1 - x) == BiSeries({(i, 0): 1 for i in range(5)}, TRUNC)
    assert exp_series(x)[3, 0] == Fraction(1, 6)
    assert exp_at_least(x, 2)[1, 0] == 0
    assert exp_at_least(x, 2)[2, 0] == Fraction(1, 2)
    assert loga_at_least(x, 3)[2, 0] == 0
    assert loga_at_least(x, 3)[4, 0] == Fraction(1, 4)


def test_constant_term_violations():
    x = variable(Variable.X, TRUNC)
    with pytest.raises(ConstantTermViolation):
        exp_series(1 + x)
    with pytest.raises(ConstantTermViolation):
        log_series(x)
    with pytest.raises(ConstantTermViolation):
        reciprocal(x)


def test_divide_by_monomial():
    a = monomial(2, 1, TRUNC) + monomial(3, 2, TRUNC)
    b = divide_by_monomial(a, 2, 1)
    assert b.trunc == (2, 3)
    assert b[0, 0] == 1 and b[1, 1] == 1
    with pytest.raises(DivisibilityError, match="x\\^0\\*y\\^1"):
        divide_by_monomial(monomial(0, 1, TRUNC) + a, 1, 0)


def test_truncate():
    a = monomial(1, 1, TRUNC)
    assert truncate(a, (1, 1)).trunc == (1, 1)
    with pytest.raises(TruncationError):
        truncate(a, (5, 1))


def test_derivatives():
    x, y = variable(Variable.X, TRUNC), variable(Variable.Y, TRUNC)
    link = mul(mul(x, x), y) / 2
    assert derivative(link, Variable.X) == truncate(mul(x, y), (3, 4))
    assert derivative(link, rooted=True) == constant(1, (2, 3))
    assert euler_derivative(power(x, 3) + y) == 3 * power(x, 3)


def test_substitute():
    x, y = variable(Variable.X, TRUNC), variable(Variable.Y, TRUNC)
    a = mul(x, y) + y
    composed = substitute(a, mul(x, y), y)
    assert composed == mul(mul(x, y), y) + y
    with pytest.raises(ValuationError):
        substitute(a, x, 1 + y)


def test_swap_and_reflect():
    a = monomial(1, 2, TRUNC, 3)
    assert swap_variables(a) == monomial(2, 1, TRUNC, 3)
    assert reflect(a) == monomial(1, 2, TRUNC, 3)
    assert reflect(monomial(0, 3, TRUNC)) == monomial(3, 3, TRUNC)
    with pytest.raises(ValuationError):
        reflect(monomial(2, 1, TRUNC))


def test_even_regrading():
    a = monomial(1, 2, TRUNC, 4)
    spread = spread_even(a)
    assert spread.trunc == (4, 9)
    assert spread[1, 4] == 4
    assert compress_even(spread) == a
    with pytest.raises(DivisibilityError):
        compress_even(monomial(0, 1, TRUNC))


def test_first_difference():
    a = monomial(1, 1, TRUNC)
    b = a + monomial(2, 2, (2, 2), 3)
    assert first_difference(a, b) == ((2, 2), 0, 3)
    assert agree(a, truncate(a, (1, 1)))


def test_json():
    a = monomial(1, 2, TRUNC, Fraction(-3, 7))
    assert loads(dumps(a)) == a
    assert '"-3/7"' in dumps(a)
    with pytest.raises(SeriesFormatError):
        loads("not json")
    with pytest.raises(SeriesFormatError):
        from_json({"trunc": [1, 1], "terms": [[2, 0, "1"]]})
    with pytest.raises(SeriesFormatError):
        from_json({"terms": []})


def test_float_coefficients():
    with pytest.raises(SeriesFormatError):
        BiSeries({(1, 0): 0.5}, TRUNC)
    with pytest.raises(SeriesFormatError):
        scale(monomial(1, 0, TRUNC), 0.1)
    with pytest.raises(SeriesFormatError):
        monomial(1, 0, TRUNC) / 3.0
    assert BiSeries({(1, 0): "1/3"}, TRUNC) == monomial(1, 0, TRUNC, Fraction(1, 3))


def test_solve_fixed_point_trees():
    x = monomial(1, 0, (5, 0))
    T = Unknown("T")
    system = SeriesSystem.from_mapping({"T": x * exp_of(T)})
    tree = solve_fixed_point(system, (5, 0))["T"]
    # rooted labelled trees: n^(n-1)/n!
    assert tree[3, 0] == Fraction(9, 6)
    assert tree[4, 0] == Fraction(64, 24)


def test_solve_fixed_point_initial():
    y = monomial(0, 1, TRUNC)
    C = Unknown("C")
    system = SeriesSystem.from_mapping({"C": 1 + y * C})
    solution = solve_fixed_point(system, TRUNC, {"C": constant(1, (0, 0))})
    assert solution["C"] == reciprocal(1 - y)


def test_solve_fixed_point_errors():
    T = Unknown("T")
    with pytest.raises(NonContractive):
        solve_fixed_point(SeriesSystem.from_mapping({"T": T + 1}), TRUNC)
    with pytest.raises(InvalidSystem):
        SeriesSystem.from_mapping({"T": T + Unknown("U")})
    with pytest.raises(InvalidSystem):
        SeriesSystem(("T",), ())


def test_random_algebra():
    rng = random.Random(8)
    trunc = (8, 8)
    for _ in range(250):
        a = _random_series(rng, trunc, density=0.2)
        b = _random_series(rng, trunc, density=0.2)
        c = _random_series(rng, trunc, density=0.2)
        assert mul(a, b + c) == mul(a, b) + mul(a, c)
        assert mul(a, b) == mul(b, a)
        assert a + b == b + a
        assert mul(mul(a, b), c) == mul(a, mul(b, c))
        assert derivative(mul(a, b)) == derivative(a) * b + a * derivative(b)
        small = _random_series(rng, trunc, constant_term=0, density=0.1)
        assert log_series(exp_series(small)) == small
        assert exp_series(log_series(small + 1)) == small + 1


def test_random_substitution_associativity():
    rng = random.Random(9)
    trunc = (4, 4)
    x, y = variable(Variable.X, trunc), variable(Variable.Y, trunc)
    for _ in range(40):
        a = _random_series(rng, trunc)
        b = mul(x, _random_series(rng, trunc, constant_term=1))
        c = mul(y, _random_series(rng, trunc, constant_term=1))
        d = mul(x, _random_series(rng, trunc, constant_term=1))
        e = mul(y, _random_series(rng, trunc, constant_term=1))
        left = substitute(substitute(a, b, c), d, e)
        right = substitute(a, substitute(b, d, e), substitute(c, d, e))
        assert left == right
