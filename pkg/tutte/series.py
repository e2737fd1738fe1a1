"""Series module.

Truncated bivariate power series with exact rational coefficients, plus a
small expression language for systems of series equations solved by fixed
point iteration.
"""
import dataclasses
import json
from collections.abc import Callable, Iterable, Mapping
from fractions import Fraction
from typing import Any, Union

from .models import (
    ConstantTermViolation,
    DivisibilityError,
    InvalidSystem,
    NonContractive,
    SeriesFormatError,
    TruncationError,
    ValuationError,
    Variable,
)
from .util import format_fraction, get_logger, parse_fraction

_LOGGER = get_logger("series")

Trunc = tuple[int, int]
Key = tuple[int, int]
Scalar = Union[Fraction, int]
Terms = dict[Key, Fraction]


def _min_trunc(*truncs: Trunc) -> Trunc:
    return min(t[0] for t in truncs), min(t[1] for t in truncs)


def _exact(value: Any) -> Fraction:
    if isinstance(value, float):
        raise SeriesFormatError(f"Float coefficient {value!r}, use int, Fraction or p/q text")
    return Fraction(value)


class BiSeries:
    """Immutable truncated series in two variables.

    Coefficients of x^i y^j with i > Nx or j > Ny are unknown and never stored.
    """

    __slots__ = ("_coeffs", "_trunc")

    _coeffs: Terms
    _trunc: Trunc

    def __init__(
        self, coeffs: Mapping[Key, Scalar] | None = None, trunc: Trunc = (0, 0)
    ):
        nx, ny = int(trunc[0]), int(trunc[1])
        clean: Terms = {}
        for (i, j), value in (coeffs or {}).items():
            if i < 0 or j < 0:
                raise ValueError(f"Negative exponent ({i}, {j})")
            if i > nx or j > ny:
                continue
            value = _exact(value)
            if value:
                clean[(i, j)] = value
        object.__setattr__(self, "_coeffs", clean)
        object.__setattr__(self, "_trunc", (nx, ny))

    @classmethod
    def _raw(cls, coeffs: Terms, trunc: Trunc) -> "BiSeries":
        # coeffs already exact, nonzero and inside trunc
        series = cls.__new__(cls)
        object.__setattr__(series, "_coeffs", coeffs)
        object.__setattr__(series, "_trunc", trunc)
        return series

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("BiSeries is immutable")

    @property
    def trunc(self) -> Trunc:
        """Truncation bounds (Nx, Ny)."""
        return self._trunc

    @property
    def constant_term(self) -> Fraction:
        """Coefficient of x^0 y^0."""
        return self._coeffs.get((0, 0), Fraction(0))

    def coefficient(self, i: int, j: int) -> Fraction:
        """Get coefficient of x^i y^j."""
        if i > self._trunc[0] or j > self._trunc[1]:
            raise TruncationError(
                f"Coefficient ({i}, {j}) lies beyond truncation {self._trunc}"
            )
        return self._coeffs.get((i, j), Fraction(0))

    def __getitem__(self, key: Key) -> Fraction:
        return self.coefficient(*key)

    def terms(self) -> list[tuple[Key, Fraction]]:
        """Nonzero terms sorted by exponent."""
        return sorted(self._coeffs.items())

    def keys(self) -> Iterable[Key]:
        """Exponents of nonzero terms."""
        return self._coeffs.keys()

    def is_zero(self) -> bool:
        """True when no coefficient is stored."""
        return not self._coeffs

    def lowest_term(self) -> None | tuple[Key, Fraction]:
        """Nonzero term of least total degree, ties broken by exponent."""
        if not self._coeffs:
            return None
        key = min(self._coeffs, key=lambda k: (k[0] + k[1], k))
        return key, self._coeffs[key]

    def __len__(self) -> int:
        return len(self._coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BiSeries):
            return NotImplemented
        return self._trunc == other._trunc and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self._trunc, frozenset(self._coeffs.items())))

    def __repr__(self) -> str:
        shown = ", ".join(f"{k}: {v}" for k, v in self.terms()[:6])
        more = ", ..." if len(self._coeffs) > 6 else ""
        return f"BiSeries({{{shown}{more}}}, trunc={self._trunc})"

    def __add__(self, other: "BiSeries | Scalar") -> "BiSeries":
        if not isinstance(other, (BiSeries, int, Fraction)):
            return NotImplemented
        return add(self, _promote(other, self._trunc))

    __radd__ = __add__

    def __sub__(self, other: "BiSeries | Scalar") -> "BiSeries":
        if not isinstance(other, (BiSeries, int, Fraction)):
            return NotImplemented
        return add(self, neg(_promote(other, self._trunc)))

    def __rsub__(self, other: Scalar) -> "BiSeries":
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return add(_promote(other, self._trunc), neg(self))

    def __neg__(self) -> "BiSeries":
        return neg(self)

    def __mul__(self, other: "BiSeries | Scalar") -> "BiSeries":
        if isinstance(other, BiSeries):
            return mul(self, other)
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return scale(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "BiSeries":
        return scale(self, 1 / _exact(other))


def _promote(value: "BiSeries | Scalar", trunc: Trunc) -> BiSeries:
    if isinstance(value, BiSeries):
        return value
    return constant(value, trunc)


def zero(trunc: Trunc) -> BiSeries:
    """Zero series."""
    return BiSeries._raw({}, (trunc[0], trunc[1]))


def constant(value: Scalar, trunc: Trunc) -> BiSeries:
    """Constant series."""
    return BiSeries({(0, 0): value}, trunc)


def monomial(i: int, j: int, trunc: Trunc, coeff: Scalar = 1) -> BiSeries:
    """Series coeff * x^i y^j."""
    return BiSeries({(i, j): coeff}, trunc)


def variable(which: Variable, trunc: Trunc) -> BiSeries:
    """The series x or y."""
    return monomial(1, 0, trunc) if which == Variable.X else monomial(0, 1, trunc)


def truncate(a: BiSeries, trunc: Trunc) -> BiSeries:
    """Lower the truncation bounds; a must be at least that precise."""
    if a.trunc[0] < trunc[0] or a.trunc[1] < trunc[1]:
        raise TruncationError(f"Series known to {a.trunc}, {trunc} requested")
    if a.trunc == tuple(trunc):
        return a
    return restrict(a, trunc)


def restrict(a: BiSeries, trunc: Trunc) -> BiSeries:
    """Truncate to the common bounds of a.trunc and trunc."""
    nx, ny = _min_trunc(a.trunc, trunc)
    return BiSeries._raw(
        {k: v for k, v in a._coeffs.items() if k[0] <= nx and k[1] <= ny}, (nx, ny)
    )


def add(a: BiSeries, b: BiSeries) -> BiSeries:
    """Coefficientwise sum."""
    nx, ny = _min_trunc(a.trunc, b.trunc)
    result = {k: v for k, v in a._coeffs.items() if k[0] <= nx and k[1] <= ny}
    for key, value in b._coeffs.items():
        if key[0] <= nx and key[1] <= ny:
            total = result.get(key, 0) + value
            if total:
                result[key] = total
            else:
                result.pop(key, None)
    return BiSeries._raw(result, (nx, ny))


def neg(a: BiSeries) -> BiSeries:
    """Negation."""
    return BiSeries._raw({k: -v for k, v in a._coeffs.items()}, a.trunc)


def scale(a: BiSeries, factor: Scalar) -> BiSeries:
    """Multiply by a rational constant."""
    factor = _exact(factor)
    if not factor:
        return zero(a.trunc)
    return BiSeries._raw({k: v * factor for k, v in a._coeffs.items()}, a.trunc)


def _accumulate(
    acc: dict[Key, Fraction],
    left: Mapping[Key, Fraction],
    right: Mapping[Key, Fraction],
    nx: int,
    ny: int,
    factor: Scalar = 1,
) -> None:
    rows: dict[int, list[tuple[int, Fraction]]] = {}
    for (i2, j2), c2 in right.items():
        if i2 <= nx and j2 <= ny:
            rows.setdefault(j2, []).append((i2, c2))
    for row in rows.values():
        row.sort(key=lambda t: t[0])
    for (i1, j1), c1 in left.items():
        if i1 > nx or j1 > ny:
            continue
        if factor != 1:
            c1 = c1 * factor
        room = nx - i1
        for j2, row in rows.items():
            j = j1 + j2
            if j > ny:
                continue
            for i2, c2 in row:
                if i2 > room:
                    break
                key = (i1 + i2, j)
                acc[key] = acc.get(key, 0) + c1 * c2


def _clean(acc: Mapping[Key, Scalar]) -> Terms:
    return {k: Fraction(v) for k, v in acc.items() if v}


def mul(a: BiSeries, b: BiSeries) -> BiSeries:
    """Cauchy product truncated to the common bounds."""
    nx, ny = _min_trunc(a.trunc, b.trunc)
    if nx < 0 or ny < 0:
        return zero((nx, ny))
    acc: dict[Key, Fraction] = {}
    if len(a._coeffs) > len(b._coeffs):
        a, b = b, a
    _accumulate(acc, a._coeffs, b._coeffs, nx, ny)
    return BiSeries._raw(_clean(acc), (nx, ny))


def shift(a: BiSeries, i: int, j: int) -> BiSeries:
    """Multiply by the monomial x^i y^j; bounds grow accordingly."""
    return BiSeries._raw(
        {(p + i, q + j): v for (p, q), v in a._coeffs.items()},
        (a.trunc[0] + i, a.trunc[1] + j),
    )


def divide_by_monomial(a: BiSeries, i: int, j: int) -> BiSeries:
    """Exact division by x^i y^j."""
    for (p, q), value in a.terms():
        if p < i or q < j:
            raise DivisibilityError(
                f"Term {value}*x^{p}*y^{q} is not divisible by x^{i}*y^{j}"
            )
    return BiSeries._raw(
        {(p - i, q - j): v for (p, q), v in a._coeffs.items()},
        (a.trunc[0] - i, a.trunc[1] - j),
    )


def power(a: BiSeries, k: int) -> BiSeries:
    """a**k for k >= 0."""
    if k < 0:
        raise ValueError("Negative power, use reciprocal")
    result = constant(1, a.trunc)
    base = a
    while k:
        if k & 1:
            result = mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


def _graded(a: BiSeries, top: int) -> list[Terms]:
    grades: list[Terms] = [{} for _ in range(top + 1)]
    for (i, j), value in a._coeffs.items():
        grades[i + j][(i, j)] = value
    return grades


def _merge(grades: Iterable[Mapping[Key, Fraction]]) -> Terms:
    merged: Terms = {}
    for grade in grades:
        merged.update(grade)
    return merged


def exp_series(a: BiSeries) -> BiSeries:
    """Formal exponential; a must have zero constant term."""
    if a.constant_term:
        raise ConstantTermViolation(
            f"exp needs constant term 0, got {a.constant_term}"
        )
    nx, ny = a.trunc
    if nx < 0 or ny < 0:
        return a
    top = nx + ny
    grades = _graded(a, top)
    # Euler operator: d f_d = sum_k k a_k f_{d-k}
    f: list[Terms] = [{} for _ in range(top + 1)]
    f[0] = {(0, 0): Fraction(1)}
    for d in range(1, top + 1):
        acc: dict[Key, Fraction] = {}
        for k in range(1, d + 1):
            if grades[k] and f[d - k]:
                _accumulate(acc, grades[k], f[d - k], nx, ny, k)
        f[d] = {key: v / d for key, v in acc.items() if v}
    return BiSeries._raw(_merge(f), a.trunc)


def log_series(a: BiSeries) -> BiSeries:
    """Formal logarithm; a must have constant term 1."""
    if a.constant_term != 1:
        raise ConstantTermViolation(
            f"log needs constant term 1, got {a.constant_term}"
        )
    nx, ny = a.trunc
    top = nx + ny
    grades = _graded(a, top)
    b: list[Terms] = [{} for _ in range(top + 1)]
    for d in range(1, top + 1):
        acc: dict[Key, Fraction] = {}
        for k in range(1, d):
            if b[k] and grades[d - k]:
                _accumulate(acc, b[k], grades[d - k], nx, ny, k)
        grade = dict(grades[d])
        for key, value in acc.items():
            grade[key] = grade.get(key, 0) - value / d
        b[d] = _clean(grade)
    return BiSeries._raw(_merge(b), a.trunc)


def reciprocal(a: BiSeries) -> BiSeries:
    """Multiplicative inverse; a must have a nonzero constant term."""
    c = a.constant_term
    if not c:
        raise ConstantTermViolation("reciprocal needs a nonzero constant term")
    nx, ny = a.trunc
    if nx < 0 or ny < 0:
        return a
    top = nx + ny
    grades = _graded(a, top)
    g: list[Terms] = [{} for _ in range(top + 1)]
    g[0] = {(0, 0): 1 / c}
    for d in range(1, top + 1):
        acc: dict[Key, Fraction] = {}
        for k in range(1, d + 1):
            if grades[k] and g[d - k]:
                _accumulate(acc, grades[k], g[d - k], nx, ny)
        g[d] = {key: -v / c for key, v in acc.items() if v}
    return BiSeries._raw(_merge(g), a.trunc)


def exp_at_least(a: BiSeries, k: int) -> BiSeries:
    """exp(a) minus its first k Taylor terms."""
    result = exp_series(a)
    term = constant(1, a.trunc)
    for i in range(k):
        result = result - term
        term = scale(mul(term, a), Fraction(1, i + 1))
    return result


def loga_at_least(a: BiSeries, k: int) -> BiSeries:
    """log(1/(1-a)) minus the terms a^i/i for i < k."""
    result = neg(log_series(1 - a))
    term = a
    for i in range(1, k):
        result = result - scale(term, Fraction(1, i))
        term = mul(term, a)
    return result


def derivative(
    a: BiSeries, which: Variable = Variable.X, rooted: bool = False
) -> BiSeries:
    """Partial derivative; rooted gives (2/x^2) d/dy."""
    if rooted:
        return scale(divide_by_monomial(derivative(a, Variable.Y), 2, 0), 2)
    if which == Variable.X:
        return BiSeries._raw(
            {(i - 1, j): v * i for (i, j), v in a._coeffs.items() if i},
            (a.trunc[0] - 1, a.trunc[1]),
        )
    return BiSeries._raw(
        {(i, j - 1): v * j for (i, j), v in a._coeffs.items() if j},
        (a.trunc[0], a.trunc[1] - 1),
    )


def euler_derivative(a: BiSeries, which: Variable = Variable.X) -> BiSeries:
    """x d/dx (or y d/dy); keeps the bounds."""
    index = int(which)
    return BiSeries._raw(
        {k: v * k[index] for k, v in a._coeffs.items() if k[index]}, a.trunc
    )


def _powers(p: BiSeries, needed: int, trunc: Trunc) -> tuple[list[BiSeries], bool]:
    """p^0..p^needed restricted to trunc; flag tells if p^needed vanished."""
    base = restrict(p, trunc)
    result = [constant(1, trunc)]
    for _ in range(needed):
        if result[-1].is_zero():
            return result, True
        result.append(mul(result[-1], base))
    return result, result[-1].is_zero()


def substitute(
    a: BiSeries, px: BiSeries, py: BiSeries, trunc: Trunc | None = None
) -> BiSeries:
    """Compose a(px, py).

    The result is known up to the common bounds of px, py (and trunc). Every
    coefficient must depend only on known coefficients of a, which holds when
    px^(Nx+1) and py^(Ny+1) vanish at those bounds.
    """
    bounds = _min_trunc(px.trunc, py.trunc, *([trunc] if trunc else []))
    if bounds[0] < 0 or bounds[1] < 0:
        return zero(bounds)
    na_x, na_y = a.trunc
    x_powers, x_ok = _powers(px, na_x + 1, bounds)
    y_powers, y_ok = _powers(py, na_y + 1, bounds)
    if not (x_ok and y_ok):
        raise ValuationError(
            f"Substitution into a series known to {a.trunc} is not determined at {bounds}"
        )
    rows: dict[int, dict[int, Fraction]] = {}
    for (i, j), value in a._coeffs.items():
        rows.setdefault(i, {})[j] = value
    result = zero(bounds)
    for i, row in sorted(rows.items()):
        if i >= len(x_powers) or x_powers[i].is_zero():
            continue
        inner: dict[Key, Fraction] = {}
        for j, value in row.items():
            if j >= len(y_powers):
                continue
            for key, c in y_powers[j]._coeffs.items():
                inner[key] = inner.get(key, 0) + value * c
        if inner:
            result = add(result, mul(x_powers[i], BiSeries._raw(_clean(inner), bounds)))
    return result


def swap_variables(a: BiSeries) -> BiSeries:
    """Exchange the roles of x and y."""
    return BiSeries._raw(
        {(j, i): v for (i, j), v in a._coeffs.items()}, (a.trunc[1], a.trunc[0])
    )


def reflect(a: BiSeries) -> BiSeries:
    """Change of variables (x, y) -> (1/x, xy), i.e. x^i y^j -> x^(j-i) y^j."""
    bound = min(a.trunc)
    result: Terms = {}
    for (i, j), value in a._coeffs.items():
        if i > j:
            raise ValuationError(f"Term x^{i}*y^{j} has no image under (1/x, xy)")
        if j <= bound:
            result[(j - i, j)] = value
    return BiSeries._raw(result, (bound, bound))


def spread_even(a: BiSeries) -> BiSeries:
    """Regrade y -> s^2."""
    return BiSeries._raw(
        {(i, 2 * j): v for (i, j), v in a._coeffs.items()},
        (a.trunc[0], 2 * a.trunc[1] + 1),
    )


def compress_even(a: BiSeries) -> BiSeries:
    """Regrade s^2 -> y; a must be even in its second variable."""
    for (i, j), value in a.terms():
        if j % 2:
            raise DivisibilityError(f"Odd term {value}*x^{i}*s^{j}")
    return BiSeries._raw(
        {(i, j // 2): v for (i, j), v in a._coeffs.items()},
        (a.trunc[0], a.trunc[1] // 2),
    )


def is_even(a: BiSeries, which: Variable = Variable.Y) -> bool:
    """True when every exponent of the variable is even."""
    return all(key[int(which)] % 2 == 0 for key in a.keys())


def first_difference(
    a: BiSeries, b: BiSeries
) -> None | tuple[Key, Fraction, Fraction]:
    """First coefficient where a and b differ within their common bounds."""
    nx, ny = _min_trunc(a.trunc, b.trunc)
    for key in sorted(set(a.keys()) | set(b.keys())):
        if key[0] <= nx and key[1] <= ny:
            left = a._coeffs.get(key, Fraction(0))
            right = b._coeffs.get(key, Fraction(0))
            if left != right:
                return key, left, right
    return None


def agree(a: BiSeries, b: BiSeries) -> bool:
    """Equality within the common bounds."""
    return first_difference(a, b) is None


def to_json(a: BiSeries) -> dict[str, Any]:
    """Convert to the JSON object layout."""
    return {
        "trunc": [a.trunc[0], a.trunc[1]],
        "terms": [[i, j, format_fraction(v)] for (i, j), v in a.terms()],
    }


def from_json(data: Mapping[str, Any]) -> BiSeries:
    """Build from the JSON object layout."""
    try:
        nx, ny = (int(v) for v in data["trunc"])
        coeffs: dict[Key, Fraction] = {}
        for i, j, text in data["terms"]:
            if (int(i), int(j)) in coeffs:
                raise SeriesFormatError(f"Duplicate term ({i}, {j})")
            coeffs[(int(i), int(j))] = parse_fraction(str(text))
    except SeriesFormatError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise SeriesFormatError(f"Malformed series: {e}") from e
    if any(i > nx or j > ny or i < 0 or j < 0 for i, j in coeffs):
        raise SeriesFormatError("Term outside truncation bounds")
    return BiSeries(coeffs, (nx, ny))


def dumps(a: BiSeries) -> str:
    """Serialize to JSON text."""
    return json.dumps(to_json(a), sort_keys=True)


def loads(text: str) -> BiSeries:
    """Parse JSON text."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SeriesFormatError(f"Invalid JSON: {e}") from e
    return from_json(data)


Value = Union[BiSeries, Fraction]


class Expr:
    """Expression over unknown and known series."""

    def evaluate(self, env: Mapping[str, BiSeries]) -> Value:
        """Evaluate with the given approximants."""
        raise NotImplementedError

    def names(self) -> frozenset[str]:
        """Unknowns referenced."""
        raise NotImplementedError

    def __add__(self, other: "Expr | Scalar | BiSeries") -> "Expr":
        return Add(self, wrap(other))

    def __radd__(self, other: "Scalar | BiSeries") -> "Expr":
        return Add(wrap(other), self)

    def __sub__(self, other: "Expr | Scalar | BiSeries") -> "Expr":
        return Add(self, Neg(wrap(other)))

    def __rsub__(self, other: "Scalar | BiSeries") -> "Expr":
        return Add(wrap(other), Neg(self))

    def __mul__(self, other: "Expr | Scalar | BiSeries") -> "Expr":
        return Mul(self, wrap(other))

    def __rmul__(self, other: "Scalar | BiSeries") -> "Expr":
        return Mul(wrap(other), self)

    def __neg__(self) -> "Expr":
        return Neg(self)


def wrap(value: "Expr | Scalar | BiSeries") -> Expr:
    """Lift constants and series into expressions."""
    if isinstance(value, Expr):
        return value
    if isinstance(value, BiSeries):
        return Known(value)
    return Const(_exact(value))


def _as_series(value: Value, like: Value) -> BiSeries:
    if isinstance(value, BiSeries):
        return value
    if isinstance(like, BiSeries):
        return constant(value, like.trunc)
    raise InvalidSystem("Constant expression has no truncation")


@dataclasses.dataclass(frozen=True, eq=False)
class Unknown(Expr):
    """Reference to an unknown series."""

    name: str

    def evaluate(self, env: Mapping[str, BiSeries]) -> Value:
        return env[self.name]

    def names(self) -> frozenset[str]:
        return frozenset([self.name])


@dataclasses.dataclass(frozen=True, eq=False)
class Known(Expr):
    """A fixed series."""

    series: BiSeries

    def evaluate(self, env: Mapping[str, BiSeries]) -> Value:
        return self.series

    def names(self) -> frozenset[str]:
        return frozenset()


@dataclasses.dataclass(frozen=True, eq=False)
class Const(Expr):
    """A rational constant."""

    value: Fraction

    def evaluate(self, env: Mapping[str, BiSeries]) -> Value:
        return self.value

    def names(self) -> frozenset[str]:
        return frozenset()


@dataclasses.dataclass(frozen=True, eq=False)
class Add(Expr):
    left: Expr
    right: Expr

    def evaluate(self, env: Mapping[str, BiSeries]) -> Value:
        left, right = self.left.evaluate(env), self.right.evaluate(env)
        if isinstance(left, BiSeries) or isinstance(right, BiSeries):
            return add(_as_series(left, right), _as_series(right, left))
        return left + right

    def names(self) -> frozenset[str]:
        return self.left.names() | self.right.names()


@dataclasses.dataclass(frozen=True, eq=False)
class Mul(Expr):
    left: Expr
    right: Expr

    def evaluate(self, env: Mapping[str, BiSeries]) -> Value:
        left, right = self.left.evaluate(env), self.right.evaluate(env)
        if isinstance(left, BiSeries) and isinstance(right, BiSeries):
            return mul(left, right)
        if isinstance(left, BiSeries):
            return scale(left, right)
        if isinstance(right, BiSeries):
            return scale(right, left)
        return left * right

    def names(self) -> frozenset[str]:
        return self.left.names() | self.right.names()


@dataclasses.dataclass(frozen=True, eq=False)
class Neg(Expr):
    operand: Expr

    def evaluate(self, env: Mapping[str, BiSeries]) -> Value:
        value = self.operand.evaluate(env)
        return neg(value) if isinstance(value, BiSeries) else -value

    def names(self) -> frozenset[str]:
        return self.operand.names()


@dataclasses.dataclass(frozen=True, eq=False)
class Apply(Expr):
    """Apply a series function (exp, log, substitution, ...) to operands."""

    func: Callable[..., BiSeries]
    operands: tuple[Expr, ...]
    label: str = ""

    def evaluate(self, env: Mapping[str, BiSeries]) -> Value:
        values = [operand.evaluate(env) for operand in self.operands]
        series = next((v for v in values if isinstance(v, BiSeries)), None)
        if series is None:
            raise InvalidSystem(f"{self.label or 'Apply'} needs a series operand")
        return self.func(*(_as_series(v, series) for v in values))

    def names(self) -> frozenset[str]:
        result: frozenset[str] = frozenset()
        for operand in self.operands:
            result |= operand.names()
        return result


def apply(func: Callable[..., BiSeries], *operands: "Expr | BiSeries | Scalar", label: str = "") -> Expr:
    """Build an Apply node."""
    return Apply(func, tuple(wrap(o) for o in operands), label or func.__name__)


def exp_of(operand: "Expr | BiSeries") -> Expr:
    """exp node."""
    return apply(exp_series, operand, label="exp")


def log_of(operand: "Expr | BiSeries") -> Expr:
    """log node."""
    return apply(log_series, operand, label="log")


def substitute_into(
    a: BiSeries, px: "Expr | BiSeries", py: "Expr | BiSeries"
) -> Expr:
    """Node for a(px, py)."""
    return apply(lambda x, y: substitute(a, x, y), px, py, label="substitute")


@dataclasses.dataclass(frozen=True)
class SeriesSystem:
    """Unknowns with one defining equation each."""

    unknowns: tuple[str, ...]
    equations: tuple[Expr, ...]

    def __post_init__(self) -> None:
        if len(self.unknowns) != len(self.equations):
            raise InvalidSystem("Each unknown needs exactly one equation")
        if len(set(self.unknowns)) != len(self.unknowns):
            raise InvalidSystem("Unknown declared twice")
        declared = set(self.unknowns)
        for name, equation in zip(self.unknowns, self.equations):
            undeclared = equation.names() - declared
            if undeclared:
                raise InvalidSystem(
                    f"Equation for {name} references undeclared {sorted(undeclared)}"
                )

    @classmethod
    def from_mapping(cls, equations: Mapping[str, Expr]) -> "SeriesSystem":
        """Build from an ordered name -> equation mapping."""
        return cls(tuple(equations), tuple(equations.values()))


def solve_fixed_point(
    system: SeriesSystem,
    trunc: Trunc,
    initial: Mapping[str, BiSeries] | None = None,
) -> dict[str, BiSeries]:
    """Solve by Gauss-Seidel iteration from zero (or the given approximants)."""
    current: dict[str, BiSeries] = {}
    for name in system.unknowns:
        start = (initial or {}).get(name)
        current[name] = (
            BiSeries(dict(start.terms()), trunc) if start is not None else zero(trunc)
        )
    if not system.unknowns:
        return current
    rounds = max(trunc[0], 0) + max(trunc[1], 0) + 2
    for round_ in range(1, rounds + 1):
        changed = False
        for name, equation in zip(system.unknowns, system.equations):
            value = equation.evaluate(current)
            if not isinstance(value, BiSeries):
                value = constant(value, trunc)
            value = truncate(value, trunc)
            if value != current[name]:
                changed = True
                current[name] = value
        if not changed:
            _LOGGER.debug(
                f"System {','.join(system.unknowns)} converged at {trunc} after {round_} rounds"
            )
            return current
    raise NonContractive(
        f"System {','.join(system.unknowns)} did not converge in {rounds} rounds at {trunc}"
    )
