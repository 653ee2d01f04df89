"""Exact coefficient fields.

Every numeric coefficient in the package lives in a ``ScalarField``: the
Gaussian rationals ``QQ_I`` or, in extended mode, the field of rational
functions over ``QQ_I`` in a fixed tuple of formal (real) variables. Elements
are sympy domain elements, so equality of canonical representatives is exact.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Mapping, Sequence

import sympy
from sympy import I, Rational, Symbol, expand, sympify
from sympy.polys.domains import QQ_I
from sympy.polys.polyerrors import CoercionFailed

from gencomplex.services.exceptions import ParseError

Scalar = Any


class ScalarField:
    """Gaussian rationals, optionally extended by formal real variables."""

    __slots__ = ("variables", "symbols", "domain", "_is_extended")

    def __init__(self, variables: Sequence[str] = ()):
        self.variables: tuple[str, ...] = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ParseError(f"duplicate formal variables: {self.variables}")
        self.symbols: tuple[Symbol, ...] = tuple(Symbol(name, real=True) for name in self.variables)
        self._is_extended = bool(self.symbols)
        self.domain = QQ_I.frac_field(*self.symbols) if self._is_extended else QQ_I

    def __repr__(self) -> str:
        return f"ScalarField({list(self.variables)!r})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ScalarField) and other.variables == self.variables

    def __hash__(self) -> int:
        return hash(("ScalarField", self.variables))

    @property
    def is_extended(self) -> bool:
        return self._is_extended

    @property
    def zero(self) -> Scalar:
        return self.domain.zero

    @property
    def one(self) -> Scalar:
        return self.domain.one

    @property
    def imag_unit(self) -> Scalar:
        return self.convert(QQ_I(0, 1))

    def extend(self, variables: Iterable[str]) -> "ScalarField":
        merged = list(self.variables)
        for name in variables:
            if name not in merged:
                merged.append(name)
        return ScalarField(merged)

    # conversion ---------------------------------------------------------

    def convert(self, value: Any) -> Scalar:
        """Bring ints, Fractions, sympy numbers/expressions or QQ_I elements into the field."""
        domain = self.domain
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return domain.convert(value)
        if isinstance(value, Fraction):
            return domain.convert(QQ_I(Rational(value.numerator, value.denominator)))
        if isinstance(value, complex):
            raise ParseError("floating point coefficients are not supported")
        if isinstance(value, float):
            raise ParseError("floating point coefficients are not supported")
        try:
            if domain.of_type(value):
                return value
        except TypeError:
            pass
        if QQ_I.of_type(value):
            return domain.convert_from(value, QQ_I) if self._is_extended else value
        if isinstance(value, sympy.Basic):
            return self.from_sympy(value)
        try:
            return domain.convert(value)
        except CoercionFailed as exc:
            raise ParseError(f"cannot interpret {value!r} as a scalar") from exc

    def gaussian(self, re: Fraction | int, im: Fraction | int = 0) -> Scalar:
        re, im = Fraction(re), Fraction(im)
        value = QQ_I(Rational(re.numerator, re.denominator), Rational(im.numerator, im.denominator))
        return self.convert(value)

    def from_sympy(self, expr: sympy.Basic) -> Scalar:
        expr = expand(expr)
        try:
            if not self._is_extended:
                return QQ_I.from_sympy(expr)
            return self.domain.from_sympy(expr)
        except (CoercionFailed, ValueError, ZeroDivisionError, TypeError) as exc:
            raise ParseError(f"{expr} is not an element of {self.describe()}") from exc

    def parse(self, text: str, *, position: int | None = None) -> Scalar:
        """Parse a sympy-syntax scalar such as ``x1 + I*x2`` or ``1/(1+x1**2)``."""
        local = {name: symbol for name, symbol in zip(self.variables, self.symbols)}
        local["I"] = I
        local["i"] = I
        try:
            expr = sympify(text, locals=local)
        except (sympy.SympifyError, SyntaxError, TypeError) as exc:
            raise ParseError(f"invalid scalar expression {text!r}", position=position, text=text) from exc
        stray = {str(sym) for sym in expr.free_symbols} - set(self.variables)
        if stray:
            raise ParseError(
                f"undeclared formal variables {sorted(stray)} in {text!r}", position=position, text=text
            )
        return self.from_sympy(expr)

    def to_sympy(self, a: Scalar) -> sympy.Expr:
        return self.domain.to_sympy(a)

    def describe(self) -> str:
        if not self._is_extended:
            return "QQ(i)"
        return f"QQ(i)({', '.join(self.variables)})"

    # structure ----------------------------------------------------------

    def is_zero(self, a: Scalar) -> bool:
        return not a

    def is_constant(self, a: Scalar) -> bool:
        if not self._is_extended:
            return True
        return a.numer.is_ground and a.denom.is_ground

    def constant_value(self, a: Scalar):
        """Return the QQ_I value of a constant element."""
        if not self._is_extended:
            return a
        if not self.is_constant(a):
            raise ValueError("element is not constant")
        return QQ_I.convert(a.numer.LC) / QQ_I.convert(a.denom.LC)

    def parts(self, a: Scalar) -> tuple[Fraction, Fraction]:
        """Real and imaginary parts of a constant element as Fractions."""
        value = self.constant_value(a)
        return _to_fraction(value.x), _to_fraction(value.y)

    def conjugate(self, a: Scalar) -> Scalar:
        if not self._is_extended:
            return _conj_gaussian(a)
        field = self.domain.field
        ring = field.ring
        numer = ring.from_dict({monom: _conj_gaussian(QQ_I.convert(c)) for monom, c in a.numer.items()})
        denom = ring.from_dict({monom: _conj_gaussian(QQ_I.convert(c)) for monom, c in a.denom.items()})
        return field.new(numer, denom)

    def is_real(self, a: Scalar) -> bool:
        return not (self.conjugate(a) - a)

    def derivative(self, a: Scalar, variable: int) -> Scalar:
        """Partial derivative in the ``variable``-th formal variable."""
        if not self._is_extended:
            return self.zero
        return a.diff(self.domain.gens[variable])

    def numerator_expr(self, a: Scalar) -> sympy.Expr:
        if not self._is_extended:
            return self.to_sympy(a)
        return a.numer.as_expr()

    def evaluate(self, a: Scalar, values: Mapping[str, Fraction]) -> Any:
        """Substitute rationals for formal variables; returns a QQ_I element."""
        if not self._is_extended:
            return a
        substitutions = {
            symbol: Rational(Fraction(values[name]).numerator, Fraction(values[name]).denominator)
            for name, symbol in zip(self.variables, self.symbols)
            if name in values
        }
        expr = self.to_sympy(a).subs(substitutions)
        if expr.free_symbols:
            raise ValueError(f"missing values for {sorted(str(s) for s in expr.free_symbols)}")
        if expr.has(sympy.zoo, sympy.nan):
            raise ZeroDivisionError("evaluation hits a pole")
        return QQ_I.from_sympy(expand(expr))

    def format(self, a: Scalar) -> str:
        return str(self.to_sympy(a))


def _conj_gaussian(value):
    return QQ_I.new(value.x, -value.y)


def _to_fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


@lru_cache(maxsize=None)
def gaussian_field() -> ScalarField:
    """The shared constant field QQ(i)."""
    return ScalarField()
