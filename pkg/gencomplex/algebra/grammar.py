"""Form shorthand: parsing and printing.

Grammar (spaces are ignored)::

    expr    := [+|-] term {(+|-) term}
    term    := [coeff (*|/...)] factor {[*] factor}
    factor  := DIGITS | [k] | i | #p[/q] | (expr) | exp(expr) | {sympy}

A run of digits is a wedge of generators (``145`` is e1∧e4∧e5); ``[10]`` is
the generator e10. ``0`` alone is the zero form. Juxtaposition and ``*`` both
mean wedge, so ``(1+i2)(4+i5)`` is (e1+ie2)∧(e4+ie5). A number at the start of
a term followed by ``*`` or ``/`` is a coefficient, not a monomial: ``2*34``
is 2·e34 and ``1/2*12`` is ½·e12 (so ``12*34`` also reads 12·e34; write
``12 34`` or ``1234`` for the wedge). ``#p/q`` is always a rational literal and
``{...}`` holds a scalar in sympy syntax over the declared formal variables.
``exp`` needs an argument without scalar part.

Printing produces strings in the same grammar, so every printed form reparses
to an equal form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from gencomplex.algebra.exterior import Form, GenVector, Multivector, all_masks, indices_of
from gencomplex.algebra.scalars import Scalar, ScalarField, gaussian_field
from gencomplex.services.exceptions import ParseError


@dataclass(frozen=True)
class Token:
    kind: str
    value: object
    position: int


_SINGLE = {"(": "LPAREN", ")": "RPAREN", "+": "PLUS", "-": "MINUS", "*": "STAR", "/": "SLASH", ",": "COMMA"}


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    position = 0
    length = len(text)
    while position < length:
        char = text[position]
        if char.isspace():
            position += 1
            continue
        if char.isdigit():
            start = position
            while position < length and text[position].isdigit():
                position += 1
            tokens.append(Token("NUM", text[start:position], start))
            continue
        if char == "[":
            end = text.find("]", position)
            body = text[position + 1 : end] if end != -1 else ""
            if end == -1 or not body.strip().isdigit():
                raise ParseError("malformed bracketed index", position=position, text=text)
            tokens.append(Token("INDEX", int(body), position))
            position = end + 1
            continue
        if char == "#":
            match = re.compile(r"#\s*(\d+)(?:\s*/\s*(\d+))?").match(text, position)
            if not match:
                raise ParseError("malformed rational literal", position=position, text=text)
            numerator = int(match.group(1))
            denominator = int(match.group(2)) if match.group(2) else 1
            if denominator == 0:
                raise ParseError("zero denominator", position=position, text=text)
            tokens.append(Token("LITERAL", Fraction(numerator, denominator), position))
            position = match.end()
            continue
        if char == "{":
            depth, end = 0, position
            while end < length:
                if text[end] == "{":
                    depth += 1
                elif text[end] == "}":
                    depth -= 1
                    if depth == 0:
                        break
                end += 1
            if end >= length:
                raise ParseError("unbalanced '{'", position=position, text=text)
            tokens.append(Token("SCALAR", text[position + 1 : end], position))
            position = end + 1
            continue
        if text.startswith("exp", position):
            tokens.append(Token("EXP", "exp", position))
            position += 3
            continue
        if char == "i":
            tokens.append(Token("IMAG", "i", position))
            position += 1
            continue
        if char in _SINGLE:
            tokens.append(Token(_SINGLE[char], char, position))
            position += 1
            continue
        raise ParseError(f"unexpected character {char!r}", position=position, text=text)
    tokens.append(Token("END", None, length))
    return tokens


class _FormParser:
    def __init__(self, text: str, n: int, field: ScalarField):
        self.text = text
        self.n = n
        self.field = field
        self.tokens = tokenize(text)
        self.index = 0

    # token helpers --------------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def take(self, kind: str | None = None) -> Token:
        token = self.peek()
        if kind is not None and token.kind != kind:
            raise ParseError(f"expected {kind}, found {token.kind}", position=token.position, text=self.text)
        self.index += 1
        return token

    def error(self, message: str, token: Token | None = None) -> ParseError:
        token = token or self.peek()
        return ParseError(message, position=token.position, text=self.text)

    # grammar ----------------------------------------------------------

    def parse(self) -> Form:
        form = self.expr()
        if self.peek().kind != "END":
            raise self.error(f"unexpected {self.peek().kind}")
        return form

    def expr(self) -> Form:
        sign = 1
        if self.peek().kind in ("PLUS", "MINUS"):
            sign = -1 if self.take().kind == "MINUS" else 1
        total = self.term().scale(sign)
        while self.peek().kind in ("PLUS", "MINUS"):
            sign = -1 if self.take().kind == "MINUS" else 1
            total = total + self.term().scale(sign)
        return total

    def term(self) -> Form:
        coefficient = self.leading_coefficient()
        factors = [self.factor()]
        while True:
            kind = self.peek().kind
            if kind == "STAR":
                self.take()
                factors.append(self.factor())
            elif kind in ("NUM", "INDEX", "IMAG", "LITERAL", "LPAREN", "EXP", "SCALAR"):
                factors.append(self.factor())
            else:
                break
        result = factors[0]
        for factor in factors[1:]:
            result = result.wedge(factor)
        if coefficient is not None:
            result = result.scale(coefficient)
        return result

    def leading_coefficient(self) -> Scalar | None:
        token = self.peek()
        if token.kind != "NUM":
            return None
        following = self.peek(1).kind
        if following == "SLASH":
            self.take()
            self.take("SLASH")
            denominator = self.take("NUM")
            if int(denominator.value) == 0:
                raise self.error("zero denominator", denominator)
            value = Fraction(int(token.value), int(denominator.value))
            if self.peek().kind == "STAR":
                self.take()
            return self.field.convert(value)
        if following == "STAR":
            self.take()
            self.take("STAR")
            return self.field.convert(int(token.value))
        return None

    def factor(self) -> Form:
        token = self.take()
        kind = token.kind
        if kind == "NUM":
            return self.monomial(token)
        if kind == "INDEX":
            return self.generator(token.value, token)
        if kind == "IMAG":
            return Form.scalar(self.n, self.field, self.field.imag_unit)
        if kind == "LITERAL":
            return Form.scalar(self.n, self.field, token.value)
        if kind == "SCALAR":
            return Form.scalar(self.n, self.field, self.field.parse(token.value, position=token.position))
        if kind == "LPAREN":
            inner = self.expr()
            self.take("RPAREN")
            return inner
        if kind == "EXP":
            self.take("LPAREN")
            inner = self.expr()
            self.take("RPAREN")
            if inner.coefficient(0):
                raise self.error("exp needs an argument without scalar part", token)
            return inner.exp()
        raise self.error(f"unexpected {kind}", token)

    def monomial(self, token: Token) -> Form:
        digits = str(token.value)
        if digits == "0":
            return Form.zero(self.n, self.field)
        result = Form.one(self.n, self.field)
        for digit in digits:
            result = result.wedge(self.generator(int(digit), token))
        return result

    def generator(self, index: int, token: Token) -> Form:
        if not 1 <= index <= self.n:
            raise self.error(f"generator index {index} outside 1..{self.n}", token)
        return Form.generator(self.n, self.field, index)


def parse_form(text: str, n: int, field: ScalarField | None = None) -> Form:
    """Parse the shorthand into a Form on ``n`` generators."""
    if not text or not text.strip():
        raise ParseError("empty form", position=0, text=text)
    return _FormParser(text, n, field or gaussian_field()).parse()


def parse_multivector(text: str, n: int, field: ScalarField | None = None) -> Multivector:
    """Same grammar; digit runs name ∂-indices instead of e-indices."""
    return Multivector.from_form(parse_form(text, n, field))


# printing -----------------------------------------------------------------------


def _format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return f"#{value.numerator}"
    return f"#{value.numerator}/{value.denominator}"


def format_scalar(field: ScalarField, value: Scalar) -> str:
    """A scalar as a standalone term of the grammar."""
    return _format_term(field, value, "")


def _digits(mask: int) -> str:
    return "".join(str(k) if k < 10 else f"[{k}]" for k in indices_of(mask))


def _format_term(field: ScalarField, value: Scalar, digits: str) -> str:
    if not field.is_constant(value):
        text = "{" + field.format(value) + "}"
        return f"{text}*{digits}" if digits else text
    re_part, im_part = field.parts(value)
    if not im_part:
        if not digits:
            sign = "-" if re_part < 0 else ""
            return sign + _format_fraction(abs(re_part))
        if re_part == 1:
            return digits
        if re_part == -1:
            return "-" + digits
        sign = "-" if re_part < 0 else ""
        return f"{sign}{_format_fraction(abs(re_part))}*{digits}"
    if not re_part:
        sign = "-" if im_part < 0 else ""
        magnitude = abs(im_part)
        if magnitude == 1:
            return f"{sign}i{digits}"
        tail = f"*{digits}" if digits else ""
        return f"{sign}i{_format_fraction(magnitude)}{tail}"
    real_text = ("-" if re_part < 0 else "") + _format_fraction(abs(re_part))
    imag_sign = "-" if im_part < 0 else "+"
    imag_text = "i" if abs(im_part) == 1 else "i" + _format_fraction(abs(im_part))
    inner = f"({real_text}{imag_sign}{imag_text})"
    return f"{inner}*{digits}" if digits else inner


def format_form(form: Form) -> str:
    if not form:
        return "0"
    pieces: list[str] = []
    for mask in all_masks(form.n):
        value = form.coefficient(mask)
        if not value:
            continue
        term = _format_term(form.field, value, _digits(mask))
        if pieces and not term.startswith("-"):
            pieces.append("+")
        pieces.append(term)
    return "".join(pieces)


def format_multivector(multivector: Multivector) -> str:
    return format_form(multivector.as_form())


def format_genvector(vector: GenVector) -> str:
    return f"X={format_multivector(vector.vector_field())}; xi={format_form(vector.covector_form())}"


# tuples and table notation --------------------------------------------------------


def split_tuple(text: str) -> list[str]:
    """Split ``(a,b,...)`` at top-level commas."""
    stripped = text.strip()
    if stripped.startswith("($0"):
        # transcription slip for "(0"
        stripped = "(" + stripped[2:]
    if not (stripped.startswith("(") and stripped.endswith(")")):
        raise ParseError("an algebra tuple must be enclosed in parentheses", position=0, text=text)
    body = stripped[1:-1]
    entries: list[str] = []
    depth = 0
    current = []
    for char in body:
        if char in "({[":
            depth += 1
        elif char in ")}]":
            depth -= 1
        if char == "," and depth == 0:
            entries.append("".join(current).strip())
            current = []
        else:
            current.append(char)
    entries.append("".join(current).strip())
    if any(not entry for entry in entries):
        raise ParseError("empty entry in algebra tuple", position=0, text=text)
    return entries


_EXP_BARE = re.compile(r"exp\s+(i?)\s*\(")
_DIGIT_RUN = re.compile(r"\d+")


def normalize_table_notation(text: str) -> str:
    """Rewrite typeset table entries into the grammar.

    ``exp i(36-45)`` becomes ``exp(i(36-45))``, ``2\\times`` becomes ``2*`` and
    ``exp(3+i1)6`` (a factor written after the parenthesis) becomes ``exp((3+i1)6)``.
    """
    normalized = text.replace("\\exp", "exp").replace("\\times", "*").replace("×", "*").replace("$", "")
    normalized = normalized.strip()
    normalized = _normalize_exp_bare(normalized)
    normalized = _normalize_exp_suffix(normalized)
    return normalized


def _normalize_exp_bare(text: str) -> str:
    while True:
        match = _EXP_BARE.search(text)
        if not match:
            return text
        start = match.end() - 1
        end = _matching_paren(text, start)
        prefix = match.group(1)
        text = text[: match.start()] + "exp(" + prefix + text[start : end + 1] + ")" + text[end + 1 :]


def _normalize_exp_suffix(text: str) -> str:
    out = []
    position = 0
    while True:
        found = text.find("exp(", position)
        if found == -1:
            out.append(text[position:])
            return "".join(out)
        start = found + 3
        end = _matching_paren(text, start)
        tail = _DIGIT_RUN.match(text, end + 1)
        inner = text[start + 1 : end]
        if tail and _is_one_form_text(inner):
            out.append(text[position:found])
            out.append(f"exp(({inner}){tail.group(0)})")
            position = tail.end()
        else:
            out.append(text[position : end + 1])
            position = end + 1


def _is_one_form_text(inner: str) -> bool:
    """Only single generators inside, so a trailing digit run is a wedge factor."""
    runs = _DIGIT_RUN.findall(inner)
    return bool(runs) and all(len(run) == 1 for run in runs)


def _matching_paren(text: str, start: int) -> int:
    depth = 0
    for position in range(start, len(text)):
        if text[position] == "(":
            depth += 1
        elif text[position] == ")":
            depth -= 1
            if depth == 0:
                return position
    raise ParseError("unbalanced parentheses", position=start, text=text)
