"""Recursive-descent parser for series and polynomial literals.

Grammar (whitespace allowed between tokens)::

    series   := [sign] term (sign term)*
    term     := rational ('*' power)* | power ('*' power)*
    power    := gen ('^' uint)?
    gen      := LETTER uint          (1-based index)
    rational := int ('/' uint)?

Series use the letter ``g``; base polynomials use ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError
from .gseries import GradedSeries, normalize_monomial


@dataclass
class ParsedTerm:
    coefficient: Fraction
    word: list  # (0-based generator index, exponent) in written order


@dataclass
class ParseResult:
    value: object
    notes: list = field(default_factory=list)


class _Parser:
    def __init__(self, text: str, letter: str):
        self.text = text
        self.letter = letter
        self.pos = 0

    def offset(self) -> int:
        return len(self.text[: self.pos].encode("utf-8"))

    def error(self, message):
        raise ParseError(message, self.offset())

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def uint(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected an unsigned integer")
        return int(self.text[start:self.pos])

    def rational(self) -> Fraction:
        num = self.uint()
        if self.peek() == "/":
            self.pos += 1
            den = self.uint()
            if den == 0:
                self.error("zero denominator")
            return Fraction(num, den)
        return Fraction(num)

    def power(self):
        if self.peek() != self.letter:
            self.error(f"expected '{self.letter}<index>'")
        self.pos += 1
        if not (self.pos < len(self.text) and self.text[self.pos].isdigit()):
            self.error("generator index must follow the letter directly")
        index = self.uint()
        if index < 1:
            self.error("generator indices are 1-based")
        exp = 1
        if self.peek() == "^":
            self.pos += 1
            exp = self.uint()
        return index - 1, exp, self.offset()

    def term(self) -> ParsedTerm:
        coef = Fraction(1)
        word = []
        c = self.peek()
        if c.isdigit():
            coef = self.rational()
        elif c == self.letter:
            word.append(self.power())
        else:
            self.error("expected a number or a generator")
        while self.peek() == "*":
            self.pos += 1
            word.append(self.power())
        return ParsedTerm(coef, word)

    def series(self) -> list:
        terms = []
        sign = 1
        c = self.peek()
        if c in "+-" and c:
            sign = -1 if c == "-" else 1
            self.pos += 1
        while True:
            t = self.term()
            t.coefficient *= sign
            terms.append(t)
            c = self.peek()
            if not c:
                break
            if c not in "+-":
                self.error(f"unexpected character {c!r}")
            sign = -1 if c == "-" else 1
            self.pos += 1
        return terms


def parse_terms(text: str, letter: str) -> list:
    if not text.strip():
        raise ParseError("empty expression", 0)
    return _Parser(text, letter).series()


def parse_series_with_notes(text: str, algebra) -> ParseResult:
    """Parse a series literal over ``algebra``; notes record dropped terms."""
    sig, K = algebra.signature, algebra.truncation
    notes = []
    acc = {}
    for term in parse_terms(text, "g"):
        letters = []
        for index, exp, off in term.word:
            if index >= sig.size:
                raise ParseError(f"unknown generator g{index + 1} (algebra has {sig.size})", off)
            letters.extend([index] * exp)
        sign, mono = normalize_monomial(sig, letters)
        if sign == 0:
            notes.append(f"square-zero: odd generator repeated in term {_show(term)}")
            continue
        if sum(mono) > K:
            notes.append(f"truncated: term {_show(term)} has order {sum(mono)} > K={K}")
            continue
        acc[mono] = acc.get(mono, Fraction(0)) + sign * term.coefficient
    return ParseResult(GradedSeries(sig, K, acc), notes)


def parse_series_expression(text: str, algebra) -> GradedSeries:
    return parse_series_with_notes(text, algebra).value


def parse_polynomial(text: str, nvars: int):
    from .polynomials import BasePolynomial

    acc = {}
    for term in parse_terms(text, "x"):
        exps = [0] * nvars
        for index, exp, off in term.word:
            if index >= nvars:
                raise ParseError(f"unknown variable x{index + 1} (have {nvars})", off)
            exps[index] += exp
        key = tuple(exps)
        acc[key] = acc.get(key, Fraction(0)) + term.coefficient
    return BasePolynomial(nvars, acc)


def _show(term: ParsedTerm) -> str:
    parts = [f"g{i + 1}" + (f"^{e}" if e != 1 else "") for i, e, _ in term.word]
    return "*".join(parts) or str(term.coefficient)
