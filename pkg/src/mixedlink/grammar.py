"""Text form of mixed polynomials.

Grammar (whitespace ignored)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (['*'] factor)*          juxtaposition multiplies
    factor := atom ['^' INT]                  INT >= 1
    atom   := INT ['/' INT] | 'i' | VAR | '~' VAR | '(' expr ')' | '~(' expr ')'
    VAR    := ('z' | 'w') INT                 1-based variable index

so ``(1/2+3/4 i)*z1^2*~z2`` is a coefficient times two factors, and ``~zK``
is the conjugate of variable K. Parenthesised sub-expressions such as
``(z1+z2)^2`` are accepted as a convenience.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .mixed_poly import GaussianRational, MixedPolynomial

__all__ = ["ParseError", "parse", "serialize"]


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<var>[zw]\d+)|(?P<i>i)|(?P<op>[-+*/^~()]))")


@dataclass
class _Tok:
    kind: str
    text: str
    offset: int  # byte offset into the UTF-8 source


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", len(text[:start].encode()))
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), len(text[:start].encode())))
        pos = m.end()
    toks.append(_Tok("end", "", len(text.encode())))
    return toks


class _Parser:
    def __init__(self, text: str, n: int | None):
        self.toks = _tokenize(text)
        self.k = 0
        if n is None:
            idx = [int(t.text[1:]) for t in self.toks if t.kind == "var"]
            n = max(idx, default=1)
        self.n = n

    def peek(self) -> _Tok:
        return self.toks[self.k]

    def take(self) -> _Tok:
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.take()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.offset)
        return t

    def parse(self) -> MixedPolynomial:
        p = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected {t.text!r}", t.offset)
        return p

    def expr(self) -> MixedPolynomial:
        sign = 1
        if self.peek().text in "+-" and self.peek().kind == "op":
            sign = -1 if self.take().text == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek().kind == "op" and self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def _starts_factor(self, t: _Tok) -> bool:
        return t.kind in ("int", "var", "i") or (t.kind == "op" and t.text in ("(", "~"))

    def term(self) -> MixedPolynomial:
        acc = self.factor()
        while True:
            t = self.peek()
            if t.kind == "op" and t.text == "*":
                self.take()
                acc = acc * self.factor()
            elif self._starts_factor(t):
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> MixedPolynomial:
        base = self.atom()
        t = self.peek()
        if t.kind == "op" and t.text == "^":
            self.take()
            e = self.peek()
            if e.kind == "op" and e.text == "-":
                raise ParseError("negative exponent", e.offset)
            if e.kind != "int":
                raise ParseError("exponent must be a positive integer", e.offset)
            self.take()
            if int(e.text) < 1:
                raise ParseError("exponent must be at least 1", e.offset)
            base = base ** int(e.text)
        return base

    def atom(self) -> MixedPolynomial:
        t = self.take()
        if t.kind == "int":
            value = Fraction(int(t.text))
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "/":
                self.take()
                d = self.take()
                if d.kind != "int":
                    raise ParseError("expected integer denominator", d.offset)
                if int(d.text) == 0:
                    raise ParseError("zero denominator", d.offset)
                value /= int(d.text)
            return MixedPolynomial.constant(self.n, value)
        if t.kind == "i":
            return MixedPolynomial.constant(self.n, GaussianRational(0, 1))
        if t.kind == "var":
            return self._variable(t, conj=False)
        if t.kind == "op" and t.text == "~":
            nxt = self.take()
            if nxt.kind == "var":
                return self._variable(nxt, conj=True)
            if nxt.text == "(":
                inner = self.expr()
                self.expect(")")
                return inner.conjugate()
            raise ParseError("'~' must precede a variable or '('", nxt.offset)
        if t.kind == "op" and t.text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.offset)

    def _variable(self, t: _Tok, conj: bool) -> MixedPolynomial:
        j = int(t.text[1:])
        if not 1 <= j <= self.n:
            raise ParseError(f"variable index {j} out of range 1..{self.n}", t.offset)
        if conj:
            return MixedPolynomial.conj_variable(self.n, j - 1)
        return MixedPolynomial.variable(self.n, j - 1)


def parse(text: str, n: int | None = None) -> MixedPolynomial:
    """Parse ``text`` into an ``n``-variable mixed polynomial.

    When ``n`` is omitted the dimension is the largest variable index used.
    """
    return _Parser(text, n).parse()


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _coeff_text(c: GaussianRational) -> tuple[int, str]:
    """Sign and unsigned text of a coefficient; empty text means 1."""
    if c.im == 0:
        sign = -1 if c.re < 0 else 1
        mag = abs(c.re)
        return sign, "" if mag == 1 else _frac(mag) if mag.denominator == 1 else f"({_frac(mag)})"
    if c.re == 0:
        sign = -1 if c.im < 0 else 1
        return sign, f"({_frac(abs(c.im))} i)"
    op = "-" if c.im < 0 else "+"
    return 1, f"({_frac(c.re)}{op}{_frac(abs(c.im))} i)"


def serialize(p: MixedPolynomial, var: str = "z") -> str:
    if p.is_zero():
        return "0"
    parts: list[str] = []
    for term in p:
        sign, ctext = _coeff_text(term.coeff)
        factors = [ctext] if ctext else []
        for j in range(p.n):
            for e, pre in ((term.nu[j], ""), (term.mu[j], "~")):
                if e:
                    factors.append(f"{pre}{var}{j + 1}" + (f"^{e}" if e > 1 else ""))
        body = "*".join(factors) or "1"
        if not parts:
            parts.append(("-" if sign < 0 else "") + body)
        else:
            parts.append(("- " if sign < 0 else "+ ") + body)
    return " ".join(parts)
