"""Recursive-descent parsers for expressions, vector fields, and forms.

Expression grammar (ASCII, whitespace-insensitive):

    expr   := ["-"] term (("+"|"-") term)*
    term   := factor ("*" factor)*
    factor := base ("**" NAT)?
    base   := RATIONAL | IDENT | JET | FUNC | "(" expr ")"
    JET    := FIBERNAME ("_" BASENAME+)?        e.g. u, u_x, u2_xt
    FUNC   := IDENT "'"* "(" expr ")"           ticks count derivative order

Rationals are NAT or NAT "/" NAT.  Jet suffix letters are base-coordinate
names and are order-insensitive (u_xt == u_tx).

Vector-field literals:  ev{u: <expr>, ...}, tot{x: <expr>, ...},
ins{ev{...}, tot{...}}.

Form literals use generators del(<jet token>) and dx(<basename>), glued by
"*" or the wedge token "/\\"; terms of different bidegrees may be summed
(the result is then a mixed form).
"""

from __future__ import annotations

from fractions import Fraction

from .expr import CoordSystem, Expr
from .forms import LocalForm, MixedForm, coefficient_form, delta, dx as dx_form
from .jet import EvolutionaryVF, InsularVF, TotalVF


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


_PUNCT = ("**", "/\\", "+", "-", "*", "/", "(", ")", "{", "}", ":", ",", "'")


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list[tuple[str, str, int, int]] = []
        self._scan()
        self.idx = 0

    def _loc(self, pos: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def _scan(self) -> None:
        text, n = self.text, len(self.text)
        i = 0
        while i < n:
            c = text[i]
            if c.isspace():
                i += 1
                continue
            if c.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                self.tokens.append(("NUM", text[i:j], *self._loc(i)))
                i = j
                continue
            if c.isalpha():
                j = i
                while j < n and (text[j].isalnum()):
                    j += 1
                word = text[i:j]
                # one optional underscore glues a jet suffix to a fiber name
                if j < n and text[j] == "_" and j + 1 < n and text[j + 1].isalnum():
                    k = j + 1
                    while k < n and text[k].isalnum():
                        k += 1
                    word = text[i:k]
                    j = k
                self.tokens.append(("NAME", word, *self._loc(i)))
                i = j
                continue
            for p in _PUNCT:
                if text.startswith(p, i):
                    self.tokens.append(("PUNCT", p, *self._loc(i)))
                    i += len(p)
                    break
            else:
                line, col = self._loc(i)
                raise ParseError(f"unexpected character {c!r}", line, col)
        self.tokens.append(("EOF", "", *self._loc(n)))

    # -- cursor ----------------------------------------------------------------

    def peek(self, offset: int = 0) -> tuple[str, str, int, int]:
        k = min(self.idx + offset, len(self.tokens) - 1)
        return self.tokens[k]

    def next(self) -> tuple[str, str, int, int]:
        tok = self.tokens[self.idx]
        if tok[0] != "EOF":
            self.idx += 1
        return tok

    def accept(self, value: str) -> bool:
        kind, val, _, _ = self.peek()
        if kind == "PUNCT" and val == value:
            self.next()
            return True
        return False

    def expect(self, value: str) -> None:
        kind, val, line, col = self.peek()
        if kind != "PUNCT" or val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", line, col)
        self.next()

    def error(self, message: str):
        _, _, line, col = self.peek()
        raise ParseError(message, line, col)


class _ExprParser:
    def __init__(self, lexer: _Lexer, cs: CoordSystem):
        self.lx = lexer
        self.cs = cs

    def parse_expr(self) -> Expr:
        neg = False
        if self.lx.accept("-"):
            neg = True
        elif self.lx.accept("+"):
            pass
        out = self.parse_term()
        if neg:
            out = -out
        while True:
            if self.lx.accept("+"):
                out = out + self.parse_term()
            elif self.lx.accept("-"):
                out = out - self.parse_term()
            else:
                return out

    def parse_term(self) -> Expr:
        out = self.parse_factor()
        while self.lx.accept("*"):
            out = out * self.parse_factor()
        return out

    def parse_factor(self) -> Expr:
        out = self.parse_base()
        if self.lx.accept("**"):
            out = out ** self._nat()
        return out

    def _nat(self) -> int:
        kind, val, line, col = self.lx.peek()
        if kind != "NUM":
            raise ParseError("expected a natural number", line, col)
        self.lx.next()
        return int(val)

    def parse_base(self) -> Expr:
        kind, val, line, col = self.lx.peek()
        if kind == "NUM":
            self.lx.next()
            num = int(val)
            if self.lx.accept("/"):
                den = self._nat()
                if den == 0:
                    raise ParseError("zero denominator", line, col)
                return self.cs.number(Fraction(num, den))
            return self.cs.number(num)
        if kind == "PUNCT" and val == "(":
            self.lx.next()
            inner = self.parse_expr()
            self.lx.expect(")")
            return inner
        if kind == "NAME":
            self.lx.next()
            ticks = 0
            while self.lx.accept("'"):
                ticks += 1
            nxt = self.lx.peek()
            if nxt[0] == "PUNCT" and nxt[1] == "(":
                if "_" in val:
                    raise ParseError(f"bad function name {val!r}", line, col)
                self.lx.next()
                arg = self.parse_expr()
                self.lx.expect(")")
                return self.cs.func(val, arg, ticks)
            if ticks:
                raise ParseError("derivative ticks require a function application", line, col)
            return self._name_to_expr(val, line, col)
        raise ParseError(f"unexpected token {val or 'end of input'!r}", line, col)

    def _name_to_expr(self, word: str, line: int, col: int) -> Expr:
        if "_" in word:
            head, _, tail = word.partition("_")
            if head not in self.cs.fiber_names:
                raise ParseError(f"unknown fiber coordinate {head!r}", line, col)
            return self.cs.jet(head, self._split_suffix(tail, line, col))
        if word in self.cs.base_names:
            return self.cs.coord(word)
        if word in self.cs.fiber_names:
            return self.cs.jet(word, ())
        raise ParseError(f"unknown coordinate name {word!r}", line, col)

    def _split_suffix(self, tail: str, line: int, col: int) -> tuple:
        """Split a jet suffix into base-coordinate names, longest match first."""
        names = sorted(self.cs.base_names, key=len, reverse=True)
        out = []
        rest = tail
        while rest:
            for name in names:
                if rest.startswith(name):
                    out.append(name)
                    rest = rest[len(name):]
                    break
            else:
                raise ParseError(f"cannot read jet suffix {tail!r}", line, col)
        return tuple(out)


def parse_expr(text: str, cs: CoordSystem) -> Expr:
    lx = _Lexer(text)
    out = _ExprParser(lx, cs).parse_expr()
    if lx.peek()[0] != "EOF":
        lx.error(f"trailing input {lx.peek()[1]!r}")
    return out


# -- vector-field literals -------------------------------------------------------


def _parse_components(lx: _Lexer, cs: CoordSystem) -> dict:
    lx.expect("{")
    out: dict = {}
    if not lx.accept("}"):
        while True:
            kind, val, line, col = lx.peek()
            if kind != "NAME":
                raise ParseError("expected a coordinate name", line, col)
            lx.next()
            lx.expect(":")
            out[val] = _ExprParser(lx, cs).parse_expr()
            if lx.accept("}"):
                break
            lx.expect(",")
    return out


def _parse_vf(lx: _Lexer, cs: CoordSystem):
    kind, val, line, col = lx.peek()
    if kind != "NAME" or val not in ("ev", "tot", "ins"):
        raise ParseError("expected ev{...}, tot{...} or ins{...}", line, col)
    lx.next()
    if val == "ev":
        comps = _parse_components(lx, cs)
        for name in comps:
            if name not in cs.fiber_names:
                raise ParseError(f"unknown fiber coordinate {name!r}", line, col)
        return EvolutionaryVF.from_dict(cs, comps)
    if val == "tot":
        comps = _parse_components(lx, cs)
        for name in comps:
            if name not in cs.base_names:
                raise ParseError(f"unknown base coordinate {name!r}", line, col)
        return TotalVF.from_dict(cs, comps)
    lx.expect("{")
    parts = [_parse_vf(lx, cs)]
    while lx.accept(","):
        parts.append(_parse_vf(lx, cs))
    lx.expect("}")
    ev = None
    tot = None
    for part in parts:
        if isinstance(part, EvolutionaryVF):
            ev = part if ev is None else ev + part
        elif isinstance(part, TotalVF):
            tot = part if tot is None else tot + part
        else:
            raise ParseError("ins{...} takes ev and tot parts", *lx.peek()[2:])
    return InsularVF.from_parts(ev, tot)


def parse_vector_field(text: str, cs: CoordSystem):
    lx = _Lexer(text)
    out = _parse_vf(lx, cs)
    if lx.peek()[0] != "EOF":
        lx.error(f"trailing input {lx.peek()[1]!r}")
    return out


def as_insular(vf) -> InsularVF:
    if isinstance(vf, InsularVF):
        return vf
    if isinstance(vf, EvolutionaryVF):
        return InsularVF.from_parts(vf, None)
    return InsularVF.from_parts(None, vf)


# -- form literals -----------------------------------------------------------------


class _FormParser(_ExprParser):
    def parse_form(self) -> MixedForm:
        out = MixedForm.zero(self.cs)
        sign = 1
        if self.lx.accept("-"):
            sign = -1
        else:
            self.lx.accept("+")
        out = out + self.parse_form_term().scale(sign)
        while True:
            if self.lx.accept("+"):
                out = out + self.parse_form_term()
            elif self.lx.accept("-"):
                out = out + self.parse_form_term().scale(-1)
            else:
                return out

    def parse_form_term(self) -> MixedForm:
        coeff = self.cs.number(1)
        word = MixedForm.of(coefficient_form(self.cs.number(1)))
        have_gen = False
        while True:
            kind, val, line, col = self.lx.peek()
            if kind == "NAME" and val in ("del", "dx") and self.lx.peek(1)[1] == "(":
                self.lx.next()
                self.lx.expect("(")
                namek, namev, nline, ncol = self.lx.peek()
                if namek != "NAME":
                    raise ParseError("expected a coordinate token", nline, ncol)
                self.lx.next()
                self.lx.expect(")")
                if val == "dx":
                    gen = dx_form(self.cs, self.cs.base_index(namev))
                else:
                    gen = self._jet_token_form(namev, nline, ncol)
                word = word.wedge(gen)
                have_gen = True
            else:
                coeff = coeff * self.parse_factor()
            nxt = self.lx.peek()
            if nxt[0] == "PUNCT" and nxt[1] in ("*", "/\\"):
                self.lx.next()
                continue
            break
        return word.scale(coeff) if have_gen else MixedForm.of(coefficient_form(coeff))

    def _jet_token_form(self, token: str, line: int, col: int) -> LocalForm:
        if "_" in token:
            head, _, tail = token.partition("_")
            idx = tuple(self.cs.base_index(n) for n in self._split_suffix(tail, line, col))
        else:
            head, idx = token, ()
        if head not in self.cs.fiber_names:
            raise ParseError(f"unknown fiber coordinate {head!r}", line, col)
        return delta(self.cs, self.cs.fiber_index(head), idx)


def parse_form(text: str, cs: CoordSystem) -> MixedForm:
    lx = _Lexer(text)
    out = _FormParser(lx, cs).parse_form()
    if lx.peek()[0] != "EOF":
        lx.error(f"trailing input {lx.peek()[1]!r}")
    return out


def parse_local_form(text: str, cs: CoordSystem) -> LocalForm:
    """Parse a form literal that must be concentrated in one bidegree."""
    mixed = parse_form(text, cs)
    comps = [w for w in mixed.components.values() if not w.is_zero()]
    if not comps:
        return LocalForm(cs, 0, 0)
    if len(comps) > 1:
        raise ParseError("form has mixed bidegrees", 1, 1)
    return comps[0]


# -- gauge literals ------------------------------------------------------------------


def parse_gauge(text: str, cs: CoordSystem) -> dict:
    """Parse gauge{u_x: <expr>, ...} into a map (alpha, I) -> Expr.

    The key token names the fiber component and the multi-index of the
    parameter derivative it multiplies.
    """
    lx = _Lexer(text)
    kind, val, line, col = lx.peek()
    if kind != "NAME" or val != "gauge":
        raise ParseError("expected gauge{...}", line, col)
    lx.next()
    lx.expect("{")
    ep = _ExprParser(lx, cs)
    out: dict = {}
    if not lx.accept("}"):
        while True:
            kind, val, line, col = lx.peek()
            if kind != "NAME":
                raise ParseError("expected a jet-style key", line, col)
            lx.next()
            if "_" in val:
                head, _, tail = val.partition("_")
                idx = tuple(sorted(cs.base_index(n) for n in ep._split_suffix(tail, line, col)))
            else:
                head, idx = val, ()
            alpha = cs.fiber_index(head)
            lx.expect(":")
            out[(alpha, idx)] = ep.parse_expr()
            if lx.accept("}"):
                break
            lx.expect(",")
    if lx.peek()[0] != "EOF":
        lx.error(f"trailing input {lx.peek()[1]!r}")
    return out


# -- pair literals -------------------------------------------------------------------


def parse_pair(text: str, cs: CoordSystem) -> tuple[InsularVF, MixedForm]:
    """Parse "<vf literal> | <form literal>" into (insular field, form)."""
    if "|" not in text:
        raise ParseError("pair literal needs '<vector field> | <form>'", 1, 1)
    vf_text, _, form_text = text.partition("|")
    vf = as_insular(parse_vector_field(vf_text.strip(), cs))
    zeta = parse_form(form_text.strip(), cs)
    return vf, zeta


# -- problem files --------------------------------------------------------------------


def parse_problem_file(text: str) -> dict:
    """key: value lines mirroring the command-line flags; '#' comments."""
    out: dict = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise ParseError("expected 'key: value'", ln, 1)
        key, _, value = line.partition(":")
        key = key.strip()
        value = value.strip()
        if key in ("pair", "gauge"):
            out.setdefault(key, []).append(value)
        else:
            out[key] = value
    return out
