"""Deterministic text, LaTeX, and JSON rendering of expressions and forms.

Text output is valid input for the parsers, so every value printed by the
command line round-trips.  Term order is fixed (highest jet order first,
then highest degree, then the canonical monomial order), which makes
repeated runs byte-identical.
"""

from __future__ import annotations

from fractions import Fraction

from .expr import BASE, FUNC, JET, CoordSystem, Expr
from .forms import LocalForm, MixedForm


def _mono_jet_order(mono: tuple) -> int:
    order = 0
    for a, _ in mono:
        if a[0] == JET:
            order = max(order, a[2])
        elif a[0] == FUNC:
            order = max(order, a[3].max_jet_order())
    return order


def _term_sort_key(item):
    mono, _ = item
    return (-_mono_jet_order(mono), -sum(e for _, e in mono), mono)


def atom_text(cs: CoordSystem, atom: tuple) -> str:
    if atom[0] == BASE:
        return cs.base_names[atom[1]]
    if atom[0] == JET:
        _, alpha, _, idx = atom
        name = cs.fiber_names[alpha]
        if not idx:
            return name
        return name + "_" + "".join(cs.base_names[i] for i in idx)
    _, name, order, arg = atom
    return name + "'" * order + "(" + expr_text(arg) + ")"


def _frac_text(c: Fraction) -> str:
    return str(c)


def expr_text(e: Expr) -> str:
    if not e.terms:
        return "0"
    pieces = []
    for mono, c in sorted(e.terms.items(), key=_term_sort_key):
        factors = []
        for a, exp in mono:
            t = atom_text(e.cs, a)
            factors.append(t if exp == 1 else f"{t}**{exp}")
        mag = abs(c)
        if not factors:
            body = _frac_text(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _frac_text(mag) + "*" + "*".join(factors)
        pieces.append(("-" if c < 0 else "+", body))
    sign, body = pieces[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def _gen_text(cs: CoordSystem, vert: tuple, horiz: tuple) -> str:
    gens = []
    for alpha, idx in vert:
        name = cs.fiber_names[alpha]
        token = name + ("_" + "".join(cs.base_names[i] for i in idx) if idx else "")
        gens.append(f"del({token})")
    for i in horiz:
        gens.append(f"dx({cs.base_names[i]})")
    return " /\\ ".join(gens)


def form_text(w: LocalForm) -> str:
    if w.is_zero():
        return "0"
    pieces = []
    for (vert, horiz), c in sorted(w.terms.items()):
        coeff = expr_text(c)
        gens = _gen_text(w.cs, vert, horiz)
        if not gens:
            pieces.append(coeff)
        elif coeff == "1":
            pieces.append(gens)
        else:
            pieces.append(f"({coeff}) * {gens}")
    return " + ".join(pieces)


def mixed_text(w: MixedForm) -> str:
    if w.is_zero():
        return "0"
    parts = [form_text(w.components[key]) for key in sorted(w.components)]
    return " + ".join(parts)


# -- LaTeX ------------------------------------------------------------------------


def _atom_latex(cs: CoordSystem, atom: tuple) -> str:
    if atom[0] == BASE:
        return cs.base_names[atom[1]]
    if atom[0] == JET:
        _, alpha, _, idx = atom
        name = cs.fiber_names[alpha]
        if not idx:
            return name
        return name + "_{" + "".join(cs.base_names[i] for i in idx) + "}"
    _, name, order, arg = atom
    return name + "'" * order + r"\left(" + expr_latex(arg) + r"\right)"


def expr_latex(e: Expr) -> str:
    if not e.terms:
        return "0"
    pieces = []
    for mono, c in sorted(e.terms.items(), key=_term_sort_key):
        factors = []
        for a, exp in mono:
            t = _atom_latex(e.cs, a)
            factors.append(t if exp == 1 else f"{t}^{{{exp}}}")
        mag = abs(c)
        if mag == 1 and factors:
            coeff = ""
        elif mag.denominator == 1:
            coeff = str(mag.numerator)
        else:
            coeff = rf"\tfrac{{{mag.numerator}}}{{{mag.denominator}}}"
        body = (coeff + (" " if coeff and factors else "") + " ".join(factors)) or "1"
        pieces.append(("-" if c < 0 else "+", body))
    sign, body = pieces[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def form_latex(w: LocalForm) -> str:
    if w.is_zero():
        return "0"
    pieces = []
    for (vert, horiz), c in sorted(w.terms.items()):
        gens = []
        for alpha, idx in vert:
            name = w.cs.fiber_names[alpha]
            sub = "".join(w.cs.base_names[i] for i in idx)
            gens.append(rf"\delta {name}" + (rf"_{{{sub}}}" if sub else ""))
        for i in horiz:
            gens.append(rf"\mathrm{{d}}x^{{{w.cs.base_names[i]}}}")
        body = r" \wedge ".join(gens)
        coeff = expr_latex(c)
        if not body:
            pieces.append(coeff)
        elif coeff == "1":
            pieces.append(body)
        else:
            pieces.append(rf"\left({coeff}\right) {body}")
    return " + ".join(pieces)


def mixed_latex(w: MixedForm) -> str:
    if w.is_zero():
        return "0"
    return " + ".join(form_latex(w.components[key]) for key in sorted(w.components))


# -- JSON -------------------------------------------------------------------------


def form_json(w: LocalForm) -> dict:
    """Schema: {"bidegree": [p, q], "terms": [{coeff, vert, horiz, monomial}]}."""
    cs = w.cs
    terms = []
    for (vert, horiz), c in sorted(w.terms.items()):
        vert_json = [
            [cs.fiber_names[alpha], "".join(cs.base_names[i] for i in idx)]
            for alpha, idx in vert
        ]
        horiz_json = [cs.base_names[i] for i in horiz]
        for mono, coeff in sorted(c.terms.items(), key=_term_sort_key):
            terms.append(
                {
                    "coeff": str(coeff),
                    "vert": vert_json,
                    "horiz": horiz_json,
                    "monomial": [[atom_text(cs, a), e] for a, e in mono],
                }
            )
    return {"bidegree": [w.p, w.q], "terms": terms}


def mixed_json(w: MixedForm) -> list:
    return [form_json(w.components[key]) for key in sorted(w.components)]


def form_from_json(data: dict, cs: CoordSystem) -> LocalForm:
    from .parser import parse_expr
    from .forms import LocalForm as LF, delta, dx as dx_form, coefficient_form

    p, q = data["bidegree"]
    out = LF(cs, p, q)
    for term in data["terms"]:
        coeff = Fraction(term["coeff"])
        mono_text = "*".join(
            (f"{tok}**{e}" if e != 1 else tok) for tok, e in term["monomial"]
        )
        ex = parse_expr(mono_text, cs) if term["monomial"] else cs.number(1)
        ex = ex * coeff
        w = coefficient_form(ex)
        for name, suffix in term["vert"]:
            alpha = cs.fiber_index(name)
            idx = tuple(cs.base_index(ch) for ch in _split_letters(cs, suffix))
            w = w.wedge(delta(cs, alpha, idx))
        for name in term["horiz"]:
            w = w.wedge(dx_form(cs, cs.base_index(name)))
        out = out + w
    return out


def _split_letters(cs: CoordSystem, suffix: str) -> list[str]:
    names = sorted(cs.base_names, key=len, reverse=True)
    out = []
    rest = suffix
    while rest:
        for name in names:
            if rest.startswith(name):
                out.append(name)
                rest = rest[len(name):]
                break
        else:
            raise ValueError(f"cannot read jet suffix {suffix!r}")
    return out
