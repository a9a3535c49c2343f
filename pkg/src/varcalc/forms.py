"""Bigraded local forms, the two differentials, insertion, and Lie derivatives.

A LocalForm of bidegree (p, q) is a sum of terms

    coeff * du_{I_1}^{a_1} ^ ... ^ du_{I_p}^{a_p} ^ dx^{i_1} ^ ... ^ dx^{i_q}

stored against the canonical key (vert, horiz): vert is the strictly sorted
tuple of (alpha, I) vertical generators, horiz the strictly sorted tuple of
base indices.  Every generator is odd; any permutation sign is folded into
the coefficient, and a repeated generator kills the term.

A MixedForm collects LocalForms of several bidegrees (one total object).
The depth of a (p, q) component is its distance from the outermost node of
its total degree, min(p, m - q); depth-0 components are the surface part.
"""

from __future__ import annotations

from .expr import (
    CoordMismatchError,
    CoordSystem,
    Expr,
    multi_concat,
    partial,
)
from .jet import (
    EvolutionaryVF,
    InsularVF,
    TotalVF,
    prolong_coefficient,
    total_derivative,
)


def _vert_key(g: tuple) -> tuple:
    alpha, idx = g
    return (alpha, len(idx), idx)


def canonical_word(gens: list) -> tuple | None:
    """Sort a generator word, returning (sign, vert, horiz) or None if zero.

    gens is a list of ('v', (alpha, I)) and ('h', i) entries in multiplication
    order.  All generators anticommute; the sign is the parity of the sorting
    permutation into (sorted verts, sorted horizs).
    """
    keyed = []
    for kind, g in gens:
        if kind == "v":
            keyed.append((0, _vert_key(g), g))
        else:
            keyed.append((1, g, g))
    n = len(keyed)
    sign = 1
    # insertion sort, counting transpositions of odd generators
    order = list(range(n))
    keys = [keyed[i][:2] for i in range(n)]
    for i in range(1, n):
        j = i
        while j > 0 and keys[order[j - 1]] > keys[order[j]]:
            order[j - 1], order[j] = order[j], order[j - 1]
            sign = -sign
            j -= 1
    seq = [keyed[i] for i in order]
    for a, b in zip(seq, seq[1:]):
        if a[:2] == b[:2]:
            return None
    vert = tuple(g for tag, _, g in seq if tag == 0)
    horiz = tuple(g for tag, _, g in seq if tag == 1)
    return sign, vert, horiz


class LocalForm:
    """Single-bidegree element of the bicomplex; immutable by convention."""

    __slots__ = ("cs", "p", "q", "terms")

    def __init__(self, cs: CoordSystem, p: int, q: int, terms: dict | None = None):
        if q > cs.m or p < 0 or q < 0:
            raise ValueError(f"bad bidegree ({p}, {q}) for m={cs.m}")
        self.cs = cs
        self.p = p
        self.q = q
        self.terms = terms or {}

    def with_terms(self, terms: dict) -> "LocalForm":
        return LocalForm(self.cs, self.p, self.q, terms)

    # -- predicates -----------------------------------------------------------

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.terms.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocalForm):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):  # pragma: no cover - not used as dict key
        raise TypeError("LocalForm is unhashable")

    def __repr__(self) -> str:
        from .render import form_text

        return f"LocalForm({form_text(self)})"

    # -- linear structure -------------------------------------------------------

    def _compat(self, other: "LocalForm") -> None:
        if self.cs != other.cs:
            raise CoordMismatchError("forms over different coordinate systems")
        if (self.p, self.q) != (other.p, other.q):
            raise ValueError("bidegree mismatch")

    def __add__(self, other: "LocalForm") -> "LocalForm":
        self._compat(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            _acc(out, key, c)
        return self.with_terms(out)

    def __neg__(self) -> "LocalForm":
        return self.with_terms({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "LocalForm") -> "LocalForm":
        return self + (-other)

    def scale(self, k) -> "LocalForm":
        """Multiply by an Expr or rational scalar (degree-0, no sign issues)."""
        out: dict = {}
        for key, c in self.terms.items():
            _acc(out, key, c * k)
        return self.with_terms(out)

    # -- wedge ------------------------------------------------------------------

    def wedge(self, other: "LocalForm") -> "LocalForm":
        if self.cs != other.cs:
            raise CoordMismatchError("forms over different coordinate systems")
        out: dict = {}
        for (v1, h1), c1 in self.terms.items():
            for (v2, h2), c2 in other.terms.items():
                gens = (
                    [("v", g) for g in v1]
                    + [("h", g) for g in h1]
                    + [("v", g) for g in v2]
                    + [("h", g) for g in h2]
                )
                res = canonical_word(gens)
                if res is None:
                    continue
                sign, vert, horiz = res
                _acc(out, (vert, horiz), c1 * c2 * sign)
        return LocalForm(self.cs, self.p + other.p, self.q + other.q, out)

    def total_degree(self) -> int:
        return self.p + self.q

    def depth(self) -> int:
        return min(self.p, self.cs.m - self.q)


def _acc(out: dict, key: tuple, coeff: Expr) -> None:
    if coeff.is_zero():
        return
    cur = out.get(key)
    if cur is None:
        out[key] = coeff
    else:
        s = cur + coeff
        if s.is_zero():
            del out[key]
        else:
            out[key] = s


# -- bidegree-0 constructors ---------------------------------------------------


def coefficient_form(f: Expr) -> LocalForm:
    return LocalForm(f.cs, 0, 0, {((), ()): f} if not f.is_zero() else {})


def dx(cs: CoordSystem, i: int) -> LocalForm:
    return LocalForm(cs, 0, 1, {((), (i,)): cs.number(1)})


def delta(cs: CoordSystem, alpha: int, indices: tuple = ()) -> LocalForm:
    g = (alpha, tuple(sorted(indices)))
    return LocalForm(cs, 1, 0, {((g,), ()): cs.number(1)})


def vol(cs: CoordSystem) -> LocalForm:
    return LocalForm(cs, 0, cs.m, {((), tuple(range(cs.m))): cs.number(1)})


def lagrangian_form(f: Expr) -> LocalForm:
    """Density f dx^1 ^ ... ^ dx^m."""
    return coefficient_form(f).wedge(vol(f.cs))


# -- differentials ---------------------------------------------------------------


def d_v(w: LocalForm) -> LocalForm:
    """Vertical differential: bidegree (p, q) -> (p+1, q)."""
    cs = w.cs
    out: dict = {}
    for (vert, horiz), c in w.terms.items():
        for a in sorted(c.jet_atoms()):
            dc = partial(c, a)
            if dc.is_zero():
                continue
            g = (a[1], a[3])
            res = canonical_word([("v", g)] + [("v", x) for x in vert] + [("h", x) for x in horiz])
            if res is None:
                continue
            sign, nv, nh = res
            _acc(out, (nv, nh), dc * sign)
    return LocalForm(cs, w.p + 1, w.q, out)


def d_h(w: LocalForm) -> LocalForm:
    """Horizontal differential: bidegree (p, q) -> (p, q+1).

    On coefficients it is D_i(.) dx^i; on vertical generators it acts by
    d(du_I^alpha) = -du_{I,i}^alpha ^ dx^i; dx generators are killed.
    """
    cs = w.cs
    if w.q == cs.m:
        return LocalForm(cs, w.p, cs.m)
    out: dict = {}
    for (vert, horiz), c in w.terms.items():
        word = [("v", g) for g in vert] + [("h", g) for g in horiz]
        # coefficient part
        for i in range(cs.m):
            dc = total_derivative(c, i)
            if dc.is_zero():
                continue
            res = canonical_word([("h", i)] + word)
            if res is None:
                continue
            sign, nv, nh = res
            _acc(out, (nv, nh), dc * sign)
        # generator part: derivation with Koszul signs, all generators odd
        for pos, g in enumerate(vert):
            alpha, idx = g
            rest = [("v", x) for k, x in enumerate(vert) if k != pos] + [
                ("h", x) for x in horiz
            ]
            for i in range(cs.m):
                newg = (alpha, multi_concat(idx, i))
                res = canonical_word([("v", newg), ("h", i)] + rest)
                if res is None:
                    continue
                sign, nv, nh = res
                # (-1)^pos to move d past earlier generators, extra -1 from
                # d(du_I) = -du_{I,i} ^ dx^i
                _acc(out, (nv, nh), c * (sign * (-1) ** pos * (-1)))
    return LocalForm(cs, w.p, w.q + 1, out)


def total_lie(w: LocalForm, i: int) -> LocalForm:
    """Lie derivative along D_i: D_i on coefficients, du_I -> du_{I,i}."""
    cs = w.cs
    out: dict = {}
    for (vert, horiz), c in w.terms.items():
        dc = total_derivative(c, i)
        if not dc.is_zero():
            _acc(out, (vert, horiz), dc)
        for pos, (alpha, idx) in enumerate(vert):
            newg = (alpha, multi_concat(idx, i))
            res = canonical_word(
                [("v", newg) if k == pos else ("v", x) for k, x in enumerate(vert)]
                + [("h", x) for x in horiz]
            )
            if res is None:
                continue
            sign, nv, nh = res
            _acc(out, (nv, nh), c * sign)
    return LocalForm(cs, w.p, w.q, out)


def total_lie_multi(w: LocalForm, indices: tuple) -> LocalForm:
    for i in indices:
        w = total_lie(w, i)
    return w


# -- insertion --------------------------------------------------------------------


def insert_ev(xi: EvolutionaryVF, w: LocalForm) -> LocalForm:
    """Left insertion of a prolonged evolutionary field: (p, q) -> (p-1, q)."""
    cs = w.cs
    if w.p == 0:
        return LocalForm(cs, 0, w.q)
    out: dict = {}
    for (vert, horiz), c in w.terms.items():
        for pos, (alpha, idx) in enumerate(vert):
            coeff = prolong_coefficient(xi, alpha, idx)
            if coeff.is_zero():
                continue
            nv = vert[:pos] + vert[pos + 1 :]
            _acc(out, (nv, horiz), c * coeff * ((-1) ** pos))
    return LocalForm(cs, w.p - 1, w.q, out)


def insert_tot(X: TotalVF, w: LocalForm) -> LocalForm:
    """Left insertion of a total field: (p, q) -> (p, q-1)."""
    cs = w.cs
    if w.q == 0:
        return LocalForm(cs, w.p, 0, {})
    out: dict = {}
    for (vert, horiz), c in w.terms.items():
        for k, i in enumerate(horiz):
            coeff = X.X[i]
            if coeff.is_zero():
                continue
            nh = horiz[:k] + horiz[k + 1 :]
            _acc(out, (vert, nh), c * coeff * ((-1) ** (len(vert) + k)))
    return LocalForm(cs, w.p, w.q - 1, out)


# -- mixed forms -------------------------------------------------------------------


class MixedForm:
    """Finite family of LocalForms keyed by bidegree (one total object)."""

    __slots__ = ("cs", "components")

    def __init__(self, cs: CoordSystem, components: dict | None = None):
        self.cs = cs
        self.components = {}
        for key, w in (components or {}).items():
            if not w.is_zero():
                self.components[key] = w

    @classmethod
    def of(cls, *forms: LocalForm) -> "MixedForm":
        cs = forms[0].cs
        out: dict = {}
        for w in forms:
            key = (w.p, w.q)
            out[key] = out[key] + w if key in out else w
        return cls(cs, out)

    @classmethod
    def zero(cls, cs: CoordSystem) -> "MixedForm":
        return cls(cs, {})

    def component(self, p: int, q: int) -> LocalForm:
        return self.components.get((p, q), LocalForm(self.cs, p, q))

    def is_zero(self) -> bool:
        return all(w.is_zero() for w in self.components.values())

    def __eq__(self, other) -> bool:
        if isinstance(other, LocalForm):
            other = MixedForm.of(other)
        if not isinstance(other, MixedForm):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):  # pragma: no cover
        raise TypeError("MixedForm is unhashable")

    def __add__(self, other) -> "MixedForm":
        if isinstance(other, LocalForm):
            other = MixedForm.of(other)
        out = dict(self.components)
        for key, w in other.components.items():
            out[key] = out[key] + w if key in out else w
        return MixedForm(self.cs, out)

    def __neg__(self) -> "MixedForm":
        return MixedForm(self.cs, {k: -w for k, w in self.components.items()})

    def __sub__(self, other) -> "MixedForm":
        if isinstance(other, LocalForm):
            other = MixedForm.of(other)
        return self + (-other)

    def scale(self, k) -> "MixedForm":
        return MixedForm(self.cs, {key: w.scale(k) for key, w in self.components.items()})

    def wedge(self, other) -> "MixedForm":
        if isinstance(other, LocalForm):
            other = MixedForm.of(other)
        out = MixedForm.zero(self.cs)
        for w1 in self.components.values():
            for w2 in other.components.values():
                out = out + w1.wedge(w2)
        return out

    def map(self, op) -> "MixedForm":
        out = MixedForm.zero(self.cs)
        for w in self.components.values():
            out = out + op(w)
        return out

    def depth_split(self) -> dict:
        """Map depth -> MixedForm of the components at that depth."""
        out: dict = {}
        for (p, q), w in self.components.items():
            d = min(p, self.cs.m - q)
            out.setdefault(d, MixedForm.zero(self.cs))
            out[d] = out[d] + w
        return out

    def surface(self) -> "MixedForm":
        """The depth-0 part."""
        return self.depth_split().get(0, MixedForm.zero(self.cs))

    def __repr__(self) -> str:
        from .render import mixed_text

        return f"MixedForm({mixed_text(self)})"


def d_total(w: LocalForm | MixedForm) -> MixedForm:
    """D = d_v + d_h, valued in mixed forms."""
    if isinstance(w, LocalForm):
        return MixedForm.of(d_v(w), d_h(w))
    return w.map(d_total)


def d_v_mixed(w: MixedForm) -> MixedForm:
    return w.map(lambda c: MixedForm.of(d_v(c)))


def d_h_mixed(w: MixedForm) -> MixedForm:
    return w.map(lambda c: MixedForm.of(d_h(c)))


def insert(chi: EvolutionaryVF | TotalVF | InsularVF, w: LocalForm | MixedForm):
    """Insertion of any of the three vector field flavours."""
    if isinstance(w, MixedForm):
        out = MixedForm.zero(w.cs)
        for comp in w.components.values():
            out = out + MixedForm.of(*_insert_local(chi, comp))
        return out
    if isinstance(chi, InsularVF):
        return MixedForm.of(*_insert_local(chi, w))
    (res,) = _insert_local(chi, w)
    return res


def _insert_local(chi, w: LocalForm) -> tuple:
    if isinstance(chi, EvolutionaryVF):
        return (insert_ev(chi, w),)
    if isinstance(chi, TotalVF):
        return (insert_tot(chi, w),)
    return (insert_ev(chi.ev, w), insert_tot(chi.tot, w))


def lie(chi, w: LocalForm | MixedForm) -> MixedForm:
    """Cartan magic formula L_chi = D iota_chi + iota_chi D."""
    if isinstance(w, LocalForm):
        w = MixedForm.of(w)
    ins = insert(chi, w)
    if isinstance(ins, LocalForm):
        ins = MixedForm.of(ins)
    return d_total(ins) + insert(chi, d_total(w))


def lie_d(X: TotalVF, w: LocalForm | MixedForm) -> MixedForm:
    """Horizontal Lie derivative [d_h, iota_X]."""
    if isinstance(w, LocalForm):
        w = MixedForm.of(w)
    ins = w.map(lambda c: MixedForm.of(insert_tot(X, c)))
    return d_h_mixed(ins) + d_h_mixed(w).map(lambda c: MixedForm.of(insert_tot(X, c)))


def m_op(X: TotalVF, w: LocalForm | MixedForm) -> MixedForm:
    """The operator [d_v, lie_d(X, .)] measuring failure of bigrading."""
    if isinstance(w, LocalForm):
        w = MixedForm.of(w)
    return d_v_mixed(lie_d(X, w)) - lie_d(X, d_v_mixed(w))


def contract_vert(w: LocalForm, alpha: int, indices: tuple) -> LocalForm:
    """Dual-basis contraction against the vertical generator (alpha, I)."""
    g = (alpha, tuple(sorted(indices)))
    out: dict = {}
    for (vert, horiz), c in w.terms.items():
        for pos, x in enumerate(vert):
            if x == g:
                nv = vert[:pos] + vert[pos + 1 :]
                _acc(out, (nv, horiz), c * ((-1) ** pos))
                break
    return LocalForm(w.cs, w.p - 1, w.q, out)


def coordinate_total_field(cs: CoordSystem, i: int) -> TotalVF:
    X = [cs.zero()] * cs.m
    X[i] = cs.number(1)
    return TotalVF(cs, tuple(X))
