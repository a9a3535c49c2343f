"""Graded bracket structures: local observables and a finite-dim kernel.

Field-theory side: observables of degree 1 are Hamiltonian pairs (chi, zeta)
with D zeta = iota_chi omega; higher degrees hold plain forms.  l1 is -D
(pairs map to (0, -D zeta)); the n-ary bracket inserts the n Hamiltonian
fields into omega, and is zero whenever an argument is not a degree-1 pair.
The deformed 2-bracket L_xi eta - L_ups zeta - iota_xi iota_ups omega
+ iota_X iota_Y omega differs from l2 by an explicit D-exact term.

Finite-dimensional side: exact rational brackets on a graded vector space,
in either the antisymmetric convention (l_n, degree 2-n) or the shifted
symmetric one (q_n, degree 1), with Koszul signs, unshuffles, decalage
transport between the two conventions, and brute-force Jacobiators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .euler import AnsatzExhaustedError, invert_d_h
from .forms import LocalForm, MixedForm, d_total, insert, insert_ev, insert_tot, lie
from .jet import EvolutionaryVF, InsularVF, bracket_insular
from .noether import HamiltonianPair, InvalidPairError
from .variational import ContractViolation, fundamental_data


# ---------------------------------------------------------------------------
# permutations, Koszul signs, decalage
# ---------------------------------------------------------------------------


def _normalize_perm(sigma) -> tuple[int, ...]:
    """Accept a permutation as 0- or 1-based images; return 0-based."""
    sig = tuple(sigma)
    n = len(sig)
    if sorted(sig) == list(range(n)):
        return sig
    if sorted(sig) == list(range(1, n + 1)):
        return tuple(s - 1 for s in sig)
    raise ValueError(f"not a permutation: {sigma!r}")


def perm_sign(sigma) -> int:
    sig = _normalize_perm(sigma)
    sign = 1
    for k in range(len(sig)):
        for l in range(k + 1, len(sig)):
            if sig[k] > sig[l]:
                sign = -sign
    return sign


def koszul_sign(sigma, degrees) -> int:
    """Sign picked up by sigma acting on graded factors of the given degrees.

    sigma sends w_1 x ... x w_n to w_{sigma(1)} x ... x w_{sigma(n)}; the sign
    is the product of (-1)^{|a||b|} over the inversions of sigma.
    """
    sig = _normalize_perm(sigma)
    degs = list(degrees)
    if len(degs) != len(sig):
        raise ValueError("permutation and degree list lengths differ")
    sign = 1
    for k in range(len(sig)):
        for l in range(k + 1, len(sig)):
            if sig[k] > sig[l] and (degs[sig[k]] * degs[sig[l]]) % 2 == 1:
                sign = -sign
    return sign


def unshuffles(i: int, j: int) -> list[tuple[int, ...]]:
    """All (i, j)-unshuffles of {0..i+j-1} in lexicographic order.

    A returned tuple sigma lists images: sigma[0] < ... < sigma[i-1] and
    sigma[i] < ... < sigma[i+j-1].  There are C(i+j, i) of them.
    """
    n = i + j
    out = []
    for head in itertools.combinations(range(n), i):
        tail = tuple(k for k in range(n) if k not in head)
        out.append(head + tail)
    return out


def decalage_sign(degrees) -> int:
    """(-1)^{sum (n-i) |v_i|} for 1-based i over the unshifted degrees."""
    degs = list(degrees)
    n = len(degs)
    total = sum((n - 1 - k) * degs[k] for k in range(n))
    return -1 if total % 2 else 1


# ---------------------------------------------------------------------------
# finite-dimensional bracket families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GradedSpace:
    """Finite total-dimensional graded vector space; basis keys (degree, k)."""

    dims: tuple[tuple[int, int], ...]  # sorted ((degree, dim), ...)

    @classmethod
    def from_dims(cls, dims: dict) -> "GradedSpace":
        clean = {int(d): int(n) for d, n in dims.items() if int(n) > 0}
        return cls(tuple(sorted(clean.items())))

    def dim(self, degree: int) -> int:
        return dict(self.dims).get(degree, 0)

    def basis(self) -> list[tuple[int, int]]:
        return [(d, k) for d, n in self.dims for k in range(n)]

    def shifted(self, by: int) -> "GradedSpace":
        return GradedSpace(tuple(sorted((d + by, n) for d, n in self.dims)))


Element = dict  # basis key -> Fraction


def element_degree(v: Element) -> int | None:
    degs = {b[0] for b, c in v.items() if c}
    if not degs:
        return None
    if len(degs) > 1:
        raise ValueError("element is not homogeneous")
    return degs.pop()


def _add_into(acc: Element, v: Element, scale: Fraction) -> None:
    for b, c in v.items():
        s = acc.get(b, Fraction(0)) + c * scale
        if s:
            acc[b] = s
        else:
            acc.pop(b, None)


class BracketFamily:
    """Multilinear graded brackets stored on canonically sorted basis tuples.

    convention 'anti': graded antisymmetric, l_n of degree 2 - n.
    convention 'sym':  graded symmetric (shifted), q_n of degree 1.
    """

    def __init__(self, space: GradedSpace, convention: str = "anti"):
        if convention not in ("anti", "sym"):
            raise ValueError("convention must be 'anti' or 'sym'")
        self.space = space
        self.convention = convention
        self.entries: dict = {}  # (arity, inputs) -> Element

    # -- construction --------------------------------------------------------

    def set_bracket(self, inputs: tuple, value: Element) -> None:
        inputs = tuple(inputs)
        arity = len(inputs)
        canon, sign = self._canonical(inputs)
        if sign == 0:
            if any(c for c in value.values()):
                raise ValueError("bracket forced to zero by symmetry on these inputs")
            return
        scaled: Element = {}
        _add_into(scaled, value, Fraction(sign))
        out_deg = element_degree(scaled)
        if out_deg is not None:
            in_deg = sum(b[0] for b in inputs)
            expected = in_deg + (2 - arity if self.convention == "anti" else 1)
            if out_deg != expected:
                raise ValueError(
                    f"bracket output degree {out_deg}, expected {expected}"
                )
        key = (arity, canon)
        acc = dict(self.entries.get(key, {}))
        _add_into(acc, scaled, Fraction(1))
        if acc:
            self.entries[key] = acc
        else:
            self.entries.pop(key, None)

    def _canonical(self, inputs: tuple) -> tuple[tuple, int]:
        """Sort inputs, returning (sorted tuple, sign); sign 0 when forced zero."""
        order = sorted(range(len(inputs)), key=lambda k: inputs[k])
        canon = tuple(inputs[k] for k in order)
        # sign moving inputs into canonical order
        sigma = tuple(order)
        degs = [b[0] for b in inputs]
        sign = koszul_sign(sigma, degs)
        if self.convention == "anti":
            sign *= perm_sign(sigma)
        # repeated entries may force zero
        for a, b in zip(canon, canon[1:]):
            if a == b:
                d = a[0]
                if self.convention == "anti" and d % 2 == 0:
                    return canon, 0
                if self.convention == "sym" and d % 2 == 1:
                    return canon, 0
        return canon, sign

    # -- evaluation -----------------------------------------------------------

    def bracket_basis(self, inputs: tuple) -> Element:
        canon, sign = self._canonical(tuple(inputs))
        if sign == 0:
            return {}
        value = self.entries.get((len(inputs), canon), {})
        out: Element = {}
        _add_into(out, value, Fraction(sign))
        return out

    def bracket(self, elements: list) -> Element:
        """Multilinear evaluation on elements (dicts basis -> Fraction)."""
        out: Element = {}
        keys = [sorted(v.items()) for v in elements]
        for combo in itertools.product(*keys):
            basis = tuple(b for b, _ in combo)
            coeff = Fraction(1)
            for _, c in combo:
                coeff *= c
            if not coeff:
                continue
            _add_into(out, self.bracket_basis(basis), coeff)
        return out

    def arities(self) -> list[int]:
        return sorted({a for a, _ in self.entries})

    # -- JSON -------------------------------------------------------------------

    @classmethod
    def from_json(cls, data: dict) -> "BracketFamily":
        space = GradedSpace.from_dims(data["dims"])
        fam = cls(space, data.get("convention", "anti"))
        for rec in data.get("brackets", []):
            inputs = tuple((int(d), int(k)) for d, k in rec["in"])
            out_deg, out_k = rec["out"]
            value = {(int(out_deg), int(out_k)): Fraction(rec.get("coeff", "1"))}
            fam.set_bracket(inputs, value)
        return fam

    def to_json(self) -> dict:
        recs = []
        for (arity, inputs), value in sorted(self.entries.items()):
            for (d, k), c in sorted(value.items()):
                recs.append(
                    {
                        "arity": arity,
                        "in": [[str(b[0]), b[1]] for b in inputs],
                        "out": [str(d), k],
                        "coeff": str(c),
                    }
                )
        return {
            "convention": self.convention,
            "dims": {str(d): n for d, n in self.space.dims},
            "brackets": recs,
        }


def jacobiator(family: BracketFamily, n: int, inputs: list) -> Element:
    """The n-th Jacobi expression on basis inputs; zero for a valid structure.

    Antisymmetric convention:
      sum over i+j = n+1, sigma an (i, j-1)-unshuffle of
      (-1)^{j(i-1)} sgn(sigma) eps(sigma) l_j(l_i(x_sigma(1..i)), x_rest).
    Symmetric convention: the same sum with eps(sigma) alone.
    """
    degs = [b[0] for b in inputs]
    out: Element = {}
    for i in range(1, n + 1):
        j = n + 1 - i
        for sigma in unshuffles(i, j - 1):
            eps = koszul_sign(sigma, degs)
            if family.convention == "anti":
                coeff = Fraction(((-1) ** (j * (i - 1))) * perm_sign(sigma) * eps)
            else:
                coeff = Fraction(eps)
            head = [inputs[k] for k in sigma[:i]]
            tail = [inputs[k] for k in sigma[i:]]
            inner = family.bracket([{b: Fraction(1)} for b in head])
            if not inner:
                continue
            outer = family.bracket([inner] + [{b: Fraction(1)} for b in tail])
            _add_into(out, outer, coeff)
    return out


def all_jacobiators(family: BracketFamily, max_arity: int = 3) -> dict:
    """Jacobiators on every basis tuple up to the given arity."""
    basis = family.space.basis()
    out = {}
    for n in range(1, max_arity + 1):
        for combo in itertools.combinations_with_replacement(basis, n):
            out[(n, combo)] = jacobiator(family, n, list(combo))
    return out


def decalage_transport(family: BracketFamily) -> BracketFamily:
    """Transport antisymmetric data l_n to shifted symmetric data q_n.

    Basis elements move down one degree; the value on inputs v_1..v_n picks
    up the decalage sign (-1)^{sum (n-i)|v_i|} over the unshifted degrees.
    """
    if family.convention != "anti":
        raise ValueError("transport starts from the antisymmetric convention")
    shifted = BracketFamily(family.space.shifted(-1), "sym")
    for (arity, inputs), value in family.entries.items():
        sign = decalage_sign([b[0] for b in inputs])
        new_inputs = tuple((d - 1, k) for d, k in inputs)
        new_value = {(d - 1, k): c * sign for (d, k), c in value.items()}
        shifted.set_bracket(new_inputs, new_value)
    return shifted


def decalage_untransport(family: BracketFamily) -> BracketFamily:
    """Inverse of decalage_transport (shift degrees up, undo the sign)."""
    if family.convention != "sym":
        raise ValueError("untransport starts from the symmetric convention")
    back = BracketFamily(family.space.shifted(1), "anti")
    for (arity, inputs), value in family.entries.items():
        unshifted = tuple((d + 1, k) for d, k in inputs)
        sign = decalage_sign([b[0] for b in unshifted])
        new_value = {(d + 1, k): c * sign for (d, k), c in value.items()}
        back.set_bracket(unshifted, new_value)
    return back


# ---------------------------------------------------------------------------
# observables over the Poincare-Cartan form
# ---------------------------------------------------------------------------


@dataclass
class ObservableElement:
    """Degree-n observable: a Hamiltonian pair for n = 1, else a plain form.

    For n in {2..top} the payload is a MixedForm of total degree top - n.
    """

    degree: int
    payload: HamiltonianPair | MixedForm


def check_pair(pair: HamiltonianPair, L: LocalForm) -> MixedForm:
    """Residual of the defining identity iota_chi omega - D zeta."""
    data = fundamental_data(L)
    return insert(pair.chi, data.omega) - d_total(pair.zeta)


def l1_observable(v: ObservableElement, L: LocalForm) -> ObservableElement:
    """-D on form payloads; pairs map to the pair (0, -D zeta)."""
    cs = L.cs
    if v.degree == 1:
        pair = v.payload
        return ObservableElement(
            1, HamiltonianPair(InsularVF.zero(cs), -d_total(pair.zeta))
        )
    new = -d_total(v.payload)
    if v.degree == 2:
        return ObservableElement(1, HamiltonianPair(InsularVF.zero(cs), new))
    return ObservableElement(v.degree - 1, new)


def ln_observable(vs: list[ObservableElement], L: LocalForm, validate: bool = True) -> MixedForm:
    """Iterated insertion of the n Hamiltonian fields into omega.

    Zero as soon as one argument is not a degree-1 pair.  Inputs that are
    pairs are validated against L unless validate is False.
    """
    data = fundamental_data(L)
    if any(v.degree != 1 for v in vs):
        return MixedForm.zero(L.cs)
    out = data.omega
    for v in reversed(vs):
        pair = v.payload
        if validate and not check_pair(pair, L).is_zero():
            raise InvalidPairError("argument is not a valid Hamiltonian pair")
        out = insert(pair.chi, out)
    return out


def deformed_bracket(p1: HamiltonianPair, p2: HamiltonianPair, L: LocalForm) -> MixedForm:
    """L_xi eta - L_ups zeta - iota_xi iota_ups omega + iota_X iota_Y omega.

    The result is a Hamiltonian form for the bracket of the two fields; this
    is replayed before returning.
    """
    data = fundamental_data(L)
    xi, X = p1.chi.ev, p1.chi.tot
    ups, Y = p2.chi.ev, p2.chi.tot
    zeta, eta = p1.zeta, p2.zeta
    out = (
        lie(xi, eta)
        - lie(ups, zeta)
        - _insert2_ev(xi, ups, data.omega)
        + _insert2_tot(X, Y, data.omega)
    )
    chi_bracket = bracket_insular(p1.chi, p2.chi)
    if not (d_total(out) - insert(chi_bracket, data.omega)).is_zero():
        raise ContractViolation("deformed bracket is not Hamiltonian for [chi1, chi2]")
    return out


def _insert2_ev(a: EvolutionaryVF, b: EvolutionaryVF, w: MixedForm) -> MixedForm:
    return w.map(lambda c: MixedForm.of(insert_ev(a, insert_ev(b, c))))


def _insert2_tot(a, b, w: MixedForm) -> MixedForm:
    return w.map(lambda c: MixedForm.of(insert_tot(a, insert_tot(b, c))))


def d_exact_difference(
    p1: HamiltonianPair,
    p2: HamiltonianPair,
    L: LocalForm,
    order_bound: int = 2,
    degree_bound: int = 3,
) -> MixedForm:
    """Witness alpha with D alpha = l2(zeta, eta) - [zeta, eta].

    The surface component is the explicit term -(iota_xi eta_1 -
    iota_ups zeta_1); deeper components, when needed, come from horizontal
    inversion.  D alpha is replayed before returning.
    """
    cs = L.cs
    m = cs.m
    l2 = ln_observable(
        [ObservableElement(1, p1), ObservableElement(1, p2)], L
    )
    gamma = l2 - deformed_bracket(p1, p2, L)
    alpha = MixedForm.zero(cs)
    if m >= 2:
        xi, ups = p1.chi.ev, p2.chi.ev
        eta1 = p2.zeta.component(1, m - 2)
        zeta1 = p1.zeta.component(1, m - 2)
        surf = -(insert_ev(xi, eta1) - insert_ev(ups, zeta1))
        alpha = alpha + MixedForm.of(surf)
        resid = gamma - d_total(alpha)
        k = 1
        while not resid.is_zero() and k <= m - 2:
            comp = resid.component(k, m - 1 - k)
            if comp.is_zero():
                k += 1
                continue
            alpha = alpha + MixedForm.of(invert_d_h(comp, order_bound, degree_bound))
            resid = gamma - d_total(alpha)
            k += 1
    if not (d_total(alpha) - gamma).is_zero():
        raise AnsatzExhaustedError(order_bound, degree_bound)
    return alpha


def complete_hamiltonian_pair(
    chi: InsularVF,
    L: LocalForm,
    order_bound: int = 2,
    degree_bound: int = 3,
) -> HamiltonianPair:
    """Solve D zeta = iota_chi omega depth by depth for a Hamiltonian chi.

    The surface component comes from the Noether current of the evolutionary
    part; deeper components are found by horizontal inversion.  Raises when
    a depth equation has no solution within the bounds (the field is then
    not Hamiltonian, or the bounds are too small).
    """
    from .noether import noether_current

    cs = L.cs
    m = cs.m
    data = fundamental_data(L)
    target = insert(chi, data.omega)
    pair0 = noether_current(chi.ev, L, order_bound=order_bound, degree_bound=degree_bound)
    zeta = MixedForm.of(pair0.Z)
    for k in range(1, m):
        resid = target - d_total(zeta)
        comp = resid.component(k, m - k)
        if comp.is_zero():
            continue
        zeta = zeta + MixedForm.of(invert_d_h(comp, order_bound, degree_bound))
    pair = HamiltonianPair(chi, zeta)
    if not check_pair(pair, L).is_zero():
        raise AnsatzExhaustedError(order_bound, degree_bound)
    return pair


# -- Chevalley-Eilenberg boundary of fields -----------------------------------------


class NonSymplecticError(ValueError):
    """A field fails D iota_chi omega = 0."""


def ce_differential(chis: list[InsularVF]) -> list[tuple[Fraction, tuple]]:
    """Formal boundary sum over (2, n-2)-unshuffles:
    sgn(sigma) [X_{s1}, X_{s2}] ^ X_{s3} ^ ... ^ X_{sn}."""
    n = len(chis)
    out = []
    for sigma in unshuffles(2, n - 2):
        sign = Fraction(perm_sign(sigma))
        fields = (bracket_insular(chis[sigma[0]], chis[sigma[1]]),) + tuple(
            chis[k] for k in sigma[2:]
        )
        out.append((sign, fields))
    return out


def insert_fields(fields: tuple, w: MixedForm) -> MixedForm:
    """iota_{X_1 ... X_k} w = iota_{X_1} ... iota_{X_k} w."""
    out = w
    for chi in reversed(fields):
        out = insert(chi, out)
    return out


def insertion_cochain_check(chis: list[InsularVF], L: LocalForm) -> MixedForm:
    """Residual D(iota_{X_1..X_n} omega) - iota_{boundary} omega; zero when
    every input is symplectic (checked)."""
    data = fundamental_data(L)
    for chi in chis:
        if not d_total(insert(chi, data.omega)).is_zero():
            raise NonSymplecticError("input field is not symplectic")
    lhs = d_total(insert_fields(tuple(chis), data.omega))
    rhs = MixedForm.zero(L.cs)
    for sign, fields in ce_differential(chis):
        rhs = rhs + insert_fields(fields, data.omega).scale(sign)
    return lhs - rhs


def observable_jacobiator3(
    p1: HamiltonianPair, p2: HamiltonianPair, p3: HamiltonianPair, L: LocalForm
) -> tuple[MixedForm, MixedForm]:
    """Third Jacobi expression of (l1, l2, l3) on three pairs, with witness.

    Every contribution is evaluated through the generic unshuffle sum; the
    result collapses to -D(iota_{chi1 chi2 chi3} omega), so the returned
    witness w = -iota_{chi1 chi2 chi3} omega satisfies D w = J3.
    """
    vs = [ObservableElement(1, p) for p in (p1, p2, p3)]
    cs = L.cs
    total = MixedForm.zero(cs)
    n = 3
    for i in range(1, n + 1):
        j = n + 1 - i
        for sigma in unshuffles(i, j - 1):
            coeff = Fraction(((-1) ** (j * (i - 1))) * perm_sign(sigma) * koszul_sign(sigma, [1, 1, 1]))
            head = [vs[k] for k in sigma[:i]]
            tail = [vs[k] for k in sigma[i:]]
            if i == 1:
                inner: ObservableElement = l1_observable(head[0], L)
            else:
                inner_form = ln_observable(head, L, validate=False)
                inner = ObservableElement(i, inner_form)
            if j == 1:
                term_el = l1_observable(inner, L)
                term = (
                    term_el.payload.zeta
                    if isinstance(term_el.payload, HamiltonianPair)
                    else term_el.payload
                )
            else:
                term = ln_observable([inner] + tail, L, validate=False)
            total = total + term.scale(coeff)
    witness = -insert_fields(tuple(p.chi for p in (p1, p2, p3)), fundamental_data(L).omega)
    return total, witness
