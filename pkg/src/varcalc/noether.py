"""Symmetries, conserved currents, and the bracket structures they carry.

A symmetry is an evolutionary field whose action on the Lagrangian is a
total divergence; its Noether current is A - iota_xi lambda1, where A is any
antiderivative of the divergence, and the defining identity
d_h Z = iota_xi EL is replayed on every construction.

Hamiltonian pairs bundle an insular field chi with a form family zeta tied
by D zeta = iota_chi omega for the closed form omega = EL + omega1; the
check splits that equation by bidegree.  The second-theorem identity for a
gauge action with coefficients c_{alpha,beta}^I reads
sum (-1)^{|I|} D_I(c_{alpha,beta}^I E_alpha) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .euler import (
    AnsatzExhaustedError,
    divergence_invert,
    euler_lagrange,
    euler_lagrange_components,
    exterior_euler,
    invert_d_h,
    monomial_pool,
    solve_linear,
    sorted_multiindices,
)
from .expr import CoordSystem, Expr
from .forms import (
    LocalForm,
    MixedForm,
    d_h,
    d_total,
    d_v,
    insert,
    insert_ev,
    lie,
)
from .jet import (
    EvolutionaryVF,
    InsularVF,
    bracket_evolutionary,
    total_derivative_multi,
)
from .variational import fundamental_data


class NotASymmetryError(ValueError):
    """The field does not leave the Lagrangian invariant up to a divergence."""


class BadWitnessError(ValueError):
    """A supplied divergence witness fails d_h A = L_xi L."""


class InvalidPairError(ValueError):
    """A supplied pair fails its defining identity."""


@dataclass
class NoetherPair:
    """Symmetry plus conserved current with d_h Z = iota_xi EL."""

    xi: EvolutionaryVF
    Z: LocalForm


@dataclass
class HamiltonianPair:
    """Insular field chi and form family zeta with D zeta = iota_chi omega."""

    chi: InsularVF
    zeta: MixedForm


@dataclass
class GaugeAction:
    """Linear action xi(psi)_alpha = sum_I c_{alpha,beta}^I D_I psi_beta.

    coefficients maps (beta, alpha, I) -> Expr, where beta indexes the
    parameter slot (0 for a single scalar parameter).
    """

    cs: CoordSystem
    coefficients: dict = field(default_factory=dict)

    def parameter_slots(self) -> list[int]:
        return sorted({beta for beta, _, _ in self.coefficients})


def symmetry_defect(xi: EvolutionaryVF, L: LocalForm) -> LocalForm:
    """L_xi L as a (0, top)-form."""
    return lie(xi, L).component(0, L.cs.m)


def is_symmetry(xi: EvolutionaryVF, L: LocalForm) -> tuple[bool, LocalForm]:
    """Whether L_xi L is a total divergence; returns (flag, witness L_xi L)."""
    eta = symmetry_defect(xi, L)
    return exterior_euler(eta).is_zero(), eta


def noether_current(
    xi: EvolutionaryVF,
    L: LocalForm,
    witness: LocalForm | None = None,
    order_bound: int | None = None,
    degree_bound: int | None = None,
) -> NoetherPair:
    """Construct the conserved current Z = A - iota_xi lambda1.

    When no antiderivative A of L_xi L is supplied, one is found by
    divergence inversion.  The defining identity d_h Z = iota_xi EL is
    replayed before returning.
    """
    ok, eta = is_symmetry(xi, L)
    if not ok:
        raise NotASymmetryError("field is not a symmetry of the Lagrangian")
    if witness is not None:
        if not (d_h(witness) - eta).is_zero():
            raise BadWitnessError("witness fails d_h A = L_xi L")
        A = witness
    else:
        A = divergence_invert(eta, order_bound, degree_bound)
    data = fundamental_data(L)
    Z = A - insert_ev(xi, data.lambda1)
    resid = d_h(Z) - insert_ev(xi, data.EL)
    if not resid.is_zero():  # pragma: no cover - holds by construction
        raise InvalidPairError("current fails d_h Z = iota_xi EL")
    return NoetherPair(xi, Z)


def check_noether_pair(pair: NoetherPair, L: LocalForm) -> LocalForm:
    """Residual of the defining identity d_h Z - iota_xi EL."""
    EL = euler_lagrange(L)
    return d_h(pair.Z) - insert_ev(pair.xi, EL)


def noether_pair_bracket(p1: NoetherPair, p2: NoetherPair, L: LocalForm) -> NoetherPair:
    """Bracket ([xi, ups], L_xi H - L_ups Z - iota_xi iota_ups omega1).

    Both inputs are validated against L; the output's defining identity is
    replayed before returning.
    """
    for p in (p1, p2):
        if not check_noether_pair(p, L).is_zero():
            raise InvalidPairError("input is not a valid Noether pair for L")
    data = fundamental_data(L)
    xi, ups = p1.xi, p2.xi
    Z, H = p1.Z, p2.Z
    new_xi = bracket_evolutionary(xi, ups)
    current = (
        lie(xi, H).component(0, L.cs.m - 1)
        - lie(ups, Z).component(0, L.cs.m - 1)
        - insert_ev(xi, insert_ev(ups, data.omega1))
    )
    out = NoetherPair(new_xi, current)
    if not check_noether_pair(out, L).is_zero():  # pragma: no cover
        raise InvalidPairError("bracket failed its defining identity")
    return out


def noether_jacobiator(
    p1: NoetherPair, p2: NoetherPair, p3: NoetherPair, L: LocalForm
) -> tuple[EvolutionaryVF, LocalForm]:
    """Cyclic Jacobi sum of the pair bracket.

    Returns (evolutionary part, current part).  The evolutionary part
    vanishes identically; whether the current part vanishes exactly or is
    only a total divergence is reported by the caller, not asserted here.
    """
    triples = [(p1, p2, p3), (p2, p3, p1), (p3, p1, p2)]
    ev_total = None
    cur_total = None
    for a, b, c in triples:
        inner = noether_pair_bracket(b, c, L)
        outer = noether_pair_bracket(a, inner, L)
        ev_total = outer.xi if ev_total is None else ev_total + outer.xi
        cur_total = outer.Z if cur_total is None else cur_total + outer.Z
    return ev_total, cur_total


# -- symplectic and Hamiltonian checks ------------------------------------------


def check_symplectic(chi: InsularVF, L: LocalForm) -> dict:
    """Split D(iota_chi omega) = 0 into its three depth equations.

    The rows are the bidegree components (1, top), (2, top-1), (3, top-2)
    of the closedness defect; any further nonzero component is appended.
    """
    data = fundamental_data(L)
    resid = d_total(insert(chi, data.omega))
    m = L.cs.m
    rows = [("EL row (1,m)", 1, m), ("current row (2,m-1)", 2, m - 1), ("deep row (3,m-2)", 3, m - 2)]
    return _bidegree_report(resid, L.cs, rows)


def check_hamiltonian_pair(chi: InsularVF, zeta: MixedForm, L: LocalForm) -> dict:
    """Split iota_chi omega = D zeta by depth.

    The surface row is exactly the Noether-pair identity
    d_h zeta_0 = iota_xi EL for the evolutionary part of chi.
    """
    data = fundamental_data(L)
    resid = insert(chi, data.omega) - d_total(zeta)
    m = L.cs.m
    rows = [
        ("noether surface (0,m)", 0, m),
        ("current row (1,m-1)", 1, m - 1),
        ("deep row (2,m-2)", 2, m - 2),
    ]
    return _bidegree_report(resid, L.cs, rows)


def _bidegree_report(resid: MixedForm, cs: CoordSystem, rows: list) -> dict:
    out = {}
    seen = set()
    for name, p, q in rows:
        if q < 0 or q > cs.m or p < 0:
            continue
        comp = resid.component(p, q)
        out[name] = (comp.is_zero(), MixedForm.of(comp))
        seen.add((p, q))
    for key in sorted(resid.components):
        if key not in seen:
            comp = resid.component(*key)
            out[f"residual{key}"] = (comp.is_zero(), MixedForm.of(comp))
    return out


def report_passes(report: dict) -> bool:
    return all(ok for ok, _ in report.values())


# -- gauge identities -------------------------------------------------------------


def noether2_identity(g: GaugeAction, L: LocalForm) -> dict:
    """Evaluate sum (-1)^{|I|} D_I(c_{alpha,beta}^I E_alpha) per parameter slot.

    A valid gauge symmetry yields identically zero expressions.
    """
    comps = euler_lagrange_components(L)
    cs = L.cs
    out: dict = {}
    for beta in g.parameter_slots() or [0]:
        total = cs.zero()
        for (b, alpha, idx), coeff in g.coefficients.items():
            if b != beta or coeff.is_zero():
                continue
            piece = total_derivative_multi(coeff * comps[alpha], tuple(idx))
            total = total + (piece if len(idx) % 2 == 0 else -piece)
        out[beta] = total
    return out


def universal_current_check(
    xi1: EvolutionaryVF, xi2: EvolutionaryVF, L: LocalForm
) -> LocalForm:
    """Off-shell identity d_h(iota_2 iota_1 omega1) + iota_2 iota_1 d_v EL = 0."""
    data = fundamental_data(L)
    first = d_h(insert_ev(xi2, insert_ev(xi1, data.omega1)))
    second = insert_ev(xi2, insert_ev(xi1, d_v(data.EL)))
    return first + second


# -- on-shell ideal membership -----------------------------------------------------


def vanishes_on_shell(
    f: Expr,
    L: LocalForm,
    order_bound: int = 2,
    degree_bound: int = 2,
) -> bool:
    """Membership of f in the differential ideal of the field equations.

    Solves f = sum c_alpha^I D_I(E_alpha) with the c's ranging over
    monomials within the bounds; exact, so a True answer is a certificate.
    """
    cs = L.cs
    comps = euler_lagrange_components(L)
    monos = monomial_pool(cs, order_bound, degree_bound)
    derived = {}
    for alpha in range(cs.e):
        if comps[alpha].is_zero():
            continue
        for idx in sorted_multiindices(cs.m, order_bound):
            derived[(alpha, idx)] = total_derivative_multi(comps[alpha], tuple(idx))
    unknowns = [
        (key, mono) for key in sorted(derived) for mono in monos
    ]
    rows_map: dict = {}
    for k, (key, mono) in enumerate(unknowns):
        prod = mono * derived[key]
        for m2, c2 in prod.terms.items():
            rows_map.setdefault(m2, {})
            rows_map[m2][k] = rows_map[m2].get(k, Fraction(0)) + c2
    rhs_map: dict = {}
    for m2, c2 in f.terms.items():
        rhs_map[m2] = c2
        rows_map.setdefault(m2, {})
    rows = [(rows_map[m2], rhs_map.get(m2, Fraction(0))) for m2 in sorted(rows_map)]
    return solve_linear(rows, len(unknowns)) is not None


def d_exact_current(current: LocalForm, order_bound: int, degree_bound: int):
    """Try to write a (0, top-1) current as d_h of a lower form.

    Returns the witness or None; used to report whether bracket Jacobiators
    are divergences.
    """
    try:
        return invert_d_h(current, order_bound, degree_bound)
    except AnsatzExhaustedError:
        return None
