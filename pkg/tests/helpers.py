"""Shared oracles and identity batteries for the test suite.

The Cartan battery evaluates every commutator identity of the calculus as an
operator identity on a concrete form; the finite-difference oracle
differentiates a discretized action with exact rational arithmetic, fully
independent of the symbolic Euler-Lagrange path it is used to check.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from varcalc.euler import lagrangian_coefficient
from varcalc.expr import BASE, Expr, eval_on_section
from varcalc.forms import (
    LocalForm,
    MixedForm,
    d_h_mixed,
    d_total,
    d_v_mixed,
    insert,
    lie,
    lie_d,
    m_op,
)
from varcalc.jet import EvolutionaryVF, InsularVF, TotalVF, bracket_insular
from varcalc.parser import as_insular


def as_mixed(w) -> MixedForm:
    return MixedForm.of(w) if isinstance(w, LocalForm) else w


def ins(vf, w: MixedForm) -> MixedForm:
    out = insert(vf, w)
    return as_mixed(out)


# -- graded commutators of the basic operators -----------------------------------
#
# Operator degrees: the three differentials and every insertion are odd; Lie
# derivatives are even; the defect operator M is odd.


def cartan_identities(
    w, xi: EvolutionaryVF, xi2: EvolutionaryVF, X: TotalVF, X2: TotalVF
) -> dict[str, bool]:
    """Evaluate the full insular calculus on one form; name -> held?"""
    w = as_mixed(w)
    cs = w.cs
    chi = InsularVF.from_parts(xi, X)
    chi2 = InsularVF.from_parts(xi2, X2)

    out: dict[str, bool] = {}

    def record(name, lhs, rhs):
        out[name] = (lhs - rhs).is_zero()

    D = d_total
    d = d_h_mixed
    dv = d_v_mixed

    # [d, iota_xi] = 0, hence [delta, iota_xi] = [D, iota_xi]
    record("d_iota_ev_anticommute", d(ins(xi, w)) + ins(xi, d(w)), MixedForm.zero(cs))
    record(
        "lie_ev_vertical",
        dv(ins(xi, w)) + ins(xi, dv(w)),
        D(ins(xi, w)) + ins(xi, D(w)),
    )
    # [delta, iota_X] = L_X - L^d_X
    record(
        "delta_iota_tot_defect",
        dv(ins(X, w)) + ins(X, dv(w)),
        lie(X, w) - lie_d(X, w),
    )
    # M_X agrees across its five presentations
    MX = m_op(X, w)
    record("m_via_D", D(lie_d(X, w)) - lie_d(X, D(w)), MX)
    record("m_via_delta_lie", dv(lie(X, w)) - lie(X, dv(w)), MX)
    record("m_via_minus_d_lie", -(d(lie(X, w)) - lie(X, d(w))), MX)
    inner = lambda form: dv(ins(X, form)) + ins(X, dv(form))  # [delta, iota_X], even
    record("m_via_d_delta_iota", -(d(inner(w)) - inner(d(w))), MX)

    # [L_chi, iota_chi'] = iota_[chi, chi'] for all flavour combinations
    for name, a, b in (
        ("ins_ins", chi, chi2),
        ("ev_ev", xi, xi2),
        ("tot_tot", X, X2),
        ("ev_tot", xi, X2),
    ):
        br = bracket_insular(as_insular(a), as_insular(b))
        record(
            f"lie_iota_{name}",
            as_mixed(lie(a, ins(b, w))) - ins(b, lie(a, w)),
            ins(br, w),
        )
        record(
            f"lie_lie_{name}",
            as_mixed(lie(a, lie(b, w))) - as_mixed(lie(b, lie(a, w))),
            as_mixed(lie(br, w)),
        )

    # [iota_xi, L^d_X] = 0
    record(
        "iota_ev_lie_d",
        ins(xi, lie_d(X, w)) - lie_d(X, ins(xi, w)),
        MixedForm.zero(cs),
    )
    # [L^d_X, iota_X'] = iota_[X, X']
    brXX = bracket_insular(as_insular(X), as_insular(X2))
    record(
        "lie_d_iota_tot",
        lie_d(X, ins(X2, w)) - ins(X2, lie_d(X, w)),
        ins(brXX, w),
    )
    # [L^d_X, L^d_X'] = L^d_[X, X']
    record(
        "lie_d_lie_d",
        lie_d(X, lie_d(X2, w)) - lie_d(X2, lie_d(X, w)),
        lie_d(brXX.tot, w),
    )
    # [M_X, D] = [M_X, d] = [M_X, delta] = 0  (M is odd)
    record("m_D", m_op(X, D(w)) + D(m_op(X, w)), MixedForm.zero(cs))
    record("m_d", m_op(X, d(w)) + d(m_op(X, w)), MixedForm.zero(cs))
    record("m_delta", m_op(X, dv(w)) + dv(m_op(X, w)), MixedForm.zero(cs))
    # [L_xi, L^d_X] = L^d_[xi, X]  (Jacobi on [L_xi, [d, iota_X]] with
    # [L_xi, d] = 0 and [L_xi, iota_X] = iota_[xi, X])
    brxiX2 = bracket_insular(as_insular(xi), as_insular(X))
    record(
        "lie_ev_lie_d_tot",
        as_mixed(lie(xi, lie_d(X, w))) - lie_d(X, as_mixed(lie(xi, w))),
        lie_d(brxiX2.tot, w),
    )
    # [L_xi, M_X] = M_[xi, X]
    brxiX = bracket_insular(as_insular(xi), as_insular(X))
    record(
        "lie_ev_m",
        as_mixed(lie(xi, m_op(X, w))) - m_op(X, as_mixed(lie(xi, w))),
        m_op(brxiX.tot, w),
    )
    return out


# -- finite-difference variational oracle ------------------------------------------


_W1 = {1: Fraction(1, 2), -1: Fraction(-1, 2)}
_W2 = {1: Fraction(1), 0: Fraction(-2), -1: Fraction(1)}


def _stencil(counts: tuple[int, ...], h: Fraction) -> dict[tuple[int, ...], Fraction]:
    """Centered-difference weights for a per-axis derivative count <= 2."""
    tables = []
    for k in counts:
        if k == 0:
            tables.append({0: Fraction(1)})
        elif k == 1:
            tables.append(_W1)
        elif k == 2:
            tables.append(_W2)
        else:
            raise ValueError("oracle supports jet order <= 2 per axis")
    out: dict[tuple[int, ...], Fraction] = {}
    total = sum(counts)
    for offsets in itertools.product(*[t.items() for t in tables]):
        key = tuple(o for o, _ in offsets)
        val = Fraction(1)
        for _, v in offsets:
            val *= v
        out[key] = out.get(key, Fraction(0)) + val / h**total
    return out


def _eval_poly(f: Expr, atom_values: dict) -> Fraction:
    total = Fraction(0)
    for mono, c in f.terms.items():
        term = c
        for a, e in mono:
            term *= atom_values[a] ** e
        total += term
    return total


def fd_variational_derivative(
    L: LocalForm,
    phi: dict,
    point: dict,
    alpha: int = 0,
    h: Fraction = Fraction(1, 10),
    delta: Fraction = Fraction(1, 7),
) -> Fraction:
    """d/du^alpha(x0) of the discretized action, with exact rationals.

    The action is h^m sum_z L(x(z), centered-difference jets of u at z); the
    derivative with respect to the single node value u^alpha(x0) is taken by
    a symmetric difference quotient.  No symbolic derivative enters.
    """
    cs = L.cs
    m = cs.m
    f = lagrangian_coefficient(L)
    jets = sorted(f.jet_atoms())
    radius = max((a[2] for a in jets), default=0)
    if any(a[0] == 2 for mono in f.terms for a, _ in mono):
        raise ValueError("function symbols are not supported by this oracle")

    x0 = [Fraction(point[n]) for n in cs.base_names]

    # exact field values on the lattice
    values: dict[tuple[int, tuple[int, ...]], Fraction] = {}
    for a_idx, name in enumerate(cs.fiber_names):
        for offs in itertools.product(range(-2 * radius, 2 * radius + 1), repeat=m):
            pt = {n: x0[i] + h * offs[i] for i, n in enumerate(cs.base_names)}
            val = eval_on_section(cs.jet(name, ()), phi, pt)
            values[(a_idx, offs)] = Fraction(val)

    stencils = {}
    for a in jets:
        counts = tuple(a[3].count(i) for i in range(m))
        stencils[a] = _stencil(counts, h)

    def action(shift: Fraction) -> Fraction:
        total = Fraction(0)
        for z in itertools.product(range(-radius, radius + 1), repeat=m):
            atom_values: dict = {}
            for i in range(m):
                atom_values[(BASE, i)] = x0[i] + h * z[i]
            for a in jets:
                acc = Fraction(0)
                for off, wgt in stencils[a].items():
                    node = tuple(z[i] + off[i] for i in range(m))
                    v = values[(a[1], node)]
                    if a[1] == alpha and node == (0,) * m:
                        v = v + shift
                    acc += wgt * v
                atom_values[a] = acc
            total += _eval_poly(f, atom_values)
        return total * h**m

    return (action(delta) - action(-delta)) / (2 * delta) / h**m
