"""Interior and exterior Euler operators, exactness tests, and inversion.

The interior Euler operator projects (p, top)-forms onto source forms by
integration by parts; its kernel is exactly the d_h-exact forms.  The
exterior Euler operator E = I after d_v squares to zero and computes the
Euler-Lagrange source form of a Lagrangian density.

divergence inversion is a linear-algebra ansatz: the unknown form's
coefficients are general differential polynomials with undetermined rational
coefficients, and d_h P = f becomes an exact linear system over Q.  Every
successful inversion is replayed symbolically before returning.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .expr import FUNC, CoordSystem, Expr, base_atom, func_atom, jet_atom, partial
from .forms import (
    LocalForm,
    contract_vert,
    d_h,
    d_v,
    delta,
    total_lie_multi,
    vol,
)
from .jet import total_derivative_multi


class NotExactError(ValueError):
    """The target fails the exactness precondition (nonzero Euler operator)."""


class AnsatzExhaustedError(RuntimeError):
    """No solution exists within the given order and degree bounds."""

    def __init__(self, order_bound: int, degree_bound: int):
        super().__init__(
            f"no solution within order bound {order_bound}, degree bound {degree_bound}"
        )
        self.order_bound = order_bound
        self.degree_bound = degree_bound


def sorted_multiindices(m: int, max_order: int):
    """All sorted multi-indices over m base directions with |I| <= max_order."""
    for k in range(max_order + 1):
        yield from itertools.combinations_with_replacement(range(m), k)


def interior_euler(w: LocalForm) -> LocalForm:
    """Integration-by-parts projection of a (p >= 1, top)-form onto source forms."""
    cs = w.cs
    if w.q != cs.m:
        raise ValueError("interior Euler operator needs top horizontal degree")
    if w.p < 1:
        raise ValueError("interior Euler operator needs at least one vertical slot")
    gens = set()
    for (vert, _h), _c in w.terms.items():
        gens.update(vert)
    out = LocalForm(cs, w.p, w.q)
    for alpha, idx in sorted(gens, key=lambda g: (g[0], len(g[1]), g[1])):
        inner = contract_vert(w, alpha, idx)
        if inner.is_zero():
            continue
        inner = total_lie_multi(inner, idx)
        term = delta(cs, alpha, ()).wedge(inner)
        out = out + (term if len(idx) % 2 == 0 else -term)
    return out.scale(Fraction(1, w.p))


def exterior_euler(w: LocalForm) -> LocalForm:
    """E = interior Euler operator composed with the vertical differential."""
    if w.q != w.cs.m:
        raise ValueError("exterior Euler operator needs top horizontal degree")
    return interior_euler(d_v(w))


def euler_lagrange(L: LocalForm) -> LocalForm:
    """Euler-Lagrange source form of a Lagrangian density (bidegree (0, top))."""
    if (L.p, L.q) != (0, L.cs.m):
        raise ValueError("a Lagrangian has bidegree (0, top)")
    return exterior_euler(L)


def lagrangian_coefficient(L: LocalForm) -> Expr:
    """The density coefficient f in L = f Vol."""
    cs = L.cs
    full = tuple(range(cs.m))
    out = cs.zero()
    for (vert, horiz), c in L.terms.items():
        if vert or horiz != full:
            raise ValueError("not a Lagrangian density")
        out = out + c
    return out


def euler_lagrange_components(L: LocalForm) -> tuple[Expr, ...]:
    """Components E_alpha = sum_I (-1)^{|I|} D_I(df/du_I^alpha).

    This is the direct coordinate formula; euler_lagrange computes the same
    object through the interior Euler operator, and the two are compared in
    the test suite.
    """
    cs = L.cs
    f = lagrangian_coefficient(L)
    comps = []
    for alpha in range(cs.e):
        total = cs.zero()
        for a in sorted(f.jet_atoms()):
            if a[1] != alpha:
                continue
            idx = a[3]
            piece = total_derivative_multi(partial(f, a), idx)
            total = total + (piece if len(idx) % 2 == 0 else -piece)
        comps.append(total)
    return tuple(comps)


def source_components(src: LocalForm) -> tuple[Expr, ...]:
    """Coefficients E_alpha of a (1, top) source form sum E_a du^a ^ Vol."""
    cs = src.cs
    if (src.p, src.q) != (1, cs.m):
        raise ValueError("source components need a (1, top)-form")
    comps = [cs.zero()] * cs.e
    full = tuple(range(cs.m))
    for (vert, horiz), c in src.terms.items():
        (alpha, idx) = vert[0]
        if idx or horiz != full:
            raise ValueError("form is not a source form")
        comps[alpha] = comps[alpha] + c
    return tuple(comps)


def source_form_from_components(cs: CoordSystem, comps) -> LocalForm:
    out = LocalForm(cs, 1, cs.m)
    for alpha, c in enumerate(comps):
        out = out + delta(cs, alpha, ()).wedge(vol(cs)).scale(c)
    return out


def is_d_exact_top(w: LocalForm) -> bool:
    """Whether a (p, top)-form is d_h-exact on the global chart.

    For p >= 1 the kernel of the interior Euler operator is exactly the
    d_h-exact forms; for p = 0 the test is the vanishing of the exterior
    Euler operator.
    """
    if w.q != w.cs.m:
        raise ValueError("exactness test needs top horizontal degree")
    if w.p == 0:
        return exterior_euler(w).is_zero()
    return interior_euler(w).is_zero()


# -- linear-ansatz inversion of d_h ------------------------------------------------


def solve_linear(rows: list[tuple[dict, Fraction]], n_unknowns: int):
    """Solve a sparse exact linear system; None when inconsistent.

    rows are (coefficient map unknown-index -> Fraction, right-hand side).
    Free unknowns are set to zero, making the result deterministic.
    """
    pivots: dict[int, tuple[dict, Fraction]] = {}
    for row, rhs in rows:
        row = {k: v for k, v in row.items() if v}
        while True:
            if not row:
                if rhs != 0:
                    return None
                break
            c = min(row)
            if c in pivots:
                prow, prhs = pivots[c]
                k = row.pop(c)
                for cc, v in prow.items():
                    if cc == c:
                        continue
                    s = row.get(cc, Fraction(0)) - k * v
                    if s:
                        row[cc] = s
                    else:
                        row.pop(cc, None)
                rhs = rhs - k * prhs
            else:
                k = row[c]
                prow = {cc: v / k for cc, v in row.items()}
                pivots[c] = (prow, rhs / k)
                break
    # Gauss-Jordan pass so every pivot row only involves free unknowns
    for c in sorted(pivots, reverse=True):
        prow, prhs = pivots[c]
        for c2 in sorted(pivots):
            if c2 >= c:
                break
            row2, rhs2 = pivots[c2]
            k = row2.get(c)
            if not k:
                continue
            merged = dict(row2)
            merged.pop(c)
            for cc, v in prow.items():
                if cc == c:
                    continue
                s = merged.get(cc, Fraction(0)) - k * v
                if s:
                    merged[cc] = s
                else:
                    merged.pop(cc, None)
            pivots[c2] = (merged, rhs2 - k * prhs)
    sol = [Fraction(0)] * n_unknowns
    for c, (prow, prhs) in pivots.items():
        sol[c] = prhs  # free unknowns are zero
    return sol


def monomial_pool(cs: CoordSystem, order_bound: int, degree_bound: int, extra_atoms=()):
    """All monomials (as Exprs) in base and jet atoms within the bounds."""
    atoms = [base_atom(i) for i in range(cs.m)]
    for alpha in range(cs.e):
        for idx in sorted_multiindices(cs.m, order_bound):
            atoms.append(jet_atom(alpha, idx))
    atoms.extend(a for a in extra_atoms if a not in atoms)
    monos = [()]
    for deg in range(1, degree_bound + 1):
        for combo in itertools.combinations_with_replacement(range(len(atoms)), deg):
            counts: dict = {}
            for k in combo:
                counts[atoms[k]] = counts.get(atoms[k], 0) + 1
            monos.append(tuple(sorted(counts.items())))
    return [Expr(cs, {m: Fraction(1)}) for m in monos]


def _extra_func_atoms(f: LocalForm | Expr) -> list:
    """Function atoms usable by an antiderivative ansatz.

    Includes every function application found in the target together with
    all lower derivative orders of the same application: d_h raises ticks,
    so inverting it may need the tick-lowered atoms.
    """
    exprs = [f] if isinstance(f, Expr) else list(f.terms.values())
    out = []
    for e in exprs:
        for mono in e.terms:
            for a, _ in mono:
                if a[0] != FUNC:
                    continue
                _, name, order, arg = a
                for k in range(order + 1):
                    lowered = func_atom(name, k, arg)
                    if lowered not in out:
                        out.append(lowered)
    return out


def invert_d_h(target: LocalForm, order_bound: int, degree_bound: int) -> LocalForm:
    """Find P with d_h P = target by a linear ansatz, or raise AnsatzExhausted.

    The unknown form has the bidegree (p, q-1) of the target minus one
    horizontal slot; its coefficients range over all monomials within the
    bounds, on every generator word available at that bidegree.
    """
    cs = target.cs
    if target.q < 1:
        raise ValueError("target must have at least one horizontal generator")
    p, q = target.p, target.q - 1

    monos = monomial_pool(cs, order_bound, degree_bound, _extra_func_atoms(target))
    vert_gens = [
        (alpha, idx)
        for alpha in range(cs.e)
        for idx in sorted_multiindices(cs.m, order_bound)
    ]
    vert_words = list(itertools.combinations(vert_gens, p))
    horiz_words = list(itertools.combinations(range(cs.m), q))

    unknowns = []  # (vert, horiz, monomial Expr)
    for vw in vert_words:
        for hw in horiz_words:
            for mono in monos:
                unknowns.append((vw, hw, mono))

    # residual(lambda) = d_h(sum lambda_k basis_k) - target, linear in lambda
    rows_map: dict = {}  # (vert, horiz, monomial) -> {unknown index: coeff}
    rhs_map: dict = {}
    for k, (vw, hw, mono) in enumerate(unknowns):
        basis = LocalForm(cs, p, q, {(vw, hw): mono})
        image = d_h(basis)
        for key, c in image.terms.items():
            for m2, c2 in c.terms.items():
                slot = (key, m2)
                rows_map.setdefault(slot, {})
                rows_map[slot][k] = rows_map[slot].get(k, Fraction(0)) + c2
    for key, c in target.terms.items():
        for m2, c2 in c.terms.items():
            slot = (key, m2)
            rhs_map[slot] = rhs_map.get(slot, Fraction(0)) + c2
            rows_map.setdefault(slot, {})

    rows = [(rows_map[slot], rhs_map.get(slot, Fraction(0))) for slot in sorted(rows_map)]
    sol = solve_linear(rows, len(unknowns))
    if sol is None:
        raise AnsatzExhaustedError(order_bound, degree_bound)
    out = LocalForm(cs, p, q)
    for k, lam in enumerate(sol):
        if lam:
            vw, hw, mono = unknowns[k]
            out = out + LocalForm(cs, p, q, {(vw, hw): mono * lam})
    if not (d_h(out) - target).is_zero():  # pragma: no cover - solver guarantee
        raise AnsatzExhaustedError(order_bound, degree_bound)
    return out


def divergence_invert(
    f: LocalForm, order_bound: int | None = None, degree_bound: int | None = None
) -> LocalForm:
    """Invert a total divergence: P of bidegree (0, top-1) with d_h P = f.

    Requires E(f) = 0 (raises NotExactError otherwise).  The solution is
    verified symbolically before returning; when none exists within the
    bounds, AnsatzExhaustedError reports the bounds used.
    """
    cs = f.cs
    if (f.p, f.q) != (0, cs.m):
        raise ValueError("divergence inversion needs a (0, top)-form")
    if not exterior_euler(f).is_zero():
        raise NotExactError("target has a nonzero Euler operator")
    coeffs = list(f.terms.values())
    order = max((c.max_jet_order() for c in coeffs), default=0)
    degree = max((c.degree() for c in coeffs), default=0)
    if order_bound is None:
        order_bound = order
    if degree_bound is None:
        degree_bound = degree
    return invert_d_h(f, order_bound, degree_bound)


def ibp_shift(f: Expr, g: Expr, indices: tuple) -> list[Expr]:
    """Boundary terms P_j with sum_j D_j P_j = (-1)^{|I|} D_I g * f - g D_I f.

    The explicit splitting runs over the positions of the multi-index: the
    j-th summand is (-1)^{|I|-j+1} D_{(i_1..i_{j-1})} f * D_{(i_{j+1}..)} g
    placed in the slot of the base direction i_j.
    """
    cs = f.cs
    idx = tuple(sorted(indices))
    out = [cs.zero() for _ in range(cs.m)]
    k = len(idx)
    for j in range(1, k + 1):
        head, mid, tail = idx[: j - 1], idx[j - 1], idx[j:]
        piece = total_derivative_multi(f, head) * total_derivative_multi(g, tail)
        if (k - j + 1) % 2 == 1:
            piece = -piece
        out[mid] = out[mid] + piece
    return out
