"""The fundamental decomposition of a Lagrangian's variation.

For a Lagrangian density L the boundary form lambda1 satisfies
d_h lambda1 = EL - d_v L; its vertical differential omega1 = d_v lambda1 is
the universal conserved current, and omega = EL + omega1 is the D-closed
Poincare-Cartan form, with Lepagean potential L + lambda1.

lambda1 is produced by an explicit double sum over the positions of each
sorted multi-index carrying a jet dependence of L.  The overall sign of the
sum is fixed by the contract d_h lambda1 + d_v L - EL = 0, which is checked
symbolically before anything is returned: if the first candidate fails, the
global sign is flipped and the flip recorded.  A candidate failing both ways
aborts with diagnostics (it would mean an internal inconsistency, not a bad
input).
"""

from __future__ import annotations

from dataclasses import dataclass

from .expr import jet_atom, partial
from .forms import (
    LocalForm,
    MixedForm,
    coordinate_total_field,
    contract_vert,
    d_h,
    d_total,
    d_v,
    delta,
    insert_tot,
    total_lie_multi,
)
from .euler import euler_lagrange, lagrangian_coefficient


class ContractViolation(AssertionError):
    """An internally-derived identity failed symbolically."""


@dataclass
class FundamentalData:
    """Everything the decomposition of one Lagrangian produces."""

    L: LocalForm
    EL: LocalForm
    lambda1: LocalForm
    omega1: LocalForm
    omega: MixedForm
    lepagean: MixedForm
    lambda1_sign_flipped: bool


def _lambda1_candidate(L: LocalForm) -> LocalForm:
    """Literal double sum: for each jet dependence (alpha, I) of L and each
    split position j of I = (J, i_j, K), the term
    du_J^alpha ^ (-1)^{|K|} D_K( (-1)^top iota_{(alpha,I)} iota_{D_{i_j}} d_v L )."""
    cs = L.cs
    dvL = d_v(L)
    out = LocalForm(cs, 1, cs.m - 1)
    f = lagrangian_coefficient(L)
    for a in sorted(f.jet_atoms()):
        _, alpha, _, idx = a
        if not idx:
            continue
        for j in range(len(idx)):
            head, mid, tail = idx[:j], idx[j], idx[j + 1 :]
            inner = insert_tot(coordinate_total_field(cs, mid), dvL)
            inner = contract_vert(inner, alpha, idx)
            if inner.is_zero():
                continue
            inner = total_lie_multi(inner, tail)
            sign = (-1) ** (len(tail) + cs.m)
            term = delta(cs, alpha, head).wedge(inner)
            out = out + (term if sign == 1 else -term)
    return out


def lambda1_with_flag(L: LocalForm) -> tuple[LocalForm, bool]:
    """Boundary form plus a flag recording whether the global sign flipped."""
    cs = L.cs
    if (L.p, L.q) != (0, cs.m):
        raise ValueError("a Lagrangian has bidegree (0, top)")
    EL = euler_lagrange(L)
    cand = _lambda1_candidate(L)
    resid = d_h(cand) + d_v(L) - EL
    if resid.is_zero():
        return cand, False
    cand = -cand
    resid2 = d_h(cand) + d_v(L) - EL
    if resid2.is_zero():
        return cand, True
    raise ContractViolation(
        "boundary form fails d_h(lambda1) = EL - d_v L under both signs; "
        f"residual {resid!r}"
    )


def lambda1(L: LocalForm) -> LocalForm:
    return lambda1_with_flag(L)[0]


def omega1(L: LocalForm) -> LocalForm:
    """Universal conserved current d_v(lambda1)."""
    return d_v(lambda1(L))


def poincare_cartan(L: LocalForm) -> MixedForm:
    """The D-closed form EL + omega1; closedness is replayed before returning."""
    data = fundamental_data(L)
    return data.omega


def fundamental_data(L: LocalForm) -> FundamentalData:
    lam1, flipped = lambda1_with_flag(L)
    EL = euler_lagrange(L)
    om1 = d_v(lam1)
    omega = MixedForm.of(EL, om1)
    lepagean = MixedForm.of(L, lam1)
    if not d_total(omega).is_zero():
        raise ContractViolation("Poincare-Cartan form is not D-closed")
    if not (d_total(lepagean) - omega).is_zero():
        raise ContractViolation("Lepagean potential fails D(L + lambda1) = omega")
    return FundamentalData(L, EL, lam1, om1, omega, lepagean, flipped)


def first_order_lambda1(L: LocalForm) -> LocalForm:
    """Closed-form boundary term for first-order densities L = f Vol:
    sum over (alpha, i) of (-1)^{top+i-1} df/du_i^alpha du^alpha ^ Vol^i,
    normalised to the same global sign convention as lambda1."""
    cs = L.cs
    if (L.p, L.q) != (0, cs.m):
        raise ValueError("a Lagrangian has bidegree (0, top)")
    f = lagrangian_coefficient(L)
    if f.max_jet_order() > 1:
        raise ValueError("first-order boundary form needs jet order <= 1")

    def build(sign_flip: bool) -> LocalForm:
        out = LocalForm(cs, 1, cs.m - 1)
        for alpha in range(cs.e):
            for i in range(cs.m):
                df = partial(f, jet_atom(alpha, (i,)))
                if df.is_zero():
                    continue
                hat = LocalForm(
                    cs, 0, cs.m - 1, {((), tuple(j for j in range(cs.m) if j != i)): df}
                )
                term = delta(cs, alpha, ()).wedge(hat)
                sign = (-1) ** (cs.m + i)  # top + (i+1) - 1 with 0-based i
                if sign_flip:
                    sign = -sign
                out = out + (term if sign == 1 else -term)
        return out

    EL = euler_lagrange(L)
    cand = build(False)
    if (d_h(cand) + d_v(L) - EL).is_zero():
        return cand
    cand = build(True)
    if (d_h(cand) + d_v(L) - EL).is_zero():
        return cand
    raise ContractViolation("first-order boundary form fails its contract")


def verify_fundamental(L: LocalForm) -> dict:
    """Replay the four decomposition identities; returns name -> (ok, residual)."""
    data = fundamental_data(L)
    EL, lam1, om1 = data.EL, data.lambda1, data.omega1
    checks = {
        "dv_L = EL - dh_lambda1": d_v(L) - EL + d_h(lam1),
        "dv_omega1 = 0": d_v(om1),
        "dh_omega1 = -dv_EL": d_h(om1) + d_v(EL),
        "D(L + lambda1) = EL + omega1": d_total(data.lepagean) - data.omega,
        "D(EL + omega1) = 0": d_total(data.omega),
    }
    out = {}
    for name, resid in checks.items():
        if isinstance(resid, LocalForm):
            resid = MixedForm.of(resid)
        out[name] = (resid.is_zero(), resid)
    return out
