"""Total derivatives, vector fields on the jet bundle, and prolongations.

A total derivative D_i accounts for the implicit dependence of every jet
coordinate on x^i: it sends u_I^alpha to u_{I,i}^alpha and differentiates
function symbols by the chain rule.  Vector fields come in three flavours:

  EvolutionaryVF  -- vertical, determined by characteristics xi_alpha; the
                     prolonged coefficient on u_I^alpha is D_I(xi_alpha) and
                     is recomputed on demand, never stored.
  TotalVF         -- combination X_i D_i; "horizontal" when the X_i depend
                     only on base coordinates.
  InsularVF       -- sum of an evolutionary and a total part.

All components are expressions over one shared coordinate system.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .expr import (
    BASE,
    JET,
    CoordMismatchError,
    CoordSystem,
    Expr,
    func_atom,
    jet_atom,
    multi_concat,
    partial,
)


def total_derivative(f: Expr, i: int) -> Expr:
    """D_i f: the derivative of f treating jets as functions of x^i."""
    cs = f.cs
    if not 0 <= i < cs.m:
        raise IndexError(f"base index {i} out of range")
    out: dict = {}
    zero = Fraction(0)
    for mono, c in f.terms.items():
        for pos, (a, e) in enumerate(mono):
            da = _atom_total(cs, a, i)
            if da is None:
                continue
            if e > 1:
                rest = mono[:pos] + ((a, e - 1),) + mono[pos + 1 :]
            else:
                rest = mono[:pos] + mono[pos + 1 :]
            prod = Expr(cs, {rest: c * e}) * da
            for m2, c2 in prod.terms.items():
                s = out.get(m2, zero) + c2
                if s:
                    out[m2] = s
                else:
                    out.pop(m2, None)
    return Expr(cs, out)


def _atom_total(cs: CoordSystem, a: tuple, i: int) -> Expr | None:
    """D_i applied to a single atom, or None when zero."""
    if a[0] == BASE:
        return cs.number(1) if a[1] == i else None
    if a[0] == JET:
        _, alpha, _, idx = a
        return Expr(cs, {((jet_atom(alpha, multi_concat(idx, i)), 1),): Fraction(1)})
    _, name, order, arg = a
    inner = total_derivative(arg, i)
    if inner.is_zero():
        return None
    outer = Expr(cs, {((func_atom(name, order + 1, arg), 1),): Fraction(1)})
    return outer * inner


def total_derivative_multi(f: Expr, indices: tuple) -> Expr:
    """D_I f, iterating D_i over the entries of I (order irrelevant)."""
    for i in indices:
        f = total_derivative(f, i)
    return f


@dataclass(frozen=True)
class EvolutionaryVF:
    """Vertical vector field given by its characteristics, one per fiber."""

    cs: CoordSystem
    xi: tuple[Expr, ...]

    def __post_init__(self):
        if len(self.xi) != self.cs.e:
            raise ValueError("one characteristic per fiber component required")
        for c in self.xi:
            if c.cs != self.cs:
                raise CoordMismatchError("characteristic over wrong coordinates")

    @classmethod
    def from_dict(cls, cs: CoordSystem, comps: dict) -> "EvolutionaryVF":
        xi = [cs.zero()] * cs.e
        for name, ex in comps.items():
            xi[cs.fiber_index(name)] = ex
        return cls(cs, tuple(xi))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.xi)

    def __add__(self, other: "EvolutionaryVF") -> "EvolutionaryVF":
        return EvolutionaryVF(self.cs, tuple(a + b for a, b in zip(self.xi, other.xi)))

    def scale(self, k) -> "EvolutionaryVF":
        return EvolutionaryVF(self.cs, tuple(c * k for c in self.xi))


@dataclass(frozen=True)
class TotalVF:
    """Vector field X_i D_i, stored by its coefficients on the D_i basis."""

    cs: CoordSystem
    X: tuple[Expr, ...]

    def __post_init__(self):
        if len(self.X) != self.cs.m:
            raise ValueError("one component per base direction required")
        for c in self.X:
            if c.cs != self.cs:
                raise CoordMismatchError("component over wrong coordinates")

    @classmethod
    def from_dict(cls, cs: CoordSystem, comps: dict) -> "TotalVF":
        X = [cs.zero()] * cs.m
        for name, ex in comps.items():
            X[cs.base_index(name)] = ex
        return cls(cs, tuple(X))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.X)

    def is_horizontal(self) -> bool:
        """True when every component depends on base coordinates only."""
        return all(not c.jet_atoms() for c in self.X)

    def __add__(self, other: "TotalVF") -> "TotalVF":
        return TotalVF(self.cs, tuple(a + b for a, b in zip(self.X, other.X)))

    def scale(self, k) -> "TotalVF":
        return TotalVF(self.cs, tuple(c * k for c in self.X))


@dataclass(frozen=True)
class InsularVF:
    """Contact-preserving field: prolonged evolutionary part plus total part."""

    ev: EvolutionaryVF
    tot: TotalVF

    def __post_init__(self):
        if self.ev.cs != self.tot.cs:
            raise CoordMismatchError("parts over different coordinate systems")

    @property
    def cs(self) -> CoordSystem:
        return self.ev.cs

    @classmethod
    def zero(cls, cs: CoordSystem) -> "InsularVF":
        z = tuple(cs.zero() for _ in range(cs.e))
        w = tuple(cs.zero() for _ in range(cs.m))
        return cls(EvolutionaryVF(cs, z), TotalVF(cs, w))

    @classmethod
    def from_parts(cls, ev: EvolutionaryVF | None, tot: TotalVF | None) -> "InsularVF":
        cs = ev.cs if ev is not None else tot.cs
        base = cls.zero(cs)
        return cls(ev or base.ev, tot or base.tot)

    def __add__(self, other: "InsularVF") -> "InsularVF":
        return InsularVF(self.ev + other.ev, self.tot + other.tot)


def prolong_coefficient(xi: EvolutionaryVF, alpha: int, indices: tuple) -> Expr:
    """Coefficient of the prolongation of xi on u_I^alpha: D_I(xi_alpha)."""
    return total_derivative_multi(xi.xi[alpha], tuple(indices))


def apply_evolutionary(xi: EvolutionaryVF, f: Expr) -> Expr:
    """pr(xi) acting on a function: sum of D_J(xi_beta) * df/du_J^beta."""
    out = f.cs.zero()
    for a in sorted(f.jet_atoms()):
        _, beta, _, idx = a
        coeff = prolong_coefficient(xi, beta, idx)
        if coeff.is_zero():
            continue
        out = out + coeff * partial(f, a)
    return out


def apply_total(X: TotalVF, f: Expr) -> Expr:
    out = f.cs.zero()
    for i, c in enumerate(X.X):
        if not c.is_zero():
            out = out + c * total_derivative(f, i)
    return out


def apply_insular(chi: InsularVF, f: Expr) -> Expr:
    """chi acting on a function in variational coordinates."""
    return apply_evolutionary(chi.ev, f) + apply_total(chi.tot, f)


def to_variational_coords(cs: CoordSystem, Xt_base: dict, Xt_vert: dict):
    """Convert components on the (d/dx^i, d/du_I^alpha) basis to the
    variational basis dual to (dx^i, delta u_I^alpha).

    Xt_base maps base index -> Expr, Xt_vert maps (alpha, I) -> Expr.
    Returns (X_base, X_vert) in the same dictionary format; the base
    components are unchanged while the vertical ones are corrected by
    -sum_j Xt_j u_{I,j}^alpha.
    """
    X_base = {i: Xt_base.get(i, cs.zero()) for i in range(cs.m)}
    keys = set(Xt_vert)
    X_vert = {}
    for alpha, idx in keys:
        val = Xt_vert[(alpha, idx)]
        for j in range(cs.m):
            cj = X_base[j]
            if cj.is_zero():
                continue
            bumped = Expr(cs, {((jet_atom(alpha, multi_concat(idx, j)), 1),): Fraction(1)})
            val = val - cj * bumped
        X_vert[(alpha, idx)] = val
    return X_base, X_vert


def prolong_standard_coords(cs: CoordSystem, Xt_base: dict, Xt_fiber: dict, alpha: int, indices: tuple) -> Expr:
    """Prolonged coefficient in the standard (non-variational) basis.

    For first-jet-order input data Xt = Xt_i d/dx^i + Xt_alpha d/du^alpha the
    coefficient on d/du_I^alpha is D_I(Xt_alpha - u_j^alpha Xt_j)
    + u_{I,j}^alpha Xt_j.
    """
    core = Xt_fiber.get(alpha, cs.zero())
    for j in range(cs.m):
        cj = Xt_base.get(j, cs.zero())
        if cj.is_zero():
            continue
        uj = Expr(cs, {((jet_atom(alpha, (j,)), 1),): Fraction(1)})
        core = core - uj * cj
    out = total_derivative_multi(core, tuple(indices))
    for j in range(cs.m):
        cj = Xt_base.get(j, cs.zero())
        if cj.is_zero():
            continue
        bumped = Expr(cs, {((jet_atom(alpha, multi_concat(tuple(indices), j)), 1),): Fraction(1)})
        out = out + bumped * cj
    return out


def bracket_evolutionary(xi: EvolutionaryVF, eta: EvolutionaryVF) -> EvolutionaryVF:
    """Lie bracket of two evolutionary fields, characteristic-wise."""
    cs = xi.cs
    comps = tuple(
        apply_evolutionary(xi, eta.xi[a]) - apply_evolutionary(eta, xi.xi[a])
        for a in range(cs.e)
    )
    return EvolutionaryVF(cs, comps)


def bracket_insular(chi1: InsularVF, chi2: InsularVF) -> InsularVF:
    """Lie bracket of two contact-preserving fields.

    The evolutionary part is the bracket of the evolutionary parts (the total
    contributions to the vertical components cancel identically); the total
    components are chi1(Y_i) - chi2(X_i).
    """
    cs = chi1.cs
    ev = bracket_evolutionary(chi1.ev, chi2.ev)
    tot = TotalVF(
        cs,
        tuple(
            apply_insular(chi1, chi2.tot.X[i]) - apply_insular(chi2, chi1.tot.X[i])
            for i in range(cs.m)
        ),
    )
    return InsularVF(ev, tot)
