"""Exact differential-polynomial arithmetic over the rationals.

An expression is a finite sum of monomials with Fraction coefficients.  The
ring variables ("atoms") are base coordinates x^i, jet coordinates u_I^alpha
indexed by sorted multi-indices I, and opaque unary function symbols F^{(k)}(g)
carrying a formal derivative order k.  All atoms are treated as independent
ring variables; there are no built-in functional identities, which keeps the
normal form canonical and the zero test decidable.

Atoms are plain tuples so that monomials sort with ordinary tuple comparison:

  (0, i)                    base coordinate number i
  (1, alpha, len(I), I)     jet coordinate of fiber alpha, I a sorted tuple
  (2, name, order, arg)     function symbol applied to an Expr

The tag ordering 0 < 1 < 2 realises the total order base < jet < function,
jets ordered by (fiber, |I|, I lexicographic).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

BASE = 0
JET = 1
FUNC = 2

Rat = Union[int, Fraction]

_IDENT_OK = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"


class CoordMismatchError(ValueError):
    """Raised when two expressions live over different coordinate systems."""


class MissingFiberError(KeyError):
    """Raised when a section is missing a fiber component."""


def _check_name(name: str) -> None:
    if not name or not name[0].isalpha() or any(c not in _IDENT_OK for c in name):
        raise ValueError(f"invalid coordinate name {name!r}")


@dataclass(frozen=True)
class CoordSystem:
    """Base and fiber coordinate names of a trivial bundle R^e -> R^m."""

    base_names: tuple[str, ...]
    fiber_names: tuple[str, ...]

    def __post_init__(self):
        if len(self.base_names) < 1 or len(self.fiber_names) < 1:
            raise ValueError("need at least one base and one fiber coordinate")
        names = self.base_names + self.fiber_names
        if len(set(names)) != len(names):
            raise ValueError("coordinate names must be distinct")
        for n in names:
            _check_name(n)

    @property
    def m(self) -> int:
        return len(self.base_names)

    @property
    def e(self) -> int:
        return len(self.fiber_names)

    def base_index(self, name: str) -> int:
        try:
            return self.base_names.index(name)
        except ValueError:
            raise KeyError(f"unknown base coordinate {name!r}") from None

    def fiber_index(self, name: str) -> int:
        try:
            return self.fiber_names.index(name)
        except ValueError:
            raise KeyError(f"unknown fiber coordinate {name!r}") from None

    # -- convenience constructors -------------------------------------------

    def number(self, value: Rat) -> "Expr":
        c = Fraction(value)
        if c == 0:
            return Expr(self, {})
        return Expr(self, {(): c})

    def zero(self) -> "Expr":
        return Expr(self, {})

    def coord(self, name: str) -> "Expr":
        return Expr(self, {((base_atom(self.base_index(name)), 1),): Fraction(1)})

    def jet(self, fiber: str, indices: Iterable[str] | str = ()) -> "Expr":
        alpha = self.fiber_index(fiber)
        if isinstance(indices, str):
            idx = tuple(self.base_index(c) for c in indices)
        else:
            idx = tuple(self.base_index(c) if isinstance(c, str) else c for c in indices)
        atom = jet_atom(alpha, idx)
        return Expr(self, {((atom, 1),): Fraction(1)})

    def func(self, name: str, arg: "Expr", order: int = 0) -> "Expr":
        _check_name(name)
        if arg.cs != self:
            raise CoordMismatchError("function argument over different coordinates")
        return Expr(self, {((func_atom(name, order, arg), 1),): Fraction(1)})


def base_atom(i: int) -> tuple:
    return (BASE, i)


def jet_atom(alpha: int, indices: Iterable[int]) -> tuple:
    idx = tuple(sorted(indices))
    return (JET, alpha, len(idx), idx)


def func_atom(name: str, order: int, arg: "Expr") -> tuple:
    return (FUNC, name, order, arg)


def multi_concat(I: tuple, i: int) -> tuple:
    """Append base index i to a sorted multi-index, re-sorting."""
    return tuple(sorted(I + (i,)))


def multi_remove(I: tuple, i: int) -> tuple | None:
    """Remove one copy of i from I, or None when absent."""
    if i not in I:
        return None
    lst = list(I)
    lst.remove(i)
    return tuple(lst)


class Expr:
    """Canonical sparse differential polynomial; immutable after construction.

    terms maps a monomial (sorted tuple of (atom, positive exponent) pairs)
    to a nonzero Fraction.  The zero expression is the empty map.
    """

    __slots__ = ("cs", "terms", "_hash", "_key")

    def __init__(self, cs: CoordSystem, terms: dict):
        self.cs = cs
        self.terms = terms
        self._hash = None
        self._key = None

    # -- canonical key, equality, ordering ----------------------------------

    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(sorted(self.terms.items()))
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, Expr):
            if isinstance(other, (int, Fraction)):
                return self == _lift(self.cs, other)
            return NotImplemented
        return self.cs == other.cs and self.terms == other.terms

    def __lt__(self, other: "Expr") -> bool:
        return self.key() < other.key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        from .render import expr_text

        return f"Expr({expr_text(self)})"

    # -- ring operations -----------------------------------------------------

    def __add__(self, other) -> "Expr":
        other = _coerce(self, other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono, _ZERO) + c
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return Expr(self.cs, out)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr(self.cs, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Expr":
        return self + (-_coerce(self, other))

    def __rsub__(self, other) -> "Expr":
        return _coerce(self, other) + (-self)

    def __mul__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if c == 0:
                return Expr(self.cs, {})
            return Expr(self.cs, {m: v * c for m, v in self.terms.items()})
        other = _coerce(self, other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                s = out.get(mono, _ZERO) + c1 * c2
                if s:
                    out[mono] = s
                else:
                    out.pop(mono, None)
        return Expr(self.cs, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Expr":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponents must be nonnegative integers")
        out = self.cs.number(1)
        for _ in range(n):
            out = out * self
        return out

    # -- structure queries ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self) -> Fraction | None:
        """The Fraction value when the expression is constant, else None."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and () in self.terms:
            return self.terms[()]
        return None

    def atoms(self) -> set:
        """All atoms appearing at top level (no recursion into func args)."""
        out = set()
        for mono in self.terms:
            for a, _ in mono:
                out.add(a)
        return out

    def jet_atoms(self) -> set:
        """All jet atoms appearing anywhere, recursing through func args."""
        out = set()
        for mono in self.terms:
            for a, _ in mono:
                if a[0] == JET:
                    out.add(a)
                elif a[0] == FUNC:
                    out |= a[3].jet_atoms()
        return out

    def max_jet_order(self) -> int:
        orders = [a[2] for a in self.jet_atoms()]
        return max(orders, default=0)

    def degree(self) -> int:
        """Maximum total monomial degree (atoms counted with exponents)."""
        return max((sum(e for _, e in m) for m in self.terms), default=0)


_ZERO = Fraction(0)


def _lift(cs: CoordSystem, value) -> Expr:
    return cs.number(value)


def _coerce(ref: Expr, other) -> Expr:
    if isinstance(other, Expr):
        if other.cs != ref.cs:
            raise CoordMismatchError("operands over different coordinate systems")
        return other
    if isinstance(other, (int, Fraction)):
        return _lift(ref.cs, other)
    raise TypeError(f"cannot combine Expr with {type(other).__name__}")


def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    d = dict(m1)
    for a, e in m2:
        d[a] = d.get(a, 0) + e
    return tuple(sorted(d.items()))


def from_terms(cs: CoordSystem, items: Iterable[tuple[tuple, Rat]]) -> Expr:
    """Build a canonical Expr from (monomial, coefficient) pairs."""
    out: dict = {}
    for mono, c in items:
        c = Fraction(c)
        mono = tuple(sorted(mono))
        s = out.get(mono, _ZERO) + c
        if s:
            out[mono] = s
        else:
            out.pop(mono, None)
    return Expr(cs, out)


# -- differentiation ----------------------------------------------------------


def partial(f: Expr, atom: tuple) -> Expr:
    """Formal partial derivative of f with respect to a base or jet atom.

    All atoms are independent ring variables; function symbols follow the
    chain rule d F^{(k)}(g) = F^{(k+1)}(g) * dg.
    """
    if atom[0] not in (BASE, JET):
        raise ValueError("can only differentiate along base or jet coordinates")
    out: dict = {}
    for mono, c in f.terms.items():
        for pos, (a, e) in enumerate(mono):
            da = _atom_partial(f.cs, a, atom)
            if da is None:
                continue
            if e > 1:
                rest = mono[:pos] + ((a, e - 1),) + mono[pos + 1 :]
            else:
                rest = mono[:pos] + mono[pos + 1 :]
            base = Expr(f.cs, {rest: c * e})
            prod = base * da if da is not _ONE_MARK else base
            for m2, c2 in prod.terms.items():
                s = out.get(m2, _ZERO) + c2
                if s:
                    out[m2] = s
                else:
                    out.pop(m2, None)
    return Expr(f.cs, out)


_ONE_MARK = object()


def _atom_partial(cs: CoordSystem, a: tuple, wrt: tuple):
    """d(atom)/d(wrt): None for zero, _ONE_MARK for one, or an Expr."""
    if a == wrt:
        return _ONE_MARK
    if a[0] == FUNC:
        _, name, order, arg = a
        inner = partial(arg, wrt)
        if inner.is_zero():
            return None
        outer = Expr(cs, {((func_atom(name, order + 1, arg), 1),): Fraction(1)})
        return outer * inner
    return None


# -- evaluation on sections ---------------------------------------------------


def pull_back(f: Expr, phi: dict) -> Expr:
    """Substitute every jet coordinate u_I^alpha by the I-th partial of phi.

    phi maps fiber names to Exprs in the base coordinates only; the result
    is an expression in base coordinates (function symbols are kept formal).
    """
    cs = f.cs
    for name in cs.fiber_names:
        if name not in phi:
            raise MissingFiberError(f"section missing fiber component {name!r}")
        comp = phi[name]
        if comp.jet_atoms():
            raise ValueError(f"section component {name!r} must not contain jets")
    out = cs.zero()
    for mono, c in f.terms.items():
        term = cs.number(c)
        for a, e in mono:
            term = term * _pull_atom(cs, a, phi) ** e
        out = out + term
    return out


def _pull_atom(cs: CoordSystem, a: tuple, phi: dict) -> Expr:
    if a[0] == BASE:
        return Expr(cs, {((a, 1),): Fraction(1)})
    if a[0] == JET:
        _, alpha, _, idx = a
        g = phi[cs.fiber_names[alpha]]
        for i in idx:
            g = partial(g, base_atom(i))
        return g
    _, name, order, arg = a
    return cs.func(name, pull_back(arg, phi), order)


def eval_on_section(f: Expr, phi: dict, point: dict):
    """Evaluate f along the infinite prolongation of phi at a rational point.

    Returns a Fraction when the value is purely numeric, otherwise an Expr in
    which unresolved function symbols remain formal (their arguments are
    evaluated).
    """
    cs = f.cs
    pulled = pull_back(f, phi)
    coords = {cs.base_index(k): Fraction(v) for k, v in point.items()}
    out = cs.zero()
    for mono, c in pulled.terms.items():
        term = cs.number(c)
        for a, e in mono:
            if a[0] == BASE:
                term = term * Fraction(coords[a[1]]) ** e
            elif a[0] == FUNC:
                _, name, order, arg = a
                val = eval_on_section(arg, phi, point)
                arg_e = cs.number(val) if isinstance(val, Fraction) else val
                term = term * cs.func(name, arg_e, order) ** e
            else:  # pragma: no cover - pull_back removed all jets
                raise AssertionError("jet survived pull back")
        out = out + term
    const = out.constant_value()
    return const if const is not None else out
