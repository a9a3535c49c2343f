"""Seeded random expressions, forms, and vector fields for property tests.

Everything takes an explicit random.Random so runs are reproducible; sizes
are kept small (few terms, small coefficients) because the property suites
evaluate operator identities hundreds of times.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .expr import CoordSystem, Expr, base_atom, from_terms, jet_atom
from .forms import LocalForm, lagrangian_form
from .jet import EvolutionaryVF, InsularVF, TotalVF


def _atoms(cs: CoordSystem, max_order: int) -> list:
    out = [base_atom(i) for i in range(cs.m)]
    for alpha in range(cs.e):
        for k in range(max_order + 1):
            for idx in itertools.combinations_with_replacement(range(cs.m), k):
                out.append(jet_atom(alpha, idx))
    return out


def random_expr(
    rng: random.Random,
    cs: CoordSystem,
    max_order: int = 2,
    max_degree: int = 2,
    n_terms: int = 2,
    allow_zero: bool = True,
) -> Expr:
    pool = _atoms(cs, max_order)
    items = []
    for _ in range(rng.randint(0 if allow_zero else 1, n_terms)):
        deg = rng.randint(0, max_degree)
        mono: dict = {}
        for _ in range(deg):
            a = rng.choice(pool)
            mono[a] = mono.get(a, 0) + 1
        coeff = Fraction(rng.choice([-2, -1, 1, 2]), rng.choice([1, 2]))
        items.append((tuple(sorted(mono.items())), coeff))
    return from_terms(cs, items)


def random_lagrangian(
    rng: random.Random,
    cs: CoordSystem,
    max_order: int = 2,
    max_degree: int = 3,
    n_terms: int = 3,
) -> LocalForm:
    f = random_expr(rng, cs, max_order, max_degree, n_terms, allow_zero=False)
    return lagrangian_form(f)


def random_local_form(
    rng: random.Random,
    cs: CoordSystem,
    p: int,
    q: int,
    max_order: int = 2,
    max_degree: int = 2,
    n_terms: int = 2,
) -> LocalForm:
    vert_pool = [
        (alpha, idx)
        for alpha in range(cs.e)
        for k in range(max_order + 1)
        for idx in itertools.combinations_with_replacement(range(cs.m), k)
    ]
    out = LocalForm(cs, p, q)
    for _ in range(n_terms):
        if len(vert_pool) < p:
            break
        vert = tuple(sorted(rng.sample(vert_pool, p), key=lambda g: (g[0], len(g[1]), g[1])))
        horiz = tuple(sorted(rng.sample(range(cs.m), q)))
        coeff = random_expr(rng, cs, max_order, max_degree, n_terms=1, allow_zero=False)
        out = out + LocalForm(cs, p, q, {(vert, horiz): coeff})
    return out


def random_evolutionary(
    rng: random.Random, cs: CoordSystem, max_order: int = 1, max_degree: int = 2
) -> EvolutionaryVF:
    return EvolutionaryVF(
        cs,
        tuple(random_expr(rng, cs, max_order, max_degree, 2, allow_zero=False) for _ in range(cs.e)),
    )


def random_total(
    rng: random.Random, cs: CoordSystem, max_order: int = 1, max_degree: int = 2
) -> TotalVF:
    return TotalVF(
        cs,
        tuple(random_expr(rng, cs, max_order, max_degree, 2, allow_zero=False) for _ in range(cs.m)),
    )


def random_horizontal(rng: random.Random, cs: CoordSystem, max_degree: int = 2) -> TotalVF:
    comps = []
    for _ in range(cs.m):
        items = []
        for _ in range(rng.randint(1, 2)):
            deg = rng.randint(0, max_degree)
            mono: dict = {}
            for _ in range(deg):
                a = base_atom(rng.randrange(cs.m))
                mono[a] = mono.get(a, 0) + 1
            items.append((tuple(sorted(mono.items())), Fraction(rng.choice([-2, -1, 1, 2]))))
        comps.append(from_terms(cs, items))
    return TotalVF(cs, tuple(comps))


def random_insular(
    rng: random.Random, cs: CoordSystem, max_order: int = 1, max_degree: int = 2
) -> InsularVF:
    return InsularVF(
        random_evolutionary(rng, cs, max_order, max_degree),
        random_total(rng, cs, max_order, max_degree),
    )


def random_polynomial_section(rng: random.Random, cs: CoordSystem, max_degree: int = 3) -> dict:
    """Fiber -> polynomial in base coordinates, for evaluation oracles."""
    out = {}
    for name in cs.fiber_names:
        items = []
        for _ in range(rng.randint(1, 3)):
            deg = rng.randint(0, max_degree)
            mono: dict = {}
            for _ in range(deg):
                a = base_atom(rng.randrange(cs.m))
                mono[a] = mono.get(a, 0) + 1
            items.append((tuple(sorted(mono.items())), Fraction(rng.randint(-3, 3))))
        out[name] = from_terms(cs, items)
    return out
