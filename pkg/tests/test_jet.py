"""Total derivatives, prolongation formulas, and vector-field brackets."""

from __future__ import annotations

import random

from varcalc.expr import CoordSystem, base_atom, jet_atom, multi_remove, partial
from varcalc.jet import (
    EvolutionaryVF,
    InsularVF,
    apply_evolutionary,
    apply_insular,
    bracket_evolutionary,
    bracket_insular,
    prolong_coefficient,
    prolong_standard_coords,
    to_variational_coords,
    total_derivative,
    total_derivative_multi,
)
from varcalc.parser import parse_vector_field
from varcalc.randgen import (
    random_evolutionary,
    random_expr,
    random_horizontal,
    random_insular,
)

CS = CoordSystem(("x", "t"), ("u",))
CS1 = CoordSystem(("x",), ("u",))


def test_total_derivative_on_jet():
    assert (total_derivative(CS.jet("u"), 0) - CS.jet("u", "x")).is_zero()


def test_total_derivative_on_constant():
    assert total_derivative(CS.number(7), 0).is_zero()


def test_total_derivative_product_rule():
    f = CS.coord("x") * CS.jet("u") * CS.jet("u", "x")
    got = total_derivative(f, 0)
    x, u, ux, uxx = CS.coord("x"), CS.jet("u"), CS.jet("u", "x"), CS.jet("u", "xx")
    assert (got - (u * ux + x * ux**2 + x * u * uxx)).is_zero()


def test_total_derivative_raises_order_by_one():
    rng = random.Random(11)
    for _ in range(20):
        f = random_expr(rng, CS, max_order=2, max_degree=2, allow_zero=False)
        df = total_derivative(f, rng.randrange(2))
        assert df.max_jet_order() <= f.max_jet_order() + 1


def test_total_derivative_multi_iteration():
    assert (total_derivative_multi(CS.jet("u"), (0, 0)) - CS.jet("u", "xx")).is_zero()
    a = total_derivative_multi(CS.jet("u"), (0, 1))
    b = total_derivative_multi(CS.jet("u"), (1, 0))
    assert (a - b).is_zero()
    assert (total_derivative_multi(CS.coord("x") ** 2, (0, 0)) - CS.number(2)).is_zero()


def test_total_derivative_chain_rule_function_symbol():
    V = CS.func("V", CS.jet("u"))
    got = total_derivative(V, 0)
    expect = CS.func("V", CS.jet("u"), order=1) * CS.jet("u", "x")
    assert (got - expect).is_zero()


def test_prolong_coefficient():
    xi = EvolutionaryVF.from_dict(CS, {"u": CS.coord("x") * CS.jet("u")})
    got = prolong_coefficient(xi, 0, (0,))
    assert (got - (CS.jet("u") + CS.coord("x") * CS.jet("u", "x"))).is_zero()

    const = EvolutionaryVF.from_dict(CS, {"u": CS.number(1)})
    assert prolong_coefficient(const, 0, (0,)).is_zero()

    xi2 = EvolutionaryVF.from_dict(CS, {"u": CS.jet("u", "x")})
    assert (prolong_coefficient(xi2, 0, (0,)) - CS.jet("u", "xx")).is_zero()


def test_to_variational_coords_horizontal_shift():
    # d/dx in the standard basis acquires -u_x on the order-zero slot
    Xb, Xv = to_variational_coords(CS, {0: CS.number(1)}, {(0, ()): CS.zero()})
    assert (Xb[0] - CS.number(1)).is_zero()
    assert (Xv[(0, ())] + CS.jet("u", "x")).is_zero()


def test_to_variational_coords_vertical_unchanged():
    Xb, Xv = to_variational_coords(CS, {}, {(0, ()): CS.jet("u")})
    assert Xb[0].is_zero() and Xb[1].is_zero()
    assert (Xv[(0, ())] - CS.jet("u")).is_zero()


def test_prolong_standard_horizontal():
    # the coordinate field d/dx prolongs with vanishing first-jet coefficient
    got = prolong_standard_coords(CS1, {0: CS1.number(1)}, {}, 0, (0,))
    assert got.is_zero()


def test_prolong_standard_vertical():
    got = prolong_standard_coords(CS1, {}, {0: CS1.jet("u")}, 0, (0,))
    assert (got - CS1.jet("u", "x")).is_zero()


def test_prolong_standard_mixed():
    # base part x d/dx with no vertical part: coefficient -u_x at order one
    got = prolong_standard_coords(CS1, {0: CS1.coord("x")}, {}, 0, (0,))
    assert (got + CS1.jet("u", "x")).is_zero()


def test_standard_and_variational_prolongations_agree():
    # pr in standard coordinates, converted back, matches D_I of the
    # variational characteristic on xi_u = u, Xt_x = x at I = (x)
    cs = CS1
    Xt_base = {0: cs.coord("x")}
    Xt_fiber = {0: cs.jet("u")}
    pr_std = prolong_standard_coords(cs, Xt_base, Xt_fiber, 0, (0,))
    _, Xv = to_variational_coords(cs, Xt_base, {(0, (0,)): pr_std, (0, ()): Xt_fiber[0]})
    xi = EvolutionaryVF(cs, (Xv[(0, ())],))
    assert (Xv[(0, (0,))] - prolong_coefficient(xi, 0, (0,))).is_zero()


def test_bracket_evolutionary_examples():
    u = CS.jet("u")
    same = EvolutionaryVF.from_dict(CS, {"u": u})
    assert bracket_evolutionary(same, same).is_zero()

    one = EvolutionaryVF.from_dict(CS, {"u": CS.number(1)})
    assert (bracket_evolutionary(one, same).xi[0] - CS.number(1)).is_zero()

    dux = EvolutionaryVF.from_dict(CS, {"u": CS.jet("u", "x")})
    assert bracket_evolutionary(dux, same).is_zero()


def test_bracket_insular_coordinate_fields_commute():
    Dx = parse_vector_field("ins{tot{x: 1}}", CS)
    Dt = parse_vector_field("ins{tot{t: 1}}", CS)
    br = bracket_insular(Dx, Dt)
    assert br.ev.is_zero() and br.tot.is_zero()


def test_bracket_evolutionary_with_horizontal_vanishes():
    xi = parse_vector_field("ins{ev{u: u*u_x + t*u_t}}", CS)
    X = parse_vector_field("ins{tot{x: 2, t: -3}}", CS)
    br = bracket_insular(xi, X)
    assert br.ev.is_zero() and br.tot.is_zero()


def test_bracket_total_example():
    a = parse_vector_field("ins{tot{x: x}}", CS)
    b = parse_vector_field("ins{tot{x: 1}}", CS)
    br = bracket_insular(a, b)
    assert br.ev.is_zero()
    assert (br.tot.X[0] + CS.number(1)).is_zero()


def test_total_derivatives_commute_random():
    rng = random.Random(5)
    for _ in range(100):
        f = random_expr(rng, CS, max_order=2, max_degree=3)
        a = total_derivative(total_derivative(f, 0), 1)
        b = total_derivative(total_derivative(f, 1), 0)
        assert (a - b).is_zero()


def test_commutation_defect_with_partials():
    # D_i after d/du_I^alpha minus the reverse is -d/du_{I minus i}^alpha
    rng = random.Random(6)
    indices = [(), (0,), (1,), (0, 0), (0, 1), (1, 1)]
    for _ in range(60):
        f = random_expr(rng, CS, max_order=2, max_degree=3)
        i = rng.randrange(2)
        idx = rng.choice(indices)
        a = jet_atom(0, idx)
        lhs = total_derivative(partial(f, a), i) - partial(total_derivative(f, i), a)
        removed = multi_remove(idx, i)
        if removed is None:
            assert lhs.is_zero()
        else:
            rhs = -partial(f, jet_atom(0, removed))
            assert (lhs - rhs).is_zero()


def test_prolongation_is_bracket_homomorphism():
    rng = random.Random(7)
    indices = [(), (0,), (1,), (0, 1), (0, 0)]
    for _ in range(25):
        xi = random_evolutionary(rng, CS)
        eta = random_evolutionary(rng, CS)
        br = bracket_evolutionary(xi, eta)
        f = random_expr(rng, CS, max_order=1, max_degree=2)
        lhs = apply_evolutionary(br, f)
        rhs = apply_evolutionary(xi, apply_evolutionary(eta, f)) - apply_evolutionary(
            eta, apply_evolutionary(xi, f)
        )
        assert (lhs - rhs).is_zero()
        # coefficient-wise: prolonged bracket coefficient is D_I of the bracket
        idx = rng.choice(indices)
        direct = prolong_coefficient(br, 0, idx)
        assert (direct - total_derivative_multi(br.xi[0], idx)).is_zero()


def test_bracket_insular_is_commutator():
    rng = random.Random(8)
    for _ in range(20):
        chi1 = random_insular(rng, CS)
        chi2 = random_insular(rng, CS)
        f = random_expr(rng, CS, max_order=1, max_degree=2)
        lhs = apply_insular(bracket_insular(chi1, chi2), f)
        rhs = apply_insular(chi1, apply_insular(chi2, f)) - apply_insular(
            chi2, apply_insular(chi1, f)
        )
        assert (lhs - rhs).is_zero()


def test_bracket_of_horizontals_is_horizontal():
    rng = random.Random(9)
    for _ in range(20):
        X1 = random_horizontal(rng, CS)
        X2 = random_horizontal(rng, CS)
        br = bracket_insular(InsularVF.from_parts(None, X1), InsularVF.from_parts(None, X2))
        assert br.ev.is_zero()
        assert br.tot.is_horizontal()


def test_evaluation_commutes_with_total_derivative():
    # evaluating D_i f along a section equals differentiating the pulled-back
    # function of the base point
    from fractions import Fraction

    from varcalc.expr import eval_on_section, pull_back
    from varcalc.randgen import random_expr, random_polynomial_section

    rng = random.Random(10)
    for _ in range(20):
        f = random_expr(rng, CS, max_order=2, max_degree=2)
        phi = random_polynomial_section(rng, CS, max_degree=3)
        i = rng.randrange(2)
        pt = {"x": Fraction(rng.randint(-2, 2)), "t": Fraction(rng.randint(-2, 2))}
        lhs = eval_on_section(total_derivative(f, i), phi, pt)
        pulled = pull_back(f, phi)
        rhs = eval_on_section(partial(pulled, base_atom(i)), phi, pt)
        assert lhs == rhs
