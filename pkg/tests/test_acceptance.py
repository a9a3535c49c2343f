"""Acceptance criteria, one test per criterion with a printed verdict line.

All checks are exact (decidable zero test over the rationals) except the
finite-difference action oracle, which carries an explicit 1e-6 tolerance.
Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; wall-clock bounds are asserted where stated.
"""

from __future__ import annotations

import contextlib
import io
import itertools
import random
import time
from fractions import Fraction

from helpers import cartan_identities, fd_variational_derivative
from varcalc.cli import main as cli_main
from varcalc.corpus import (
    bundled,
    free_particle,
    harmonic_oscillator,
    maxwell_like,
    wave_equation,
)
from varcalc.euler import (
    NotExactError,
    divergence_invert,
    euler_lagrange,
    exterior_euler,
    interior_euler,
    source_form_from_components,
)
from varcalc.expr import CoordSystem, eval_on_section
from varcalc.forms import (
    coefficient_form,
    d_h,
    d_total,
    insert,
    insert_ev,
)
from varcalc.jet import bracket_insular
from varcalc.linf import (
    BracketFamily,
    GradedSpace,
    ObservableElement,
    all_jacobiators,
    complete_hamiltonian_pair,
    decalage_transport,
    deformed_bracket,
    l1_observable,
    ln_observable,
)
from varcalc.noether import (
    GaugeAction,
    noether2_identity,
    noether_current,
    universal_current_check,
)
from varcalc.parser import parse_expr
from varcalc.randgen import (
    random_evolutionary,
    random_lagrangian,
    random_local_form,
    random_polynomial_section,
    random_total,
)
from varcalc.variational import first_order_lambda1, fundamental_data, verify_fundamental


def _verdict(num: int, ok: bool, label: str) -> None:
    print(f"ACCEPTANCE {num:2d}: {'PASS' if ok else 'FAIL'} - {label}")
    assert ok, f"criterion {num}: {label}"


def test_criterion_01_euler_lagrange_golden():
    cases = []
    wave = wave_equation()
    cases.append(
        (wave.L, source_form_from_components(
            wave.cs, (wave.cs.jet("u", "xx") - wave.cs.jet("u", "tt"),)))
    )
    osc = harmonic_oscillator()
    cases.append(
        (osc.L, source_form_from_components(
            osc.cs, (-osc.cs.jet("q", "tt") - osc.cs.jet("q"),)))
    )
    part = free_particle()
    cases.append(
        (part.L, source_form_from_components(part.cs, (-part.cs.jet("q", "tt"),)))
    )
    ok = True
    for L, expect in cases:
        t0 = time.monotonic()
        got = euler_lagrange(L)
        elapsed = time.monotonic() - t0
        ok = ok and (got - expect).is_zero() and elapsed < 1.0

    # independent oracle: numeric derivative of the discretized action
    rng = random.Random(101)
    tol = Fraction(1, 10**6)
    for L, expect in cases:
        cs = L.cs
        from varcalc.euler import source_components

        E = source_components(euler_lagrange(L))[0]
        for _ in range(5):
            phi = random_polynomial_section(rng, cs, max_degree=2)
            pt = {n: Fraction(rng.randint(-2, 2), rng.choice([1, 2])) for n in cs.base_names}
            oracle = fd_variational_derivative(L, phi, pt)
            ok = ok and abs(oracle - eval_on_section(E, phi, pt)) <= tol
    _verdict(1, ok, "Euler-Lagrange golden values, exact, <1s each, oracle at 1e-6")


def test_criterion_02_fundamental_suite():
    t0 = time.monotonic()
    ok = True
    for prob in bundled():
        report = verify_fundamental(prob.L)
        ok = ok and all(flag for flag, _ in report.values())
    rng = random.Random(102)
    systems = [
        CoordSystem(("x",), ("u",)),
        CoordSystem(("t",), ("q",)),
        CoordSystem(("x", "t"), ("u",)),
        CoordSystem(("x", "t"), ("u", "v")),
        CoordSystem(("x",), ("u", "v")),
    ]
    for k in range(50):
        cs = systems[k % len(systems)]
        L = random_lagrangian(rng, cs, max_order=2, max_degree=3)
        report = verify_fundamental(L)
        ok = ok and all(flag for flag, _ in report.values())
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 60.0
    _verdict(2, ok, f"fundamental decomposition on 4 bundled + 50 random ({elapsed:.1f}s < 60s)")


def test_criterion_03_first_order_agreement():
    ok = True
    from varcalc.euler import lagrangian_coefficient
    from varcalc.variational import lambda1

    for prob in bundled():
        if lagrangian_coefficient(prob.L).max_jet_order() <= 1:
            ok = ok and (first_order_lambda1(prob.L) - lambda1(prob.L)).is_zero()
    _verdict(3, ok, "closed first-order boundary form equals the general one, exactly")


def test_criterion_04_noether_golden():
    osc = harmonic_oscillator()
    pair = noether_current(osc.symmetries["time"], osc.L)
    energy = coefficient_form(parse_expr("1/2*q_t**2 + 1/2*q**2", osc.cs))
    ok = (pair.Z - energy).is_zero()
    EL = euler_lagrange(osc.L)
    ok = ok and (d_h(pair.Z) - insert_ev(pair.xi, EL)).is_zero()

    wave = wave_equation()
    ELw = euler_lagrange(wave.L)
    for name in ("t", "x"):
        p = noether_current(wave.symmetries[name], wave.L)
        ok = ok and (d_h(p.Z) - insert_ev(p.xi, ELw)).is_zero()
    _verdict(4, ok, "oscillator energy exact; wave translation currents replay to zero")


def test_criterion_05_cartan_suite():
    t0 = time.monotonic()
    rng = random.Random(105)
    cs = CoordSystem(("x", "t"), ("u", "v"))
    ok = True
    for _ in range(100):
        w = random_local_form(rng, cs, rng.choice([0, 1, 2]), rng.choice([0, 1, 2]))
        res = cartan_identities(
            w,
            random_evolutionary(rng, cs),
            random_evolutionary(rng, cs),
            random_total(rng, cs),
            random_total(rng, cs),
        )
        ok = ok and all(res.values())
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 120.0
    _verdict(5, ok, f"insular calculus identities on 100 random tuples ({elapsed:.1f}s < 120s)")


def test_criterion_06_euler_operator_suite():
    rng = random.Random(106)
    cs = CoordSystem(("x", "t"), ("u", "v"))
    ok = True
    for _ in range(100):
        p = rng.choice([1, 2])
        w = random_local_form(rng, cs, p, cs.m, max_order=2, max_degree=2)
        iw = interior_euler(w)
        ok = ok and (interior_euler(iw) - iw).is_zero()
    for _ in range(100):
        p = rng.choice([1, 2])
        beta = random_local_form(rng, cs, p, cs.m - 1, max_order=1, max_degree=2)
        ok = ok and interior_euler(d_h(beta)).is_zero()
    for _ in range(100):
        p = rng.choice([0, 1])
        w = random_local_form(rng, cs, p, cs.m, max_order=1, max_degree=2)
        ok = ok and exterior_euler(exterior_euler(w)).is_zero()
    for _ in range(100):
        L = random_lagrangian(rng, cs, max_order=1, max_degree=2)
        B = random_local_form(rng, cs, 0, cs.m - 1, max_order=1, max_degree=2)
        ok = ok and (euler_lagrange(L + d_h(B)) - euler_lagrange(L)).is_zero()
    _verdict(6, ok, "projector idempotent, kills divergences, squares to zero, gauge invariant")


def test_criterion_07_gauge_identity_golden():
    prob = maxwell_like()
    action = GaugeAction(
        prob.cs,
        {(0, 0, (0,)): prob.cs.number(1), (0, 1, (1,)): prob.cs.number(1)},
    )
    out = noether2_identity(action, prob.L)
    _verdict(7, out[0].is_zero(), "two-field gauge theory second-theorem identity is the zero expression")


def test_criterion_08_universal_current_identity():
    rng = random.Random(108)
    systems = [CoordSystem(("t",), ("q",)), CoordSystem(("x", "t"), ("u",))]
    ok = True
    for k in range(50):
        cs = systems[k % 2]
        L = random_lagrangian(rng, cs, max_order=1, max_degree=2)
        xi1 = random_evolutionary(rng, cs)
        xi2 = random_evolutionary(rng, cs)
        ok = ok and universal_current_check(xi1, xi2, L).is_zero()
    _verdict(8, ok, "off-shell conserved-current identity on 50 random field triples")


def test_criterion_09_bracket_suite():
    ok = True
    # corpus pairs: oscillator energy and free-particle/wave translations
    osc = harmonic_oscillator()
    osc_pair = complete_hamiltonian_pair(osc.insular_symmetries["time"], osc.L)
    wave = wave_equation()
    wave_pairs = [
        complete_hamiltonian_pair(wave.insular_symmetries[name], wave.L)
        for name in ("t", "x")
    ]
    for L, pairs in ((osc.L, [osc_pair]), (wave.L, wave_pairs)):
        omega = fundamental_data(L).omega
        for pair in pairs:
            v = ObservableElement(1, pair)
            out = l1_observable(l1_observable(v, L), L)
            ok = ok and out.payload.zeta.is_zero()
    l2 = ln_observable([ObservableElement(1, p) for p in wave_pairs], wave.L)
    omega_w = fundamental_data(wave.L).omega
    ok = ok and (
        d_total(l2) - insert(bracket_insular(wave_pairs[0].chi, wave_pairs[1].chi), omega_w)
    ).is_zero()
    # surface relation between the two 2-brackets
    db = deformed_bracket(wave_pairs[0], wave_pairs[1], wave.L)
    m = wave.cs.m
    xi, ups = wave_pairs[0].chi.ev, wave_pairs[1].chi.ev
    eta1 = wave_pairs[1].zeta.component(1, m - 2)
    zeta1 = wave_pairs[0].zeta.component(1, m - 2)
    surf = db.component(0, m - 1) - l2.component(0, m - 1)
    ok = ok and (surf - d_h(insert_ev(xi, eta1) - insert_ev(ups, zeta1))).is_zero()

    # finite-dimensional kernel
    gs = GradedSpace.from_dims({0: 2, -1: 1})
    fam = BracketFamily(gs, "anti")
    fam.set_bracket(((-1, 0),), {(0, 1): Fraction(1)})
    fam.set_bracket(((0, 0), (0, 1)), {(0, 1): Fraction(1)})
    fam.set_bracket(((0, 0), (-1, 0)), {(-1, 0): Fraction(1)})
    gs3 = GradedSpace.from_dims({0: 3})
    so3 = BracketFamily(gs3, "anti")
    so3.set_bracket(((0, 0), (0, 1)), {(0, 2): Fraction(1)})
    so3.set_bracket(((0, 1), (0, 2)), {(0, 0): Fraction(1)})
    so3.set_bracket(((0, 0), (0, 2)), {(0, 1): Fraction(-1)})
    for family in (fam, so3):
        ok = ok and all(not v for v in all_jacobiators(family, 3).values())
    q = decalage_transport(fam)
    ok = ok and all(not v for v in all_jacobiators(q, 3).values())
    # transport at total dimension 2: a valid structure stays valid...
    gs2 = GradedSpace.from_dims({0: 1, -1: 1})
    valid2 = BracketFamily(gs2, "anti")
    valid2.set_bracket(((-1, 0),), {(0, 0): Fraction(1)})  # differential only
    ok = ok and all(not v for v in all_jacobiators(valid2, 3).values())
    ok = ok and all(
        not v for v in all_jacobiators(decalage_transport(valid2), 3).values()
    )
    # ...and an invalid one maps defects to defects, tuple by tuple
    small = BracketFamily(gs2, "anti")
    small.set_bracket(((-1, 0),), {(0, 0): Fraction(1)})
    small.set_bracket(((0, 0), (-1, 0)), {(-1, 0): Fraction(1)})
    q2 = decalage_transport(small)
    basis = gs2.basis()
    from varcalc.linf import jacobiator

    for n in (2, 3):
        for combo in itertools.combinations_with_replacement(basis, n):
            Ja = jacobiator(small, n, list(combo))
            Js = jacobiator(q2, n, [(d - 1, k) for d, k in combo])
            ok = ok and (bool(Ja) == bool(Js))
    _verdict(9, ok, "observable brackets replay; kernel verifies structures and transport")


def test_criterion_10_divergence_inversion():
    rng = random.Random(110)
    systems = [CoordSystem(("x",), ("u",)), CoordSystem(("x", "t"), ("u",))]
    ok = True
    built = 0
    while built < 30:
        cs = systems[built % 2]
        P = random_local_form(rng, cs, 0, cs.m - 1, max_order=1, max_degree=3)
        f = d_h(P)
        if f.is_zero():
            continue
        built += 1
        got = divergence_invert(f, order_bound=2, degree_bound=3)
        ok = ok and (d_h(got) - f).is_zero()
    rejected = 0
    attempts = 0
    while rejected < 10 and attempts < 200:
        attempts += 1
        cs = systems[attempts % 2]
        L = random_lagrangian(rng, cs, max_order=1, max_degree=2)
        if exterior_euler(L).is_zero():
            continue
        try:
            divergence_invert(L)
            ok = False
        except NotExactError:
            rejected += 1
    ok = ok and rejected == 10
    _verdict(10, ok, "30 constructed divergences inverted and replayed; 10 controls rejected")


def test_criterion_11_cli_determinism():
    commands = [
        ["el", "--coords", "t", "--fields", "q", "--lagrangian", "1/2*q_t**2 - 1/2*q**2"],
        [
            "verify-ff", "--coords", "x,t", "--fields", "u",
            "--lagrangian", "1/2*u_t**2 - 1/2*u_x**2", "--format", "json",
        ],
        [
            "noether", "--coords", "t", "--fields", "q",
            "--lagrangian", "1/2*q_t**2 - 1/2*q**2", "--xi", "ev{q: -q_t}",
            "--format", "latex",
        ],
        ["graded-check", "--seed", "17"],
    ]
    ok = True
    for argv in commands:
        outs = []
        for _ in range(2):
            buf = io.StringIO()
            with contextlib.redirect_stdout(buf):
                code = cli_main(list(argv))
            outs.append((code, buf.getvalue()))
        ok = ok and outs[0] == outs[1]
    _verdict(11, ok, "repeated command-line invocations are byte-identical")
