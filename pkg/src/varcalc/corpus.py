"""Bundled example field theories used by the test suite and documentation.

Each entry packages a coordinate system, a Lagrangian density, and the
symmetries exercised against it.  Everything is built through the public
constructors so the corpus doubles as usage examples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .expr import CoordSystem
from .forms import LocalForm, lagrangian_form
from .parser import parse_expr, parse_vector_field


@dataclass
class Problem:
    name: str
    cs: CoordSystem
    L: LocalForm
    symmetries: dict = field(default_factory=dict)  # name -> EvolutionaryVF
    insular_symmetries: dict = field(default_factory=dict)  # name -> InsularVF


def harmonic_oscillator() -> Problem:
    cs = CoordSystem(("t",), ("q",))
    L = lagrangian_form(parse_expr("1/2*q_t**2 - 1/2*q**2", cs))
    return Problem(
        "harmonic_oscillator",
        cs,
        L,
        symmetries={"time": parse_vector_field("ev{q: -q_t}", cs)},
        insular_symmetries={
            "time": parse_vector_field("ins{ev{q: -q_t}, tot{t: 1}}", cs)
        },
    )


def free_particle() -> Problem:
    cs = CoordSystem(("t",), ("q",))
    L = lagrangian_form(parse_expr("1/2*q_t**2", cs))
    return Problem(
        "free_particle",
        cs,
        L,
        symmetries={
            "time": parse_vector_field("ev{q: -q_t}", cs),
            "shift": parse_vector_field("ev{q: -1}", cs),
            "boost": parse_vector_field("ev{q: -t}", cs),
        },
        insular_symmetries={
            "time": parse_vector_field("ins{ev{q: -q_t}, tot{t: 1}}", cs),
            "shift": parse_vector_field("ins{ev{q: -1}, tot{}}", cs),
            "boost": parse_vector_field("ins{ev{q: -t}, tot{}}", cs),
        },
    )


def wave_equation() -> Problem:
    cs = CoordSystem(("x", "t"), ("u",))
    L = lagrangian_form(parse_expr("1/2*u_t**2 - 1/2*u_x**2", cs))
    return Problem(
        "wave_equation",
        cs,
        L,
        symmetries={
            "x": parse_vector_field("ev{u: -u_x}", cs),
            "t": parse_vector_field("ev{u: -u_t}", cs),
            "boost": parse_vector_field("ev{u: -(t*u_x + x*u_t)}", cs),
            "shift": parse_vector_field("ev{u: 1}", cs),
        },
        insular_symmetries={
            "x": parse_vector_field("ins{ev{u: -u_x}, tot{x: 1}}", cs),
            "t": parse_vector_field("ins{ev{u: -u_t}, tot{t: 1}}", cs),
            "boost": parse_vector_field(
                "ins{ev{u: -(t*u_x + x*u_t)}, tot{x: t, t: x}}", cs
            ),
        },
    )


def kdv_like() -> Problem:
    """Second-jet-order density with a u_xx^2 term (potential-form dispersive
    wave); exercises the order-2 paths of the decomposition."""
    cs = CoordSystem(("x", "t"), ("u",))
    L = lagrangian_form(parse_expr("1/2*u_x*u_t - u_x**3 - 1/2*u_xx**2", cs))
    return Problem(
        "kdv_like",
        cs,
        L,
        symmetries={
            "x": parse_vector_field("ev{u: -u_x}", cs),
            "t": parse_vector_field("ev{u: -u_t}", cs),
        },
    )


def maxwell_like() -> Problem:
    """Two-field gauge theory L = (1/2)(u2_x - u1_t)^2 with gauge
    transformation (u1, u2) -> (u1 + D_x psi, u2 + D_t psi)."""
    cs = CoordSystem(("x", "t"), ("u1", "u2"))
    L = lagrangian_form(parse_expr("1/2*(u2_x - u1_t)**2", cs))
    return Problem("maxwell_like", cs, L)


def bundled() -> list[Problem]:
    return [harmonic_oscillator(), free_particle(), wave_equation(), kdv_like()]
