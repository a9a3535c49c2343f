"""Request/response models and command handlers.

The FastAPI service and the command line are both thin clients of this
module: a request names a coordinate system and the problem data as literal
strings, a handler runs the computation, and the response carries named
results and residuals in text, LaTeX, and structured form.  Status "ok"
means every checked identity held; "fail" means a verification failed or a
search was exhausted (the residuals say which).
"""

from __future__ import annotations

import random
from typing import Any, Optional

from pydantic import BaseModel, Field

from .euler import (
    AnsatzExhaustedError,
    euler_lagrange,
    lagrangian_coefficient,
    source_components,
)
from .expr import CoordSystem, Expr
from .forms import LocalForm, MixedForm, d_total, lagrangian_form
from .jet import EvolutionaryVF, InsularVF, TotalVF
from .linf import (
    BracketFamily,
    GradedSpace,
    all_jacobiators,
    decalage_sign,
    decalage_transport,
    decalage_untransport,
    koszul_sign,
    unshuffles,
)
from .noether import (
    GaugeAction,
    NoetherPair,
    NotASymmetryError,
    check_hamiltonian_pair,
    check_noether_pair,
    check_symplectic,
    is_symmetry,
    noether2_identity,
    noether_current,
    noether_pair_bracket,
    report_passes,
)
from .parser import (
    ParseError,
    as_insular,
    parse_expr,
    parse_gauge,
    parse_pair,
    parse_vector_field,
)
from .render import (
    expr_latex,
    expr_text,
    form_json,
    form_latex,
    form_text,
    mixed_json,
    mixed_latex,
    mixed_text,
)
from .variational import first_order_lambda1, fundamental_data, verify_fundamental


class UsageError(ValueError):
    """Bad request: unparsable input or missing required fields."""


class ProblemRequest(BaseModel):
    coords: str = ""
    fields: str = ""
    lagrangian: Optional[str] = None
    xi: Optional[str] = None
    xi2: Optional[str] = None
    total: Optional[str] = None
    pair: list[str] = Field(default_factory=list)
    gauge: list[str] = Field(default_factory=list)
    brackets: Optional[dict] = None
    arity: int = 3
    convention: str = "anti"
    order_bound: Optional[int] = None
    degree_bound: Optional[int] = None
    seed: int = 0


class ResultItem(BaseModel):
    name: str
    value: str
    latex: Optional[str] = None
    form: Optional[Any] = None


class Report(BaseModel):
    command: str
    status: str
    results: list[ResultItem] = Field(default_factory=list)
    residuals: list[ResultItem] = Field(default_factory=list)


def _coord_system(req: ProblemRequest) -> CoordSystem:
    if not req.coords or not req.fields:
        raise UsageError("coords and fields are required")
    base = tuple(n.strip() for n in req.coords.split(",") if n.strip())
    fiber = tuple(n.strip() for n in req.fields.split(",") if n.strip())
    try:
        return CoordSystem(base, fiber)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _lagrangian(req: ProblemRequest, cs: CoordSystem) -> LocalForm:
    if not req.lagrangian:
        raise UsageError("a lagrangian is required")
    return lagrangian_form(parse_expr(req.lagrangian, cs))


def _expr_item(name: str, e: Expr) -> ResultItem:
    return ResultItem(name=name, value=expr_text(e), latex=expr_latex(e))


def _form_item(name: str, w: LocalForm) -> ResultItem:
    return ResultItem(name=name, value=form_text(w), latex=form_latex(w), form=form_json(w))


def _mixed_item(name: str, w: MixedForm) -> ResultItem:
    return ResultItem(name=name, value=mixed_text(w), latex=mixed_latex(w), form=mixed_json(w))


# -- command handlers -----------------------------------------------------------


def cmd_el(req: ProblemRequest) -> Report:
    cs = _coord_system(req)
    L = _lagrangian(req, cs)
    comps = source_components(euler_lagrange(L))
    results = [
        _expr_item(f"EL[{cs.fiber_names[alpha]}]", comps[alpha]) for alpha in range(cs.e)
    ]
    return Report(command="el", status="ok", results=results)


def cmd_lambda1(req: ProblemRequest) -> Report:
    cs = _coord_system(req)
    L = _lagrangian(req, cs)
    data = fundamental_data(L)
    results = [
        _form_item("lambda1", data.lambda1),
        ResultItem(name="sign_adjusted", value=str(data.lambda1_sign_flipped).lower()),
    ]
    return Report(command="lambda1", status="ok", results=results)


def cmd_pc(req: ProblemRequest) -> Report:
    cs = _coord_system(req)
    L = _lagrangian(req, cs)
    data = fundamental_data(L)
    resid = d_total(data.omega)
    results = [
        _form_item("EL", data.EL),
        _form_item("omega1", data.omega1),
        _mixed_item("omega", data.omega),
    ]
    residuals = [_mixed_item("D(omega)", resid)]
    return Report(
        command="pc",
        status="ok" if resid.is_zero() else "fail",
        results=results,
        residuals=residuals,
    )


def cmd_verify_ff(req: ProblemRequest) -> Report:
    cs = _coord_system(req)
    L = _lagrangian(req, cs)
    report = verify_fundamental(L)
    fo_ok = True
    results = []
    residuals = []
    for name, (ok, resid) in report.items():
        results.append(ResultItem(name=name, value="PASS" if ok else "FAIL"))
        if not ok:
            residuals.append(_mixed_item(name, resid))
    f = lagrangian_coefficient(L)
    if f.max_jet_order() <= 1:
        agree = (first_order_lambda1(L) - fundamental_data(L).lambda1).is_zero()
        results.append(
            ResultItem(name="first_order_agreement", value="PASS" if agree else "FAIL")
        )
        fo_ok = agree
    status = "ok" if fo_ok and all(ok for ok, _ in report.values()) else "fail"
    return Report(command="verify-ff", status=status, results=results, residuals=residuals)


def _parse_xi(req: ProblemRequest, cs: CoordSystem) -> EvolutionaryVF:
    if not req.xi:
        raise UsageError("an evolutionary field (--xi) is required")
    vf = parse_vector_field(req.xi, cs)
    if isinstance(vf, InsularVF):
        return vf.ev
    if isinstance(vf, TotalVF):
        raise UsageError("--xi needs an evolutionary (ev{...}) field")
    return vf


def _parse_chi(req: ProblemRequest, cs: CoordSystem) -> InsularVF:
    parts = []
    if req.xi:
        parts.append(parse_vector_field(req.xi, cs))
    if req.total:
        parts.append(parse_vector_field(req.total, cs))
    if not parts:
        raise UsageError("a vector field (--xi and/or --total) is required")
    chi = as_insular(parts[0])
    for extra in parts[1:]:
        chi = chi + as_insular(extra)
    return chi


def cmd_symcheck(req: ProblemRequest) -> Report:
    cs = _coord_system(req)
    L = _lagrangian(req, cs)
    xi = _parse_xi(req, cs)
    ok, eta = is_symmetry(xi, L)
    results = [
        ResultItem(name="is_symmetry", value="true" if ok else "false"),
        _form_item("lie_xi_L", eta),
    ]
    return Report(command="symcheck", status="ok" if ok else "fail", results=results)


def cmd_noether(req: ProblemRequest) -> Report:
    cs = _coord_system(req)
    L = _lagrangian(req, cs)
    xi = _parse_xi(req, cs)
    try:
        pair = noether_current(
            xi, L, order_bound=req.order_bound, degree_bound=req.degree_bound
        )
    except NotASymmetryError:
        _, eta = is_symmetry(xi, L)
        return Report(
            command="noether",
            status="fail",
            results=[ResultItem(name="is_symmetry", value="false")],
            residuals=[_form_item("lie_xi_L", eta)],
        )
    except AnsatzExhaustedError as exc:
        return Report(
            command="noether",
            status="fail",
            results=[
                ResultItem(
                    name="ansatz_exhausted",
                    value=f"order_bound={exc.order_bound} degree_bound={exc.degree_bound}",
                )
            ],
        )
    if cs.m == 1:
        z_expr = pair.Z.terms.get(((), ()), cs.zero())
        results = [_expr_item("Z", z_expr)]
    else:
        results = [_form_item("Z", pair.Z)]
    resid = check_noether_pair(pair, L)
    return Report(
        command="noether",
        status="ok" if resid.is_zero() else "fail",
        results=results,
        residuals=[_form_item("dZ - iota_xi_EL", resid)],
    )


def _parse_noether_pair(text: str, cs: CoordSystem, L: LocalForm) -> NoetherPair:
    chi, zeta = parse_pair(text, cs)
    comps = [w for w in zeta.components.values() if not w.is_zero()]
    if len(comps) > 1:
        raise UsageError("a conserved current lives in one bidegree")
    Z = comps[0] if comps else LocalForm(cs, 0, cs.m - 1)
    if (Z.p, Z.q) != (0, cs.m - 1):
        raise UsageError("a conserved current has bidegree (0, top-1)")
    return NoetherPair(chi.ev, Z)


def cmd_bracket(req: ProblemRequest) -> Report:
    cs = _coord_system(req)
    L = _lagrangian(req, cs)
    if len(req.pair) != 2:
        raise UsageError("bracket needs exactly two --pair literals")
    p1 = _parse_noether_pair(req.pair[0], cs, L)
    p2 = _parse_noether_pair(req.pair[1], cs, L)
    out = noether_pair_bracket(p1, p2, L)
    resid = check_noether_pair(out, L)
    results = [
        _expr_item(f"xi[{cs.fiber_names[a]}]", out.xi.xi[a]) for a in range(cs.e)
    ] + [_form_item("Z", out.Z)]
    return Report(
        command="bracket",
        status="ok" if resid.is_zero() else "fail",
        results=results,
        residuals=[_form_item("dZ - iota_xi_EL", resid)],
    )


def cmd_noether2(req: ProblemRequest) -> Report:
    cs = _coord_system(req)
    L = _lagrangian(req, cs)
    if not req.gauge:
        raise UsageError("noether2 needs at least one --gauge literal")
    coeffs: dict = {}
    for beta, text in enumerate(req.gauge):
        for (alpha, idx), e in parse_gauge(text, cs).items():
            coeffs[(beta, alpha, idx)] = e
    action = GaugeAction(cs, coeffs)
    out = noether2_identity(action, L)
    results = []
    ok = True
    for beta, e in sorted(out.items()):
        results.append(_expr_item(f"identity[{beta}]", e))
        ok = ok and e.is_zero()
    return Report(command="noether2", status="ok" if ok else "fail", results=results)


def cmd_hampair(req: ProblemRequest) -> Report:
    cs = _coord_system(req)
    L = _lagrangian(req, cs)
    if len(req.pair) != 1:
        raise UsageError("hampair needs exactly one --pair literal")
    chi, zeta = parse_pair(req.pair[0], cs)
    report = check_hamiltonian_pair(chi, zeta, L)
    results = [
        ResultItem(name=name, value="PASS" if ok else "FAIL") for name, (ok, _) in report.items()
    ]
    residuals = [
        _mixed_item(name, resid) for name, (ok, resid) in report.items() if not ok
    ]
    return Report(
        command="hampair",
        status="ok" if report_passes(report) else "fail",
        results=results,
        residuals=residuals,
    )


def cmd_symplectic(req: ProblemRequest) -> Report:
    cs = _coord_system(req)
    L = _lagrangian(req, cs)
    chi = _parse_chi(req, cs)
    report = check_symplectic(chi, L)
    results = [
        ResultItem(name=name, value="PASS" if ok else "FAIL") for name, (ok, _) in report.items()
    ]
    residuals = [
        _mixed_item(name, resid) for name, (ok, resid) in report.items() if not ok
    ]
    return Report(
        command="symplectic",
        status="ok" if report_passes(report) else "fail",
        results=results,
        residuals=residuals,
    )


def cmd_linf_jacobi(req: ProblemRequest) -> Report:
    if req.brackets is None:
        raise UsageError("linf-jacobi needs a bracket family (--brackets file)")
    try:
        family = BracketFamily.from_json(req.brackets)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad bracket family: {exc}") from exc
    jacs = all_jacobiators(family, max_arity=min(req.arity, 4))
    nonzero = {key: v for key, v in jacs.items() if v}
    results = [
        ResultItem(name="tuples_checked", value=str(len(jacs))),
        ResultItem(name="nonzero_jacobiators", value=str(len(nonzero))),
    ]
    residuals = [
        ResultItem(name=f"J{n}{tuple(map(list, combo))}", value=str(sorted(v.items())))
        for (n, combo), v in sorted(nonzero.items())
    ]
    return Report(
        command="linf-jacobi",
        status="ok" if not nonzero else "fail",
        results=results,
        residuals=residuals,
    )


def cmd_graded_check(req: ProblemRequest) -> Report:
    """Self-checks of the graded kernel: Koszul cocycle identity on random
    permutations, unshuffle counts, decalage round trip and transport on a
    built-in differential graded Lie algebra."""
    from fractions import Fraction
    from math import comb

    rng = random.Random(req.seed)
    checks: list[tuple[str, bool]] = []

    for _ in range(20):
        n = rng.randint(2, 5)
        degs = [rng.randint(-3, 0) for _ in range(n)]
        s1 = list(range(n))
        s2 = list(range(n))
        rng.shuffle(s1)
        rng.shuffle(s2)
        composed = [s1[s2[k]] for k in range(n)]
        lhs = koszul_sign(composed, degs)
        rhs = koszul_sign(s1, degs) * koszul_sign(s2, [degs[s1[k]] for k in range(n)])
        checks.append((f"koszul_cocycle(n={n})", lhs == rhs))

    for i, j in [(1, 2), (2, 2), (3, 0), (2, 3)]:
        got = len(unshuffles(i, j))
        checks.append((f"unshuffle_count({i},{j})", got == comb(i + j, i)))

    gs = GradedSpace.from_dims({0: 2, -1: 1})
    fam = BracketFamily(gs, "anti")
    fam.set_bracket(((-1, 0),), {(0, 1): Fraction(1)})
    fam.set_bracket(((0, 0), (0, 1)), {(0, 1): Fraction(1)})
    fam.set_bracket(((0, 0), (-1, 0)), {(-1, 0): Fraction(1)})
    jac = all_jacobiators(fam, 3)
    checks.append(("dgla_jacobiators_vanish", all(not v for v in jac.values())))
    q = decalage_transport(fam)
    checks.append(("transport_jacobiators_vanish", all(not v for v in all_jacobiators(q, 3).values())))
    checks.append(("decalage_round_trip", decalage_untransport(q).entries == fam.entries))
    checks.append(("decalage_sign_n2", decalage_sign([1, 0]) == -1))

    results = [ResultItem(name=name, value="PASS" if ok else "FAIL") for name, ok in checks]
    return Report(
        command="graded-check",
        status="ok" if all(ok for _, ok in checks) else "fail",
        results=results,
    )


HANDLERS = {
    "el": cmd_el,
    "lambda1": cmd_lambda1,
    "pc": cmd_pc,
    "verify-ff": cmd_verify_ff,
    "symcheck": cmd_symcheck,
    "noether": cmd_noether,
    "bracket": cmd_bracket,
    "noether2": cmd_noether2,
    "hampair": cmd_hampair,
    "symplectic": cmd_symplectic,
    "linf-jacobi": cmd_linf_jacobi,
    "graded-check": cmd_graded_check,
}


def run_command(command: str, req: ProblemRequest) -> Report:
    """Dispatch a named command; ParseError is reported as a usage error."""
    handler = HANDLERS.get(command)
    if handler is None:
        raise UsageError(f"unknown command {command!r}")
    try:
        return handler(req)
    except ParseError as exc:
        raise UsageError(str(exc)) from exc
