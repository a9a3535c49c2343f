"""varcalc: exact symbolic variational calculus on trivial jet bundles.

Differential polynomials with rational coefficients, the bigraded complex of
local forms with its two differentials and full insular Cartan calculus,
Euler-Lagrange derivation via the interior Euler operator, Noether currents
and gauge identities, and graded bracket verification, all with a decidable
zero test.
"""

__version__ = "0.1.0"

from .expr import CoordSystem, Expr, eval_on_section, partial
from .forms import LocalForm, MixedForm, d_h, d_total, d_v, insert, lagrangian_form, lie
from .jet import (
    EvolutionaryVF,
    InsularVF,
    TotalVF,
    bracket_evolutionary,
    bracket_insular,
    total_derivative,
    total_derivative_multi,
)
from .euler import (
    AnsatzExhaustedError,
    NotExactError,
    divergence_invert,
    euler_lagrange,
    exterior_euler,
    interior_euler,
    is_d_exact_top,
)
from .variational import (
    first_order_lambda1,
    fundamental_data,
    lambda1,
    omega1,
    poincare_cartan,
    verify_fundamental,
)
from .noether import (
    GaugeAction,
    HamiltonianPair,
    NoetherPair,
    check_hamiltonian_pair,
    check_symplectic,
    is_symmetry,
    noether2_identity,
    noether_current,
    noether_pair_bracket,
    universal_current_check,
)
from .linf import (
    BracketFamily,
    GradedSpace,
    decalage_sign,
    decalage_transport,
    jacobiator,
    koszul_sign,
    unshuffles,
)
from .parser import parse_expr, parse_form, parse_vector_field

__all__ = [name for name in dir() if not name.startswith("_")]
