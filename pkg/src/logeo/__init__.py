"""Logical geometry over finite algebras: formula values, logical kernels,
types, Galois closures, and the point equivalences tau, rho and rho_0."""

from .algebra import (
    FiniteAlgebra,
    automorphisms,
    cyclic,
    direct_product,
    elementary_abelian,
    graph_is_isomorphism,
    isomorphic,
    load_algebra,
    menu_algebra,
    subalgebra_generate,
)
from .errors import AlgebraError, GuardError, LogeoError, ParseError, SortError
from .formula import format_formula, holds_at, in_theory, lker_contains, parse_formula, value
from .geometry import (
    EquationSystem,
    FormulaSystem,
    algebraic_set,
    elementary_set,
    in_equational_closure,
    in_logical_closure,
    is_elementary,
    point_closure,
    tau_coset_formula_system,
)
from .signature import Substitution, VarSort, group_signature, parse_term
from .space import Point, PointSet, exists_x, forall_x, sstar_pointset
from .typesys import (
    Partition,
    isotyped,
    is_homogeneous,
    is_logically_perfect,
    is_strictly_perfect,
    orbit_partition,
    pebble_partition,
    rho_partition,
    separating_formula,
    tau_partition,
    type_census,
)
from .zline import ZPoint, build_test_formula, divisibility_formula, eval_exists_linear, z_isotyped

__version__ = "0.1.0"
