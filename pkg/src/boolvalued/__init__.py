"""Boolean-valued models over finite complete Boolean algebras, function
spaces into desk-scale Polish spaces, and names for their points."""
from .algebra import (
    AlgebraError, AlgElement, BooleanAlgebra, FinitePoset, PosetError, ROCompletion,
    Ultrafilter, complement, inf, intclosure, is_antichain, is_predense, join, leq,
    make_powerset_algebra, meet, regular_open_sets, ro_completion, stone_poset, sup,
    ultrafilters,
)
from .functions import (
    CPlusFunction, FunctionSpaceError, FunctionSpaceStructure, GermStructure,
    as_bvalued_structure, constant, constant_embedding, constants_carrier, germ_quotient,
    germs_match_quotient, lift_function, lift_relation, make_function, mix,
)
from .models import (
    BValuedStructure, EvaluationError, FirstOrderStructure, MorphismWitness, StructureError,
    boolean_table, check_morphism, check_structure_axioms, classify_morphism, eval_boolean,
    eval_tarski, find_witness, los_check, los_clause_ii, los_sweep, quotient,
    soundness_suite, tarski_table,
)
from .names import (
    BasisAssignment, NameResolutionError, ResolutionError, UnderdeterminedName,
    UnrealizableName, check_name_coherence, function_from_name, lift_relation_on_names,
    name_from_function, names_structure, quotient_equivalence_check,
)
from .polish import (
    INFINITY, Basic, BasisBall, BorelCode, Compl, PolishPresentation, Prim, RationalPoint,
    SpaceError, UnionFin, ball_membership, basis_enumerate, eval_borel, intersection, point,
)
from .report import Check, Report
from .spotcheck import elementarity_spotcheck
from .syntax import (
    And, Apply, Eq, Exists, Forall, Implies, Not, Or, Rel, Signature, SignatureError,
    SyntaxErrorAt, Var, format_formula, formula_depth, parse_formula, parse_term,
)

__version__ = "0.1.0"
