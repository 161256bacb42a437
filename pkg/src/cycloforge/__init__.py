"""Finite fields, exact cyclotomic arithmetic and verified constructions of
strongly regular Cayley graphs and translation association schemes."""

from .finite_field import CapExceededError, FieldElement, FiniteField, build_field
from .cyclotomic_integers import CycInt, cyclotomic_polynomial
from .characters import (
    ConnectionSet,
    MultChar,
    VectorSpace,
    davenport_hasse_check,
    eigenvalue_table,
    gauss_property_check,
    gauss_sum,
)
from .singer_lift import (
    hadamard_check,
    lift_connection_set,
    singer_difference_set,
    subdifference_set,
)
from .quadratic_forms import (
    QuadForm,
    canonical_form,
    fiber_partition,
    fiber_union_connection_set,
    fiber_variant_connection_sets,
    quadratic_form_fields,
    type_epsilon,
)
from .verify import (
    SrgParams,
    amorphic_check,
    cross_validate_scheme,
    verify_scheme_brute,
    verify_srg,
    verify_translation_scheme_dual,
)

__version__ = "0.1.0"
