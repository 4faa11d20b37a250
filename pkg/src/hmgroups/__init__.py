"""Exact p-adic arithmetic and the metabelian groups K_{p,F}, M_{p,n}, T_n."""
from .errors import DomainError, HMGroupsError, InputError
from .groups import (
    AffineL,
    Element,
    GenericFiniteAction,
    GenericPAdicAction,
    InfiniteToPrecision,
    K,
    M,
    T,
    commutator,
    element_order,
    identity,
    inv,
    is_central,
    mul,
    parse_descriptor,
    parse_element,
    validate_action,
)
from .invariants import (
    abelianization,
    classify_action,
    classify_finite_action,
    derived_subgroup,
    distinguish,
    psi,
)
from .padic import AtLeastPrecision, PAdicInt, PAdicRational, PrecisionPolicy, format_padic, parse_padic
from .units import INFINITY, decompose, layer, pexp, plog, teichmuller, unit_log, unit_power

__version__ = "0.1.0"
