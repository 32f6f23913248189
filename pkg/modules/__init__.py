from .misc import ViewPooling
from .propagation import TermSpec, Factor, PropagatedFeatures, ParameterReport
from .propagation import enumerate_terms, term_count, propagate, materialize_operator, build_operators, count_parameters
