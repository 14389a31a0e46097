"""Prime-factorization statistics over normed abelian monoids.

Enumerate fully factored elements of a monoid instance up to a norm
bound, count h-free and h-full subsets against their predicted main
terms, evaluate the associated Euler-product constants, and test the
Gaussian limiting behavior of standardized omega-type statistics.
"""

from .core import (
    ALL_ONES,
    ALTERNATING,
    LINEAR,
    LOG_DIVISOR,
    Factorization,
    PrimeRef,
    WeightSequence,
    indicator,
    table_weights,
)
from .errors import EmptySampleError, TheoremPairingError, UnsupportedSubsetError
from .instances import (
    MonoidInstance,
    custom_instance,
    fq_instance,
    gaussian_instance,
    integers_instance,
    load_custom_instance,
    p1_function_field_instance,
)
from .sieve import (
    SubsetSpec,
    count,
    count_main_term,
    count_restricted_h_free,
    count_restricted_h_full,
    count_with_prime,
    enumerate_elements,
    lambda_closed_form,
    lambda_e_decomposition,
    scan_elements,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_ONES",
    "ALTERNATING",
    "LINEAR",
    "LOG_DIVISOR",
    "EmptySampleError",
    "Factorization",
    "MonoidInstance",
    "PrimeRef",
    "SubsetSpec",
    "TheoremPairingError",
    "UnsupportedSubsetError",
    "WeightSequence",
    "count",
    "count_main_term",
    "count_restricted_h_free",
    "count_restricted_h_full",
    "count_with_prime",
    "custom_instance",
    "enumerate_elements",
    "fq_instance",
    "gaussian_instance",
    "indicator",
    "integers_instance",
    "lambda_closed_form",
    "lambda_e_decomposition",
    "load_custom_instance",
    "p1_function_field_instance",
    "scan_elements",
    "table_weights",
    "__version__",
]
