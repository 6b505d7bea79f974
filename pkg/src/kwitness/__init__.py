"""Exact certificates for classes of nilpotent endomorphisms of binary multicomplexes."""

from .complexes import BinaryMulticomplex, validate_multicomplex
from .linalg import hnf, invariant_factors, kernel_saturated, snf
from .nil import NilMulticomplex, nil_index, validate_nil
from .reduction import ReductionFailure, reduce_nil_generator
from .rings import INTEGERS, RingSpec, localized
from .verify import verify_certificate

__all__ = [
    "BinaryMulticomplex", "validate_multicomplex", "hnf", "invariant_factors",
    "kernel_saturated", "snf", "NilMulticomplex", "nil_index", "validate_nil",
    "ReductionFailure", "reduce_nil_generator", "INTEGERS", "RingSpec", "localized",
    "verify_certificate",
]
