"""Matrix multiplication algorithms from unitary 2-designs, verified exactly."""

from .bilinear import (
    BilinearAlgorithm,
    MultCounter,
    from_decomposition,
    multiply,
    naive_multiply,
    recursive_multiply,
)
from .decomp import (
    Decomposition,
    RankOneTerm,
    design_decomposition,
    strassen_reference,
    twisted_identity_check,
    untwisted_identity_check,
    verify_decomposition,
)
from .designs import (
    Design,
    GeneratorSet,
    orbit_design,
    polygon_design,
    simplex_design,
    triangle_design,
    verify_design,
)
from .scalar import QuadExt
from .tensor import Tensor3, identity_tensor, mm_tensor, pairing

__version__ = "0.1.0"
