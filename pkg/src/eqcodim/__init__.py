"""Codimensions of generic bifurcations in monoid-equivariant systems.

Submodules
----------
linalg      dense kernels: ranks, spectra, Jordan data, quaternionic structure
strata      strata of the reduced matrix algebras, dimensions, classification
algebra     commutant, radical and Wedderburn data of a representation
split       generalized kernels, center subspaces, spectral block splits
codim       K_U, C_U and the k-parameter catalog
genericity  Monte Carlo transversality and witness families
cli         command line front end
"""

__version__ = "0.1.0"

from .linalg import (  # noqa: E402
    DEFAULT_TOL,
    SpectrumMultiset,
    ToleranceConfig,
    ToleranceError,
    embed_C,
    embed_H,
    is_quat_structured,
    jordan_structure,
    numerical_rank,
    power_trace_equal,
    quat_jordan_pairing_check,
    spectrum,
    sylvester_operator,
)
from .algebra import (  # noqa: E402
    DecompositionDescriptor,
    MonoidRepresentation,
    decomposition_descriptor,
    end_algebra,
)
from .strata import StratumLabel, XiLabel, classify, enumerate_strata, top_label  # noqa: E402
from .codim import C_U, K_U, catalog, product_codim  # noqa: E402
