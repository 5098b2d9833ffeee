"""Multi-group decodable space-time block codes built from Clifford algebras."""

__version__ = "0.1.0"
SCHEMA_VERSION = 1

from .clifford import gamma_representation, pauli_basis, verify_gamma
from .construct import (
    CodeDescriptor,
    GroupPartition,
    assemble_code,
    build_g0,
    build_gtilde_clifford,
    build_gtilde_diag,
    preset_dsd,
    preset_ssd,
)
from .verify import (
    codeword,
    discover_partition,
    hr_condition,
    verify_decomposition,
    verify_theorem2_split,
)
from .diversity import (
    BTransform,
    Constellation,
    cpd,
    diversity_product,
    make_transform,
    min_det_oracle,
    standard_constellations,
)
from .linksim import SimConfig, SimResult, exhaustive_ml_decode, groupwise_ml_decode, run_simulation

__all__ = [
    "BTransform",
    "CodeDescriptor",
    "Constellation",
    "GroupPartition",
    "SCHEMA_VERSION",
    "SimConfig",
    "SimResult",
    "assemble_code",
    "build_g0",
    "build_gtilde_clifford",
    "build_gtilde_diag",
    "codeword",
    "cpd",
    "discover_partition",
    "diversity_product",
    "exhaustive_ml_decode",
    "gamma_representation",
    "groupwise_ml_decode",
    "hr_condition",
    "make_transform",
    "min_det_oracle",
    "pauli_basis",
    "preset_dsd",
    "preset_ssd",
    "run_simulation",
    "standard_constellations",
    "verify_decomposition",
    "verify_gamma",
    "verify_theorem2_split",
]
