"""Energy-landscape toolkit for stabilizer-code Hamiltonians on periodic lattices."""

from .lattice import LatticeGeometry, QubitIndex
from .pauli import PauliOperator, commutes, pauli_mul, weight_and_support
from .codes import (
    CodeInstance,
    CodeSpec,
    Defect,
    Syndrome,
    build_code,
    check_frustration_free,
    get_code,
    registered_spec,
    registry_names,
    translate_operator,
)
from .defects import (
    ScaleParams,
    classify_string_segment,
    cluster_partition,
    creation_operator,
    is_neutral,
    localize,
    min_dense_run,
    scan_for_strings,
)
from .paths import (
    ErrorPath,
    energy_profile,
    logical_zbar,
    pyramid_operator,
    pyramid_path,
    verify_logical,
)
from .oracle import SearchBudget, canonicalize, code_distance, min_barrier_cluster, min_barrier_logical
from .rg import (
    box_counting_dimension,
    level_histories,
    support_connectivity,
    syndrome_history,
    track_charged_clusters,
)

__all__ = [
    "LatticeGeometry",
    "QubitIndex",
    "PauliOperator",
    "commutes",
    "pauli_mul",
    "weight_and_support",
    "CodeInstance",
    "CodeSpec",
    "Defect",
    "Syndrome",
    "build_code",
    "check_frustration_free",
    "get_code",
    "registered_spec",
    "registry_names",
    "translate_operator",
    "ScaleParams",
    "classify_string_segment",
    "cluster_partition",
    "creation_operator",
    "is_neutral",
    "localize",
    "min_dense_run",
    "scan_for_strings",
    "ErrorPath",
    "energy_profile",
    "logical_zbar",
    "pyramid_operator",
    "pyramid_path",
    "verify_logical",
    "SearchBudget",
    "canonicalize",
    "code_distance",
    "min_barrier_cluster",
    "min_barrier_logical",
    "box_counting_dimension",
    "level_histories",
    "support_connectivity",
    "syndrome_history",
    "track_charged_clusters",
]

__version__ = "0.1.0"
