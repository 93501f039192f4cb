"""upbkit: unextendible product bases, bound-entangled states, and their noise robustness."""

from .linalg import (
    ConvergenceError,
    EigDecomposition,
    hermitian_eig,
    kernel,
    kron,
    numerical_rank,
    partial_transpose,
    subspace_distance,
)
from .states import (
    Bipartition,
    CutVerdict,
    DensityMatrix,
    PartyStructure,
    ProductVector,
    basis_labels,
    basis_projector,
    bipartitions,
    decompose_in_projector_basis,
    expand,
    is_ppt_all_cuts,
    local_vector,
    min_pt_eigenvalue,
    projector_basis,
    projector_basis_gram,
    qubits,
    random_density_matrix,
    random_product_vector,
)
from .upb import (
    UPB,
    HuntResult,
    ShiftsParams,
    UnextendibilityCertificate,
    certify_unextendible,
    seesaw_max_product_overlap,
    shifts_family,
    subspace_product_hunt,
    upb_state,
)
from .perturbation import (
    KernelCompression,
    LocalNoiseSpec,
    MixNoiseSpec,
    NoiseClassification,
    NoiseEffect,
    PositivityError,
    classify_noise,
    kernel_compression,
    kernel_product_basis,
    perturb_local,
    perturb_mix,
    predict_first_order,
    uniform_direction,
)
from .witness import (
    CertificationError,
    Witness,
    build_upb_witness,
    evaluate,
    robustness_radius,
)

__version__ = "0.1.0"
