"""Predefined evenly-distributed class centroids (PEDCC).

Analytic generation of ``k`` unit vectors in ``R^n`` with all pairwise
cosines ``-1/(k-1)``, their tight-frame properties, PEDCC-Loss with exact
gradients, and the legacy charge-model generator for comparison.
"""
__version__ = "0.1.0"

from pedcc.errors import (  # noqa: E402
    DegenerateState,
    DimensionMismatch,
    IllConditioned,
    InvalidShape,
    NearSingular,
    NonFinite,
    PedccError,
    SamplingFailed,
    ZeroFeature,
    ZeroVector,
)
from pedcc.frame import (  # noqa: E402
    AngleDecomposition,
    FrameReport,
    SubspaceProjector,
    build_projector,
    cosine_distance_table,
    decompose_angles,
    frame_sum,
    verify_pedcc,
)
from pedcc.generator import (  # noqa: E402
    ChargeSimConfig,
    PedccSet,
    generate_basic_recursive,
    generate_iterative_charge,
    generate_pedcc,
    generate_simplex_lange,
)
from pedcc.linalg import (  # noqa: E402
    RNG_ALGORITHM,
    apply_rotation,
    gram_schmidt_orthonormalize,
    sample_rotation,
)
from pedcc.loss import (  # noqa: E402
    LabeledBatch,
    LossParams,
    LossReport,
    cos_logits,
    loss_am,
    loss_mse,
    loss_total_with_grad,
)
