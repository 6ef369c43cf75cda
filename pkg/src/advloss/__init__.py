"""Adversarial surrogate losses for general multiclass classification.

Closed-form convex surrogates for zero-one, ordinal, weighted, and
abstention losses, derived from a minimax game against a worst-case
label distribution; exact subgradients; game solvers for arbitrary loss
matrices; linear and kernelized stochastic training; prediction
schemes; Fisher-consistency checks; and a benchmark harness with a CLI.
"""

from ._backend import COMPILED, backend_name
from .errors import (
    AdvLossError,
    AlphaOutOfRange,
    BadConfig,
    BudgetExceeded,
    DimensionMismatch,
    EmptyDataset,
    InvalidSpec,
    ParseError,
    SchemeUnavailable,
    SolverFailure,
    TooLarge,
    TooSmall,
    UnsupportedBase,
)
from .matrices import (
    Abstain,
    General,
    LossSpec,
    OrdinalAbsolute,
    OrdinalSquared,
    Weighted,
    ZeroOne,
    build_loss_matrix,
    validate_loss_matrix,
)
from .losses import (
    adversary_optimum,
    al_abstain,
    al_general,
    al_ordinal_abs,
    al_ordinal_sq,
    al_weighted,
    al_zero_one,
    surrogate_loss,
)
from .game import (
    GameSolution,
    PolytopeVertex,
    enumerate_vertices,
    solve_adversary_game,
    solve_predictor_game,
)
from .gradients import (
    Subgradient,
    subgrad_abstain,
    subgrad_general,
    subgrad_ordinal_abs,
    subgrad_zero_one,
    subgradient,
)
from .features import (
    FeatureMap,
    GaussianKernel,
    KernelSpec,
    LinearKernel,
    MulticlassFeatures,
    ThresholdedFeatures,
    featurize,
    kernel_value,
)
from .data import (
    Dataset,
    Scaler,
    equal_frequency_bins,
    load_csv,
    split,
    standardize,
    stratified_folds,
)
from .training import (
    AdaGrad,
    KernelModel,
    LinearModel,
    OptimizerConfig,
    PegasosSchedule,
    SGD,
    load_model,
    save_model,
    train_linear,
    train_pegasos_kernel,
    train_pegasos_linear,
)
from .prediction import (
    ABSTAIN,
    Prediction,
    predict_abstain,
    predict_argmax,
    predict_probabilistic,
)
from .consistency import (
    ConsistencyReport,
    bayes_set,
    check_consistency,
    minimize_expected_al,
    nearest_optimal_adversary,
)

__version__ = "0.1.0"
