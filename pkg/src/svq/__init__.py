"""Stochastic vector quantizer toolkit.

Chained stochastic encoder stages: each stage computes a sigmoid-normalised
posterior over its code indices, samples n of them i.i.d., and reconstructs
by averaging per-index reconstruction vectors.  Training minimises the exact
d1+d2 upper bound on the mean Euclidean reconstruction distortion with
analytic gradients and normalized descent steps.
"""

from .errors import InvalidInputError, InvalidModelError, SvqError
from .gradients import (
    ChainGradient,
    FdCheckReport,
    StageGradient,
    chain_gradient,
    finite_difference_check,
    stage_gradient_local,
)
from .metrics import EncoderTypeReport, bump_count, bump_peaks, classify_encoder
from .model import (
    ChainModel,
    StageModel,
    chain_forward,
    load_model,
    sample_code,
    save_model,
    stable_sigmoid,
)
from .objective import (
    Dataset,
    ObjectiveReport,
    chain_objective,
    d1_stage,
    d2_stage,
    estimate_true_D,
    lbg_baseline,
)
from .presets import PRESET_NAMES, RunResult, expand_preset, run_preset
from .sources import HumpPairSource, TorusSource
from .training import (
    TrainingPhase,
    TrainingSchedule,
    TrainingTrace,
    init_model,
    normalizers,
    train,
    update_step,
)

__version__ = "0.1.0"

__all__ = [
    "ChainGradient",
    "ChainModel",
    "Dataset",
    "EncoderTypeReport",
    "FdCheckReport",
    "HumpPairSource",
    "InvalidInputError",
    "InvalidModelError",
    "ObjectiveReport",
    "PRESET_NAMES",
    "RunResult",
    "StageGradient",
    "StageModel",
    "SvqError",
    "TorusSource",
    "TrainingPhase",
    "TrainingSchedule",
    "TrainingTrace",
    "bump_count",
    "bump_peaks",
    "chain_forward",
    "chain_gradient",
    "chain_objective",
    "classify_encoder",
    "d1_stage",
    "d2_stage",
    "estimate_true_D",
    "expand_preset",
    "finite_difference_check",
    "init_model",
    "lbg_baseline",
    "load_model",
    "normalizers",
    "run_preset",
    "sample_code",
    "save_model",
    "stable_sigmoid",
    "stage_gradient_local",
    "train",
    "update_step",
]
