"""Multi-order game interaction toolkit.

Quantifies the interactions a black-box scoring function encodes between
input regions: exact and sampled interaction indices per context order,
normalized strength profiles, a mid-order robustness proxy with its band
grid search, and constructive checks of how augmentation-style
transformations reshape synthetic reward-table games.
"""

__version__ = "0.1.0"

from .augment import (
    CutoutConfig,
    MixConfig,
    RewardTable,
    SuppressionShift,
    cutout_ratio,
    game_from_rewards,
    mix_games,
    permute_table,
    reward_shift_invariance_check,
    reward_sum_interaction,
    strength_profile_from_table,
    suppress_low_order,
    suppression_shift_report,
)
from .errors import GameintError
from .estimator import (
    InputSet,
    InteractionEstimate,
    SampleConfig,
    estimate_interaction,
    raw_order_strength,
)
from .exact import (
    DecompositionReport,
    decompose,
    interaction_exact,
    interaction_profile_exact,
    order_weights,
    pairwise_interaction,
    pairwise_interaction_fused,
    shapley_kernel,
    shapley_value,
    shapley_values,
)
from .games import (
    AdditiveGame,
    Coalition,
    Game,
    GameSpec,
    PairAndGame,
    SumGame,
    TabulatedGame,
    ValueCache,
    delta_v,
    evaluate_cached,
)
from .masking import (
    ExternalGame,
    ExternalScorerClient,
    LinearScorer,
    MaskSpec,
    MaskedScorerGame,
    ProductScorer,
    ScorerEndpoint,
    apply_mask,
    make_game,
    mixup_input,
    partition_grid,
)
from .stats import pearson, rms_calibration_error
from .strength import (
    AmrisParams,
    GridSearchReport,
    MetricTable,
    StrengthProfile,
    amris,
    grid_search,
    normalize_strength,
)

__all__ = [name for name in dir() if not name.startswith("_")]
