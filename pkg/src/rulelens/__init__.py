"""rulelens: mine, prune, curate, and serve class association rules that
explain the predictions of an external black-box classifier."""

from ._kernels import BACKEND as kernel_backend
from .dataset import (
    Dataset,
    FeatureSchema,
    Instance,
    OutcomeSpec,
    categorize_outcome,
    load_dataset,
    load_schema,
    split_train_test,
)
from .discretize import bins_from_cuts, discretize_features, mdlp_discretize
from .errors import (
    ConfigError,
    DataFormatError,
    RuleLensError,
    SchemaError,
    VersionConflict,
)
from .explainer import (
    ExplanationConfig,
    ExplanationReport,
    applicable_rules,
    explain,
    rank_rules,
    select_disjoint,
    select_weighted,
)
from .items import Bin, Item
from .miner import MiningConfig, Rule, build_item_universe, count_rule, mine
from .pruner import (
    PruneConfig,
    filter_allowed_values,
    prune_cascade,
    prune_confidence_diff,
    prune_redundant,
)

__version__ = "0.1.0"
