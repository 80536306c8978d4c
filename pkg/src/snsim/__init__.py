"""snsim: a deterministic SNS community simulator with altruistic
re-sharing, plus the analysis toolkit around it (tf-idf scoring,
lift-ranked association rules, histograms and category reports)."""

from .dynamics import AltruismInputs, altruism_gate, like_decision
from .engine import (
    RunResult,
    World,
    init_world,
    run,
    run_pair,
    step,
    sweep,
)
from .filtering import Corpus, FilterRule, KeywordConstraint, idf, match_rules, tf, tfidf
from .mining import (
    Item,
    MinedRule,
    TransactionSet,
    build_transactions,
    confidence,
    lift,
    mine_pairs,
    support,
)
from .model import (
    Article,
    Category,
    ConfigError,
    EventLog,
    MajorAgent,
    MinorAgent,
    SimConfig,
    dumps_config,
    load_config,
    parse_config,
    validate_config,
)
from .stats import (
    CategoryReport,
    Histogram,
    category_report,
    engagement_ratio,
    like_histogram,
    modality_count,
    repost_report,
)

__version__ = "0.1.0"
