"""Personality-aware neighborhood collaborative filtering."""

from .data import (
    Dataset,
    Item,
    RatingsView,
    SynthConfig,
    ViewEvent,
    generate_synthetic,
    load_dataset,
    load_dataset_dir,
    save_dataset,
)
from .evaluation import (
    EvaluationSets,
    HoldoutConfig,
    MetricPoint,
    classify_population,
    confusion_sets,
    f_measure,
    precision,
    recall,
    run_sweep,
)
from .exceptions import (
    DatasetError,
    IncompatibleModelError,
    MbtiParseError,
    PersorecError,
    UnknownIdError,
    UnsupportedModelError,
    ValidationError,
)
from .personality import (
    MBTI_TYPES,
    TRAIT_NAMES,
    MbtiType,
    PersonalityModel,
    TraitVector,
    UserProfile,
    dominant_trait,
    parse_mbti,
    score_bfi10,
)
from .recommender import (
    HybridConfig,
    Neighborhood,
    NeighborhoodEngine,
    PredictorConfig,
    build_neighborhood,
    build_neighborhood_baseline,
    build_neighborhood_hybrid,
    is_cold_start,
    predict_score,
    recommend_top_n,
)
from .similarity import (
    NO_OVERLAP,
    BlendConfig,
    Combiner,
    alpha_for,
    sim_combined,
    sim_personality,
    sim_rating,
)

__version__ = "0.1.0"
