"""Exact-arithmetic arbitrage and martingale-measure analysis for finite markets."""

from .arbitrage import (
    Decomposition,
    FeasibilityReport,
    Verdict,
    classify,
    defragment,
    extract_p_arbitrage,
    feasibility,
    lebesgue_decompose,
    one_step_1p_check,
)
from .errors import DomainError, MarketFormatError
from .market import (
    DiscreteMeasure,
    Market,
    Partition,
    Scenario,
    SignificantClass,
    Strategy,
    load_market,
    natural_filtration,
    refine,
    value_process,
)
from .measures import (
    MartingalePolytope,
    build_polytope,
    check_martingale,
    class_measure,
    full_support_measure,
    mix,
    supporting_measure,
)
from .oracle import oracle_arbitrage, oracle_support
from .ratgeom import (
    LinearProgram,
    LpResult,
    cone_ri_contains_zero,
    conv_contains_zero,
    convex_combination_for_zero,
    lp_solve,
    maximal_separator,
    rat,
    verify_farkas_certificate,
)
from .splitter import (
    PolarAnalysis,
    Splitting,
    backward_eliminate,
    check_predictable,
    split_level_set,
    universal_aggregator,
)

__version__ = "0.1.0"

__all__ = [
    "Decomposition",
    "DiscreteMeasure",
    "DomainError",
    "FeasibilityReport",
    "LinearProgram",
    "LpResult",
    "Market",
    "MarketFormatError",
    "MartingalePolytope",
    "Partition",
    "PolarAnalysis",
    "Scenario",
    "SignificantClass",
    "Splitting",
    "Strategy",
    "Verdict",
    "backward_eliminate",
    "build_polytope",
    "check_martingale",
    "check_predictable",
    "class_measure",
    "classify",
    "cone_ri_contains_zero",
    "conv_contains_zero",
    "convex_combination_for_zero",
    "defragment",
    "extract_p_arbitrage",
    "feasibility",
    "full_support_measure",
    "lebesgue_decompose",
    "load_market",
    "lp_solve",
    "maximal_separator",
    "mix",
    "natural_filtration",
    "one_step_1p_check",
    "oracle_arbitrage",
    "oracle_support",
    "rat",
    "refine",
    "split_level_set",
    "supporting_measure",
    "universal_aggregator",
    "value_process",
    "verify_farkas_certificate",
]
