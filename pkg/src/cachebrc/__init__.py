"""Delivery-time analysis of the cache-aided broadcast-relay network.

Exact NDT bounds (:mod:`.bounds`), the perfect-CSI region taxonomy
(:mod:`.regions`), the explicit two-phase one-shot schedule
(:mod:`.scheduler`) and a Monte-Carlo check of its power exponents under
imperfect CSI (:mod:`.linksim`).
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    CornerConfig,
    DemandVector,
    NetworkConfig,
    as_rational,
    binom,
    validate,
    worst_case_demand,
)
from .bounds import (  # noqa: E402
    full_cache_lower_bound,
    ndt_envelope,
    ndt_lower_bound,
    ndt_man,
    ndt_one_shot,
    optimality_report,
)
from .regions import classify, region_map, region_ndt  # noqa: E402
from .scheduler import build_placement, build_schedule, schedule_ndt, verify_schedule  # noqa: E402

__all__ = [
    "CornerConfig", "DemandVector", "NetworkConfig", "as_rational", "binom", "validate",
    "worst_case_demand", "full_cache_lower_bound", "ndt_envelope", "ndt_lower_bound",
    "ndt_man", "ndt_one_shot", "optimality_report", "classify", "region_map", "region_ndt",
    "build_placement", "build_schedule", "schedule_ndt", "verify_schedule",
]
