"""MCM model flavors built on the MILP layer, plus warm starts and decoding."""

from .builder import (
    ModelBundle,
    TriviallyInfeasible,
    build,
    build_mcm_ad,
    build_mcm_adders,
    build_mcm_bits,
    build_tmcm,
)
from .decode import DEFAULT_INPUT_WORDLENGTH, DecodeError, decode
from .instance import METRICS, Instance, InstanceError, half_ulp_budgets, parse_budget
from .seed import SeedError, attach_outputs, csd_binding, csd_graph, graph_to_binding

__all__ = [name for name in dir() if not name.startswith("_")]
