"""Exact shadowing, chain and mixing analysis for multiple mappings on finite metric spaces."""

__version__ = "0.1.0"

from .chains import (
    Chain,
    HyperGraph,
    LengthSpectrum,
    SpaceTooLarge,
    build_hypergraph,
    chain_length_spectrum,
    find_chain,
    is_chain_mixing,
    is_chain_transitive,
    is_chain_transitive_at,
)
from .mixing import HitTimes, hit_times, is_mixing, is_transitive, is_weakly_mixing
from .multimap import MultiMap, OrbitTrace, compose_power, image, orbit, power_image, ran
from .shadowing import (
    AverageRefutation,
    PeriodicPseudoOrbit,
    SimulationRelation,
    block_average_orbit,
    has_shadowing,
    interleave_for_power,
    limit_average_distance,
    refute_average_shadowing,
    shadowing_holds,
    simulation_relation,
    tent_counterexample_check,
)
from .space import CompactSet, FiniteMetricSpace, diameter, grid_interval, hausdorff, validate_metric
from .verdict import Verdict
