"""Pairwise entanglement dynamics of qubit collision models.

The analytic engine (:func:`simulate`) tracks two-qubit reduced states
through collision schedules without forming the global state; the oracle
(:func:`run_oracle`) evolves the full state vector for cross-checks.
"""

__version__ = "0.1.0"

from .closed_forms import (DetuningFactors, bath_temperature, bath_temperature_ghz,
                           closed_form_chain_tangle, excited_bath_collision_analysis,
                           first_collision_tangle, superposed_pair_tangle)
from .kernels import BACKEND
from .manytoone import collide_many_to_one, collide_two_groups, many_to_one_tangles
from .measures import (DensityMatrix4, PairwiseTangleMatrix, Structure, TangleValue,
                       ckw_residual, concurrence_general, concurrence_structured,
                       dicke_pair_density)
from .oracle import ComparisonReport, compare_engines, run_oracle
from .qstate import (LocalUnitary, RegisterState, apply_local_unitary, partial_trace,
                     tensor, two_qubit_propagator)
from .recurrence import (IncompatibleCollision, PairState, SimulationResult, WLikeState,
                         collide_new_qubit, collide_old_pair_wlike, simulate, tangle_matrix)
from .schemes import (CollisionEvent, ConcurrentGroups, OldPairBlock, Scheme,
                      SimultaneousCollision, Superposed, build_binary_tree, build_chain,
                      build_neel_variant, build_random, build_star, build_thermalization,
                      build_uniform_quilt)

__all__ = [
    "BACKEND", "CollisionEvent", "ComparisonReport", "ConcurrentGroups", "DensityMatrix4",
    "DetuningFactors", "IncompatibleCollision", "LocalUnitary", "OldPairBlock", "PairState",
    "PairwiseTangleMatrix", "RegisterState", "Scheme", "SimulationResult",
    "SimultaneousCollision", "Structure", "Superposed", "TangleValue", "WLikeState",
    "apply_local_unitary", "bath_temperature", "bath_temperature_ghz", "build_binary_tree",
    "build_chain", "build_neel_variant", "build_random", "build_star", "build_thermalization",
    "build_uniform_quilt", "ckw_residual", "closed_form_chain_tangle", "collide_many_to_one",
    "collide_new_qubit", "collide_old_pair_wlike", "collide_two_groups", "compare_engines",
    "concurrence_general", "concurrence_structured", "dicke_pair_density",
    "excited_bath_collision_analysis", "first_collision_tangle", "many_to_one_tangles",
    "partial_trace", "run_oracle", "simulate", "superposed_pair_tangle", "tangle_matrix",
    "tensor", "two_qubit_propagator",
]
