"""Dicke superradiant decay, separable CSS mixtures, and low-entanglement
quantum trajectory unravelings in the permutation-symmetric sector."""

from .css import (CssDecomposition, EtaCurve, IllConditionedError,
                  MappingMatrix, NegativityField, build_mapping,
                  eta_analytic_n2, negativity, reconstruct_rho,
                  scan_landscape, solve_css, trace_passage)
from .dicke import (DickePopulations, EvolutionMatrix, Generator, ModelParams,
                    beta_sq, build_generator, burst_time, emission_rate,
                    evolution_matrix, evolve_exact, evolve_ode)
from .entanglement import (Bipartition, SymmetricState, brute_force_entropy,
                           dicke_schmidt_probs, entropy_dicke,
                           entropy_symmetric)
from .unraveling import (EnsembleStats, KrausPair, MixingUnitary,
                         TrajectoryRecord, bloch_length, ensemble_run,
                         kraus_naive, optimize_phi, qt_step, remix,
                         run_trajectory)

__version__ = "0.1.0"
