"""Rydberg-ladder simulation and bitstring-information analysis toolkit.

Builds ground states of a two-leg Rydberg ladder, generates or ingests
measurement bitstrings, and estimates entanglement entropy from optimally
filtered mutual information, with readout-error modeling/mitigation and
adiabatic-ramp studies.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .dist import (CountTable, CumulativeCurve, DensityEstimate, ProbDist,
                   counts_to_probdist, cumulative, density_of_probability,
                   exp_decay_fit, max_prob_series, power_law_fit, sample,
                   total_variation)
from .dynamics import (EvolutionResult, RampSchedule, rampdown_evolve,
                       schedule_standard, trotter_evolve)
from .errors import (DataFormatError, DegenerateGroundStateError,
                     DimensionMismatchError, EmptyDistributionError, FitError,
                     ParameterError, RydladderError, SolverError)
from .infoflow import (EntanglementEstimate, EstimatorConfig, FiltrationCurve,
                       Partition, conditional_entropy, estimate_entanglement,
                       filter_dist, filtration_curve, four_block, half_cut,
                       marginal, mid_height_threshold, mutual_information,
                       shannon_entropy, sigmoid_inflection,
                       weak_monotonicity_mi, weak_monotonicity_vn)
from .lattice import (C6_DEFAULT, InteractionTable, LadderSystem,
                      apply_hamiltonian, build_system, interaction_table)
from .noise import (QuasiDist, ReadoutModel, ShotRecord, apply_readout_noise,
                    depletion_factor, depletion_mitigate, m3_mitigate,
                    postselect, sorting_fidelity_fit)
from .spectrum import (PureState, ReducedDensityMatrix, entanglement_entropy,
                       ground_state, reduced_density_matrix, scan_heatmap,
                       von_neumann_entropy)

__version__ = "0.1.0"
