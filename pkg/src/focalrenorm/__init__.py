"""Renormalisation of non-isochronous oscillators and their focal decompositions."""

from .dynamics import (QuarticSolutionParams, TrajectorySample, e_factor, exact_quartic_solution,
                       g_factor, integrate, quartic_params, third_order_approx)
from .elliptic import EllipticTriple, complete_k, jacobi_eval, jacobi_sd
from .errors import BandError, DomainError, IntegrationError, WindowError
from .focal import (SIGMA_INF, FocalGrid, asymptotic_grid, asymptotic_index, numeric_grid,
                    numeric_index, renormalized_index)
from .period_map import TurningPoints, period, period_expansion_check, turning_points
from .potentials import (PotentialSpec, eval_potential, make_potential, periodic_band,
                         to_normalized, to_physical)
from .renorm import (ScalingContext, asymptotic_trajectory, convergence_experiment,
                     phase_remainder, renormalized_trajectory, scaling_parameter,
                     scaling_velocity)

__version__ = "0.1.0"
