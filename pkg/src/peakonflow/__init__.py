"""High-precision conservative peakon flows from spectral data.

The pipeline: a measure spec (measure) yields time-evolved moments, those
yield Hankel determinant grids (hankel), the grids yield peakon profiles
and full wave snapshots (inverse), the forward map goes back from profiles
to spectra (forward), and flow/asympt/ortho supply dynamics checks,
long-time predictions and the orthogonal-polynomial cross-route.  The cli
module wraps the lot for the command line.
"""

from .errors import (PeakonError, ValidationError, ComputationError,
                     PrecisionError, InconsistencyError, TruncationError,
                     InconclusiveError, DomainError)
from .measure import (DiscreteMeasure, AlSalamCarlitzMeasure, LaguerreMeasure,
                      JacobiMeasure, StieltjesWigertMeasure, EvolvedMeasure,
                      evolve, base_of, MomentTable, moments,
                      measure_from_json, measure_to_json)
from .hankel import (build_grid, HankelGrid, KappaMap, kappa,
                     identity_residuals, hankel_det, gamma_det)
from .inverse import (PeakonProfile, peakon_profile, wavefront,
                      first_point_mass, PiecewiseSolution, reconstruct_u)
from .forward import (KreinLangerString, string_from_profile,
                      string_from_peakon_data, psi_map, RationalWeylFunction,
                      weyl_from_string, weyl_continued_fraction,
                      measure_from_weyl, determinacy, rho_plus)
from .flow import (snapshot, trajectory, TrajectoryTable, ode_residual,
                   infinite_ode_residual, collision_scan, accumulation_L,
                   total_momentum, scaling_check, moment_derivative_residual)
from .asympt import (AsymptoticPrediction, predict_discrete,
                     predict_laguerre_profile, predict_laguerre_longtime,
                     predict_laguerre_hankel, predict_jacobi_profile,
                     predict_jacobi_longtime, predict_jacobi_hankel,
                     asc_profile, asc_limit_point, asc_string, gap_of,
                     compare, trend_exponents)
from .ortho import (OrthoPolySet, orthopoly_from_moments,
                    orthopoly_from_params, jacobi_params, moments_from_params,
                    cd_kernel, peakons_via_op)

__version__ = "0.1.0"
