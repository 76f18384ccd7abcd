"""Distributed loss/gain amplifier simulation for a single field mode."""

__version__ = "0.1.0"

from .errors import (CapacityExceeded, ConfigError, DegenerateOverlap, DistampError, DomainError,
                     GridTooNarrow, InvariantViolation, ParamMismatch, PerturbativityViolated,
                     QuadratureFailure, TruncationOverflow, TruncationTooSmall)
from .fock import (CoherentSpec, FockVector, QuadratureGrid, SqueezedNumberSpec, Wavefunction,
                   coherent_exact, coherent_gaussian, coherent_wavefunction_closed,
                   coordinate_wavefunction, number_distribution, squeezed_number_state)
from .density import DensityMatrix, fidelity, fidelity_pure
from .channel import (ChannelParams, EnvStatistics, JointPureState, env_counts, env_overlap_exact,
                      evolve_exact, evolve_kraus, partial_trace, sample_walk)
from .analytic import (EnvModel, SqueezeParams, mixture_density, reduced_density_analytic,
                       solve_squeeze_params)
from .homodyne import (CatSpec, InterferenceReport, cat_interference_report, cat_wavefunction,
                       env_overlap, quadrature_pdf, squeezed_wavefunction_gaussian)
