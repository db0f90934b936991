"""Measure-valued transport with reaction on [0, 1]: flat norms, stopped flows,
mild-solution semigroups and a forward-Euler scheme for nonlinear velocity rules."""

from .errors import (ConfigInvalid, DegenerateFitError, InvalidFamilyError, MeasureFlowError,
                     NegativeInputError, NonFiniteStateError, NumericalFailure,
                     OutOfDomainError, SupportTooLargeError, ZeroDenominatorError)
from .measure import (DiscreteMeasure, canonicalize, difference, linear_combine, mass,
                      scale, total_variation)
from .pl import PiecewiseLinearFn, integrate, sup_distance
from .flatnorm import (NormKind, bl_distance, bl_norm, dirac_pair_distance, dual_norm,
                       dual_norm_oracle, fm_norm)
from .flow import FlowResult, available_backends, flow_many, set_backend, stopped_flow
from .semigroup import FixedDynamics, mild_step, push_forward
from .interaction import Convolution, Frozen, bl_constants, check_assumption, realize
from .euler import (Dyadic, Explicit, Partition, QAdic, Refinement, Uniform, cauchy_table,
                    continuous_dependence, euler_evolve, make_partition,
                    partition_independence, rate_fit)

__version__ = "0.1.0"
