"""Lattice points on a truncated paraboloid and the incidence configurations built from them."""

from .conics import (Conic, ProperEllipsoidSpec, QuadraticForm, brute_force_form_count,
                     conic_from_intersection, count_lattice_points_on_ellipse,
                     count_lattice_points_on_ellipsoid, dirichlet_count, kronecker_symbol,
                     max_common_points, reduce_to_integer_form)
from .energy import (EnergyReport, SumMultiplicityTable, additive_energy, energy_brute_force,
                     quadrature_energy_estimate, sum_multiplicities)
from .errors import (ArtifactParseError, ConfigError, DegenerateElimination, DomainError,
                     NoIntegerSolutions, NotElliptic, SizeLimitError)
from .exponents import ExponentRecord, fit_exponent, predict_alpha, theorem_exponents
from .hyperplanes import (DyadicHistogram, HyperplaneFamily, build_family, count_incidences,
                          dyadic_histogram, select_level, sum_hyperplane)
from .lattice import PointSet, build_point_set, validate_point_set
from .sparsify import (SampleCertificate, chernoff_lower, chernoff_tail, chernoff_upper,
                       sample_family)
from .surfaces import GraphHypersurface, Hyperplane, Hypersphere
from .transforms import (apply_inversion_config, dualize, invert_hyperplane, invert_point,
                         shear_map)

__version__ = "0.1.0"
