"""Critical curves of the total CR twist functional in the CR 3-sphere.

Modules
-------
moduli          roots of P_c and Q_c, phase/orbit/region classification, separatrix
quadrature      half periods, escape times and closing integrals
dynamics        twist/phase ODEs, Lax pair, Wilczynski frame, monodromy
reconstruction  eigen-sections, closed-form frames, standard configurations
closure         psi parametrisation, P-map, differential-evolution search
invariants      spin, wave number, turning number, trace
geometry_io     Heisenberg projection, dual curve, CSV/OBJ/JSON export
"""

from .errors import (AccuracyError, CRTwistError, DegeneracyError, DomainError, NonGeneralError,
                     NumericalFailure, PoleError, SingularIntegrandError, UndersamplingError)
from .moduli import Modulus, classify, is_general, momentum_eigenvalues, quintic_roots, separatrix
from .quadrature import escape_time, half_period, incomplete_strain, quantum_integrals
from .dynamics import integrate_frame, lax_matrix, monodromy, structure_matrix, twist_profile
from .reconstruction import (canonical_momentum, eigen_sections, reconstruct_general,
                             standard_configuration)
from .closure import SearchConfig, pmap, psi, rationalize, search_modulus
from .invariants import discrete_invariants, trace_linking, winding_degree
from .geometry_io import heisenberg_chart, heisenberg_project

__version__ = "0.1.0"
