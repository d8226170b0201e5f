"""Self-similar planar arcs from basic figures.

Construction and validation of iterated-similitude arcs, Hausdorff
dimension and self-similar measure coordinates, certified angle profiles,
rigorous evidence for the Whitney and quasi-arc corner conditions, and the
one-parameter arc family with its Diophantine classification machinery.
"""

from .arc import ArcCertificate, ArcVerdict, arc_check, vertex_grid
from .conditions import (AngleProfile, CornerAngle, DiophantineParams,
                         GlobalVerdict, Verdict, angle_profile, check_Q,
                         check_t_monotonicity, check_W, diophantine_params,
                         empirical_quasi, empirical_whitney_modulus,
                         global_verdict)
from .dio import (DyadicStream, JaReport, QuadSurd, Witness,
                  dist_to_integer, j_a_evidence, sqrt2_convergent_denominators,
                  tau_7_11, tau_7_12, tau_7_13, tau_7_14)
from .family import (FamilyClassification, OmegaTau, TauOutOfRange,
                     build_omega_tau, classify, family_params)
from .figspec import (ParsedSpec, SpecError, figure_from_spec, load_spec,
                      parse_spec)
from .geom import (BasicFigure, InvalidFigureError, LogRatioStructure,
                   Similitude, SimilitudeSystem, build_basic_figure,
                   validate_basic_figure)
from .intervals import Interval
from .spectrum import (WhitneyWeights, cell_measures, check_forget,
                       check_lemma32_iii, cylinder_measure, epsilon_sequence,
                       f_vertex, f_vertices, hausdorff_dimension,
                       whitney_cell_measures, whitney_f_vertex,
                       whitney_measure_cylinder, whitney_weights)

__version__ = "0.1.0"
