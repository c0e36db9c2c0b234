"""Quasiconformal space extensions of Weierstrass-Enneper lifts.

Library layout:
  jets       order-3 complex jet arithmetic and series evaluation
  geometry   R³ points, planar Möbius maps and their half-space extensions
  maps       harmonic map data (h', q), sigma jets, Schwarzian, criterion
  lift       the minimal-surface lift: positions, frames, second form
  extension  best Möbius approximations, circle bundles, reflections
  analysis   the auxiliary metric field, convexity, bounds, dilatations
  suite      registered verification checks and the report
  cli        command-line front end (analyze/verify/extend/dilatation/planar)
"""

from .jets import Jet, jet_eval_series
from .geometry import (INFINITY, Frame, Inversion, PlanarMoebius, Point3,
                       SpaceMoebius, invert_about, is_infinite,
                       moebius_apply, poincare_extend, space_moebius_apply,
                       sphere_inversion_j)
from .maps import (DegenerateMapError, GridSpec, MapSpec, builtin,
                   compose_with_automorphism, condition_value, curvature,
                   dilatation_omega, estimate_rho, load_map_spec,
                   power_with_linear_q, schwarzian, sigma_jet, spec_from_config)
from .lift import SurfaceJet, lift_point, surface_jet, tangential_project
from .extension import (CircleFiber, StereoPoint, bma_m, bma_plane, bma_space,
                        circle_of, classical_aw, extend, fiber_point,
                        horosphere_radius, planar_extend, reflect,
                        reflect_intrinsic, stereo_project)
from .analysis import (CurveJet, QcConstants, UField, convexity_check,
                       critical_point_find, grad_bound_check, h_epsilon,
                       inclination, measured_dilatation, omega_bound_check,
                       qc_constants, reflection_constant, s1_bound_check,
                       s1_curve, u_grad, u_value)
from .suite import run_verification

__version__ = "0.1.0"
