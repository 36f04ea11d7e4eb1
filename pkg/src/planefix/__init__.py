"""Fixed-point index and variation on plane continua, tree and lamination dynamics, external rays."""
from .errors import PlaneFixError
from .maps import PolyMap, GridMap, FuncMap, as_map
from .geometry import PlaneCurve, Region, winding_number, in_hull, build_junction, shadow
from .indexvar import fixed_point_index, map_degree, variation, variation_oracle, fmot_verify
from .analysis import local_index, locate_fixed_points, scramble_check, fixpt_theorem_check
from .dendrite import Tree, TreeMap, fixed_points, periodic_cutpoints, weakly_repelling, full_tent_map
from .lamination import FiniteLamination, check_invariance, pullback_generate, quotient_tree, topological_polynomial
from .polydyn import trace_ray, fixed_rays_at, impression_diameter_bound, puzzle_piece_check, pointdyn_harness

__version__ = "0.1.0"
