"""p-adic L-functions of σ-modules: Dwork trace formula, Euler products and unit-root families."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .padic import PAdicContext, PAdicScalar, UnramifiedElement, UnramifiedRing, build_extension
from .series import SigmaLift, TruncSeries, apply_sigma
from .lseries import LSeries
from .polygon import Polygon
from .sigma_module import (SigmaModule, basis_polygon, basis_sequence, direct_sum, ext_power,
                           normalize_twist, sym_power, tensor)
from .euler import enumerate_closed_points, euler_factor, l_euler, l_power_euler, monsky_tate_lift
from .trace import dwork_matrix, fredholm_det, l_trace, split_basic, theta_top, trace_functions
from .unitroot import (hodge_newton_unit, limiting_module, unit_root_euler, unit_root_l)
from .analytics import (entry_bound_polygon, gm_scan, newton_polygon, np_congruence_criterion,
                        q_bound_fit, slope_degrees)
