"""Legendrian loops in the 1-jet space of the circle.

Generating families quadratic at infinity, sublevel-set spectral invariants,
critical-value diagrams of one-parameter families, and the identification
with cooriented contact elements of the plane.  The package is wrapped by an
HTTP service (``jetspectra.service``) and a thin command-line client
(``jetspectra.cli``).
"""

__version__ = "0.1.0"

from .exprs import Expr, differentiate, evaluate, parse, substitute
from .families import (
    GeneratingFamily,
    critical_values,
    fiber_critical_set,
    legendrian_from_family,
    rank_condition_check,
)
from .jets import (
    Isotopy,
    JetPoint,
    LegendrianLoop,
    check_embedded,
    check_legendrian,
    check_positive_isotopy,
    contact_form,
    front_projection,
)
from .spectra import (
    ViterboSpectrum,
    betti_of_region,
    generalized_critical_values,
    viterbo_numbers,
    viterbo_numbers_with_boundary,
)
from .filtration import build_filtration
from .persistence import reduce_filtration
from .cerf import (
    FamilyPath,
    cerf_diagram,
    check_positive_family,
    slope_check,
    vertical_speed,
    viterbo_trajectory,
)
from .hodograph import (
    ContactElement,
    check_legendrian_st,
    fiber_as_jet,
    hodograph_fwd,
    hodograph_inv,
    map_loop,
)
from .experiments import (
    build_high_p_loop,
    build_positive_loop,
    contact_flow,
    fiber_line_experiment,
    lambda_scan,
    pencil_intersections,
    translate_vertical,
)

__all__ = [
    "__version__",
    "Expr", "parse", "evaluate", "differentiate", "substitute",
    "JetPoint", "LegendrianLoop", "Isotopy", "contact_form",
    "check_legendrian", "check_positive_isotopy", "front_projection",
    "check_embedded",
    "GeneratingFamily", "fiber_critical_set", "legendrian_from_family",
    "rank_condition_check", "critical_values",
    "build_filtration", "reduce_filtration",
    "ViterboSpectrum", "viterbo_numbers", "viterbo_numbers_with_boundary",
    "betti_of_region", "generalized_critical_values",
    "FamilyPath", "cerf_diagram", "vertical_speed", "check_positive_family",
    "viterbo_trajectory", "slope_check",
    "ContactElement", "hodograph_fwd", "hodograph_inv", "map_loop",
    "fiber_as_jet", "check_legendrian_st",
    "contact_flow", "translate_vertical", "build_high_p_loop",
    "build_positive_loop", "pencil_intersections", "lambda_scan",
    "fiber_line_experiment",
]
