"""Asymptotics of [x^r y^s] H(x,y)^(-alpha) log^beta H(x,y), checked against exact series."""
from .asymptotics import (AsymptoticExpansion, Estimate, LocalGeometry, correction_terms,
                          dominant_term, evaluate, gamma_recip_derivs, leading_asymptotic,
                          local_geometry, univariate_standard_scale)
from .backend import BigFloat, ExactRational
from .oracle import (GFSpec, GFTerm, catalan_log_spec, coefficient, interlaced_spec,
                     narayana_log_spec, necklace_spec)
from .pipeline import AnalysisRequest, Report, emit, parse_spec, run
from .poly import BiPoly
from .polysys import (CriticalPointRecord, Direction, MinimalStatus, check_minimal,
                      check_smooth, critical_system, partials, solve_critical)
from .series import (TruncSeries1D, TruncSeries2D, series_coeff, series_exp, series_from_poly,
                     series_log, series_mul, series_pow)

__version__ = "0.1.0"
