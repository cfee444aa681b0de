"""Simulate, classify and verify dynamical peakons of m_t + f(u,ux) m + (g(u,ux) m)_x = 0."""

__version__ = "0.1.0"

from .analytic import (CatalogEntry, catalog, closed_form, design_breather, design_periodic,
                       make_entry)
from .classify import (BehaviorReport, asymptotic_travelling_wave_test, classify_both,
                       classify_numeric, classify_power_family)
from .dsl import (ExprError, ExprEvalError, ExprSyntaxError, NonlinearitySpec, eval_expr,
                  even_odd_at, parse_expr, to_text)
from .npeakon import NPeakonState, NTrajectory, field_at, integrateN, rhsN
from .peakon1 import (EventRecord, IntegratorOptions, PeakonState, Trajectory, accel1,
                      integrate1, quadrature_solve, rhs1)
from .reduce import (ReducedSystem, alpha_at, antiderivative_at, classify_peakon_kind, f0_at,
                     g0_at)
from .verify import VerificationReport, functionals, ode_residual, offpeak_residual

__all__ = [
    "BehaviorReport", "CatalogEntry", "EventRecord", "ExprError", "ExprEvalError",
    "ExprSyntaxError", "IntegratorOptions", "NPeakonState", "NTrajectory", "NonlinearitySpec",
    "PeakonState", "ReducedSystem", "Trajectory", "VerificationReport", "accel1", "alpha_at",
    "antiderivative_at", "asymptotic_travelling_wave_test", "catalog", "classify_both",
    "classify_numeric", "classify_peakon_kind", "classify_power_family", "closed_form",
    "design_breather", "design_periodic", "eval_expr", "even_odd_at", "f0_at", "field_at",
    "functionals", "g0_at", "integrate1", "integrateN", "make_entry", "ode_residual",
    "offpeak_residual", "parse_expr", "quadrature_solve", "rhs1", "rhsN", "to_text",
]
