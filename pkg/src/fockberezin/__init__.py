"""Weighted Fock-space reproducing kernels and Berezin transforms.

Evaluates the kernel series S(zeta) = sum zeta^n / s_n for the weight
exp(-alpha |z|^m), Berezin transforms of bounded symbols, and the nested
transforms at the origin whose commutator defect separates m = 2 from every
other weight exponent.
"""

from .berezin import (ExpSymbol, PlanarSymbol, berezin_at_zero,
                      berezin_exp_radial, berezin_exp_radial_grid,
                      berezin_general)
from .commutativity import (DefectReport, IdentityCheck, NestedValue, UCache,
                            UValue, asymptotic_slopes, defect,
                            derivative_identity_check, lemma1_witness,
                            nested_at_zero, nested_by_composition,
                            tt_identities_m2, u_function)
from .config import ConfigError, RunConfig
from .errors import NonConvergenceError
from .quadrature import (QuadResult, RadialSymbol, integrate_radial,
                         integrate_radial_log, radial_moment, unit_symbol)
from .special import (GUARANTEED_ALPHA, GUARANTEED_M, MomentTable, SeriesValue,
                      WeightParams, kernel_series, log_gamma, log_series_grid,
                      moment_table, reproducing_kernel, stieltjes_moment)

__version__ = "0.1.0"

__all__ = [
    "ExpSymbol", "PlanarSymbol", "berezin_at_zero", "berezin_exp_radial",
    "berezin_exp_radial_grid", "berezin_general",
    "DefectReport", "IdentityCheck", "NestedValue", "UCache", "UValue",
    "asymptotic_slopes", "defect", "derivative_identity_check",
    "lemma1_witness", "nested_at_zero", "nested_by_composition",
    "tt_identities_m2", "u_function",
    "ConfigError", "RunConfig", "NonConvergenceError",
    "QuadResult", "RadialSymbol", "integrate_radial", "integrate_radial_log",
    "radial_moment", "unit_symbol",
    "GUARANTEED_ALPHA", "GUARANTEED_M", "MomentTable", "SeriesValue",
    "WeightParams", "kernel_series", "log_gamma", "log_series_grid",
    "moment_table", "reproducing_kernel", "stieltjes_moment",
    "__version__",
]
