"""Directed currents on holomorphic laminations: pairings, wedge defects, disintegration."""

from .disintegration import (DensityConditional, Disintegration, EmpiricalConditional, ReconstructionRow,
                             RieszSamples, closedness_residual, disintegrate, reconstruct_and_compare, reconstruction_rate,
                             residual_csv, riesz_samples, tilted_closedness_oracle)
from .forms import (Bump, TestForm, area_form, bump_battery_01, bump_battery_11, bump_form_01, dw_wedge,
                    hermitian_bump_form, lambda_lambdabar, lambda_wedge, leaf_slope_field)
from .pairing import (DirectedCurrent, current_pair, leaf_integral, omega_on_v, pullback_coefficient,
                      tangent_2field, wedge_defect)
from .quadrature import Quadrature

__all__ = [
    "DensityConditional", "Disintegration", "EmpiricalConditional", "ReconstructionRow", "RieszSamples",
    "closedness_residual", "disintegrate", "reconstruct_and_compare", "reconstruction_rate", "residual_csv", "riesz_samples",
    "tilted_closedness_oracle", "Bump", "TestForm", "area_form", "bump_battery_01", "bump_battery_11",
    "bump_form_01", "dw_wedge", "hermitian_bump_form", "lambda_lambdabar", "lambda_wedge",
    "leaf_slope_field", "DirectedCurrent", "current_pair", "leaf_integral", "omega_on_v",
    "pullback_coefficient", "tangent_2field", "wedge_defect", "Quadrature",
]
