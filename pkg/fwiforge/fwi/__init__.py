from ._misfit import (FILTER_ORDER, MASK_TOP_ROWS, butter_lowpass, lowpass_matrix, lowpass,
                      misfit_l2, mask_gradient, misfit_value, misfit_and_gradient, gradient_adjoint)
from ._initial import get_initial_map, initial_homogeneous, initial_linear, initial_smoothed
from ._inversion import TRACE_COLUMNS, InversionConfig, InversionTrace, cg_stage, multiscale_fwi
