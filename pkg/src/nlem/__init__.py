"""Non-local means and non-local Euclidean medians image denoising."""

from .denoise import (DenoiseParams, Diagnostics, WeightProfile, compute_weights,
                      denoise_image, denoise_pixel_nlem, denoise_pixel_nlm, patch_weight)
from .errors import (DegenerateWeightsError, InvalidInputError, InvalidParameterError,
                     NLEMError, PGMFormatError)
from .geomedian import (MedianResult, MedianSolverConfig, euclidean_median, median_cost,
                        weighted_mean)
from .image import extract_patch, read_pgm, search_window, write_pgm

__version__ = "0.1.0"
