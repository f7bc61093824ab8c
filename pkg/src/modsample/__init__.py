"""Simulation of self-reset (folding) ADCs and recovery of bandlimited
signals from their modulo samples."""

from .adc import ModuloAdcConfig, acquire, add_bounded_noise, codebook, quantize, saturate
from .errors import (
    ConfigError,
    GridError,
    InsufficientLengthError,
    InvalidInputError,
    ModsampleError,
    OversamplingError,
    WindowTooShortError,
)
from .numerics import (
    anti_difference,
    finite_difference,
    fold,
    fold_sequence,
    grid_index,
    integrate,
    round_to_2lambda_grid,
)
from .recovery import (
    RecoveryConfig,
    RecoveryResult,
    align_constant,
    choose_order,
    estimate_kappa,
    itoh_unwrap,
    max_noise_bound,
    recover,
    smallest_grid_bound,
)
from .signals import (
    BandlimitedSignal,
    SamplingGrid,
    evaluate,
    random_bandlimited,
    sample,
    sinc_reconstruct,
    sup_norm_estimate,
)

__version__ = "0.1.0"
