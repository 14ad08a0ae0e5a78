"""Angle-of-arrival estimation for misaligned OAM links with a mode-frequency ESPRIT."""

from .bessel import bessel_j
from .capacity import CapacityModel, beam_steer, capacity, effective_channel, element_channel
from .channel import CarrierGrid, Frame, ModeSet, add_awgn, noisy_frame, synthesize_frame
from .config import ConfigError, ExperimentConfig, load_config
from .esprit import OpCounter, estimate_tone, principal_eigenvector, sample_covariance
from .estimator import AmbiguityPolicy, EstimateReport, EstimatorConfig, run_mf_mt_esprit
from .flags import FAILURE_FLAGS, Flag
from .geometry import LinkGeometry, MisalignmentPose, UcaLayout, aoa_from_intermediates
from .pilots import PilotBook, SignContext, SignMode, generate_pilots

__version__ = "0.1.0"
