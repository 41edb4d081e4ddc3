"""Self-adaptive first-order pre-/de-emphasis around a simulated PCM codec."""

from .armodel import ArModel, MonteCarloReport, rho_of_alpha, run_monte_carlo, synthesize_ar1
from .codec import CodecMode, PipelineResult, QuantizerSpec, quantize, run_pipeline, tune_step
from .dsp import (AutocorrPair, EmphasisCoeff, FilterState, FrameConfig, autocorr_01,
                  de_emphasize, make_window, pre_emphasize)
from .estimator import (CubicCoeffs, DeemphasisTable, build_cubic, build_table,
                        estimate_alpha_encoder, lookup_alpha, solve_alpha)
from .metrics import LsdReport, lsd_db, snr_db

__version__ = "0.1.0"
