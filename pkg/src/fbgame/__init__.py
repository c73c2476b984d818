"""Feedback-rate control games for limited CSI feedback in multi-antenna downlinks."""
from .access import (BandwidthSplit, CsmaModel, InfeasibleProfileError, SeriesConvergenceError,
                     calibrate_g0, csma_effective_rates, csma_throughput, fdma_split)
from .centralized import CentralizedResult, centralized_optimum
from .channel import (ChannelRealization, crn_bank, distortion_from_rate, draw_channel, mu_nu,
                      quantize_channel)
from .game import (EquilibriumReport, GameConfig, RateProfile, best_response, expected_utility,
                   priced_utility, run_dynamics, verify_nash)
from .kernels import BACKEND
from .precoding import (LinkMetrics, PrecoderSet, SingularChannelError, build_precoder,
                        link_metrics, regularization_param, throughput)
from .pricing import PriceSweepRecord, PriceSweepResult, sweep_price, uplink_occupancy_curve

__version__ = "0.1.0"
