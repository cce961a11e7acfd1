"""Polar coding with an ideal feedback link.

Library layout: bit-level transform and code configuration (`transform`),
channel models (`channels`), reliability profiles and frozen-set selection
(`construction`), SC / genie-aided / correction-replay decoding (`decoding`),
exact BEC second-order analytics (`bec_analytics`), the negative-binomial
error-count model (`nbmodel`), the chained feedback-protocol simulator
(`feedback`), the iterative Gaussian feedback reference (`sk`), and the CLI
(`cli`).  Hot kernels run on a compiled core when built, with a pure-numpy
fallback (`KERNEL_BACKEND` says which is active).
"""

from . import _kernels
from .bec_analytics import (BruteForceResult, CovarianceMatrix, ErrorCountStats,
                            brute_force_erasure_stats, covariance_matrix,
                            exact_error_count_stats, info_block_covariance_sum,
                            mc_error_count_stats)
from .channels import (Channel, bec, biawgn, bsc, capacity, channel_llr,
                       parse_channel, transmit)
from .construction import (ReliabilityProfile, bec_bhattacharyya_profile,
                           build_code, mc_reliability_profile, optimal_threshold,
                           reliability_profile, select_frozen_set)
from .decoding import (DecoderWorkspace, ga_sc_decode, sc_decode,
                       sc_decode_with_corrections)
from .errors import (InsufficientDataError, InvalidArgumentError, PolarFBError,
                     ResourceLimitError)
from .feedback import (RoundRecord, SessionStats, decode_error_set,
                       delay_distribution_check, encode_error_set,
                       run_feedback_session)
from .nbmodel import (DiscretePmf, HuffmanCode, NBModel, avg_code_length,
                      build_huffman, fit_nb, nb_entropy, nb_pmf, pmf_entropy,
                      predict_bler, predict_success_and_delay, truncated_pmf)
from .sk import SKParams, SKResult, sk_error_bound, sk_simulate
from .transform import (CodeConfig, assemble_u, bit_reversal_permutation,
                        polar_transform)

KERNEL_BACKEND = _kernels.BACKEND

__version__ = "0.1.0"
