"""Performance analysis of a cascaded multiwire-PLC / multiple-LED VLC link.

Closed-form end-to-end SNR statistics, outage probability, average bit error
probability and ergodic capacity for a decode-and-forward relayed link, each
cross-validated by a seeded exact-sampling Monte Carlo oracle.
"""

from .cascade import (BPSK, CascadeModel, MetricConfig, ModulationParams,
                      average_bep, bep_terms, capacity_terms, end_to_end_cdf,
                      end_to_end_pdf, ergodic_capacity, outage_probability)
from .config import (RunConfig, SweepSpec, build_cascade_model, build_plc_model,
                     build_vlc_model, db_to_linear, linear_to_db, load_config)
from .mc import (AgreementRecord, McConfig, McEstimate, compare_report,
                 estimate_bep, estimate_capacity, estimate_op,
                 sample_end_to_end_snr, stream_rng)
from .plc import (FitConfig, FitError, LognormalFading, LognormalSumFit,
                  PlcLinkParams, PlcModel, PlcNoise, PlcTopology,
                  cable_attenuation, effective_noise_power, fit_lognormal_sum,
                  mean_branch_snr_from_link, normalize_fading, plc_snr_cdf,
                  plc_snr_pdf, sample_plc_snr)
from .specfun import (QuadratureRule, binomial_coeff, gauss_legendre_rule,
                      std_normal_cdf, std_normal_log_cdf, upper_incomplete_gamma)
from .vlc import (ReceiverParams, VlcGeometry, VlcModel, concentrator_gain,
                  dc_channel_gain, lambertian_order, sample_vlc_snr, snr_support,
                  vlc_cdf_max, vlc_cdf_max_expanded, vlc_cdf_single, vlc_pdf_max,
                  vlc_pdf_max_expanded, vlc_pdf_single, xi_constant)

__version__ = "0.1.0"
