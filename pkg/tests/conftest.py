"""Shared fixtures: models are expensive to fit, so they are session-scoped
and the fit layer's own cache is left warm across tests."""

import numpy as np
import pytest

from plcvlc import (CascadeModel, FitConfig, PlcModel, PlcTopology, ReceiverParams,
                    VlcGeometry, VlcModel, normalize_fading)

# Smaller reference sample than the production default: plenty for unit-level
# checks, and it keeps the fitted-model fixtures to a couple of seconds.
FAST_FIT = FitConfig(samples=2_000_000, seed=1905)
FAST_FIT_NARROW = FitConfig(samples=2_000_000, seed=1905, q_hi=0.55)


def make_plc_model(m=1, k=3, sigma2_h=1.0, mean_snr_db=10.0, fit_config=FAST_FIT):
    return PlcModel.build(
        PlcTopology(num_relays=m, num_wires=k),
        normalize_fading(k, sigma2_h),
        10.0 ** (mean_snr_db / 10.0),
        fit_config,
    )


def make_vlc_model(n=4, semiangle_deg=30.0, fov_deg=60.0, responsivity=1000.0,
                   vertical_len=2.5, cell_radius=2.5, mean_snr_db=50.0,
                   pd_area=1e-4, filter_gain=1.0, refr_index=1.5):
    rx = ReceiverParams(pd_area=pd_area, responsivity=responsivity,
                        filter_gain=filter_gain, refr_index=refr_index,
                        fov_half_angle=fov_deg)
    geometry = VlcGeometry(vertical_len=vertical_len, cell_radius=cell_radius)
    return VlcModel.build(geometry, rx, semiangle_deg, 10.0 ** (mean_snr_db / 10.0), n)


@pytest.fixture(scope="session")
def plc_model_k3():
    return make_plc_model(m=1, k=3)


@pytest.fixture(scope="session")
def plc_model_m4():
    return make_plc_model(m=4, k=3)


@pytest.fixture(scope="session")
def vlc_model_n4():
    return make_vlc_model(n=4)


@pytest.fixture(scope="session")
def cascade_model(plc_model_m4, vlc_model_n4):
    return CascadeModel(plc=plc_model_m4, vlc=vlc_model_n4)


def ks_distance(sorted_sample: np.ndarray, cdf_values: np.ndarray) -> float:
    """Two-sided KS statistic of a sorted sample against analytic CDF values."""
    n = len(sorted_sample)
    steps_hi = np.arange(1, n + 1) / n
    steps_lo = np.arange(0, n) / n
    return float(np.max(np.maximum(np.abs(steps_hi - cdf_values),
                                   np.abs(cdf_values - steps_lo))))
