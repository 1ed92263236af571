"""Multiwire power-line subsystem.

Each of M relay nodes combines K wire branches by MRC; branch gains are
i.i.d. lognormal, so the combined SNR is a scaled sum of squared lognormals.
The analytic layer approximates the CDF of that sum with the three-constant
Gaussian family Phi(a0 - a1 * x^(-a2/kappa)), fitted here against a seeded
empirical reference because the source of the family never tabulates the
constants. The exact sampler draws the sum directly and is the ground truth
the approximation is judged against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from .specfun import std_normal_cdf, std_normal_log_cdf

KAPPA = math.log(10.0) / 10.0

MAX_RELAYS = 16
MAX_WIRES = 16

# Nelder-Mead restarts: the family degenerates to a pure lognormal as
# a2 -> 0 (with a0, a1 blowing up), and that corner is the right one for
# K = 1, so the start grid has to reach far down.
_A2_STARTS = (1e-4, 3e-4, 1e-3, 3e-3, 0.01, 0.03, 0.1, 0.3)


class FitError(RuntimeError):
    """Lognormal-sum fit did not reach the required accuracy."""


@dataclass(frozen=True)
class PlcLinkParams:
    """Cable attenuation and transmit-power inputs for one powerline hop."""

    alpha1: float = 0.0093      # 1/m
    alpha2: float = 0.0051      # 1/m per MHz^k_att
    k_att: float = 1.0          # frequency exponent
    freq_mhz: float = 20.0
    length_m: float = 5.0
    tx_power: float | None = None  # W; only needed for the computed-SNR path

    def __post_init__(self):
        if self.alpha1 < 0 or self.alpha2 < 0:
            raise ValueError("PlcLinkParams: alpha1 and alpha2 must be >= 0")
        if self.freq_mhz <= 0 or self.length_m < 0 or self.k_att <= 0:
            raise ValueError("PlcLinkParams: freq_mhz, k_att must be > 0 and length_m >= 0")


@dataclass(frozen=True)
class PlcNoise:
    """Two-state noise mixture: background AWGN plus Bernoulli impulsive bursts."""

    impulse_prob: float = 0.05
    bg_var: float = 1.0
    imp_var: float = 10.0

    def __post_init__(self):
        if not (0.0 <= self.impulse_prob <= 1.0):
            raise ValueError("PlcNoise: impulse_prob must be in [0, 1]")
        if self.bg_var <= 0 or self.imp_var < 0:
            raise ValueError("PlcNoise: bg_var must be > 0 and imp_var >= 0")


@dataclass(frozen=True)
class LognormalFading:
    """Log-domain mean and variance of a single wire gain."""

    mu_h: float
    sigma2_h: float

    def __post_init__(self):
        if self.sigma2_h <= 0:
            raise ValueError("LognormalFading: sigma2_h must be > 0")


@dataclass(frozen=True)
class PlcTopology:
    """M relay nodes, K wire branches per node."""

    num_relays: int = 1
    num_wires: int = 3

    def __post_init__(self):
        if not (1 <= self.num_relays <= MAX_RELAYS):
            raise ValueError(f"PlcTopology: num_relays must be in [1, {MAX_RELAYS}]")
        if not (1 <= self.num_wires <= MAX_WIRES):
            raise ValueError(f"PlcTopology: num_wires must be in [1, {MAX_WIRES}]")


@dataclass(frozen=True)
class FitConfig:
    """Controls for the empirical reference sample and the minimax fit."""

    samples: int = 10_000_000
    seed: int = 1905
    n_points: int = 512
    q_lo: float = 0.001
    q_hi: float = 0.999

    def __post_init__(self):
        if self.samples < 10_000:
            raise ValueError("FitConfig: samples must be >= 10000")
        if not (0.0 < self.q_lo < self.q_hi < 1.0):
            raise ValueError("FitConfig: need 0 < q_lo < q_hi < 1")
        if self.n_points < 8:
            raise ValueError("FitConfig: n_points must be >= 8")


@dataclass(frozen=True)
class LognormalSumFit:
    """Fitted constants of the CDF family Phi(a0 - a1 * x^(-a2/kappa))."""

    a0: float
    a1: float
    a2: float
    kappa: float
    fit_error: float

    def __post_init__(self):
        if self.a1 <= 0 or self.a2 <= 0:
            raise ValueError("LognormalSumFit: a1 and a2 must be > 0")
        if abs(self.kappa - KAPPA) > 1e-15:
            raise ValueError("LognormalSumFit: kappa must equal ln(10)/10")
        if not (0.0 <= self.fit_error < 0.01):
            raise ValueError("LognormalSumFit: fit_error must be < 0.01")


@dataclass(frozen=True)
class PlcModel:
    """Analytic description of the best-of-M, K-branch powerline SNR."""

    topology: PlcTopology
    fading: LognormalFading
    fit: LognormalSumFit
    mean_branch_snr: float

    def __post_init__(self):
        if self.mean_branch_snr <= 0:
            raise ValueError("PlcModel: mean_branch_snr must be > 0")
        limit = float(std_normal_cdf(self.fit.a0)) ** self.topology.num_relays
        if limit < 0.99:
            raise ValueError(
                f"PlcModel: CDF limit Phi(a0)^M = {limit:.4f} < 0.99; fit unusable for M={self.topology.num_relays}"
            )

    @classmethod
    def build(cls, topology: PlcTopology, fading: LognormalFading,
              mean_branch_snr: float, fit_config: FitConfig = FitConfig()) -> "PlcModel":
        fit = fit_lognormal_sum(topology, fading, fit_config)
        return cls(topology, fading, fit, float(mean_branch_snr))


def cable_attenuation(link: PlcLinkParams) -> float:
    """Power attenuation exp(-2 (alpha1 + alpha2 f^k_att) l) of the cable run."""
    rate = link.alpha1 + link.alpha2 * link.freq_mhz ** link.k_att
    return math.exp(-2.0 * rate * link.length_m)


def effective_noise_power(noise: PlcNoise) -> float:
    """Mixture variance (1-p) sig_g^2 + p (sig_g^2 + sig_i^2)."""
    return noise.bg_var + noise.impulse_prob * noise.imp_var


def mean_branch_snr_from_link(link: PlcLinkParams, noise: PlcNoise) -> float:
    """Average branch SNR P beta / sigma^2 from physical-link parameters."""
    if link.tx_power is None or link.tx_power <= 0:
        raise ValueError("mean_branch_snr_from_link: link.tx_power must be set and > 0")
    return link.tx_power * cable_attenuation(link) / effective_noise_power(noise)


def normalize_fading(num_wires: int, sigma2_h: float) -> LognormalFading:
    """Fading law with E{h^2} = 1/K, i.e. mu_h = -ln(K)/2 - sigma2_h."""
    if num_wires < 1:
        raise ValueError("normalize_fading: num_wires must be >= 1")
    if sigma2_h <= 0:
        raise ValueError("normalize_fading: sigma2_h must be > 0")
    return LognormalFading(mu_h=-0.5 * math.log(num_wires) - sigma2_h, sigma2_h=sigma2_h)


# ---------------------------------------------------------------------------
# Lognormal-sum fit
# ---------------------------------------------------------------------------

def fit_lognormal_sum(topology: PlcTopology, fading: LognormalFading,
                      fit_config: FitConfig = FitConfig()) -> LognormalSumFit:
    """Fit the three-constant Gaussian family to the CDF of sum_k h_k^2.

    The reference is the empirical CDF of a seeded sample (sorted, read at
    n_points quantiles between q_lo and q_hi); the constants minimize the
    maximum absolute CDF deviation over those points, via restarted
    Nelder-Mead in (a0, ln a1, ln a2). Deterministic for a given config.
    """
    return _fit_cached(topology.num_wires, fading.mu_h, fading.sigma2_h, fit_config)


@lru_cache(maxsize=64)
def _fit_cached(num_wires: int, mu_h: float, sigma2_h: float, cfg: FitConfig) -> LognormalSumFit:
    probs = np.linspace(cfg.q_lo, cfg.q_hi, cfg.n_points)
    sample = _draw_branch_sum(num_wires, mu_h, math.sqrt(sigma2_h), cfg.samples, cfg.seed)
    sample.sort()
    quantiles = np.quantile(sample, probs)
    ln_x = np.log(quantiles)

    def deviation(params: np.ndarray) -> float:
        a0, ln_a1, ln_a2 = params
        arg = a0 - np.exp(ln_a1 - (math.exp(ln_a2) / KAPPA) * ln_x)
        return float(np.max(np.abs(std_normal_cdf(arg) - probs)))

    # dB-domain location/scale of the sample body, for the restart guesses
    med_db = float(np.interp(0.5, probs, ln_x)) / KAPPA if probs[0] < 0.5 < probs[-1] \
        else float(ln_x[len(ln_x) // 2]) / KAPPA
    lo_db = float(np.interp(max(probs[0], 0.16), probs, ln_x)) / KAPPA
    hi_db = float(np.interp(min(probs[-1], 0.84), probs, ln_x)) / KAPPA
    spread_db = max((hi_db - lo_db) / 2.0, 0.5)

    best: tuple[float, np.ndarray] | None = None
    for a2_0 in _A2_STARTS:
        a0_0 = 1.0 / (a2_0 * spread_db)
        ln_a1_0 = a2_0 * med_db - math.log(a2_0 * spread_db)
        x0 = np.array([a0_0, ln_a1_0, math.log(a2_0)])
        for _ in range(2):  # one restart from the found point sharpens the minimax corner
            res = minimize(deviation, x0, method="Nelder-Mead",
                           options=dict(xatol=1e-11, fatol=1e-13, maxiter=6000, maxfev=12000))
            x0 = res.x
        if best is None or res.fun < best[0]:
            best = (res.fun, res.x)

    err, (a0, ln_a1, ln_a2) = best
    if err >= 0.01:
        raise FitError(
            f"lognormal-sum fit reached max CDF deviation {err:.4f} >= 0.01 "
            f"(K={num_wires}, mu_h={mu_h:.4f}, sigma2_h={sigma2_h:.4f})"
        )
    return LognormalSumFit(a0=float(a0), a1=float(math.exp(ln_a1)),
                           a2=float(math.exp(ln_a2)), kappa=KAPPA, fit_error=err)


def _draw_branch_sum(num_wires: int, mu_h: float, sigma_h: float, n: int, seed: int) -> np.ndarray:
    """n draws of sum_{k=1..K} h_k^2 with ln h_k ~ N(mu_h, sigma_h^2)."""
    rng = np.random.default_rng(np.random.Philox(key=np.uint64(seed)))
    total = np.zeros(n)
    for _ in range(num_wires):
        total += np.exp(2.0 * mu_h + 2.0 * sigma_h * rng.standard_normal(n))
    return total


# ---------------------------------------------------------------------------
# Analytic CDF / PDF
# ---------------------------------------------------------------------------

def _cdf_argument(gamma, model: PlcModel) -> np.ndarray:
    """a0 - a1 (gamma/gbar)^(-a2/kappa), safe across many decades of gamma."""
    fit = model.fit
    g = np.asarray(gamma, dtype=float)
    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        ln_ratio = np.log(g) - math.log(model.mean_branch_snr)
        power = np.exp(math.log(fit.a1) - (fit.a2 / fit.kappa) * ln_ratio)
        return fit.a0 - power


def plc_snr_cdf(gamma, model: PlcModel):
    """CDF of the selected-best relay SNR, [Phi(a0 - a1 (g/gbar)^(-a2/k))]^M."""
    arg = _cdf_argument(gamma, model)
    out = np.clip(std_normal_cdf(arg) ** model.topology.num_relays, 0.0, 1.0)
    out = np.where(np.isnan(arg), 0.0, out)  # arg -> -inf limit gives 0
    return float(out) if np.isscalar(gamma) else out


def plc_snr_pdf(gamma, model: PlcModel):
    """Density of the selected-best relay SNR (derivative of plc_snr_cdf).

    Evaluated in log space: the power-law prefactor and the Gaussian kernel
    both overflow/underflow separately long before their product does.
    """
    fit = model.fit
    m_relays = model.topology.num_relays
    c = fit.a2 / fit.kappa
    g = np.asarray(gamma, dtype=float)
    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        ln_g = np.log(g)
        arg = _cdf_argument(g, model)
        ln_pdf = (
            math.log(m_relays * fit.a1 * c)
            - 0.5 * math.log(2.0 * math.pi)
            + c * math.log(model.mean_branch_snr)
            - (c + 1.0) * ln_g
            - 0.5 * arg * arg
            + (m_relays - 1) * std_normal_log_cdf(arg)
        )
        ln_pdf = np.where(np.isfinite(arg), ln_pdf, -np.inf)
        out = np.exp(ln_pdf)
    return float(out) if np.isscalar(gamma) else out


# ---------------------------------------------------------------------------
# Exact sampler
# ---------------------------------------------------------------------------

def sample_plc_snr(rng: np.random.Generator, topology: PlcTopology,
                   fading: LognormalFading, mean_branch_snr: float, size: int | None = None,
                   noise_mixture: PlcNoise | None = None):
    """Exact draws of max_m gbar * sum_k h_{m,k}^2 (no CDF approximation).

    By default the two-state noise is folded into mean_branch_snr through its
    mixture variance, matching the closed forms exactly. Passing noise_mixture
    instead re-draws the per-node noise state each trial (sensitivity mode;
    the analytic layer has no counterpart for it).
    """
    n = 1 if size is None else int(size)
    sigma_h = math.sqrt(fading.sigma2_h)
    z = rng.standard_normal((n, topology.num_relays, topology.num_wires))
    branch = np.exp(2.0 * fading.mu_h + 2.0 * sigma_h * z).sum(axis=2)
    if noise_mixture is not None:
        folded = effective_noise_power(noise_mixture)
        impulsive = rng.random((n, topology.num_relays)) < noise_mixture.impulse_prob
        per_node = noise_mixture.bg_var + impulsive * noise_mixture.imp_var
        branch = branch * (folded / per_node)
    gamma = mean_branch_snr * branch.max(axis=1)
    return float(gamma[0]) if size is None else gamma
