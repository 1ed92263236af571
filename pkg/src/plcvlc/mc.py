"""Seeded Monte Carlo oracle for the analytic layer.

Every estimator draws end-to-end SNRs by exact physical sampling (lognormal
branch sums, disk-uniform user positions) with no use of the fitted CDF
family or the binomial expansions, so agreement between this module and the
closed forms is evidence for both.

Reproducibility contract: a stream is the counter-based generator
Philox(key=(seed, stream_id)). Trials are split across `streams` streams,
each stream accumulates batch statistics independently, and the per-stream
results are merged in stream-index order, so estimates are bit-identical for
a given (seed, trials, streams) no matter how the streams are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .cascade import CascadeModel, ModulationParams, BPSK
from .plc import sample_plc_snr
from .vlc import sample_vlc_snr

Z_DEFAULT = 3.0


@dataclass(frozen=True)
class McConfig:
    """Trial count, base seed, batch size and stream layout of one estimate."""

    trials: int = 1_000_000
    seed: int = 12345
    batch_size: int = 250_000
    streams: int = 4

    def __post_init__(self):
        if self.trials < 1_000:
            raise ValueError("McConfig: trials must be >= 1000")
        if not (1 <= self.batch_size <= self.trials):
            raise ValueError("McConfig: need 1 <= batch_size <= trials")
        if self.streams < 1:
            raise ValueError("McConfig: streams must be >= 1")


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with its normal-approximation uncertainty."""

    mean: float
    std_error: float
    trials: int
    ci95_low: float
    ci95_high: float

    @classmethod
    def from_moments(cls, mean: float, std_error: float, trials: int) -> "McEstimate":
        return cls(mean=mean, std_error=std_error, trials=trials,
                   ci95_low=mean - 1.96 * std_error, ci95_high=mean + 1.96 * std_error)


@dataclass(frozen=True)
class AgreementRecord:
    """Analytic-vs-MC comparison: deviations and a z-threshold verdict."""

    analytic: float
    mc_mean: float
    mc_stderr: float
    abs_deviation: float
    rel_deviation: float
    z: float
    passed: bool


def stream_rng(seed: int, stream_id: int) -> np.random.Generator:
    """Counter-based generator for the (seed, stream_id) stream; streams never overlap."""
    key = np.array([seed, stream_id], dtype=np.uint64)
    return np.random.default_rng(np.random.Philox(key=key))


def sample_end_to_end_snr(rng: np.random.Generator, model: CascadeModel, size: int | None = None):
    """Exact draws of min(PLC SNR, best-of-N VLC SNR), independent hops."""
    n = 1 if size is None else int(size)
    plc_draws = sample_plc_snr(rng, model.plc.topology, model.plc.fading,
                               model.plc.mean_branch_snr, size=n)
    vlc_draws = sample_vlc_snr(rng, model.vlc, size=n)
    gamma = np.minimum(plc_draws, vlc_draws)
    return float(gamma[0]) if size is None else gamma


def _estimate(model: CascadeModel, cfg: McConfig, statistic, stream_offset: int = 0) -> McEstimate:
    """Stream- and batch-wise mean/variance of statistic(gamma_eq) over cfg.trials draws."""
    per_stream = [cfg.trials // cfg.streams] * cfg.streams
    for i in range(cfg.trials % cfg.streams):
        per_stream[i] += 1

    # (count, mean, M2) accumulator merged pairwise in deterministic order
    tot_n, tot_mean, tot_m2 = 0, 0.0, 0.0
    for stream_id, n_stream in enumerate(per_stream):
        if n_stream == 0:
            continue
        rng = stream_rng(cfg.seed, stream_offset + stream_id)
        done = 0
        while done < n_stream:
            n_batch = min(cfg.batch_size, n_stream - done)
            values = statistic(sample_end_to_end_snr(rng, model, size=n_batch))
            b_mean = float(np.mean(values))
            b_m2 = float(np.sum((values - b_mean) ** 2))
            delta = b_mean - tot_mean
            new_n = tot_n + n_batch
            tot_mean += delta * n_batch / new_n
            tot_m2 += b_m2 + delta * delta * tot_n * n_batch / new_n
            tot_n = new_n
            done += n_batch

    variance = tot_m2 / (tot_n - 1) if tot_n > 1 else 0.0
    std_error = math.sqrt(max(variance, 0.0) / tot_n)
    return McEstimate.from_moments(tot_mean, std_error, tot_n)


def estimate_op(model: CascadeModel, gamma_th: float, cfg: McConfig,
                stream_offset: int = 0) -> McEstimate:
    """Outage frequency P(gamma_eq < gamma_th) with binomial standard error."""
    per_stream = [cfg.trials // cfg.streams] * cfg.streams
    for i in range(cfg.trials % cfg.streams):
        per_stream[i] += 1
    outages = 0
    for stream_id, n_stream in enumerate(per_stream):
        if n_stream == 0:
            continue
        rng = stream_rng(cfg.seed, stream_offset + stream_id)
        done = 0
        while done < n_stream:
            n_batch = min(cfg.batch_size, n_stream - done)
            gamma = sample_end_to_end_snr(rng, model, size=n_batch)
            outages += int(np.count_nonzero(gamma < gamma_th))
            done += n_batch
    p_hat = outages / cfg.trials
    std_error = math.sqrt(p_hat * (1.0 - p_hat) / cfg.trials)
    return McEstimate.from_moments(p_hat, std_error, cfg.trials)


def estimate_bep(model: CascadeModel, mod: ModulationParams = BPSK,
                 cfg: McConfig = McConfig(), stream_offset: int = 0) -> McEstimate:
    """Mean conditional error Gamma(p, q gamma_eq) / (2 Gamma(p)) over draws."""
    p, q = mod.p_mod, mod.q_mod

    def conditional_bep(gamma: np.ndarray) -> np.ndarray:
        return 0.5 * _sp.gammaincc(p, q * gamma)

    return _estimate(model, cfg, conditional_bep, stream_offset)


def estimate_capacity(model: CascadeModel, cfg: McConfig = McConfig(),
                      stream_offset: int = 0) -> McEstimate:
    """Mean log2(1 + gamma_eq) over draws, in bits/s/Hz."""

    def spectral_efficiency(gamma: np.ndarray) -> np.ndarray:
        return np.log1p(gamma) / math.log(2.0)

    return _estimate(model, cfg, spectral_efficiency, stream_offset)


def compare_report(analytic: float, mc: McEstimate, z_threshold: float = Z_DEFAULT) -> AgreementRecord:
    """Deviation of an analytic value from an MC estimate, in standard-error units."""
    abs_dev = abs(analytic - mc.mean)
    rel_dev = abs_dev / max(abs(analytic), abs(mc.mean), 1e-300)
    if abs_dev == 0.0:
        z = 0.0
    elif mc.std_error == 0.0:
        z = math.inf
    else:
        z = abs_dev / mc.std_error
    return AgreementRecord(analytic=analytic, mc_mean=mc.mean, mc_stderr=mc.std_error,
                           abs_deviation=abs_dev, rel_deviation=rel_dev,
                           z=z, passed=z <= z_threshold)
