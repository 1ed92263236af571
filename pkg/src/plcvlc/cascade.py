"""End-to-end statistics and metrics for the relayed PLC -> VLC link.

The decode-and-forward relay makes the end-to-end SNR the minimum of the two
hop SNRs, so the CDF composes as F_P + F_V - F_P F_V and is piecewise in
three regions set by the bounded VLC support. Outage is a CDF read-off;
average BEP and ergodic capacity are finite-interval integrals evaluated by
Gauss-Legendre sums after affine interval maps. A single fixed-order rule on
[gamma_e, gamma_c] cannot resolve supports spanning many decades together
with the exponential BEP kernel, so every interval is subdivided into
geometric panels (one per decade) and the same rule is applied per panel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .plc import PlcModel, plc_snr_cdf, plc_snr_pdf
from .specfun import binomial_coeff, gauss_legendre_rule, upper_incomplete_gamma
from .vlc import VlcModel, vlc_cdf_max, vlc_pdf_max

_ZERO_ANCHOR_DECADES = 12   # panels below b*10^-12 carry no metric mass
_MAX_PANELS = 24


@dataclass(frozen=True)
class ModulationParams:
    """Conditional-BEP constants (p, q) of a binary constellation."""

    p_mod: float = 0.5
    q_mod: float = 1.0

    def __post_init__(self):
        if self.p_mod <= 0 or self.q_mod <= 0:
            raise ValueError("ModulationParams: p_mod and q_mod must be > 0")


BPSK = ModulationParams(p_mod=0.5, q_mod=1.0)


@dataclass(frozen=True)
class MetricConfig:
    """Quadrature order and outage threshold used by the metric evaluators."""

    quad_order: int = 64
    gamma_th: float = 1.0

    def __post_init__(self):
        if not (8 <= self.quad_order <= 256):
            raise ValueError(f"MetricConfig: quad_order must be in [8, 256], got {self.quad_order}")
        if self.gamma_th <= 0:
            raise ValueError("MetricConfig: gamma_th must be > 0")


@dataclass(frozen=True)
class CascadeModel:
    """The relayed pair: best-of-M PLC hop feeding best-of-N VLC hop."""

    plc: PlcModel
    vlc: VlcModel

    @property
    def gamma_e(self) -> float:
        return self.vlc.gamma_e

    @property
    def gamma_c(self) -> float:
        return self.vlc.gamma_c


# ---------------------------------------------------------------------------
# End-to-end CDF / PDF
# ---------------------------------------------------------------------------

def end_to_end_cdf(gamma, model: CascadeModel):
    """CDF of min(PLC, VLC) SNR: F_P below the VLC support, 1 above it."""
    g = np.asarray(gamma, dtype=float)
    f_p = plc_snr_cdf(g, model.plc)
    f_v = vlc_cdf_max(g, model.vlc)
    combined = f_p + f_v - f_p * f_v
    out = np.where(g > model.gamma_c, 1.0, np.where(g < model.gamma_e, f_p, combined))
    return float(out) if np.isscalar(gamma) else out


def end_to_end_pdf(gamma, model: CascadeModel):
    """Density of min(PLC, VLC) SNR: f_P (1 - F_V) + f_V (1 - F_P), piecewise."""
    g = np.asarray(gamma, dtype=float)
    f_p = plc_snr_pdf(g, model.plc)
    inside = (g >= model.gamma_e) & (g <= model.gamma_c)
    combined = f_p * (1.0 - vlc_cdf_max(g, model.vlc)) + vlc_pdf_max(g, model.vlc) * (1.0 - plc_snr_cdf(g, model.plc))
    out = np.where(g > model.gamma_c, 0.0, np.where(inside, combined, f_p))
    return float(out) if np.isscalar(gamma) else out


def outage_probability(model: CascadeModel, gamma_th: float) -> float:
    """P(end-to-end SNR < gamma_th)."""
    if gamma_th <= 0:
        raise ValueError("outage_probability: gamma_th must be > 0")
    return float(end_to_end_cdf(gamma_th, model))


# ---------------------------------------------------------------------------
# Panelled Gauss-Legendre machinery
# ---------------------------------------------------------------------------

def _panel_edges(a: float, b: float) -> np.ndarray:
    """Geometric subdivision of [a, b], roughly one panel per decade."""
    if not b > a:
        raise ValueError("_panel_edges: need b > a")
    if a <= 0.0:
        anchor = b * 10.0 ** (-_ZERO_ANCHOR_DECADES)
        inner = np.geomspace(anchor, b, _ZERO_ANCHOR_DECADES + 1)
        return np.concatenate(([a], inner))
    n = min(max(int(math.ceil(math.log10(b / a))), 1), _MAX_PANELS)
    return np.geomspace(a, b, n + 1)


def _quad_grid(a: float, b: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Concatenated mapped nodes and scaled weights over the panels of [a, b]."""
    rule = gauss_legendre_rule(order)
    x = np.asarray(rule.nodes)
    w = np.asarray(rule.weights)
    edges = _panel_edges(a, b)
    nodes = []
    weights = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        nodes.append(half * x + 0.5 * (hi + lo))
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


# ---------------------------------------------------------------------------
# Average BEP
# ---------------------------------------------------------------------------

def bep_terms(model: CascadeModel, mod: ModulationParams = BPSK,
              cfg: MetricConfig = MetricConfig()) -> tuple[float, float, float, float]:
    """The four pieces (I1, I2, I3, I4) of the CDF-form BEP integral.

    I1 integrates gamma^(p-1) e^(-q gamma) F_P over [0, gamma_c]; I2 and I3
    carry the alternating binomial expansion of the VLC CDF over the support
    (I2 with, I3 without the PLC factor); I4 is the closed-form tail
    Gamma(p, q gamma_c)/q^p where the end-to-end CDF is 1.
    """
    p, q = mod.p_mod, mod.q_mod
    vm = model.vlc
    n_leds = vm.num_leds
    m3 = vm.m_v + 3.0

    t1, w1 = _quad_grid(0.0, model.gamma_c, cfg.quad_order)
    with np.errstate(under="ignore"):
        kern1 = t1 ** (p - 1.0) * np.exp(-q * t1)
        i1 = float(np.dot(w1, kern1 * plc_snr_cdf(t1, model.plc)))

        t, w = _quad_grid(model.gamma_e, model.gamma_c, cfg.quad_order)
        kern = t ** (p - 1.0) * np.exp(-q * t)
        f_p = plc_snr_cdf(t, model.plc)
        i2_parts = []
        i3_parts = []
        for i in range(n_leds + 1):
            coeff = ((-1.0) ** i * binomial_coeff(n_leds, i)
                     * vm.eps ** (n_leds - i) * vm.ups ** i * vm.mean_snr ** (i / m3))
            pow_i = t ** (-i / m3)
            i2_parts.append(coeff * float(np.dot(w, kern * pow_i * f_p)))
            i3_parts.append(coeff * float(np.dot(w, kern * pow_i)))
    i2 = math.fsum(i2_parts)
    i3 = math.fsum(i3_parts)
    i4 = upper_incomplete_gamma(p, q * model.gamma_c) / q ** p
    return i1, i2, i3, i4


def average_bep(model: CascadeModel, mod: ModulationParams = BPSK,
                cfg: MetricConfig = MetricConfig()) -> float:
    """Average bit error probability q^p (I1 - I2 + I3 + I4) / (2 Gamma(p))."""
    i1, i2, i3, i4 = bep_terms(model, mod, cfg)
    gamma_p = upper_incomplete_gamma(mod.p_mod, 0.0)
    pe = mod.q_mod ** mod.p_mod * (i1 - i2 + i3 + i4) / (2.0 * gamma_p)
    return float(min(max(pe, 0.0), 0.5))


# ---------------------------------------------------------------------------
# Ergodic capacity
# ---------------------------------------------------------------------------

def capacity_terms(model: CascadeModel,
                   cfg: MetricConfig = MetricConfig()) -> tuple[float, float, float]:
    """The three pieces (C1, C2, C3) of the ergodic capacity, in bits/s/Hz.

    C1 integrates log(1+x) against the PLC density up to gamma_c; C2 carries
    the VLC density times the PLC survival over the support; C3 removes the
    double-counted region where both CDFs accumulate.
    """
    vm = model.vlc
    n_leds = vm.num_leds
    m3 = vm.m_v + 3.0
    ln2 = math.log(2.0)

    t1, w1 = _quad_grid(0.0, model.gamma_c, cfg.quad_order)
    with np.errstate(under="ignore"):
        c1 = float(np.dot(w1, np.log1p(t1) * plc_snr_pdf(t1, model.plc))) / ln2

        t, w = _quad_grid(model.gamma_e, model.gamma_c, cfg.quad_order)
        log_kern = np.log1p(t)
        f_p_cdf = plc_snr_cdf(t, model.plc)
        f_p_pdf = plc_snr_pdf(t, model.plc)

        c2_parts = []
        for i in range(n_leds):
            coeff = ((-1.0) ** i * binomial_coeff(n_leds - 1, i)
                     * vm.eps ** (n_leds - 1 - i) * vm.ups ** (i + 1)
                     * vm.mean_snr ** ((i + 1) / m3))
            integrand = log_kern * t ** (-(vm.m_v + 4.0 + i) / m3) * (1.0 - f_p_cdf)
            c2_parts.append(coeff * float(np.dot(w, integrand)))
        c2 = n_leds / (m3 * ln2) * math.fsum(c2_parts)

        c3_parts = []
        for i in range(n_leds + 1):
            coeff = ((-1.0) ** i * binomial_coeff(n_leds, i)
                     * vm.eps ** (n_leds - i) * vm.ups ** i * vm.mean_snr ** (i / m3))
            integrand = log_kern * t ** (-i / m3) * f_p_pdf
            c3_parts.append(coeff * float(np.dot(w, integrand)))
        c3 = math.fsum(c3_parts) / ln2
    return c1, c2, c3


def ergodic_capacity(model: CascadeModel, cfg: MetricConfig = MetricConfig()) -> float:
    """Ergodic capacity C1 + C2 - C3 of the end-to-end SNR, in bits/s/Hz."""
    c1, c2, c3 = capacity_terms(model, cfg)
    return float(max(c1 + c2 - c3, 0.0))
