"""Multiple-LED visible-light subsystem.

A user uniformly distributed on a disk cell sees each LED through a
Lambertian line-of-sight channel; the received SNR is a deterministic,
decreasing function of the horizontal distance, so it lives on the bounded
support [gamma_e, gamma_c] (cell edge to cell center). With N LEDs the user
takes the best of N i.i.d. links. The closed forms are power laws; the
best-of-N CDF/PDF exist both as direct powers of the single-link forms and
as alternating binomial expansions, kept separately because the expansions
are the shape used inside the metric quadratures.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .specfun import binomial_coeff

MAX_LEDS = 16


@dataclass(frozen=True)
class VlcGeometry:
    """Vertical LED-to-user separation and disk-cell radius, in meters."""

    vertical_len: float = 2.5
    cell_radius: float = 2.5

    def __post_init__(self):
        if self.vertical_len <= 0 or self.cell_radius <= 0:
            raise ValueError("VlcGeometry: vertical_len and cell_radius must be > 0")


@dataclass(frozen=True)
class ReceiverParams:
    """Photodetector constants: area, responsivity, filter/concentrator inputs."""

    pd_area: float = 1e-4        # m^2
    responsivity: float = 1.0    # A/W
    filter_gain: float = 1.0
    refr_index: float = 1.5
    fov_half_angle: float = 60.0  # degrees

    def __post_init__(self):
        if min(self.pd_area, self.responsivity, self.refr_index) <= 0:
            raise ValueError("ReceiverParams: pd_area, responsivity, refr_index must be > 0")
        if self.filter_gain < 0:  # 0 allowed: opaque filter, rejected at model build
            raise ValueError("ReceiverParams: filter_gain must be >= 0")
        if not (0.0 < self.fov_half_angle <= 90.0):
            raise ValueError("ReceiverParams: fov_half_angle must be in (0, 90] degrees")


def lambertian_order(semiangle_deg: float) -> float:
    """Lambertian order -1/log2(cos phi_half) of an LED with the given semiangle."""
    if not (0.0 < semiangle_deg < 90.0):
        raise ValueError(f"lambertian_order: semiangle must be in (0, 90) degrees, got {semiangle_deg}")
    return -1.0 / math.log2(math.cos(math.radians(semiangle_deg)))


def concentrator_gain(psi_deg: float, rx: ReceiverParams) -> float:
    """Optical concentrator gain: eta^2/sin^2(FOV) inside the FOV, else 0."""
    if psi_deg < 0:
        raise ValueError("concentrator_gain: incidence angle must be >= 0")
    if psi_deg > rx.fov_half_angle:
        return 0.0
    return rx.refr_index ** 2 / math.sin(math.radians(rx.fov_half_angle)) ** 2


def xi_constant(rx: ReceiverParams) -> float:
    """Receiver constant A R_p U g / (2 pi), using the in-FOV concentrator gain."""
    g = concentrator_gain(0.0, rx)
    return rx.pd_area * rx.responsivity * rx.filter_gain * g / (2.0 * math.pi)


@dataclass(frozen=True)
class VlcModel:
    """Precomputed constants of the best-of-N LED SNR distribution."""

    geometry: VlcGeometry
    m_v: float
    xi: float
    eps: float
    ups: float
    mean_snr: float
    num_leds: int
    gamma_e: float
    gamma_c: float

    def __post_init__(self):
        if not (1 <= self.num_leds <= MAX_LEDS):
            raise ValueError(f"VlcModel: num_leds must be in [1, {MAX_LEDS}]")
        if not (0.0 < self.gamma_e < self.gamma_c):
            raise ValueError("VlcModel: need 0 < gamma_e < gamma_c")
        inv = -1.0 / (self.m_v + 3.0)
        at_c = self.eps - self.ups * (self.gamma_c / self.mean_snr) ** inv
        at_e = self.eps - self.ups * (self.gamma_e / self.mean_snr) ** inv
        if abs(at_c - 1.0) > 1e-10 or abs(at_e) > 1e-10:
            raise ValueError(f"VlcModel: support endpoint identities violated ({at_e:.2e}, {at_c - 1:.2e})")
        geo = self.geometry
        ratio = ((geo.cell_radius ** 2 + geo.vertical_len ** 2) / geo.vertical_len ** 2) ** (self.m_v + 3.0)
        if abs(self.gamma_c / self.gamma_e / ratio - 1.0) > 1e-10:
            raise ValueError("VlcModel: gamma_c/gamma_e does not match the geometry ratio")

    @classmethod
    def build(cls, geometry: VlcGeometry, rx: ReceiverParams, semiangle_deg: float,
              mean_snr: float, num_leds: int) -> "VlcModel":
        if mean_snr <= 0:
            raise ValueError("VlcModel.build: mean_snr must be > 0")
        edge_angle = math.degrees(math.atan2(geometry.cell_radius, geometry.vertical_len))
        if edge_angle > rx.fov_half_angle:
            warnings.warn(
                f"cell-edge incidence angle {edge_angle:.1f} deg exceeds the FOV "
                f"{rx.fov_half_angle:.1f} deg; the constant-gain closed forms assume in-FOV users",
                stacklevel=2,
            )
        m_v = lambertian_order(semiangle_deg)
        xi = xi_constant(rx)
        if xi <= 0.0:
            raise ValueError("VlcModel.build: receiver constant Xi is zero (opaque filter?)")
        gamma_e, gamma_c = snr_support(geometry, m_v, xi, mean_snr)
        eps = (geometry.cell_radius ** 2 + geometry.vertical_len ** 2) / geometry.cell_radius ** 2
        ln_base = _ln_gain_base(xi, m_v, geometry.vertical_len)
        ups = math.exp(2.0 / (m_v + 3.0) * ln_base) / geometry.cell_radius ** 2
        return cls(geometry=geometry, m_v=m_v, xi=xi, eps=eps, ups=ups,
                   mean_snr=float(mean_snr), num_leds=int(num_leds),
                   gamma_e=gamma_e, gamma_c=gamma_c)


def _ln_gain_base(xi: float, m_v: float, vertical_len: float) -> float:
    """ln of Xi (m+1) L^(m+1), the numerator shared by the channel-gain forms."""
    return math.log(xi) + math.log(m_v + 1.0) + (m_v + 1.0) * math.log(vertical_len)


def dc_channel_gain(radial_dist, model: VlcModel):
    """LoS DC gain Xi (m+1) L^(m+1) / (r^2 + L^2)^((m+3)/2) at horizontal distance r."""
    r = np.asarray(radial_dist, dtype=float)
    if np.any(r < 0):
        raise ValueError("dc_channel_gain: radial distance must be >= 0")
    ln_base = _ln_gain_base(model.xi, model.m_v, model.geometry.vertical_len)
    out = np.exp(ln_base - 0.5 * (model.m_v + 3.0) * np.log(r * r + model.geometry.vertical_len ** 2))
    return float(out) if np.isscalar(radial_dist) else out


def snr_support(geometry: VlcGeometry, m_v: float, xi: float, mean_snr: float) -> tuple[float, float]:
    """SNR bounds (gamma_e at the cell edge, gamma_c under the LED)."""
    ln_base = _ln_gain_base(xi, m_v, geometry.vertical_len)
    ln_mean = math.log(mean_snr)
    d2_edge = geometry.cell_radius ** 2 + geometry.vertical_len ** 2
    gamma_e = math.exp(ln_mean + 2.0 * ln_base - (m_v + 3.0) * math.log(d2_edge))
    gamma_c = math.exp(ln_mean + 2.0 * ln_base - 2.0 * (m_v + 3.0) * math.log(geometry.vertical_len))
    return gamma_e, gamma_c


# ---------------------------------------------------------------------------
# Single-link statistics
# ---------------------------------------------------------------------------

def vlc_cdf_single(gamma, model: VlcModel):
    """Single-LED SNR CDF: eps - ups (g/gbar)^(-1/(m+3)) on [gamma_e, gamma_c]."""
    g = np.asarray(gamma, dtype=float)
    inside = np.clip(model.eps - model.ups * (g / model.mean_snr) ** (-1.0 / (model.m_v + 3.0)),
                     0.0, 1.0)
    out = np.where(g < model.gamma_e, 0.0, np.where(g > model.gamma_c, 1.0, inside))
    return float(out) if np.isscalar(gamma) else out


def vlc_pdf_single(gamma, model: VlcModel):
    """Single-LED SNR density, a pure power law on the support."""
    g = np.asarray(gamma, dtype=float)
    m3 = model.m_v + 3.0
    inside = (model.ups / m3) * model.mean_snr ** (1.0 / m3) * g ** (-(model.m_v + 4.0) / m3)
    out = np.where((g >= model.gamma_e) & (g <= model.gamma_c), inside, 0.0)
    return float(out) if np.isscalar(gamma) else out


# ---------------------------------------------------------------------------
# Best-of-N statistics
# ---------------------------------------------------------------------------

def vlc_cdf_max(gamma, model: VlcModel):
    """Best-of-N SNR CDF as the numerically stable power form F_single^N."""
    single = vlc_cdf_single(gamma, model)
    return single ** model.num_leds


def vlc_pdf_max(gamma, model: VlcModel):
    """Best-of-N SNR density N F_single^(N-1) f_single."""
    n = model.num_leds
    return n * vlc_cdf_single(gamma, model) ** (n - 1) * vlc_pdf_single(gamma, model)


def vlc_cdf_max_expanded(gamma, model: VlcModel):
    """Best-of-N CDF as the alternating binomial expansion.

    Identical to vlc_cdf_max on the support (the expansion is the shape the
    metric quadratures consume); terms are summed exactly with math.fsum
    because they alternate in sign.
    """
    g = np.atleast_1d(np.asarray(gamma, dtype=float))
    n = model.num_leds
    m3 = model.m_v + 3.0
    out = np.empty_like(g)
    for idx, gv in enumerate(g):
        if gv < model.gamma_e:
            out[idx] = 0.0
        elif gv > model.gamma_c:
            out[idx] = 1.0
        else:
            x = (gv / model.mean_snr) ** (-1.0 / m3)
            out[idx] = math.fsum(
                (-1.0) ** i * binomial_coeff(n, i) * model.eps ** (n - i) * (model.ups * x) ** i
                for i in range(n + 1)
            )
    return float(out[0]) if np.isscalar(gamma) else out


def vlc_pdf_max_expanded(gamma, model: VlcModel):
    """Best-of-N density as the alternating binomial expansion."""
    g = np.atleast_1d(np.asarray(gamma, dtype=float))
    n = model.num_leds
    m3 = model.m_v + 3.0
    out = np.empty_like(g)
    for idx, gv in enumerate(g):
        if gv < model.gamma_e or gv > model.gamma_c:
            out[idx] = 0.0
        else:
            out[idx] = (n / m3) * math.fsum(
                (-1.0) ** i * binomial_coeff(n - 1, i)
                * model.eps ** (n - 1 - i) * model.ups ** (i + 1)
                * model.mean_snr ** ((i + 1.0) / m3)
                * gv ** (-(model.m_v + 4.0 + i) / m3)
                for i in range(n)
            )
    return float(out[0]) if np.isscalar(gamma) else out


# ---------------------------------------------------------------------------
# Exact sampler
# ---------------------------------------------------------------------------

def sample_vlc_snr(rng: np.random.Generator, model: VlcModel, size: int | None = None):
    """Draw best-of-N SNRs: N i.i.d. disk-uniform radii through the LoS gain."""
    n = 1 if size is None else int(size)
    geo = model.geometry
    u = rng.random((n, model.num_leds))
    r = geo.cell_radius * np.sqrt(u)
    ln_base = _ln_gain_base(model.xi, model.m_v, geo.vertical_len)
    gain2 = np.exp(2.0 * ln_base - (model.m_v + 3.0) * np.log(r * r + geo.vertical_len ** 2))
    gamma = model.mean_snr * gain2.max(axis=1)
    np.clip(gamma, model.gamma_e, model.gamma_c, out=gamma)  # guard float roundoff at the edges
    return float(gamma[0]) if size is None else gamma
