"""Figure rendering for sweep results.

Plots are a presentation layer over the CSV rows: outage and BEP sweeps go
on a log y-axis, capacity on a linear one, and MC estimates (when present)
are overlaid as points with 95% error bars.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

PLOT_STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 150,
    "savefig.bbox": "tight",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.4,
    "lines.linewidth": 1.4,
}

_AXIS_LABELS = {
    "vlc_mean_snr_db": "mean VLC SNR (dB)",
    "plc_mean_snr_db": "mean PLC branch SNR (dB)",
    "num_relays": "relay nodes M",
    "num_leds": "LEDs N",
    "num_wires": "wire branches K",
    "semiangle_deg": "LED semiangle (deg)",
    "fov_deg": "receiver FOV (deg)",
    "vertical_len_m": "vertical separation L (m)",
}

_METRIC_LABELS = {
    "op": ("outage probability", "log"),
    "bep": ("average bit error probability", "log"),
    "capacity": ("ergodic capacity (bits/s/Hz)", "linear"),
}


def render_sweep_figure(rows, metric: str, out_path: str, title: str | None = None) -> None:
    """Render one sweep (list of result rows) to an image file."""
    y_label, y_scale = _METRIC_LABELS[metric]
    x = [row.sweep_value for row in rows]
    y = [row.analytic for row in rows]

    with plt.rc_context(PLOT_STYLE):
        fig, ax = plt.subplots()
        ax.plot(x, y, label="analytic", color="tab:blue")
        mc_rows = [row for row in rows if row.mc_mean is not None]
        if mc_rows:
            ax.errorbar([r.sweep_value for r in mc_rows], [r.mc_mean for r in mc_rows],
                        yerr=[1.96 * r.mc_stderr for r in mc_rows], fmt="o", ms=4,
                        color="tab:red", capsize=3, ls="none", label="Monte Carlo")
        if y_scale == "log":
            positive = [v for v in y if v > 0]
            if positive:
                ax.set_yscale("log")
                ax.set_ylim(bottom=max(min(positive) * 0.5, 1e-12))
        ax.set_xlabel(_AXIS_LABELS.get(rows[0].sweep_var, rows[0].sweep_var))
        ax.set_ylabel(y_label)
        if title:
            ax.set_title(title)
        ax.legend()
        fig.savefig(out_path)
        plt.close(fig)
