"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines as they complete. The MC-backed criteria use the bundled figure
recipes at their full trial counts, so the whole module takes a few minutes.
"""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from plcvlc.cascade import (BPSK, CascadeModel, ModulationParams, average_bep,
                            capacity_terms, end_to_end_cdf, end_to_end_pdf,
                            ergodic_capacity)
from plcvlc.cli import bundled_recipes, run_metric
from plcvlc.config import SweepSpec, build_cascade_model, parse_config_text
from plcvlc.mc import estimate_bep, estimate_capacity, estimate_op, stream_rng
from plcvlc.plc import (FitConfig, PlcTopology, fit_lognormal_sum, normalize_fading,
                        plc_snr_cdf, plc_snr_pdf)
from plcvlc.specfun import std_normal_cdf
from plcvlc.vlc import vlc_cdf_max, vlc_cdf_max_expanded, vlc_pdf_max

from conftest import FAST_FIT, make_plc_model, make_vlc_model
from test_cascade import bep_pdf_form_oracle, capacity_pdf_form_oracle


def check(num: int, description: str, ok: bool, detail: str = "") -> None:
    line = f"[criterion {num:02d}] {description}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert ok, line


def recipe(name: str):
    return parse_config_text(dict(bundled_recipes())[name], origin=name)


def random_vlc_model(rng, n_leds=None):
    return make_vlc_model(
        n=int(rng.integers(1, 9)) if n_leds is None else n_leds,
        semiangle_deg=float(rng.uniform(25.0, 70.0)),
        fov_deg=float(rng.uniform(55.0, 90.0)),
        responsivity=float(rng.choice([100.0, 1000.0])),
        vertical_len=float(rng.uniform(1.5, 3.0)),
        cell_radius=float(rng.uniform(1.5, 3.0)),
        mean_snr_db=float(rng.uniform(35.0, 65.0)),
    )


def test_criterion_01_fading_normalization():
    mu = normalize_fading(3, 1.0).mu_h
    check(1, "normalize_fading(K=3, sigma2=1) gives mu_h = -1.549 +- 0.001",
          abs(mu - (-1.549)) < 1e-3, f"mu_h = {mu:.4f}")


def test_criterion_02_vlc_endpoint_identities():
    rng = np.random.default_rng(20250809)
    worst = 0.0
    for _ in range(50):
        model = random_vlc_model(rng)
        at_e = abs(vlc_cdf_max_expanded(model.gamma_e, model))
        at_c = abs(vlc_cdf_max_expanded(model.gamma_c, model) - 1.0)
        worst = max(worst, at_e, at_c)
    check(2, "best-of-N CDF endpoint identities over 50 randomized configs",
          worst < 1e-9, f"worst |deviation| = {worst:.2e}")


def test_criterion_03_binomial_expansion_identity():
    rng = np.random.default_rng(42)
    worst = 0.0
    from plcvlc.vlc import vlc_pdf_max_expanded
    for n in (1, 2, 4, 8):
        model = random_vlc_model(rng, n_leds=n)
        grid = np.geomspace(model.gamma_e, model.gamma_c, 200)
        cdf_dev = np.max(np.abs(vlc_cdf_max_expanded(grid, model) - vlc_cdf_max(grid, model)))
        pdf_power = vlc_pdf_max(grid, model)
        pdf_dev = np.max(np.abs(vlc_pdf_max_expanded(grid, model) - pdf_power)
                         / np.maximum(np.abs(pdf_power), 1.0))
        worst = max(worst, float(cdf_dev), float(pdf_dev))
    check(3, "binomial expansions equal direct power forms for N in {1,2,4,8}",
          worst < 1e-10, f"worst deviation = {worst:.2e}")


def test_criterion_04_pdf_cdf_consistency():
    plc = make_plc_model(m=2, k=3, mean_snr_db=10.0)
    vlc = make_vlc_model(n=4, mean_snr_db=50.0)
    model = CascadeModel(plc=plc, vlc=vlc)
    worst = 0.0

    def rel_diff(cdf, pdf, gamma):
        h = gamma * 1e-6
        slope = (cdf(gamma + h) - cdf(gamma - h)) / (2 * h)
        return abs(pdf(gamma) - slope) / abs(slope)

    for g in plc.mean_branch_snr * np.array([0.2, 0.5, 1.0, 2.0, 5.0]):
        worst = max(worst, rel_diff(lambda x: plc_snr_cdf(x, plc),
                                    lambda x: plc_snr_pdf(x, plc), float(g)))
    for g in np.geomspace(vlc.gamma_e * 1.05, vlc.gamma_c * 0.95, 9):
        worst = max(worst, rel_diff(lambda x: vlc_cdf_max(x, vlc),
                                    lambda x: vlc_pdf_max(x, vlc), float(g)))
    probes = [model.gamma_e * 0.4, model.gamma_e * 1.5,
              math.sqrt(model.gamma_e * model.gamma_c), model.gamma_c * 0.6]
    for g in probes:
        worst = max(worst, rel_diff(lambda x: end_to_end_cdf(x, model),
                                    lambda x: end_to_end_pdf(x, model), float(g)))
    check(4, "closed-form PDFs match CDF central differences (rel 1e-4)",
          worst < 1e-4, f"worst rel dev = {worst:.2e}")


def test_criterion_05_fit_quality():
    worst = 0.0
    for k in (2, 3, 4):
        fading = normalize_fading(k, 1.0)
        fit = fit_lognormal_sum(PlcTopology(1, k), fading, FitConfig())
        rng = stream_rng(777_000 + k, 0)
        total = np.zeros(10**7)
        for _ in range(k):
            total += np.exp(2 * fading.mu_h + 2 * rng.standard_normal(10**7))
        total.sort()
        probs = np.linspace(0.001, 0.999, 1024)
        quantiles = np.quantile(total, probs)
        approx = std_normal_cdf(fit.a0 - fit.a1 * quantiles ** (-fit.a2 / fit.kappa))
        dev = float(np.max(np.abs(approx - probs)))
        worst = max(worst, dev)
    check(5, "lognormal-sum fit within 0.01 of fresh 1e7-draw empirical CDFs, K in {2,3,4}",
          worst < 0.01, f"worst deviation = {worst:.4f}")


def test_criterion_06_outage_mc_agreement():
    worst_z = 0.0
    worst_abs = 0.0
    ok = True
    for m, n in ((1, 1), (4, 1), (1, 4), (4, 4)):
        cfg = recipe(f"fig3_op_m{m}_n{n}")
        rows = run_metric(cfg, "op", cfg.sweep, with_mc=True)
        for row in rows:
            worst_z = max(worst_z, row.z)
            worst_abs = max(worst_abs, abs(row.analytic - row.mc_mean))
            ok = ok and row.passed
    check(6, "analytic outage within 3 SE of 1e6-trial MC on the 20-point grid",
          ok and worst_z < 3.0, f"worst z = {worst_z:.2f}, worst |dev| = {worst_abs:.2e}")


def test_criterion_07_outage_three_regions():
    cfg = recipe("fig3_op_m4_n4")
    sweep = SweepSpec("vlc_mean_snr_db", 20, 80, 61)
    rows = run_metric(cfg, "op", sweep, with_mc=False)
    gamma_th = 1.0
    region = []
    floors = []
    for row in rows:
        model = build_cascade_model(cfg.with_sweep_value("vlc_mean_snr_db", row.sweep_value))
        if model.gamma_c < gamma_th:
            region.append("ceiling")
        elif model.gamma_e > gamma_th:
            region.append("floor")
        else:
            region.append("transition")
        floors.append(plc_snr_cdf(gamma_th, model.plc))
    ok = all(count > 0 for count in
             (region.count("ceiling"), region.count("transition"), region.count("floor")))
    near_one = [rows[i].analytic for i in range(len(rows)) if region[i] == "ceiling"]
    ok = ok and all(v > 0.999 for v in near_one)
    trans = [rows[i].analytic for i in range(len(rows)) if region[i] == "transition"]
    ok = ok and all(b < a for a, b in zip(trans, trans[1:]))
    plateau_dev = max(abs(rows[i].analytic - floors[i])
                      for i in range(len(rows)) if region[i] == "floor")
    ok = ok and plateau_dev < 1e-6
    check(7, "outage sweep shows ceiling/transition/floor regions with exact PLC floor",
          ok, f"regions = {region.count('ceiling')}/{region.count('transition')}"
              f"/{region.count('floor')}, plateau dev = {plateau_dev:.1e}")


def test_criterion_08_bep_dual_form_identity():
    rng = np.random.default_rng(808)
    worst = 0.0
    for trial in range(10):
        k = int(rng.integers(1, 4))
        plc = make_plc_model(m=int(rng.integers(1, 5)), k=k,
                             mean_snr_db=float(rng.uniform(5.0, 20.0)), fit_config=FAST_FIT)
        model = CascadeModel(plc=plc, vlc=random_vlc_model(rng))
        mod = BPSK if trial % 2 == 0 else ModulationParams(1.0, 1.0)
        decomposed = average_bep(model, mod)
        direct = bep_pdf_form_oracle(model, mod)
        worst = max(worst, abs(decomposed - direct) / direct)
    check(8, "BEP term decomposition equals direct density-form quadrature (rel 1e-6)",
          worst < 1e-6, f"worst rel dev = {worst:.2e} over 10 randomized configs")


def test_criterion_09_bep_mc_agreement():
    worst_z = 0.0
    ok = True
    for phi in (15, 60):
        for length in ("20", "25", "30"):
            cfg = recipe(f"fig4_bep_phi{phi}_l{length}")
            rows = run_metric(cfg, "bep", cfg.sweep, with_mc=True)
            for row in rows:
                worst_z = max(worst_z, row.z)
                ok = ok and row.passed
    check(9, "analytic BEP within 3 SE of 1e6-trial MC on the 18-point grid",
          ok and worst_z < 3.0, f"worst z = {worst_z:.2f}")


def test_criterion_10_capacity_decomposition_identity():
    rng = np.random.default_rng(1010)
    worst = 0.0
    for _ in range(10):
        plc = make_plc_model(m=int(rng.integers(1, 5)), k=int(rng.integers(1, 4)),
                             mean_snr_db=float(rng.uniform(5.0, 20.0)), fit_config=FAST_FIT)
        model = CascadeModel(plc=plc, vlc=random_vlc_model(rng))
        c1, c2, c3 = capacity_terms(model)
        direct = capacity_pdf_form_oracle(model)
        worst = max(worst, abs(c1 + c2 - c3 - direct) / direct)
    check(10, "capacity C1 + C2 - C3 equals direct density-form quadrature (rel 1e-6)",
          worst < 1e-6, f"worst rel dev = {worst:.2e} over 10 randomized configs")


def test_criterion_11_capacity_saturation():
    cfg = recipe("fig5_cap_gvlc30")
    dense = run_metric(cfg, "capacity", SweepSpec("plc_mean_snr_db", 0, 40, 41), with_mc=False)
    values = [row.analytic for row in dense]
    nondecreasing = all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    saturated = values[-1] - values[-2] < 0.01  # C(40 dB) - C(39 dB)
    c40 = values[-1]
    c35 = values[35]
    mc_rows = run_metric(cfg, "capacity", cfg.sweep, with_mc=True)
    mc_ok = all(row.passed for row in mc_rows)
    worst_z = max(row.z for row in mc_rows)
    check(11, "capacity nondecreasing in PLC SNR, saturates by 35-40 dB, MC-matched",
          nondecreasing and saturated and (c40 - c35) < 0.01 and mc_ok,
          f"C(40)-C(35) = {c40 - c35:.2e}, worst z = {worst_z:.2f}")


def test_criterion_12_outage_monotonicity_suite():
    base = recipe("fig3_op_m4_n4").replacing(vlc_mean_snr_db=50.0)
    fast = base.replacing(plc_fit_samples=2_000_000)
    ok = True
    detail = []
    for variable, lo, hi, points, cfg in (
            ("num_relays", 1, 8, 8, base),
            ("num_leds", 1, 8, 8, base),
            ("num_wires", 1, 4, 4, fast),
            ("plc_mean_snr_db", 0, 20, 5, base),
            ("vlc_mean_snr_db", 20, 80, 13, base)):
        rows = run_metric(cfg, "op", SweepSpec(variable, lo, hi, points), with_mc=False)
        values = [row.analytic for row in rows]
        monotone = all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
        ok = ok and monotone
        detail.append(f"{variable}:{'ok' if monotone else 'VIOLATED'}")
    check(12, "outage nonincreasing in M, N, K, PLC SNR and VLC SNR", ok, ", ".join(detail))


def test_criterion_13_validate_determinism(tmp_path):
    outputs = []
    for run_dir in ("first", "second"):
        out = tmp_path / run_dir
        result = subprocess.run(
            [sys.executable, "-m", "plcvlc.cli", "validate", "--out", str(out),
             "--mc", "20000", "--seed", "4242"],
            capture_output=True, text=True, cwd=str(tmp_path))
        assert result.returncode == 0, result.stderr
        blob = b""
        for name in sorted(os.listdir(out)):
            with open(out / name, "rb") as fh:
                blob += name.encode() + b"\0" + fh.read()
        outputs.append(blob)
    check(13, "two validate runs with one seed emit byte-identical CSV sets",
          outputs[0] == outputs[1],
          f"{len(outputs[0])} bytes compared across 13 recipe outputs")
