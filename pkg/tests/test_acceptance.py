"""Acceptance checks, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line (shown even under
output capture) before asserting. Run alone with::

    pytest tests/test_acceptance.py -v
"""

import collections
import math
import time

import numpy as np
import pytest

from afsec import harness, sdp
from afsec.model import (PowerConfig, Receiver, Thresholds, beta_max_squared, crandn,
                         sample_instance, simulate_transmission, snr)
from afsec.numerics import complex_to_real, hermitian_eig, is_psd, min_generalized_eig
from afsec.oracle import brute_force_p1, brute_force_p2
from afsec.p1 import build_p1, forward_transform, inverse_transform, solve_p1
from afsec.p2 import solve_p2_sdr

from conftest import make_instance


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}")
        assert ok, detail
    return emit


def _run(sweep, tmp_path_factory):
    cfg = harness.ExperimentConfig()
    log = harness._InstanceLog()
    run = harness.run_snr_sweep if sweep == "snr" else harness.run_power_sweep
    t0 = time.perf_counter()
    records = run(cfg, instance_log=log)
    elapsed = time.perf_counter() - t0
    path = tmp_path_factory.mktemp(sweep) / "out.csv"
    harness.emit_csv(records, path)
    return cfg, records, log.rows, path.read_bytes(), elapsed


@pytest.fixture(scope="module")
def snr_run(tmp_path_factory):
    return _run("snr", tmp_path_factory)


@pytest.fixture(scope="module")
def power_run(tmp_path_factory):
    return _run("power", tmp_path_factory)


def test_criterion_1_p1_matches_oracle(report):
    power = PowerConfig.uniform(2, 1.0, 10.0, 1.0)
    th = Thresholds(0.01, (0.1,))
    t0 = time.perf_counter()
    worst_rel, worst_ub = 0.0, -math.inf
    for seed in range(50):
        inst = sample_instance(2, 1, power, seed=seed)
        sol = solve_p1(inst, th)
        ref = brute_force_p1(inst, th)
        worst_rel = max(worst_rel, abs(sol.snr_destination - ref.value) / ref.value)
        worst_ub = max(worst_ub, ref.value - sol.relaxed_snr)
    elapsed = time.perf_counter() - t0
    ok = worst_rel <= 0.02 and worst_ub <= 1e-6 and elapsed < 120
    report(1, "P1 vs brute force", ok,
           f"worst rel diff {worst_rel:.2e} (<= 2e-2), max oracle - SDR {worst_ub:.2e} (<= 1e-6), "
           f"{elapsed:.1f}s (< 120s)")


def test_criterion_2_p2_matches_oracle(report):
    th = Thresholds(0.01, (0.05,))
    power = PowerConfig.uniform(2, 1.0, 10.0, 1.0)
    n_feasible, seed = 0, 0
    worst_rel, worst_order, bad_status = 0.0, -math.inf, []
    while n_feasible < 50:
        inst = sample_instance(2, 1, power, seed=seed)
        seed += 1
        sol = solve_p2_sdr(inst, th)
        if sol.status == "infeasible":
            continue
        n_feasible += 1
        ref = brute_force_p2(inst, th)
        if sol.status != "optimal" or not ref.feasible:
            bad_status.append((seed - 1, sol.status, ref.feasible))
            continue
        worst_rel = max(worst_rel, abs(sol.total_power - ref.value) / ref.value)
        worst_order = max(worst_order, sol.lower_bound - sol.sdr_objective,
                          sol.sdr_objective - ref.value)
    ok = not bad_status and worst_rel <= 0.02 and worst_order <= 1e-6
    report(2, "P2 vs brute force", ok,
           f"{n_feasible} feasible of {seed} seeds, worst rel diff {worst_rel:.2e} (<= 2e-2), "
           f"worst ordering excess {worst_order:.2e} (<= 1e-6), unresolved {bad_status}")


def test_criterion_3_scalar_closed_forms(report):
    p1 = solve_p1(make_instance([1.0], [1.0], [[1.0]]), Thresholds(0.01, (0.25,)))
    p2 = solve_p2_sdr(make_instance([1.0], [1.0]), Thresholds(0.5, ()))
    bad = solve_p2_sdr(make_instance([1.0], [1.0], [[1.0]]), Thresholds(0.01, (0.005,)))
    e1 = abs(abs(p1.beta[0]) ** 2 - 1 / 3)
    e2 = abs(p1.snr_destination - 0.25)
    e3 = abs(p2.total_power - 2.0)
    ok = max(e1, e2, e3) <= 1e-6 and bad.status == "infeasible"
    report(3, "scalar closed forms", ok,
           f"|beta|^2 err {e1:.1e}, SNR_d err {e2:.1e}, power err {e3:.1e}, "
           f"contradictory thresholds -> {bad.status}")


def _trend_violations(means, errs, direction):
    out = []
    for i in range(len(means) - 1):
        tol = max(errs[i], errs[i + 1])
        step = means[i + 1] - means[i]
        if direction * step < -tol:
            out.append(i)
    return out


def test_criterion_4_snr_sweep_trends(report, snr_run):
    cfg, records, rows, _, elapsed = snr_run
    by = {(r.P_s, r.gamma_e, r.series): r for r in records}
    ges = sorted(cfg.gamma_e_grid)

    # (a) per instance, on the relaxation value, then on the mean achieved rate
    per = collections.defaultdict(dict)
    for _, P_s, _, ge, series, j, _, _, status, value in rows:
        if series == "sdr_rate":
            per[(P_s, j)][ge] = value
    worst_inst = max(max(v[a] - v[b] for a, b in zip(ges, ges[1:])) / max(v[ges[-1]], 1e-300)
                     for v in per.values())
    mean_viol = [P_s for P_s in cfg.P_s_grid
                 if any(by[(P_s, b, "rate")].mean < by[(P_s, a, "rate")].mean
                        for a, b in zip(ges, ges[1:]))]
    # (b) in P_s, within one standard error
    ps_viol = {ge: _trend_violations([by[(p, ge, "rate")].mean for p in cfg.P_s_grid],
                                     [by[(p, ge, "rate")].stderr for p in cfg.P_s_grid], +1)
               for ge in ges}
    failures = sum(r.n_infeasible for r in records if r.series == "rate")
    ok = worst_inst <= 1e-6 and not mean_viol and not any(ps_viol.values()) and elapsed < 600
    report(4, "rate sweep trends", ok,
           f"max per-instance decrease in gamma_e {worst_inst:.1e} (rel, <= 1e-6), "
           f"P_s cells with mean decrease in gamma_e {mean_viol}, "
           f"P_s trend violations {ps_viol}, solver failures {failures}, {elapsed:.0f}s (< 600s)")


def test_criterion_5_power_sweep_trends(report, power_run):
    cfg, records, rows, _, elapsed = power_run
    by = {(r.P_s, r.series): r for r in records}
    viol = {s: _trend_violations([by[(p, s)].mean for p in cfg.P_s_grid],
                                 [by[(p, s)].stderr for p in cfg.P_s_grid], -1)
            for s in ("sdr", "analytical")}
    vals = collections.defaultdict(dict)
    for _, P_s, _, _, series, j, _, _, status, value in rows:
        if status in ("optimal", "gap-unresolved"):
            vals[(P_s, j)][series] = value
    worst = max((v["analytical"] - v["sdr"]) / v["sdr"] for v in vals.values())
    excluded = max(r.n_infeasible for r in records if r.series == "sdr")
    ok = not any(viol.values()) and worst <= 1e-6
    report(5, "power sweep trends", ok,
           f"increase violations {viol}, max (analytical - SDR)/SDR {worst:.1e} (<= 1e-6), "
           f"infeasible instances per cell <= {excluded}, {elapsed:.0f}s")


def test_criterion_6_transformations(report):
    rng = np.random.default_rng(2024)
    worst_rt = 0.0
    for _ in range(10_000):
        M = int(rng.integers(1, 7))
        omega = crandn(rng, M) * 10 ** rng.uniform(-3, 2)
        back = inverse_transform(forward_transform(omega))
        worst_rt = max(worst_rt, np.linalg.norm(back - omega) / max(1.0, np.linalg.norm(omega)))
        u = forward_transform(omega)
        worst_rt = max(worst_rt, np.linalg.norm(forward_transform(inverse_transform(u)) - u))

    mismatches = 0
    sides = collections.Counter()
    for point in range(1000):
        inst = sample_instance(3, 2, seed=point)
        th = Thresholds(0.01, (0.02, 0.2))
        t = build_p1(inst, th)
        bmax2 = beta_max_squared(inst)
        v = crandn(rng, 3)
        u = v / np.linalg.norm(v) * rng.uniform(0.0, 0.999)
        beta = inverse_transform(u) / inst.h_d
        for k in range(2):
            q = np.real(u.conj() @ t.C[k] @ u) - 1.0
            s = snr(inst, beta, Receiver.eavesdropper(k)) - th.gamma_e[k]
            if abs(q) > 1e-9:
                mismatches += (q <= 0) != (s <= 0)
                sides["eve", q <= 0] += 1
        for i in range(3):
            q = np.real(u.conj() @ t.D[i] @ u) - 1.0
            if abs(q) > 1e-9:
                mismatches += (q <= 0) != (abs(beta[i]) ** 2 <= bmax2[i])
                sides["cap", q <= 0] += 1
    both = all(sides[key] > 0 for key in [("eve", True), ("eve", False), ("cap", True), ("cap", False)])
    ok = worst_rt <= 1e-10 and mismatches == 0 and both
    report(6, "transformation suite", ok,
           f"worst round trip {worst_rt:.1e} (<= 1e-10), equivalence mismatches {mismatches}, "
           f"sides exercised {dict(sides)}")


def test_criterion_7_numerics(report):
    rng = np.random.default_rng(7)
    Z = rng.standard_normal((10, 10)) + 1j * rng.standard_normal((10, 10))
    A = (Z + Z.conj().T) / 2
    recon = np.linalg.norm(hermitian_eig(A).reconstruct() - A, 2) / np.linalg.norm(A, 2)

    W = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    P = W @ W.conj().T + np.eye(4)
    W = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    Q = W @ W.conj().T + np.eye(4)
    lam, v = min_generalized_eig(P, Q)
    gen_res = np.linalg.norm(P @ v - lam * Q @ v)

    psd_mismatch = 0
    for trial in range(100):
        n = 1 + trial % 8
        Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        X = Z @ Z.conj().T if trial % 2 else (Z + Z.conj().T) / 2
        psd_mismatch += is_psd(X) != is_psd(complex_to_real(X))

    s1 = sdp.solve(sdp.SDPProblem(np.eye(1), "min", [sdp.Constraint(np.eye(1), ">=", 1.0)]))
    s2 = sdp.solve(sdp.SDPProblem(np.diag([1.0, 0.0]), "max", [sdp.Constraint(np.eye(2), "<=", 1.0)]))
    sdp_err = max(abs(s1.objective_value - 1), np.max(np.abs(s1.X - 1)),
                  abs(s2.objective_value - 1), np.max(np.abs(s2.X - np.diag([1.0, 0.0]))))
    ok = recon < 1e-10 and gen_res < 1e-9 and psd_mismatch == 0 and sdp_err <= 1e-6 \
        and s1.optimal and s2.optimal
    report(7, "numerics suite", ok,
           f"reconstruction {recon:.1e} (< 1e-10 rel), generalized residual {gen_res:.1e} (< 1e-9), "
           f"PSD mismatches {psd_mismatch}/100, SDP example error {sdp_err:.1e} (<= 1e-6)")


def test_criterion_8_signal_level(report):
    rng = np.random.default_rng(88)
    worst = 0.0
    for trial in range(20):
        M, K = int(rng.integers(1, 6)), int(rng.integers(1, 4))
        inst = sample_instance(M, K, PowerConfig.uniform(M, float(rng.uniform(0.5, 20))), seed=1000 + trial)
        beta = crandn(rng, M) * np.sqrt(beta_max_squared(inst)) * rng.uniform(0.1, 1.0)
        rx = inst.receivers()[trial % (K + 1)]
        exact = snr(inst, beta, rx)
        emp = simulate_transmission(inst, beta, rx, n_symbols=100_000, seed=trial)
        worst = max(worst, abs(emp - exact) / exact)
    report(8, "signal-level simulation", worst < 0.05, f"worst relative error {worst:.2e} (< 5e-2) over 20 triples")


def test_criterion_9_deterministic_csv(report, snr_run, power_run, tmp_path_factory):
    same = {}
    for name, first in (("snr", snr_run), ("power", power_run)):
        again = _run(name, tmp_path_factory)
        same[name] = again[3] == first[3]
    report(9, "byte-identical sweeps", all(same.values()), f"identical: {same}")
