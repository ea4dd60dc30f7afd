"""Total relay power minimization with SNR constraints.

Minimize ``beta^H Q0 beta`` subject to a destination SNR floor,
eavesdropper SNR caps and per-relay amplitude caps. In quadratic form::

    Q0  = diag(|h_si|^2 P_s + sigma^2)
    Q_l = a_l a_l^H - gamma'_l diag(|h_il|^2),   a_l = conj(h_s * h_l)

with ``gamma'_l = gamma_l sigma^2 / P_s``. The SDP relaxation in
``B = beta beta^H`` gives the main solution; dropping everything but the
destination constraint gives a generalized-eigenvalue lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sdp
from .model import (DESTINATION, NetworkInstance, Receiver, Thresholds, beta_max_squared,
                    crandn, relay_power, snr)
from .numerics import min_generalized_eig, principal_component

FEASIBILITY_RTOL = 1e-6


@dataclass
class P2Matrices:
    Q0: np.ndarray
    QD: np.ndarray
    QE: np.ndarray
    gamma_d_normalized: float
    gamma_e_normalized: np.ndarray


def build_p2(instance: NetworkInstance, thresholds: Thresholds) -> P2Matrices:
    p = instance.power
    Q0 = np.diag(np.abs(instance.h_s) ** 2 * p.source_power + p.noise_variance).astype(complex)
    gd = thresholds.normalized_d(p)
    ge = thresholds.normalized_e(instance)

    def q(h_l, g):
        a = np.conj(instance.h_s * h_l)
        return np.outer(a, a.conj()) - g * np.diag(np.abs(h_l) ** 2)

    QD = q(instance.h_d, gd)
    QE = np.array([q(instance.h_e[:, k], ge[k]) for k in range(instance.K)],
                  dtype=complex).reshape(instance.K, instance.M, instance.M)
    return P2Matrices(Q0, QD, QE, gd, ge)


@dataclass(frozen=True)
class FeasibilityReport:
    """Constraint slacks for a scaling vector (positive means satisfied).

    ``destination`` is ``snr_d - gamma_d``, ``eavesdroppers[k]`` is
    ``gamma_k - snr_k``, ``caps[i]`` is ``beta_max_i^2 - |beta_i|^2``.
    """

    snr_destination: float
    snr_eavesdroppers: np.ndarray
    destination: float
    eavesdroppers: np.ndarray
    caps: np.ndarray
    gamma_d: float
    gamma_e: np.ndarray
    beta_max_sq: np.ndarray

    def feasible(self, rtol: float = FEASIBILITY_RTOL) -> bool:
        return (self.destination >= -rtol * self.gamma_d
                and bool(np.all(self.eavesdroppers >= -rtol * self.gamma_e))
                and bool(np.all(self.caps >= -rtol * self.beta_max_sq)))

    def to_dict(self) -> dict:
        return {"destination": self.destination,
                "eavesdroppers": [float(x) for x in self.eavesdroppers],
                "caps": [float(x) for x in self.caps]}


def check_feasibility(instance: NetworkInstance, beta, thresholds: Thresholds) -> FeasibilityReport:
    beta = np.asarray(beta, dtype=complex)
    ge = thresholds.for_instance(instance)
    bmax2 = beta_max_squared(instance)
    sd = snr(instance, beta, DESTINATION)
    se = np.array([snr(instance, beta, Receiver.eavesdropper(k)) for k in range(instance.K)])
    return FeasibilityReport(sd, se, sd - thresholds.gamma_d, ge - se,
                             bmax2 - np.abs(beta) ** 2, thresholds.gamma_d, ge, bmax2)


def analytical_relaxed(instance: NetworkInstance, thresholds: Thresholds) -> tuple[float, np.ndarray]:
    """Power lower bound from the destination constraint alone.

    Minimizes ``beta^H Q0 beta`` over ``beta^H QD beta = gamma'_d``: the value
    is ``gamma'_d`` times the smallest positive-branch eigenvalue of
    ``QD^{-1} Q0``. Eavesdropper and amplitude caps are ignored, so the
    returned ``beta`` need not be feasible.

    Raises
    ------
    SingularPencilError
        ``QD`` is singular.
    NoPositiveBranchError
        No ``beta`` reaches the destination threshold.
    """
    mats = build_p2(instance, thresholds)
    lam, v = min_generalized_eig(mats.Q0, mats.QD)
    gd = mats.gamma_d_normalized
    return gd * lam, v * math.sqrt(gd)


@dataclass
class P2Solution:
    beta: np.ndarray
    total_power: float
    sdr_objective: float
    lower_bound: float
    rank1_gap: float
    status: str
    report: FeasibilityReport | None = None
    recovery: str = "principal"
    sdp_iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "beta": [[float(z.real), float(z.imag)] for z in self.beta],
            "total_power": self.total_power,
            "sdr_objective": self.sdr_objective,
            "lower_bound": self.lower_bound,
            "rank1_gap": self.rank1_gap,
            "recovery": self.recovery,
            "slacks": self.report.to_dict() if self.report is not None else None,
        }


def _scale_to_destination(v: np.ndarray, QD: np.ndarray, gd: float) -> np.ndarray | None:
    q = float(np.real(np.vdot(v, QD @ v)))
    if q <= 0:
        return None
    return v * math.sqrt(gd / q)


def solve_p2_sdr(instance: NetworkInstance, thresholds: Thresholds,
                 settings: sdp.SolverSettings | None = None,
                 n_randomizations: int = 200, seed: int = 0) -> P2Solution:
    """Minimize total relay power through the SDP relaxation.

    The principal eigenvector of the relaxed ``B`` is rescaled so the
    destination constraint holds with equality. If that point breaks an
    eavesdropper or amplitude cap, ``n_randomizations`` Gaussian draws with
    covariance ``B`` are rescaled the same way and the cheapest feasible one
    is kept; failing that the status is ``"gap-unresolved"``.
    """
    mats = build_p2(instance, thresholds)
    bmax2 = beta_max_squared(instance)
    gd = mats.gamma_d_normalized
    try:
        lower = analytical_relaxed(instance, thresholds)[0]
    except (np.linalg.LinAlgError, ValueError):
        lower = math.nan

    # relays with no power budget must stay silent
    active = bmax2 > 0
    idx = np.flatnonzero(active)
    sub = np.ix_(idx, idx)
    cons = [sdp.Constraint(mats.QD[sub], ">=", gd)]
    cons += [sdp.Constraint(Qk[sub], "<=", g) for Qk, g in zip(mats.QE, mats.gamma_e_normalized)]
    for j, i in enumerate(idx):
        E = np.zeros((idx.size, idx.size))
        E[j, j] = 1.0
        cons.append(sdp.Constraint(E, "<=", bmax2[i]))
    zero = np.zeros(instance.M, dtype=complex)
    if idx.size == 0:
        return P2Solution(zero, math.nan, math.nan, lower, 0.0, "infeasible")

    sol = sdp.solve(sdp.SDPProblem(mats.Q0[sub], "min", cons), settings)
    if sol.status != "optimal":
        status = "infeasible" if sol.status == "infeasible" else sol.status
        return P2Solution(zero, math.nan, math.nan, lower, 0.0, status,
                          sdp_iterations=sol.iterations)

    _, gap = sdp.extract_rank1(sol.X)
    _, v = principal_component(sol.X)

    def lift(x):
        full = np.zeros(instance.M, dtype=complex)
        full[idx] = x
        return full

    QD_sub = mats.QD[sub]
    beta = _scale_to_destination(v, QD_sub, gd)
    recovery = "principal"
    best = None
    if beta is not None:
        beta = lift(beta)
        report = check_feasibility(instance, beta, thresholds)
        if report.feasible():
            best = (beta, report)

    if best is None and n_randomizations > 0:
        rng = np.random.default_rng(seed)
        w, V = np.linalg.eigh(sol.X)
        F = V * np.sqrt(np.clip(w, 0.0, None))
        best_power = math.inf
        for _ in range(n_randomizations):
            cand = _scale_to_destination(F @ crandn(rng, idx.size), QD_sub, gd)
            if cand is None:
                continue
            cand = lift(cand)
            power = relay_power(instance, cand)
            if power >= best_power:
                continue
            report = check_feasibility(instance, cand, thresholds)
            if report.feasible():
                best, best_power = (cand, report), power
        if best is not None:
            recovery = "randomized"

    if best is None:
        fallback = beta if beta is not None else zero
        return P2Solution(fallback, relay_power(instance, fallback), sol.objective_value, lower,
                          gap, "gap-unresolved",
                          check_feasibility(instance, fallback, thresholds),
                          recovery="none", sdp_iterations=sol.iterations)
    beta, report = best
    return P2Solution(beta, relay_power(instance, beta), sol.objective_value, lower, gap,
                      "optimal", report, recovery, sol.iterations)
