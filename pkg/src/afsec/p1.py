"""Destination SNR maximization under eavesdropper SNR caps.

The problem in the relay coefficients ``beta`` is a ratio of quadratics. The
change of variables ``omega_i = beta_i h_id`` followed by
``u = omega / sqrt(1 + |omega|^2)`` turns every ratio into a plain
quadratic form, giving a homogeneous QCQP in ``u``::

    max |h_s^T u|^2   s.t.  u^H C_k u <= 1  (eavesdroppers),
                            u^H D_i u <= 1  (relay power caps)

which is lifted to ``U = u u^H`` and solved as an SDP.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import sdp
from .model import (DESTINATION, NetworkInstance, Receiver, Thresholds, achievable_rate,
                    beta_max_squared, secure_rate, snr)
from .numerics import is_psd


class DegenerateChannelError(ValueError):
    """A relay with a usable power budget has a zero relay-to-destination gain."""


def forward_transform(omega) -> np.ndarray:
    """``u = omega / sqrt(1 + |omega|^2)``; maps C^M onto the open unit ball."""
    omega = np.asarray(omega, dtype=complex)
    return omega / math.sqrt(1.0 + float(np.vdot(omega, omega).real))


def inverse_transform(u) -> np.ndarray:
    """``omega = u / sqrt(1 - |u|^2)``; requires ``|u| < 1``."""
    u = np.asarray(u, dtype=complex)
    nrm2 = float(np.vdot(u, u).real)
    if not nrm2 < 1.0:
        raise ValueError(f"inverse transform needs |u| < 1, got |u|^2 = {nrm2}")
    return u / math.sqrt(1.0 - nrm2)


@dataclass
class TransformedP1:
    """Data of the transformed problem on the relays that can transmit.

    ``active`` marks the relays kept (nonzero power cap); all matrices are
    indexed over the active relays only.
    """

    objective_vector: np.ndarray
    C: np.ndarray
    D: np.ndarray
    convex_case: np.ndarray
    rho: np.ndarray
    gamma_e_normalized: np.ndarray
    active: np.ndarray

    @property
    def n(self) -> int:
        return self.objective_vector.shape[0]

    def objective_matrix(self) -> np.ndarray:
        a = self.objective_vector
        return np.outer(a, a.conj())

    def sdp_problem(self) -> sdp.SDPProblem:
        cons = [sdp.Constraint(Ck, "<=", 1.0) for Ck in self.C]
        cons += [sdp.Constraint(Di, "<=", 1.0) for Di in self.D]
        return sdp.SDPProblem(self.objective_matrix(), "max", cons)


def build_p1(instance: NetworkInstance, thresholds: Thresholds) -> TransformedP1:
    """Assemble ``C_k``, ``D_i`` and the objective vector.

    ``C_k = g_k g_k^H / gamma'_k + I - diag(|rho_ik|^2)`` with
    ``rho_ik = h_ik / h_id`` and ``g_k = conj(h_s * rho_k)``;
    ``D_i = I + e_i e_i^T / (|h_id|^2 beta_max_i^2)``.
    Relays whose power cap is zero are dropped.
    """
    bmax2 = beta_max_squared(instance)
    active = bmax2 > 0
    if not np.all(active):
        warnings.warn(f"relays {np.flatnonzero(~active).tolist()} have zero power "
                      "budget and are excluded", stacklevel=2)
    h_d = instance.h_d[active]
    if np.any(h_d == 0):
        raise DegenerateChannelError("relay-to-destination gain is zero for an active relay")
    h_s = instance.h_s[active]
    h_e = instance.h_e[active, :]
    n = h_s.shape[0]
    gamma_n = thresholds.normalized_e(instance)

    rho = h_e / h_d[:, None]
    C = np.empty((instance.K, n, n), dtype=complex)
    convex = np.empty(instance.K, dtype=bool)
    for k in range(instance.K):
        g = np.conj(h_s * rho[:, k])
        C[k] = np.outer(g, g.conj()) / gamma_n[k] + np.eye(n) - np.diag(np.abs(rho[:, k]) ** 2)
        convex[k] = is_psd(C[k])
    D = np.empty((n, n, n), dtype=complex)
    for i in range(n):
        D[i] = np.eye(n)
        D[i, i, i] += 1.0 / (abs(h_d[i]) ** 2 * bmax2[active][i])
    return TransformedP1(np.conj(h_s), C, D, convex, rho, gamma_n, active)


def report_convexity(t: TransformedP1) -> bool:
    """True when every eavesdropper constraint is convex (all ``C_k`` PSD)."""
    return bool(np.all(t.convex_case))


@dataclass
class P1Solution:
    beta: np.ndarray
    snr_destination: float
    snr_eavesdroppers: np.ndarray
    rank1_gap: float
    secrecy_rate: float
    status: str
    relaxed_snr: float = math.nan
    shrink_factor: float = 1.0
    sdp_iterations: int = 0
    convex: bool = False

    @property
    def rate(self) -> float:
        return achievable_rate(self.snr_destination)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "beta": [[float(z.real), float(z.imag)] for z in self.beta],
            "snr_destination": self.snr_destination,
            "snr_eavesdroppers": [float(x) for x in self.snr_eavesdroppers],
            "relaxed_snr": self.relaxed_snr,
            "rate_log2": self.rate,
            "secrecy_rate": self.secrecy_rate,
            "rank1_gap": self.rank1_gap,
            "shrink_factor": self.shrink_factor,
            "convex": self.convex,
        }


def _max_feasible_scale(instance: NetworkInstance, beta: np.ndarray,
                        gamma_e: np.ndarray, bmax2: np.ndarray) -> float:
    """Largest ``c >= 0`` keeping ``c * beta`` within every eavesdropper and power cap."""
    c2 = math.inf
    nz = np.abs(beta) > 0
    if np.any(nz):
        c2 = float(np.min(bmax2[nz] / np.abs(beta[nz]) ** 2))
    p = instance.power
    for k in range(instance.K):
        h = instance.h_e[:, k]
        num = abs(np.sum(instance.h_s * beta * h)) ** 2
        den = float(np.sum(np.abs(beta * h) ** 2))
        g = gamma_e[k] * p.noise_variance / p.source_power
        if num > g * den:
            c2 = min(c2, g / (num - g * den))
    return math.sqrt(c2)


def solve_p1(instance: NetworkInstance, thresholds: Thresholds,
             settings: sdp.SolverSettings | None = None) -> P1Solution:
    """Maximize the destination SNR subject to the eavesdropper thresholds.

    Solves the lifted SDP, takes the principal rank-one factor ``u``, maps
    it back to ``beta`` and, if rounding left any constraint violated,
    shrinks ``beta`` by the smallest uniform factor that restores
    feasibility. ``thresholds.gamma_d`` only enters the reported secrecy
    rate.
    """
    t = build_p1(instance, thresholds)
    gamma_e = thresholds.for_instance(instance)
    bmax2 = beta_max_squared(instance)
    p = instance.power
    beta = np.zeros(instance.M, dtype=complex)
    status, gap, relaxed, iters = "optimal", 0.0, 0.0, 0

    if t.n > 0:
        sol = sdp.solve(t.sdp_problem(), settings)
        status, iters = sol.status, sol.iterations
        if sol.status == "infeasible":
            # u = 0 is always feasible
            raise RuntimeError("SDP solver reported an always-feasible problem as infeasible")
        relaxed = sol.objective_value * p.source_power / p.noise_variance
        u, gap = sdp.extract_rank1(sol.X)
        z = np.sum(np.conj(t.objective_vector) * u)
        if abs(z) > 0:
            u = u * (np.conj(z) / abs(z))
        nrm2 = float(np.vdot(u, u).real)
        if nrm2 >= 1.0:
            u = u * math.sqrt((1.0 - 1e-12) / nrm2)
        omega = inverse_transform(u)
        beta[t.active] = omega / instance.h_d[t.active]

    shrink = 1.0
    c = _max_feasible_scale(instance, beta, gamma_e, bmax2)
    if c < 1.0:
        shrink = c * (1.0 - 1e-12)
        beta = beta * shrink

    snr_d = snr(instance, beta, DESTINATION)
    snr_e = np.array([snr(instance, beta, Receiver.eavesdropper(k)) for k in range(instance.K)])
    return P1Solution(
        beta=beta,
        snr_destination=snr_d,
        snr_eavesdroppers=snr_e,
        rank1_gap=gap,
        secrecy_rate=secure_rate(snr_d, thresholds.gamma_d),
        status=status,
        relaxed_snr=relaxed,
        shrink_factor=shrink,
        sdp_iterations=iters,
        convex=report_convexity(t),
    )
