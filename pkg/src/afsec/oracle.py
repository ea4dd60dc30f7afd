"""Brute-force reference solutions for networks with at most two relays.

Grid points are taken over per-relay magnitudes ``|beta_i| in [0, beta_max_i]``
and relative phases (the first relay's phase is fixed to zero, since every
SNR is invariant to a common phase). Each grid point fixes a direction; along
that ray every SNR is monotone in the scale, so the best point on the ray has
a closed form:

* maximizing destination SNR: the largest scale allowed by the eavesdropper
  and amplitude caps;
* minimizing power: the smallest scale meeting the destination threshold,
  kept only if it respects the caps.

After each round the grid shrinks tenfold around the incumbent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import NetworkInstance, Thresholds, beta_max_squared, relay_power, snr

# keep returned points strictly inside the feasible set despite rounding
_EDGE = 1e-12


@dataclass(frozen=True)
class SearchGrid:
    magnitude_points: int = 60
    phase_points: int = 240
    refinement_rounds: int = 2

    def __post_init__(self):
        if min(self.magnitude_points, self.phase_points) < 1 or self.refinement_rounds < 0:
            raise ValueError("grid sizes must be at least 1 and rounds nonnegative")


@dataclass
class OracleResult:
    beta: np.ndarray | None
    value: float
    feasible: bool


def _guard(instance: NetworkInstance) -> None:
    if instance.M > 2:
        raise ValueError(f"brute-force search is limited to M <= 2 relays, got M={instance.M}")


def _candidates(bmax: np.ndarray, center, width, grid: SearchGrid) -> np.ndarray:
    """Grid of beta vectors (rows) around ``center`` = (magnitudes, phase of relay 2)."""
    axes = []
    for i in range(bmax.size):
        if center is None:
            lo, hi = 0.0, bmax[i]
        else:
            lo = max(0.0, center[0][i] - width[0][i] / 2)
            hi = min(bmax[i], center[0][i] + width[0][i] / 2)
        axes.append(np.linspace(lo, hi, grid.magnitude_points))
    if bmax.size == 2:
        if center is None:
            ph = np.linspace(0.0, 2 * math.pi, grid.phase_points, endpoint=False)
        else:
            ph = center[1] + np.linspace(-width[1] / 2, width[1] / 2, grid.phase_points)
        m1, m2, p2 = np.meshgrid(axes[0], axes[1], ph, indexing="ij")
        return np.column_stack([m1.ravel() + 0j, m2.ravel() * np.exp(1j * p2.ravel())])
    return axes[0][:, None] + 0j


def _quadratics(instance: NetworkInstance, B: np.ndarray, h_l: np.ndarray):
    """Per-row ``|sum h_s b h_l|^2`` and ``sum |b h_l|^2``."""
    num = np.abs(B @ (instance.h_s * h_l)) ** 2
    den = (np.abs(B) ** 2) @ (np.abs(h_l) ** 2)
    return num, den


def _cap_scale2(instance: NetworkInstance, B: np.ndarray, gamma_e: np.ndarray) -> np.ndarray:
    """Largest squared scale per row allowed by the eavesdropper and amplitude caps."""
    bmax2 = beta_max_squared(instance)
    mag2 = np.abs(B) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        c2 = np.min(np.where(mag2 > 0, bmax2 / mag2, np.inf), axis=1)
        p = instance.power
        for k in range(instance.K):
            g = gamma_e[k] * p.noise_variance / p.source_power
            num, den = _quadratics(instance, B, instance.h_e[:, k])
            lim = np.where(num > g * den, g / (num - g * den), np.inf)
            c2 = np.minimum(c2, lim)
    return c2


def _search(instance, grid, score):
    """Refining grid search; ``score(B)`` returns (objective to maximize, scaled rows)."""
    bmax = np.sqrt(beta_max_squared(instance))
    center, width = None, None
    best_val, best_beta = -math.inf, None
    for _ in range(grid.refinement_rounds + 1):
        B = _candidates(bmax, center, width, grid)
        val, scaled = score(B)
        j = int(np.argmax(val))
        if val[j] > best_val:
            best_val, best_beta = float(val[j]), scaled[j]
        if best_beta is None:
            break
        mags = np.abs(best_beta)
        phase = float(np.angle(best_beta[1]) - np.angle(best_beta[0])) if bmax.size == 2 else 0.0
        if width is None:
            width = (bmax / 10.0, 2 * math.pi / 10.0)
        else:
            width = (width[0] / 10.0, width[1] / 10.0)
        center = (mags, phase)
    return best_val, best_beta


def brute_force_p1(instance: NetworkInstance, thresholds: Thresholds,
                   grid: SearchGrid = SearchGrid()) -> OracleResult:
    """Best destination SNR over the grid; always feasible (``beta = 0`` qualifies)."""
    _guard(instance)
    gamma_e = thresholds.for_instance(instance)
    h_d = instance.h_d

    def score(B):
        c2 = np.minimum(_cap_scale2(instance, B, gamma_e), 1e300)
        c = np.sqrt(c2) * (1.0 - _EDGE)
        scaled = B * c[:, None]
        num, den = _quadratics(instance, scaled, h_d)
        val = num / (1.0 + den)
        val[~np.isfinite(val)] = -math.inf
        return val, scaled

    _, beta = _search(instance, grid, score)
    if beta is None:
        beta = np.zeros(instance.M, dtype=complex)
    return OracleResult(beta, snr(instance, beta), True)


def brute_force_p2(instance: NetworkInstance, thresholds: Thresholds,
                   grid: SearchGrid = SearchGrid()) -> OracleResult:
    """Least total relay power over the grid, or an infeasible result."""
    _guard(instance)
    gamma_e = thresholds.for_instance(instance)
    gd = thresholds.normalized_d(instance.power)

    def score(B):
        num, den = _quadratics(instance, B, instance.h_d)
        with np.errstate(divide="ignore", invalid="ignore"):
            need2 = np.where(num > gd * den, gd / (num - gd * den), np.inf)
        need2 = need2 * (1.0 + _EDGE)
        ok = np.isfinite(need2) & (need2 <= _cap_scale2(instance, B, gamma_e))
        scaled = B * np.sqrt(np.where(ok, need2, 0.0))[:, None]
        power = (np.abs(scaled) ** 2) @ (np.abs(instance.h_s) ** 2 * instance.power.source_power
                                         + instance.power.noise_variance)
        return np.where(ok, -power, -math.inf), scaled

    val, beta = _search(instance, grid, score)
    if beta is None or not math.isfinite(val):
        return OracleResult(None, math.inf, False)
    return OracleResult(beta, relay_power(instance, beta), True)
