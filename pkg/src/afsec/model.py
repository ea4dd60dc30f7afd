"""Two-hop amplify-and-forward network with eavesdroppers.

A source transmits to ``M`` relays; each relay multiplies what it hears by a
complex coefficient ``beta_i`` and forwards it. The forwarded signals add up
at the destination and at each of ``K`` eavesdroppers. There is no direct
source link to any receiver.

Channel gains follow the circularly-symmetric CN(0, 1) convention: real and
imaginary parts are independent N(0, 1/2), so ``E|h|^2 = 1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def crandn(rng: np.random.Generator, size) -> np.ndarray:
    """CN(0, 1) samples (total variance one)."""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class PowerConfig:
    """Source power ``P_s``, per-relay power caps ``P_i`` and noise variance."""

    source_power: float
    relay_power_caps: np.ndarray
    noise_variance: float = 1.0

    def __post_init__(self):
        caps = np.atleast_1d(np.asarray(self.relay_power_caps, dtype=float)).copy()
        caps.setflags(write=False)
        object.__setattr__(self, "relay_power_caps", caps)
        if not self.source_power > 0:
            raise ValueError("source power must be positive")
        if not self.noise_variance > 0:
            raise ValueError("noise variance must be positive")
        if np.any(caps < 0) or not np.all(np.isfinite(caps)):
            raise ValueError("relay power caps must be finite and nonnegative")

    @classmethod
    def uniform(cls, M: int, source_power: float, relay_power: float = 10.0,
                noise_variance: float = 1.0) -> "PowerConfig":
        return cls(source_power, np.full(M, float(relay_power)), noise_variance)

    def with_source_power(self, source_power: float) -> "PowerConfig":
        return PowerConfig(source_power, self.relay_power_caps, self.noise_variance)


@dataclass(frozen=True, eq=False)
class NetworkInstance:
    """All channel gains of one network realization.

    Attributes
    ----------
    h_s : (M,) complex
        Source to relay gains.
    h_d : (M,) complex
        Relay to destination gains.
    h_e : (M, K) complex
        Relay to eavesdropper gains, one column per eavesdropper.
    power : PowerConfig
    """

    h_s: np.ndarray
    h_d: np.ndarray
    h_e: np.ndarray
    power: PowerConfig

    def __post_init__(self):
        h_s = np.atleast_1d(np.asarray(self.h_s, dtype=complex)).copy()
        h_d = np.atleast_1d(np.asarray(self.h_d, dtype=complex)).copy()
        M = h_s.shape[0]
        h_e = np.asarray(self.h_e, dtype=complex)
        h_e = h_e.reshape(M, -1).copy() if h_e.size else np.zeros((M, 0), dtype=complex)
        if M < 1:
            raise ValueError("an instance needs at least one relay")
        if h_s.ndim != 1 or h_d.shape != (M,):
            raise ValueError("source and destination gains must both have length M")
        if self.power.relay_power_caps.shape != (M,):
            raise ValueError("need one relay power cap per relay")
        for a in (h_s, h_d, h_e):
            if not np.all(np.isfinite(a)):
                raise ValueError("channel gains must be finite")
            a.setflags(write=False)
        object.__setattr__(self, "h_s", h_s)
        object.__setattr__(self, "h_d", h_d)
        object.__setattr__(self, "h_e", h_e)

    @property
    def M(self) -> int:
        return self.h_s.shape[0]

    @property
    def K(self) -> int:
        return self.h_e.shape[1]

    def with_power(self, power: PowerConfig) -> "NetworkInstance":
        return NetworkInstance(self.h_s, self.h_d, self.h_e, power)

    def with_source_power(self, source_power: float) -> "NetworkInstance":
        return self.with_power(self.power.with_source_power(source_power))

    def receivers(self) -> list["Receiver"]:
        return [DESTINATION] + [Receiver.eavesdropper(k) for k in range(self.K)]

    # JSON form: complex numbers as [re, im], h_e row-major K x M.
    def to_dict(self) -> dict:
        pair = lambda z: [float(z.real), float(z.imag)]  # noqa: E731
        return {
            "M": self.M,
            "K": self.K,
            "h_s": [pair(z) for z in self.h_s],
            "h_d": [pair(z) for z in self.h_d],
            "h_e": [[pair(z) for z in row] for row in self.h_e.T],
            "P_s": float(self.power.source_power),
            "P_i": [float(p) for p in self.power.relay_power_caps],
            "sigma2": float(self.power.noise_variance),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkInstance":
        def cvec(pairs):
            a = np.asarray(pairs, dtype=float).reshape(-1, 2)
            return a[:, 0] + 1j * a[:, 1]

        M, K = int(d["M"]), int(d["K"])
        h_e_rows = [cvec(row) for row in d.get("h_e", [])]
        h_e = np.array(h_e_rows, dtype=complex).reshape(K, M).T if K else np.zeros((M, 0), complex)
        P_i = d["P_i"]
        if np.isscalar(P_i):
            P_i = [P_i] * M
        inst = cls(cvec(d["h_s"]), cvec(d["h_d"]), h_e,
                   PowerConfig(float(d["P_s"]), P_i, float(d.get("sigma2", 1.0))))
        if inst.M != M or inst.K != K:
            raise ValueError(f"declared dimensions M={M}, K={K} do not match the gains")
        return inst

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "NetworkInstance":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class Thresholds:
    """Linear SNR thresholds: ``gamma_d`` for the destination, ``gamma_e`` per eavesdropper."""

    gamma_d: float
    gamma_e: tuple = field(default_factory=tuple)

    def __post_init__(self):
        ge = tuple(float(g) for g in np.atleast_1d(self.gamma_e))
        object.__setattr__(self, "gamma_e", ge)
        if not self.gamma_d > 0:
            raise ValueError("gamma_d must be positive")
        if any(not g > 0 for g in ge):
            raise ValueError("eavesdropper thresholds must be positive")

    @classmethod
    def uniform(cls, gamma_d: float, gamma_e: float, K: int) -> "Thresholds":
        return cls(gamma_d, (gamma_e,) * K)

    def for_instance(self, instance: NetworkInstance) -> np.ndarray:
        """Eavesdropper thresholds as an array of length K (a single value is broadcast)."""
        ge = np.asarray(self.gamma_e, dtype=float)
        if ge.size == 1 and instance.K != 1:
            ge = np.full(instance.K, ge[0])
        if ge.size != instance.K:
            raise ValueError(f"got {ge.size} eavesdropper thresholds for K={instance.K}")
        return ge

    def normalized_d(self, power: PowerConfig) -> float:
        return self.gamma_d * power.noise_variance / power.source_power

    def normalized_e(self, instance: NetworkInstance) -> np.ndarray:
        p = instance.power
        return self.for_instance(instance) * p.noise_variance / p.source_power


@dataclass(frozen=True)
class Receiver:
    """The destination, or eavesdropper ``index`` (0-based)."""

    kind: str = "destination"
    index: int | None = None

    @classmethod
    def eavesdropper(cls, k: int) -> "Receiver":
        if k < 0:
            raise ValueError("eavesdropper index must be nonnegative")
        return cls("eavesdropper", int(k))

    def gains(self, instance: NetworkInstance) -> np.ndarray:
        if self.kind == "destination":
            return instance.h_d
        if self.index is None or not 0 <= self.index < instance.K:
            raise ValueError(f"no eavesdropper {self.index} in an instance with K={instance.K}")
        return instance.h_e[:, self.index]

    def __str__(self):
        return "D" if self.kind == "destination" else f"E{self.index}"


DESTINATION = Receiver()


def sample_instance(M: int, K: int, power: PowerConfig | None = None,
                    seed: int | None = 0) -> NetworkInstance:
    """Draw every gain i.i.d. CN(0, 1) from a PCG64 generator seeded with ``seed``.

    Draw order is ``h_s``, ``h_d``, then ``h_e`` (row-major M x K).
    """
    if M < 1:
        raise ValueError(f"invalid dimension M={M}")
    if K < 0:
        raise ValueError(f"invalid dimension K={K}")
    if power is None:
        power = PowerConfig.uniform(M, 1.0)
    rng = np.random.default_rng(seed)
    h_s = crandn(rng, M)
    h_d = crandn(rng, M)
    h_e = crandn(rng, (M, K))
    return NetworkInstance(h_s, h_d, h_e, power)


def as_beta(instance: NetworkInstance, beta) -> np.ndarray:
    b = np.atleast_1d(np.asarray(beta, dtype=complex))
    if b.shape != (instance.M,):
        raise ValueError(f"scaling vector has shape {b.shape}, expected ({instance.M},)")
    if not np.all(np.isfinite(b)):
        raise ValueError("scaling vector has non-finite entries")
    return b


def beta_max_squared(instance: NetworkInstance) -> np.ndarray:
    """Per-relay amplitude cap ``P_i / (|h_si|^2 P_s + sigma^2)``."""
    p = instance.power
    return p.relay_power_caps / (np.abs(instance.h_s) ** 2 * p.source_power + p.noise_variance)


def effective_channel(instance: NetworkInstance, receiver: Receiver = DESTINATION) -> np.ndarray:
    """Entrywise product ``h_si * h_il``; the received signal amplitude is ``g @ beta``."""
    return instance.h_s * receiver.gains(instance)


def channel_diag(instance: NetworkInstance, receiver: Receiver = DESTINATION) -> np.ndarray:
    """Diagonal matrix of ``|h_il|^2``."""
    return np.diag(np.abs(receiver.gains(instance)) ** 2)


def snr(instance: NetworkInstance, beta, receiver: Receiver = DESTINATION) -> float:
    """Received SNR ``|sum h_si b_i h_il|^2 / (1 + sum |b_i h_il|^2) * P_s / sigma^2``."""
    b = as_beta(instance, beta)
    h_l = receiver.gains(instance)
    num = abs(np.sum(instance.h_s * b * h_l)) ** 2
    den = 1.0 + float(np.sum(np.abs(b * h_l) ** 2))
    p = instance.power
    return float(num / den * p.source_power / p.noise_variance)


def relay_power(instance: NetworkInstance, beta) -> float:
    """Total transmit power ``sum |b_i|^2 (|h_si|^2 P_s + sigma^2)`` of all relays."""
    b = as_beta(instance, beta)
    p = instance.power
    return float(np.sum(np.abs(b) ** 2 * (np.abs(instance.h_s) ** 2 * p.source_power
                                          + p.noise_variance)))


def achievable_rate(snr_value: float) -> float:
    """``log2(1 + snr)`` in bits per channel use."""
    if snr_value < 0:
        raise ValueError("SNR must be nonnegative")
    return math.log2(1.0 + snr_value)


def secure_rate(snr_d: float, gamma_d: float) -> float:
    """Rate the source can use securely given the optimal destination SNR.

    ``0.5 * log2(1 + snr_d * [snr_d - gamma_d]^+ / (snr_d - gamma_d))``, which
    is ``0.5 * log2(1 + snr_d)`` above the threshold and zero otherwise.
    """
    if snr_d < 0:
        raise ValueError("SNR must be nonnegative")
    if not gamma_d > 0:
        raise ValueError("gamma_d must be positive")
    excess = max(snr_d - gamma_d, 0.0)
    if excess == 0.0:
        return 0.0
    return 0.5 * math.log2(1.0 + snr_d / (snr_d - gamma_d) * excess)


def secure_rate_lower_bound(gamma_d: float) -> float:
    """``0.5 * log2(1 + gamma_d)``: guaranteed once the destination meets its threshold."""
    if not gamma_d > 0:
        raise ValueError("gamma_d must be positive")
    return 0.5 * math.log2(1.0 + gamma_d)


def simulate_transmission(instance: NetworkInstance, beta, receiver: Receiver = DESTINATION,
                          n_symbols: int = 100_000, seed: int | None = 0) -> float:
    """Empirical SNR from a symbol-level simulation of both hops.

    Source symbols ``x ~ CN(0, P_s)``, relay and receiver noise
    ``~ CN(0, sigma^2)``. Signal and noise parts of the received samples are
    accumulated separately, so the ratio is a direct estimate of the SNR.
    """
    if n_symbols < 1:
        raise ValueError("n_symbols must be at least 1")
    b = as_beta(instance, beta)
    p = instance.power
    rng = np.random.default_rng(seed)
    x = crandn(rng, n_symbols) * math.sqrt(p.source_power)
    z_relay = crandn(rng, (instance.M, n_symbols)) * math.sqrt(p.noise_variance)
    z_rx = crandn(rng, n_symbols) * math.sqrt(p.noise_variance)
    h_l = receiver.gains(instance)
    relay_tx = b[:, None] * (instance.h_s[:, None] * x[None, :] + z_relay)
    received = h_l @ relay_tx + z_rx
    signal = np.sum(instance.h_s * b * h_l) * x
    noise = received - signal
    return float(np.mean(np.abs(signal) ** 2) / np.mean(np.abs(noise) ** 2))
