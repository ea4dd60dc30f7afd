"""Secure amplify-and-forward relay beamforming.

Two design problems over a network of ``M`` relays, one destination and
``K`` eavesdroppers: maximize the destination SNR under eavesdropper SNR
caps (:func:`solve_p1`), or minimize total relay power under a destination
SNR floor and the same caps (:func:`solve_p2_sdr`).
"""

from .model import (DESTINATION, NetworkInstance, PowerConfig, Receiver, Thresholds,
                    achievable_rate, beta_max_squared, relay_power, sample_instance,
                    secure_rate, secure_rate_lower_bound, simulate_transmission, snr)
from .oracle import SearchGrid, brute_force_p1, brute_force_p2
from .p1 import P1Solution, build_p1, forward_transform, inverse_transform, solve_p1
from .p2 import P2Solution, analytical_relaxed, build_p2, check_feasibility, solve_p2_sdr
from .sdp import Constraint, SDPProblem, SDPSolution, SolverSettings, solve

__all__ = [
    "DESTINATION", "NetworkInstance", "PowerConfig", "Receiver", "Thresholds",
    "achievable_rate", "beta_max_squared", "relay_power", "sample_instance",
    "secure_rate", "secure_rate_lower_bound", "simulate_transmission", "snr",
    "SearchGrid", "brute_force_p1", "brute_force_p2",
    "P1Solution", "build_p1", "forward_transform", "inverse_transform", "solve_p1",
    "P2Solution", "analytical_relaxed", "build_p2", "check_feasibility", "solve_p2_sdr",
    "Constraint", "SDPProblem", "SDPSolution", "SolverSettings", "solve",
]
