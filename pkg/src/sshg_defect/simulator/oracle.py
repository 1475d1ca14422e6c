"""Plane-wave scattering through the linearised bosonic defect."""
from __future__ import annotations

import math

import numpy as np


class DegenerateParameters(ValueError):
    pass


def _coefficients(m: float, s1: float, s2: float):
    # quadratic part of B0 in (phi_1, phi_2, phi_0):
    # dB/dphi_k = alpha_k phi_k + beta_k phi_0,  dB/dphi_0 = sum beta_k phi_k + (alpha_1 + alpha_2) phi_0
    return (m * (s1 + 1 / s1), m * (s1 - 1 / s1), m * (s2 + 1 / s2), m * (s2 - 1 / s2))


def _solve(k: float, m: float, s1: float, s2: float, from_left: bool):
    a1, b1, a2, b2 = _coefficients(m, s1, s2)
    w = math.sqrt(k * k + 4 * m * m)
    ik, iw = 1j * k, 1j * w
    if from_left:
        # phi_1 = e^{ikx} + R e^{-ikx}, phi_2 = T e^{ikx}, phi_0 = Phi, all times e^{-i w t}
        A = np.array([[-ik + a1, 0, iw + b1],
                      [0, ik - a2, iw - b2],
                      [-iw + b1, iw + b2, a1 + a2]])
        rhs = np.array([-(ik + a1), 0, iw - b1])
    else:
        # phi_2 = e^{-ikx} + R e^{ikx}, phi_1 = T e^{-ikx}
        A = np.array([[0, -ik + a1, iw + b1],
                      [ik - a2, 0, iw - b2],
                      [iw + b2, -iw + b1, a1 + a2]])
        rhs = np.array([0, ik + a2, -iw - b2])
    det = np.linalg.det(A)
    if abs(det) < 1e-14 * max(1.0, np.abs(A).max() ** 3):
        raise DegenerateParameters(f"singular defect system at k={k}")
    R, T, _ = np.linalg.solve(A, rhs)
    return complex(T), complex(R)


def linear_transmission(k: float, m: float, s1: float, s2: float) -> np.ndarray:
    """Scattering matrix [[T_left, R_right], [R_left, T_right]] at wavenumber k > 0 (mass 2m)."""
    if not (k > 0 and math.isfinite(k)):
        raise ValueError("k must be positive and finite (zero group velocity is excluded)")
    if min(m, s1, s2) <= 0:
        raise ValueError("m, sigma1, sigma2 must be positive")
    tl, rl = _solve(k, m, s1, s2, True)
    tr, rr = _solve(k, m, s1, s2, False)
    return np.array([[tl, rr], [rl, tr]])
