"""
Closed-form weak-coupling results and two standalone QED formulas.

These serve as independent oracles for the exact-diagonalisation results
and as overlay curves for plots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .hamiltonian import jc_gauge
from .hilbert import make_space
from .qinfo import DensityMatrix


@dataclass(frozen=True)
class PerturbativePoint:
    """
    Weak-coupling amplitude ``beta`` of the excited level in the gauge ``alpha``.

    ``beta = beta_local + s_static``: ``beta_local`` is the dipole-gauge value
    and ``s_static = (1 - alpha) eta`` the electrostatic part.
    """

    eta: float
    omega: float
    omega_m: float
    alpha: float
    beta: float
    p: float
    beta_local: float
    s_static: float


def beta_alpha(eta: float, omega: float, omega_m: float, alpha: float) -> PerturbativePoint:
    if not (omega > 0 and omega_m > 0):
        raise ValidationError("frequencies must be positive")
    beta = eta * (jc_gauge(omega, omega_m) - alpha)
    return PerturbativePoint(
        eta=eta,
        omega=omega,
        omega_m=omega_m,
        alpha=alpha,
        beta=beta,
        p=beta * beta,
        beta_local=-eta * omega / (omega + omega_m),
        s_static=(1.0 - alpha) * eta,
    )


def perturbative_reduced_state(point: PerturbativePoint) -> DensityMatrix:
    """``diag(1 - beta^2, beta^2)`` in the ``(g, e)`` basis."""
    if point.p > 1.0:
        raise ValidationError(f"beta^2 = {point.p:.3g} > 1: outside the perturbative regime")
    return DensityMatrix(make_space([("dipole", 2)]), np.diag([1.0 - point.p, point.p]))


def binary_entropy(p: float) -> float:
    """Entropy (nats) of the two-outcome distribution ``(p, 1 - p)``."""
    out = 0.0
    for q in (p, 1.0 - p):
        if q > 0:
            out -= q * np.log(q)
    return float(out)


def spontaneous_rate(omega_eg: float, d_eg_sq: float) -> float:
    """Free-space emission rate ``omega^3 |d|^2 / (3 pi)`` (natural units)."""
    if omega_eg <= 0 or d_eg_sq <= 0:
        raise ValidationError("omega_eg and |d_eg|^2 must be positive")
    return omega_eg**3 * d_eg_sq / (3.0 * np.pi)


def ret_matrix_element(omega_eg: float, d1, d2, R_hat, R: float) -> float:
    """
    Resonant energy-transfer matrix element between two dipoles a distance ``R``
    apart along ``R_hat``::

        M = w^3 d1_i d2_j / (4 pi) [b_ij (cos x / x^3 + sin x / x^2) - c_ij cos x / x]

    with ``x = w R``, ``b_ij = delta_ij - 3 R_i R_j``, ``c_ij = delta_ij - R_i R_j``.
    """
    if R <= 0:
        raise ValidationError("separation must be positive")
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    n = np.asarray(R_hat, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise ValidationError("R_hat must be a unit vector")
    xi = omega_eg * R
    eye = np.eye(3)
    nn = np.outer(n, n)
    b = d1 @ (eye - 3.0 * nn) @ d2
    c = d1 @ (eye - nn) @ d2
    near = np.cos(xi) / xi**3 + np.sin(xi) / xi**2
    far = np.cos(xi) / xi
    return float(omega_eg**3 / (4.0 * np.pi) * (b * near - c * far))
