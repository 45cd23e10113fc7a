"""
Dipole-gauge Hamiltonians for one or two dipoles in a single mode, and the
alpha-gauge family obtained from them by exact unitary conjugation.

Every coupling is written through the dimensionless ``eta`` and the
normalised dipole matrix ``zhat = zeta / zeta_eg``::

    H' = sum_i [H_m,i + w eta^2 zhat_i^2 + i w eta zhat_i (a^dag - a)] + w (a^dag a + 1/2)
    R_{a a'} = exp(i (a - a') eta sum_i zhat_i (a + a^dag))
    H_alpha = R_{1 alpha} H' R_{1 alpha}^dag

``H_alpha`` is defined at finite cutoff by conjugating the truncated ``H'``,
so its spectrum equals that of ``H'`` for every alpha.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dipole import DipoleModel, bare_hamiltonian, dipole_operator
from .errors import ValidationError
from .hilbert import (
    HermitianOperator,
    TensorSpace,
    UnitaryOperator,
    annihilator,
    conjugate,
    hermitian_exp,
    kron_all,
    make_space,
)


@dataclass(frozen=True)
class ModelConfig:
    omega: float
    eta: float
    alpha: float = 1.0
    photon_cutoff: int = 30
    dipole_levels: int = 4
    n_dipoles: int = 1

    def __post_init__(self):
        if not self.omega > 0:
            raise ValidationError(f"omega must be positive, got {self.omega}")
        if self.eta < 0:
            raise ValidationError(f"eta must be non-negative, got {self.eta}")
        if self.photon_cutoff < 2:
            raise ValidationError("photon_cutoff must be >= 2")
        if self.dipole_levels < 2:
            raise ValidationError("dipole_levels must be >= 2")
        if self.n_dipoles not in (1, 2):
            raise ValidationError("n_dipoles must be 1 or 2")
        if not np.isfinite(self.alpha):
            raise ValidationError("alpha must be finite")

    def with_cutoffs(self, photon_cutoff: int, dipole_levels: int) -> "ModelConfig":
        return replace(self, photon_cutoff=photon_cutoff, dipole_levels=dipole_levels)


def dipole_labels(n_dipoles: int) -> tuple:
    return ("dipole",) if n_dipoles == 1 else ("dipole1", "dipole2")


def model_space(cfg: ModelConfig) -> TensorSpace:
    L, N = cfg.dipole_levels, cfg.photon_cutoff
    return make_space([(lab, L) for lab in dipole_labels(cfg.n_dipoles)] + [("mode", N)])


def _mode_operators(N: int):
    a = annihilator(N).matrix.real
    return a, a.T


def _dipole_gauge_matrix(model: DipoleModel, cfg: ModelConfig) -> np.ndarray:
    L, N = cfg.dipole_levels, cfg.photon_cutoff
    w, eta = cfg.omega, cfg.eta
    zhat = dipole_operator(model, L)
    a, ad = _mode_operators(N)
    Id, Ip = np.eye(L), np.eye(N)

    h_ph = w * (ad @ a + 0.5 * Ip)
    # single-dipole block: bare levels + dipole self-energy, and its mode coupling
    h_local = bare_hamiltonian(model, L) + w * eta**2 * (zhat @ zhat)
    coupling = 1j * w * eta * np.kron(zhat, ad - a)

    if cfg.n_dipoles == 1:
        return np.kron(h_local, Ip) + np.kron(Id, h_ph) + coupling

    H = kron_all([Id, Id, h_ph]).astype(complex)
    H += kron_all([h_local, Id, Ip]) + kron_all([Id, h_local, Ip])
    H += np.kron(np.kron(zhat, Id), ad - a) * (1j * w * eta)
    H += np.kron(Id, coupling)
    return H


def build_dipole_gauge_one(model: DipoleModel, cfg: ModelConfig) -> HermitianOperator:
    """Dipole-gauge Hamiltonian of one dipole on ``(dipole L, mode N)``."""
    if cfg.n_dipoles != 1:
        raise ValidationError("build_dipole_gauge_one needs n_dipoles = 1")
    return HermitianOperator(model_space(cfg), _dipole_gauge_matrix(model, cfg))


def build_dipole_gauge_two(model: DipoleModel, cfg: ModelConfig) -> HermitianOperator:
    """Two identical dipoles at field maxima; no direct dipole-dipole term."""
    if cfg.n_dipoles != 2:
        raise ValidationError("build_dipole_gauge_two needs n_dipoles = 2")
    return HermitianOperator(model_space(cfg), _dipole_gauge_matrix(model, cfg))


def build_dipole_gauge(model: DipoleModel, cfg: ModelConfig) -> HermitianOperator:
    if cfg.n_dipoles == 1:
        return build_dipole_gauge_one(model, cfg)
    return build_dipole_gauge_two(model, cfg)


def gauge_generator(model: DipoleModel, cfg: ModelConfig):
    """
    ``eta * sum_i zhat_i (a + a^dag)`` and its eigensystem.

    The eigensystem is assembled from the factor eigensystems, which is exact
    and far cheaper than diagonalising the full generator.
    """
    L, N = cfg.dipole_levels, cfg.photon_cutoff
    zhat = dipole_operator(model, L)
    a, ad = _mode_operators(N)
    x = a + ad
    wz, vz = np.linalg.eigh(zhat)
    wx, vx = np.linalg.eigh(x)
    if cfg.n_dipoles == 1:
        total = zhat
        ws, vs = wz, vz
    else:
        Id = np.eye(L)
        total = np.kron(zhat, Id) + np.kron(Id, zhat)
        ws = (wz[:, None] + wz[None, :]).ravel()
        vs = np.kron(vz, vz)
    G = HermitianOperator(model_space(cfg), cfg.eta * np.kron(total, x))
    w = cfg.eta * np.kron(ws, wx)
    v = np.kron(vs, vx)
    return G, (w, v)


def gauge_unitary(
    model: DipoleModel, cfg: ModelConfig, alpha_from: float, alpha_to: float
) -> UnitaryOperator:
    """Gauge-fixing transformation ``R_{alpha_from, alpha_to}``."""
    G, eig = gauge_generator(model, cfg)
    return hermitian_exp(G, alpha_from - alpha_to, eig=eig)


def build_alpha_gauge(model: DipoleModel, cfg: ModelConfig) -> HermitianOperator:
    """``H_alpha = R_{1 alpha} H' R_{1 alpha}^dag`` for ``cfg.alpha``."""
    H = build_dipole_gauge(model, cfg)
    if cfg.alpha == 1.0 or cfg.eta == 0.0:
        return H
    return conjugate(H, gauge_unitary(model, cfg, 1.0, cfg.alpha))


def direct_interaction_coefficient(H_alpha: HermitianOperator, model: DipoleModel, cfg: ModelConfig) -> float:
    """
    Coefficient of ``zhat_1 zhat_2`` (times the photon identity) inside ``H_alpha``.

    The coefficient is read off the photon-vacuum block ``<0|H_alpha|0>``
    by the trace inner product with ``B = zhat_1 (x) zhat_2``. Single-dipole
    operators are trace-orthogonal to ``B`` because ``zhat`` is traceless. The
    full-space trace cannot be used: ``B`` commutes with the gauge generator,
    so ``tr(B H_alpha) = tr(B H')`` at any finite cutoff.
    """
    if cfg.n_dipoles != 2 or len(H_alpha.space.dims) != 3:
        raise ValidationError("direct interaction needs a two-dipole Hamiltonian")
    L, N = cfg.dipole_levels, cfg.photon_cutoff
    if H_alpha.space.dims != (L, L, N):
        raise ValidationError("Hamiltonian space does not match the config")
    zhat = dipole_operator(model, L)
    B = np.kron(zhat, zhat)
    vac = H_alpha.matrix.reshape(L * L, N, L * L, N)[:, 0, :, 0]
    return float(np.real(np.trace(vac @ B.conj().T)) / np.real(np.trace(B @ B.conj().T)))


def direct_interaction_closed_form(omega: float, eta: float, alpha: float) -> float:
    return -2.0 * omega * eta**2 * (1.0 - alpha**2)


def jc_gauge(omega: float, omega_m: float) -> float:
    """Gauge ``omega_m / (omega + omega_m)`` in which the weak-coupling ground state is bare."""
    if not (omega > 0 and omega_m > 0):
        raise ValidationError("frequencies must be positive")
    return omega_m / (omega + omega_m)


def truncate_two_level(H_alpha: HermitianOperator, cfg: ModelConfig) -> HermitianOperator:
    """
    Project onto the two lowest bare levels of every dipole, keeping the full mode.

    Applied to an already gauge-fixed Hamiltonian.
    """
    L, N = cfg.dipole_levels, cfg.photon_cutoff
    nd = cfg.n_dipoles
    if H_alpha.space.dims != (L,) * nd + (N,):
        raise ValidationError("Hamiltonian space does not match the config")
    if L == 2:
        return H_alpha
    shape = (L,) * nd + (N,)
    keep_mask = np.zeros(shape, dtype=bool)
    keep_mask[(slice(0, 2),) * nd + (slice(None),)] = True
    idx = np.flatnonzero(keep_mask.ravel())
    sub = H_alpha.matrix[np.ix_(idx, idx)]
    space = make_space([(lab, 2) for lab in dipole_labels(nd)] + [("mode", N)])
    return HermitianOperator(space, sub)
