"""
Ground states of dense Hermitian Hamiltonians and cutoff-convergence control.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Tuple

import numpy as np
import scipy.linalg

from .dipole import DipoleModel
from .errors import ConvergenceError, ValidationError
from .hamiltonian import ModelConfig, build_alpha_gauge, build_dipole_gauge
from .hilbert import HermitianOperator, TensorSpace

log = logging.getLogger(__name__)

ENERGY_TOL = 1e-8
ENTANGLEMENT_TOL = 1e-6
DEGENERACY_RTOL = 1e-8
RESIDUAL_RTOL = 1e-8


@dataclass(frozen=True)
class CutoffLimits:
    """Starting cutoffs, step sizes, and ceilings for :func:`converge_cutoffs`."""

    n_start: int = 10
    l_start: int = 4
    n_step: int = 10
    l_step: int = 2
    n_max: int = 200
    l_max: int = 16

    def __post_init__(self):
        if self.n_start < 2 or self.l_start < 2:
            raise ValidationError("starting cutoffs must be >= 2")
        if self.n_step < 1 or self.l_step < 1:
            raise ValidationError("cutoff steps must be positive")
        if self.n_start > self.n_max or self.l_start > self.l_max:
            raise ValidationError("starting cutoffs exceed their ceilings")


ONE_DIPOLE_LIMITS = CutoffLimits()
TWO_DIPOLE_LIMITS = CutoffLimits(n_start=10, l_start=4, n_max=60, l_max=8)


@dataclass(frozen=True, eq=False)
class GroundStateResult:
    energy: float
    state: np.ndarray = field(repr=False)
    gap: float
    space: Optional[TensorSpace] = field(default=None, repr=False)
    converged: bool = True
    degenerate: bool = False
    cutoff_trace: Tuple[Tuple[int, int, float], ...] = ()
    photon_cutoff: Optional[int] = None
    dipole_levels: Optional[int] = None
    steps: int = 0
    observable: Optional[float] = None

    def __post_init__(self):
        if abs(np.linalg.norm(self.state) - 1.0) > 1e-10:
            raise ValidationError("ground state is not normalised")
        if self.gap < 0:
            raise ValidationError("negative spectral gap")


def ground_state(H: HermitianOperator) -> GroundStateResult:
    """
    Lowest eigenpair of ``H`` by a dense Hermitian eigensolver.

    Only the two lowest eigenvalues are requested from LAPACK; the gap is
    ``E_1 - E_0``. The phase is fixed so the largest-magnitude component is
    real and positive. A near-degenerate ground doublet is flagged, never
    symmetrised.
    """
    if not H.hermitian_flag:
        raise ValidationError("ground_state needs a Hermitian operator")
    n = H.dim
    try:
        if n == 1:
            w, v = np.real(H.matrix[:1, :1]).ravel(), np.ones((1, 1), dtype=complex)
        else:
            w, v = scipy.linalg.eigh(H.matrix, subset_by_index=[0, 1], driver="evr")
    except (np.linalg.LinAlgError, ValueError) as exc:
        finite = bool(np.all(np.isfinite(H.matrix)))
        raise ConvergenceError(
            f"eigendecomposition failed: {exc}",
            {"dim": n, "finite": finite, "max_abs": float(np.nanmax(np.abs(H.matrix)))},
        ) from exc

    energy = float(w[0])
    gap = float(w[1] - w[0]) if len(w) > 1 else np.inf
    gap = max(gap, 0.0)
    psi = v[:, 0].astype(complex)
    k = int(np.argmax(np.abs(psi)))
    psi = psi * (abs(psi[k]) / psi[k])
    psi /= np.linalg.norm(psi)

    degenerate = gap < DEGENERACY_RTOL * max(1.0, abs(energy))
    if degenerate:
        log.warning("near-degenerate ground state: gap %.3e at E_G %.12g", gap, energy)
    return GroundStateResult(energy=energy, state=psi, gap=gap, space=H.space, degenerate=degenerate)


def residual(H: HermitianOperator, result: GroundStateResult) -> float:
    """``max|H psi - E psi|`` relative to ``max|H|``."""
    r = H.matrix @ result.state - result.energy * result.state
    return float(np.max(np.abs(r)) / np.max(np.abs(H.matrix)))


Builder = Callable[[int, int], HermitianOperator]
Observable = Callable[[GroundStateResult], float]


def converge_cutoffs(
    builder: Builder,
    tol: float = ENERGY_TOL,
    limits: CutoffLimits = ONE_DIPOLE_LIMITS,
    observable: Optional[Observable] = None,
    observable_tol: float = ENTANGLEMENT_TOL,
) -> GroundStateResult:
    """
    Grow the photon cutoff ``N`` and dipole level count ``L`` until the ground
    state stops changing.

    Each step probes ``(N + n_step, L)`` and ``(N, L + l_step)``. A direction
    passes when the relative energy change is below ``tol`` and, if given,
    ``observable`` changes by less than ``observable_tol`` (absolute). Failing
    directions are advanced; the loop stops when both pass in the same step,
    and the result at the unadvanced ``(N, L)`` is returned, so one more
    increment in either direction changes it by less than the tolerances.

    Raises :class:`ConvergenceError` (``diagnostics["trace"]``) once a failing
    direction would exceed its ceiling.
    """
    if tol <= 0 or observable_tol <= 0:
        raise ValidationError("tolerances must be positive")

    cache = {}

    def solve(N, L):
        if (N, L) not in cache:
            res = ground_state(builder(N, L))
            obs = observable(res) if observable is not None else None
            cache[(N, L)] = (res, obs)
        return cache[(N, L)]

    def close(a, b):
        (ra, oa), (rb, ob) = a, b
        if abs(rb.energy - ra.energy) >= tol * abs(ra.energy):
            return False
        return observable is None or abs(ob - oa) < observable_tol

    N, L = limits.n_start, limits.l_start
    trace: List[Tuple[int, int, float]] = []
    steps = 0
    while True:
        steps += 1
        base = solve(N, L)
        probe_n = solve(N + limits.n_step, L)
        probe_l = solve(N, L + limits.l_step)
        for key in ((N, L), (N + limits.n_step, L), (N, L + limits.l_step)):
            trace.append((key[0], key[1], cache[key][0].energy))
        ok_n, ok_l = close(base, probe_n), close(base, probe_l)
        log.debug("step %d N=%d L=%d ok_n=%s ok_l=%s", steps, N, L, ok_n, ok_l)
        if ok_n and ok_l:
            res, obs = base
            return GroundStateResult(
                energy=res.energy, state=res.state, gap=res.gap, space=res.space,
                converged=True, degenerate=res.degenerate, cutoff_trace=tuple(trace),
                photon_cutoff=N, dipole_levels=L, steps=steps, observable=obs,
            )
        if not ok_n:
            N += limits.n_step
        if not ok_l:
            L += limits.l_step
        if N + limits.n_step > limits.n_max or L + limits.l_step > limits.l_max:
            raise ConvergenceError(
                f"cutoff ceiling reached at N={N}, L={L}",
                {"trace": tuple(trace), "photon_cutoff": N, "dipole_levels": L},
            )


def limits_for(n_dipoles: int) -> CutoffLimits:
    return ONE_DIPOLE_LIMITS if n_dipoles == 1 else TWO_DIPOLE_LIMITS


def converge_point(
    model: DipoleModel,
    cfg: ModelConfig,
    tol: float = ENERGY_TOL,
    limits: Optional[CutoffLimits] = None,
    observable: Optional[Observable] = None,
    observable_tol: float = ENTANGLEMENT_TOL,
) -> GroundStateResult:
    """:func:`converge_cutoffs` for ``H_alpha`` at one ``(eta, alpha)`` point."""
    limits = limits or limits_for(cfg.n_dipoles)
    if limits.l_max > model.levels:
        raise ValidationError(f"dipole model has {model.levels} levels, ceiling needs {limits.l_max}")

    def builder(N, L):
        return build_alpha_gauge(model, cfg.with_cutoffs(N, L))

    return converge_cutoffs(builder, tol, limits, observable, observable_tol)


def decoupled_ground_energy(model: DipoleModel, cfg: ModelConfig) -> float:
    """Lowest eigenvalue of ``H`` at ``eta = 0`` for the cutoffs in ``cfg`` (a diagonal matrix)."""
    H0 = build_dipole_gauge(model, replace(cfg, eta=0.0, alpha=1.0))
    return float(np.min(np.real(np.diag(H0.matrix))))


def energy_shift(
    model: DipoleModel,
    cfg: ModelConfig,
    tol: float = ENERGY_TOL,
    limits: Optional[CutoffLimits] = None,
    cutoffs: Optional[Tuple[int, int]] = None,
) -> float:
    """
    ``E_G(eta) - E_G(0)`` for the point in ``cfg``.

    With ``cutoffs=(N, L)`` both energies are taken at those cutoffs;
    otherwise the cutoffs are converged first.
    """
    if cutoffs is None:
        res = converge_point(model, cfg, tol, limits)
        cfg = cfg.with_cutoffs(res.photon_cutoff, res.dipole_levels)
        energy = res.energy
    else:
        cfg = cfg.with_cutoffs(*cutoffs)
        energy = ground_state(build_alpha_gauge(model, cfg)).energy
    return energy - decoupled_ground_energy(model, cfg)
