"""
Reduced states and the subsystem measures: entropy, negativity, Bell-state
fidelity, purity, and the bare-level population difference.

Entropies use the natural logarithm. Fidelity against a pure target is the
squared overlap ``<target|rho|target>``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Tuple, Union

import numpy as np

from .errors import ValidationError
from .hilbert import TensorSpace, make_space

log = logging.getLogger(__name__)

TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10
EIGEN_CLIP = 1e-14

FIDELITY_CONVENTION = "squared overlap <psi|rho|psi>"
LOG_CONVENTION = "natural log (nats)"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    space: TensorSpace
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.space.total_dim
        if m.shape != (n, n):
            raise ValidationError(f"density matrix shape {m.shape} does not match dimension {n}")
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValidationError("density matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"density matrix trace is {tr!r}, not 1")
        lo = np.linalg.eigvalsh(m)[0]
        if lo < -POSITIVITY_TOL:
            raise ValidationError(f"density matrix has negative eigenvalue {lo:.3e}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def pure(cls, psi: np.ndarray, space: TensorSpace) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        return cls(space, np.outer(psi, psi.conj()))

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


State = Union[np.ndarray, DensityMatrix]


def _keep_axes(space: TensorSpace, keep: Iterable[str]) -> Tuple[int, ...]:
    keep = set(keep)
    if not keep:
        raise ValidationError("keep must name at least one factor")
    axes = tuple(sorted(space.index(lab) for lab in keep))
    if len(axes) == len(space.factors):
        raise ValidationError("keep must be a proper subset of the factors")
    return axes


def partial_trace(state: State, keep: Iterable[str], space: Optional[TensorSpace] = None) -> DensityMatrix:
    """
    Reduced density matrix on the factors in ``keep`` (space order preserved).

    ``state`` is a :class:`DensityMatrix` or a state vector; a vector needs
    ``space``.
    """
    if isinstance(state, DensityMatrix):
        space = state.space
    elif space is None:
        raise ValidationError("a state vector needs its space")
    axes = _keep_axes(space, keep)
    rest = tuple(i for i in range(len(space.dims)) if i not in axes)
    dims = space.dims
    dk = int(np.prod([dims[i] for i in axes]))
    dr = int(np.prod([dims[i] for i in rest]))
    sub = space.subspace(space.labels[i] for i in axes)

    if isinstance(state, DensityMatrix):
        n = len(dims)
        t = state.matrix.reshape(dims + dims)
        t = t.transpose(axes + rest + tuple(n + i for i in axes) + tuple(n + i for i in rest))
        t = t.reshape(dk, dr, dk, dr)
        rho = np.einsum("ajbj->ab", t)
    else:
        psi = np.asarray(state, dtype=complex)
        if psi.shape != (space.total_dim,):
            raise ValidationError("state vector does not match the space")
        m = psi.reshape(dims).transpose(axes + rest).reshape(dk, dr)
        rho = m @ m.conj().T
    return DensityMatrix(sub, rho)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """``-tr(rho ln rho)``; eigenvalues below 1e-14 are dropped."""
    lam = rho.eigvalsh()
    clipped = lam[lam < EIGEN_CLIP]
    if clipped.size:
        log.debug("entropy: dropped %d eigenvalues, total weight %.3e", clipped.size, clipped.sum())
    lam = lam[lam >= EIGEN_CLIP]
    return float(-np.sum(lam * np.log(lam))) + 0.0


class EntropyResult(NamedTuple):
    entropy: float
    discrepancy: float


def entanglement_entropy(psi: np.ndarray, space: TensorSpace, keep: Iterable[str]) -> EntropyResult:
    """
    Entanglement entropy of a pure state across ``keep | rest``.

    Both reduced entropies are computed; ``discrepancy`` is their difference.
    """
    psi = np.asarray(psi)
    if psi.ndim != 1:
        raise ValidationError("entanglement_entropy needs a pure state vector")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValidationError("state vector is not normalised")
    keep = tuple(keep)
    rest = [lab for lab in space.labels if lab not in keep]
    s_keep = von_neumann_entropy(partial_trace(psi, keep, space))
    s_rest = von_neumann_entropy(partial_trace(psi, rest, space))
    return EntropyResult(s_keep, abs(s_keep - s_rest))


def partial_transpose(rho: DensityMatrix, factor: str) -> np.ndarray:
    dims = rho.space.dims
    n = len(dims)
    k = rho.space.index(factor)
    t = rho.matrix.reshape(dims + dims)
    perm = list(range(2 * n))
    perm[k], perm[n + k] = perm[n + k], perm[k]
    return t.transpose(perm).reshape(rho.matrix.shape)


def negativity(rho: DensityMatrix, transpose_factor: str) -> float:
    """``(||rho^T1||_1 - 1) / 2`` for a two-factor state."""
    if len(rho.space.factors) != 2:
        raise ValidationError(f"negativity needs a two-factor state, got {rho.space.labels}")
    pt = partial_transpose(rho, transpose_factor)
    lam = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(max(0.5 * (np.sum(np.abs(lam)) - 1.0), 0.0))


def bell_states(levels: int = 2) -> Tuple[np.ndarray, np.ndarray]:
    """
    ``psi = (|ee> + |gg>)/sqrt2`` and ``phi = (|eg> + |ge>)/sqrt2``.

    Written in the product basis of ``levels`` bare levels per dipole
    (``g = 0``, ``e = 1``), so they can be compared with reduced states that
    keep more than two levels.
    """
    if levels < 2:
        raise ValidationError("Bell states need at least two levels per dipole")

    def ket(i, j):
        v = np.zeros(levels * levels, dtype=complex)
        v[i * levels + j] = 1.0
        return v

    s = 1.0 / np.sqrt(2.0)
    psi = s * (ket(1, 1) + ket(0, 0))
    phi = s * (ket(1, 0) + ket(0, 1))
    return psi, phi


def two_dipole_space(levels: int = 2) -> TensorSpace:
    return make_space([("dipole1", levels), ("dipole2", levels)])


def fidelity_pure(rho: DensityMatrix, target: np.ndarray) -> float:
    """Squared overlap ``<target|rho|target>``."""
    target = np.asarray(target, dtype=complex)
    if target.shape != (rho.space.total_dim,):
        raise ValidationError("target does not match the density matrix dimension")
    if abs(np.linalg.norm(target) - 1.0) > 1e-10:
        raise ValidationError("target is not normalised")
    return float(np.real(target.conj() @ rho.matrix @ target))


def purity(rho: DensityMatrix) -> float:
    return float(np.real(np.einsum("ij,ji->", rho.matrix, rho.matrix)))


def population_difference(rho_m: DensityMatrix, model=None) -> float:
    """
    ``2 p - 1`` with ``p`` the population of the first excited bare level.

    For a multi-dipole reduced state the first dipole factor is used.
    """
    if len(rho_m.space.factors) > 1:
        rho_m = partial_trace(rho_m, [rho_m.space.labels[0]])
    if model is not None and rho_m.space.total_dim > model.levels:
        raise ValidationError("reduced state has more levels than the dipole model")
    p = float(np.real(rho_m.matrix[1, 1]))
    return 2.0 * p - 1.0
