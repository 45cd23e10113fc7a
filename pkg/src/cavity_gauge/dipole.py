"""
One-dimensional double-well dipole on a real-space grid.

The bare Hamiltonian is ``-(E/2) d^2/dz^2 + V(z)`` with the default quartic
double well ``V(z) = (E/2) (-iota z^2 + z^4 / 2)``. Its lowest levels and the
position matrix elements between them define the dipole used by the
light-matter Hamiltonians; couplings only ever see ``zeta_nm / zeta_eg``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import eig_banded

from .errors import ConvergenceError, ValidationError

log = logging.getLogger(__name__)

DEFAULT_IOTA = 3.0
BOUNDARY_TOL = 1e-8
ANHARMONICITY_THRESHOLD = 0.2

# central-difference weights for the second derivative, offsets 0..k
_STENCILS = {
    2: (-2.0, 1.0),
    4: (-5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0),
    6: (-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0),
    8: (-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0),
}


@dataclass(frozen=True)
class DoubleWellParams:
    """
    Grid and potential parameters.

    ``potential`` overrides the double well (it must be even in ``z`` to keep
    the parity selection rule); ``stencil_order`` is the accuracy order of the
    central-difference Laplacian.
    """

    iota: float = DEFAULT_IOTA
    energy_scale: float = 1.0
    grid_halfwidth: float = 8.0
    grid_points: int = 2001
    stencil_order: int = 6
    potential: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.energy_scale <= 0:
            raise ValidationError("energy_scale must be positive")
        if self.grid_halfwidth <= 0:
            raise ValidationError("grid_halfwidth must be positive")
        if self.grid_points < 3 or self.grid_points % 2 == 0:
            raise ValidationError(f"grid_points must be odd and >= 3, got {self.grid_points}")
        if self.stencil_order not in _STENCILS:
            raise ValidationError(f"stencil_order must be one of {sorted(_STENCILS)}")

    def grid(self) -> np.ndarray:
        return np.linspace(-self.grid_halfwidth, self.grid_halfwidth, self.grid_points)

    def potential_values(self, z: np.ndarray) -> np.ndarray:
        if self.potential is not None:
            return np.asarray(self.potential(z), dtype=float)
        return 0.5 * self.energy_scale * (-self.iota * z**2 + 0.5 * z**4)


@dataclass(frozen=True, eq=False)
class DipoleModel:
    level_energies: np.ndarray
    zeta_matrix: np.ndarray
    zeta_eg: float
    omega_m: float
    grid: Optional[np.ndarray] = field(default=None, repr=False)
    # orthonormal columns on the interior grid nodes (Euclidean norm 1)
    vectors: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def levels(self) -> int:
        return len(self.level_energies)

    @property
    def ground_energy(self) -> float:
        return float(self.level_energies[0])

    def anharmonicity(self) -> float:
        """Relative difference of the first two transition energies."""
        if self.levels < 3:
            raise ValidationError("anharmonicity needs at least three levels")
        w = self.level_energies
        return abs((w[2] - w[1]) - (w[1] - w[0])) / (w[1] - w[0])


def _laplacian_bands(n: int, h: float, order: int, prefactor: float) -> np.ndarray:
    weights = _STENCILS[order]
    bands = np.zeros((len(weights), n))
    for k, c in enumerate(weights):
        bands[k, : n - k] = prefactor * c / h**2
    return bands


def solve_double_well(params: DoubleWellParams, levels: int) -> DipoleModel:
    """
    Lowest ``levels`` eigenpairs of the bare dipole and its position matrix.

    Dirichlet boundaries at ``+-grid_halfwidth``; the unknowns are the interior
    nodes. Raises :class:`ConvergenceError` when the ground state has not
    decayed at the boundary.
    """
    if levels < 2:
        raise ValidationError("need at least two levels")
    if levels > params.grid_points // 10:
        raise ValidationError(
            f"{levels} levels need at least {10 * levels} grid points, have {params.grid_points}"
        )

    z_full = params.grid()
    h = z_full[1] - z_full[0]
    z = z_full[1:-1]
    n = len(z)

    bands = _laplacian_bands(n, h, params.stencil_order, -0.5 * params.energy_scale)
    bands[0] += params.potential_values(z)
    energies, vecs = eig_banded(bands, lower=True, select="i", select_range=(0, levels - 1))

    # deterministic signs: nodeless ground state positive, then zeta_{n,n-1} >= 0
    if vecs[:, 0].sum() < 0:
        vecs[:, 0] *= -1
    for k in range(1, levels):
        if vecs[:, k] @ (z * vecs[:, k - 1]) < 0:
            vecs[:, k] *= -1

    ground = np.abs(vecs[:, 0])
    edge = max(ground[0], ground[-1]) / ground.max()
    if edge >= BOUNDARY_TOL:
        raise ConvergenceError(
            "ground state has not decayed at the grid boundary; increase grid_halfwidth",
            {"boundary_ratio": float(edge), "grid_halfwidth": params.grid_halfwidth,
             "grid_points": params.grid_points},
        )

    zeta = vecs.T @ (z[:, None] * vecs)
    zeta = 0.5 * (zeta + zeta.T)
    if np.any(np.diff(energies) <= 0):
        raise ConvergenceError("levels are not strictly increasing", {"energies": energies})

    log.debug("double well solved: omega_m=%.12g, boundary ratio %.2e", energies[1] - energies[0], edge)
    return DipoleModel(
        level_energies=energies,
        zeta_matrix=zeta,
        zeta_eg=float(zeta[1, 0]),
        omega_m=float(energies[1] - energies[0]),
        grid=z,
        vectors=vecs,
    )


def dipole_operator(model: DipoleModel, levels: int) -> np.ndarray:
    """Normalised dipole matrix ``zeta / zeta_eg`` on the first ``levels`` levels."""
    if levels > model.levels:
        raise ValidationError(f"requested {levels} levels, model has {model.levels}")
    if levels < 1:
        raise ValidationError("levels must be positive")
    out = model.zeta_matrix[:levels, :levels] / model.zeta_eg
    if levels >= 2:
        out[0, 1] = out[1, 0] = 1.0
    return out


def bare_hamiltonian(model: DipoleModel, levels: int) -> np.ndarray:
    if levels > model.levels:
        raise ValidationError(f"requested {levels} levels, model has {model.levels}")
    return np.diag(model.level_energies[:levels])


def certify_anharmonic(model: DipoleModel, threshold: float = ANHARMONICITY_THRESHOLD) -> float:
    """Raise unless the first two transition energies differ by ``threshold``."""
    a = model.anharmonicity()
    if a < threshold:
        raise ValidationError(
            f"dipole is not anharmonic enough: relative splitting difference {a:.3f} < {threshold}"
        )
    return a
