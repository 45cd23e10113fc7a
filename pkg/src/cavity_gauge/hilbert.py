"""
Tensor-product Hilbert spaces and the small dense operator algebra used by
the rest of the package.

Factor ordering is fixed when a space is created; every embedding and
partial trace honours that ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import ValidationError

HERMITIAN_RTOL = 1e-12
UNITARY_ATOL = 1e-10


@dataclass(frozen=True)
class TensorSpace:
    """Ordered list of labelled factors, e.g. ``(("dipole", 4), ("mode", 30))``."""

    factors: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        labels = [lab for lab, _ in self.factors]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"factor labels must be unique, got {labels}")
        for lab, dim in self.factors:
            if int(dim) != dim or dim < 1:
                raise ValidationError(f"factor {lab!r} has invalid dimension {dim}")

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(lab for lab, _ in self.factors)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(dim for _, dim in self.factors)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValidationError(f"unknown factor {label!r}; space has {self.labels}") from None

    def dim_of(self, label: str) -> int:
        return self.dims[self.index(label)]

    def subspace(self, labels: Iterable[str]) -> "TensorSpace":
        """Space made of the named factors, in this space's order."""
        wanted = set(labels)
        for lab in wanted:
            self.index(lab)
        return TensorSpace(tuple(f for f in self.factors if f[0] in wanted))


def make_space(factors: Sequence[Tuple[str, int]]) -> TensorSpace:
    """Build a :class:`TensorSpace` from ``(label, dim)`` pairs."""
    factors = tuple((str(lab), dim) for lab, dim in factors)
    if not factors:
        raise ValidationError("a space needs at least one factor")
    for lab, dim in factors:
        if isinstance(dim, bool) or not isinstance(dim, (int, np.integer)):
            raise ValidationError(f"dimension of {lab!r} must be an integer, got {dim!r}")
    return TensorSpace(tuple((lab, int(dim)) for lab, dim in factors))


def _max_abs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def is_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    scale = _max_abs(m)
    return _max_abs(m - m.conj().T) <= rtol * scale


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """
    Dense matrix on a :class:`TensorSpace`.

    ``hermitian_flag`` asserts (and is checked) that the matrix is Hermitian.
    Non-Hermitian carriers such as the ladder operator use ``False``.
    """

    space: TensorSpace
    matrix: np.ndarray = field(repr=False)
    hermitian_flag: bool = True

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.space.total_dim
        if m.shape != (n, n):
            raise ValidationError(f"matrix shape {m.shape} does not match space dimension {n}")
        if self.hermitian_flag and not is_hermitian(m):
            raise ValidationError("matrix flagged Hermitian is not Hermitian")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.space.total_dim

    def eigvalsh(self) -> np.ndarray:
        if not self.hermitian_flag:
            raise ValidationError("eigvalsh needs a Hermitian operator")
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    space: TensorSpace
    matrix: np.ndarray = field(repr=False)
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.space.total_dim
        if m.shape != (n, n):
            raise ValidationError(f"matrix shape {m.shape} does not match space dimension {n}")
        if self.validate:
            err = _max_abs(m.conj().T @ m - np.eye(n))
            if err > UNITARY_ATOL:
                raise ValidationError(f"matrix is not unitary: max|U^dag U - I| = {err:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dag(self) -> "UnitaryOperator":
        return UnitaryOperator(self.space, self.matrix.conj().T, validate=False)

    def __matmul__(self, other: "UnitaryOperator") -> "UnitaryOperator":
        if other.space != self.space:
            raise ValidationError("unitaries live on different spaces")
        return UnitaryOperator(self.space, self.matrix @ other.matrix, validate=False)


def annihilator(n_cut: int) -> HermitianOperator:
    """Truncated bosonic annihilation operator with ``a[n-1, n] = sqrt(n)``."""
    if n_cut < 2:
        raise ValidationError(f"photon cutoff must be >= 2, got {n_cut}")
    a = np.diag(np.sqrt(np.arange(1, n_cut, dtype=float)), k=1)
    return HermitianOperator(make_space([("mode", n_cut)]), a, hermitian_flag=False)


def number_operator(n_cut: int) -> np.ndarray:
    return np.diag(np.arange(n_cut, dtype=float))


def embed(op, space: TensorSpace, slot: str) -> HermitianOperator:
    """
    Kronecker-embed a single-factor operator into ``space`` at ``slot``.

    ``op`` may be a bare array or a :class:`HermitianOperator`; identities are
    placed on every other factor.
    """
    m = op.matrix if isinstance(op, HermitianOperator) else np.asarray(op)
    k = space.index(slot)
    d = space.dims[k]
    if m.shape != (d, d):
        raise ValidationError(f"operator shape {m.shape} does not fit slot {slot!r} of dim {d}")
    left = int(np.prod(space.dims[:k]))
    right = int(np.prod(space.dims[k + 1:]))
    full = np.kron(np.kron(np.eye(left), m), np.eye(right))
    return HermitianOperator(space, full, hermitian_flag=is_hermitian(m))


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.asarray(mats[0])
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def hermitian_exp(
    G: HermitianOperator,
    theta: float,
    eig: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> UnitaryOperator:
    """
    Return ``exp(i theta G)`` as ``V exp(i theta Lambda) V^dag``.

    Parameters
    ----------
    G : HermitianOperator
        Generator; must carry ``hermitian_flag=True``.
    theta : float
    eig : (eigenvalues, eigenvectors), optional
        A precomputed eigendecomposition of ``G``. Used for Kronecker-structured
        generators whose eigensystem is cheap to assemble from the factors.
    """
    if not G.hermitian_flag:
        raise ValidationError("hermitian_exp needs a Hermitian generator")
    if eig is None:
        w, v = np.linalg.eigh(G.matrix)
    else:
        w, v = eig
    phases = np.exp(1j * theta * np.asarray(w))
    u = (v * phases) @ v.conj().T
    return UnitaryOperator(G.space, u)


def conjugate(H: HermitianOperator, U: UnitaryOperator) -> HermitianOperator:
    """``U H U^dag``; Hermiticity is restored exactly against roundoff."""
    if H.space != U.space:
        raise ValidationError("operator and unitary live on different spaces")
    m = U.matrix @ H.matrix @ U.matrix.conj().T
    if H.hermitian_flag:
        m = 0.5 * (m + m.conj().T)
    return HermitianOperator(H.space, m, hermitian_flag=H.hermitian_flag)


def sorted_spectrum(H: HermitianOperator) -> np.ndarray:
    return np.sort(H.eigvalsh())

