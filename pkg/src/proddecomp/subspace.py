"""Collinearity, rank, support/null-space, and dual-basis numerics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateInput, DimensionMismatch
from .tensor import Ket, StateOperator, partial_trace

_MACHINE_EPS = float(np.finfo(float).eps)

#: Pairwise orthogonality tolerance for stored orthonormal bases.
ORTHO_ATOL = 1e-10


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds used throughout the package.

    eps_col:  two unit kets are collinear when |<x|y>| >= 1 - eps_col.
    eps_rank: relative singular-value / eigenvalue cutoff for rank decisions.
    eps_eq:   operator and vector equality tolerance.
    """

    eps_col: float = 1e-8
    eps_rank: float = 1e-8
    eps_eq: float = 1e-8

    def __post_init__(self) -> None:
        for name in ("eps_col", "eps_rank", "eps_eq"):
            v = float(getattr(self, name))
            if not 0.0 < v < 1.0:
                raise DegenerateInput(f"{name} must lie in (0, 1), got {v!r}")
            object.__setattr__(self, name, v)
        if self.eps_rank < 100.0 * _MACHINE_EPS:
            raise DegenerateInput(
                f"eps_rank {self.eps_rank!r} is below 100x machine epsilon; rank decisions would be noise"
            )


DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal set of kets spanning a subspace of a factor space."""

    ambient_dim: int
    vectors: tuple[Ket, ...]

    def __post_init__(self) -> None:
        vecs = tuple(self.vectors)
        if len(vecs) > self.ambient_dim:
            raise DimensionMismatch(
                f"{len(vecs)} vectors cannot be orthonormal in dim {self.ambient_dim}"
            )
        for i, v in enumerate(vecs):
            if v.dim != self.ambient_dim:
                raise DimensionMismatch(f"vector {i} has dim {v.dim}, ambient is {self.ambient_dim}")
            for j in range(i):
                if abs(vecs[j].overlap(v)) >= ORTHO_ATOL:
                    raise DegenerateInput(f"basis vectors ({j}, {i}) are not orthogonal")
        object.__setattr__(self, "vectors", vecs)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the spanned subspace."""
        p = np.zeros((self.ambient_dim, self.ambient_dim), dtype=complex)
        for v in self.vectors:
            p += v.projector()
        return p


def fix_phase(v: np.ndarray, eps: float = 1e-8) -> np.ndarray:
    """Rotate a vector by a global phase so its first significant entry is real positive."""
    v = np.asarray(v, dtype=complex)
    nz = np.nonzero(np.abs(v) > eps)[0]
    if nz.size == 0:
        return v.copy()
    pivot = v[nz[0]]
    return v * (abs(pivot) / pivot)


def column_stack(kets: Sequence[Ket]) -> np.ndarray:
    """Stack kets as the columns of a dense matrix."""
    if not kets:
        raise DegenerateInput("empty ket set")
    dim = kets[0].dim
    if any(k.dim != dim for k in kets):
        raise DimensionMismatch("kets in a set must share one dimension")
    return np.column_stack([k.amplitudes for k in kets])


def is_collinear(x: Ket, y: Ket, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True when x and y agree up to a global phase: |<x|y>| >= 1 - eps_col.

    Equivalently min_alpha ||x - e^{i alpha} y|| <= sqrt(2 eps_col).  Two
    unit kets are collinear exactly when their rank-1 projectors coincide,
    so this predicate also decides equality of 1-projectors.
    """
    return abs(x.overlap(y)) >= 1.0 - tol.eps_col


def collinear_pairs(kets: Sequence[Ket], tol: ToleranceConfig = DEFAULT_TOL) -> list[tuple[int, int]]:
    """All unordered index pairs that fail non-collinearity."""
    out = []
    for i in range(len(kets)):
        for j in range(i + 1, len(kets)):
            if is_collinear(kets[i], kets[j], tol):
                out.append((i, j))
    return out


def is_noncollinear_set(kets: Sequence[Ket], tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True when no pair of the set is collinear."""
    if not kets:
        raise DegenerateInput("empty ket set")
    return not collinear_pairs(kets, tol)


def rank_and_independence(kets: Sequence[Ket], tol: ToleranceConfig = DEFAULT_TOL) -> tuple[int, bool]:
    """Numerical rank of the stacked set and whether it is linearly independent.

    Rank counts singular values >= eps_rank times the largest one.
    """
    a = column_stack(kets)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0, False
    rank = int(np.count_nonzero(s >= tol.eps_rank * s[0]))
    return rank, rank == len(kets)


def support_and_null(
    rho: StateOperator, subsystem: int, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[SubspaceBasis, SubspaceBasis]:
    """Support and null space of an operator on one of its factors.

    Both are computed from the reduced operator on that factor: its
    eigenvectors with eigenvalue below eps_rank * lambda_max span the null
    space, the remaining ones the support.  Support vectors are returned
    in descending-eigenvalue order.
    """
    nfac = len(rho.dims)
    if not 0 <= subsystem < nfac:
        raise DimensionMismatch(f"subsystem {subsystem} out of range for {nfac} factors")
    if nfac == 1:
        reduced = rho
    else:
        reduced = partial_trace(rho, (subsystem,))
    evals, evecs = np.linalg.eigh(reduced.matrix)
    lam_max = max(float(evals[-1]), 0.0)
    cutoff = tol.eps_rank * lam_max
    null_idx = [i for i in range(evals.size) if evals[i] < cutoff]
    supp_idx = [i for i in range(evals.size) if evals[i] >= cutoff]
    supp_idx.sort(key=lambda i: -evals[i])
    ambient = rho.dims[subsystem]
    support = SubspaceBasis(ambient, tuple(Ket(evecs[:, i]) for i in supp_idx))
    null = SubspaceBasis(ambient, tuple(Ket(evecs[:, i]) for i in null_idx))
    return support, null


def dual_basis(kets: Sequence[Ket], tol: ToleranceConfig = DEFAULT_TOL) -> list[np.ndarray]:
    """Biorthogonal duals of a linearly independent set.

    Returns vectors {a~_i} in span(kets) with <a~_i|a_j> = delta_ij,
    computed from the pseudoinverse of the stacked matrix
    (equivalently A (A^dagger A)^{-1}).  The duals are generally not
    normalized.
    """
    rank, independent = rank_and_independence(kets, tol)
    if not independent:
        raise DegenerateInput(f"no dual basis: set has rank {rank} < {len(kets)}")
    a = column_stack(kets)
    duals = np.linalg.pinv(a).conj().T
    return [duals[:, i].copy() for i in range(duals.shape[1])]
