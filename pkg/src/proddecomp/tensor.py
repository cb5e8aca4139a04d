"""Dense kets and state operators on factored finite-dimensional complex spaces."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DegenerateInput, DimensionMismatch

#: Ambient-dimension cap for dense operators (quadratic storage).
MAX_AMBIENT_DIM = 4096

#: Dimension cap for bare vectors; purified vectors live on an ambient
#: larger than their operator's by the term count, so this is looser.
MAX_VECTOR_DIM = 1 << 20

KET_NORM_ATOL = 1e-12
HERMITICITY_RTOL = 1e-10
PSD_RTOL = 1e-10


def frobenius(a: np.ndarray) -> float:
    """Frobenius norm as a plain float."""
    return float(np.linalg.norm(a))


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Ket:
    """Unit-norm complex amplitude vector in a finite-dimensional space.

    The constructor rejects vectors whose Euclidean norm deviates from 1
    by more than ``KET_NORM_ATOL``; use :meth:`normalize` to rescale raw
    amplitudes.
    """

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size < 1:
            raise DimensionMismatch("a ket needs at least one amplitude")
        if amps.size > MAX_VECTOR_DIM:
            raise DimensionMismatch(f"ket dimension {amps.size} exceeds cap {MAX_VECTOR_DIM}")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > KET_NORM_ATOL:
            raise DegenerateInput(f"ket norm {norm!r} differs from 1 by more than {KET_NORM_ATOL}")
        object.__setattr__(self, "amplitudes", _freeze(amps))

    @classmethod
    def normalize(cls, amplitudes) -> "Ket":
        """Scale amplitudes to unit norm; a near-zero vector is rejected."""
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = float(np.linalg.norm(amps))
        if norm < 1e-12:
            raise DegenerateInput("cannot normalize a near-zero vector")
        return cls(amps / norm)

    @classmethod
    def basis(cls, dim: int, index: int) -> "Ket":
        """Standard basis ket with a single unit amplitude at ``index``."""
        if not 0 <= index < dim:
            raise DimensionMismatch(f"basis index {index} out of range for dim {dim}")
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    def overlap(self, other: "Ket") -> complex:
        """Inner product <self|other> (conjugate-linear in self)."""
        if other.dim != self.dim:
            raise DimensionMismatch(f"ket dims differ: {self.dim} vs {other.dim}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self) -> np.ndarray:
        """Rank-1 projector |self><self|."""
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def phased(self, phase: complex) -> "Ket":
        """Multiply by a unit-magnitude scalar phase."""
        if abs(abs(phase) - 1.0) > KET_NORM_ATOL:
            raise DegenerateInput(f"phase magnitude {abs(phase)!r} is not 1")
        return Ket(self.amplitudes * phase)

    def __repr__(self) -> str:  # keep reprs short; amplitudes can be large
        return f"Ket(dim={self.dim})"


@dataclass(frozen=True)
class FactoredDims:
    """Factor dimensions of a tensor-product space H1 (x) H2 (x H3).

    Reduced operators may live on a single factor, so lengths 1..3 are
    accepted; decompositions themselves require 2 or 3 factors.
    """

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if not 1 <= len(dims) <= 3:
            raise DimensionMismatch(f"1 to 3 factors supported, got {len(dims)}")
        if any(d < 1 for d in dims):
            raise DimensionMismatch(f"factor dimensions must be positive, got {dims}")
        if math.prod(dims) > MAX_VECTOR_DIM:
            raise DimensionMismatch(f"ambient dimension {math.prod(dims)} exceeds cap {MAX_VECTOR_DIM}")
        object.__setattr__(self, "dims", dims)

    @property
    def total(self) -> int:
        return math.prod(self.dims)

    def __len__(self) -> int:
        return len(self.dims)

    def __iter__(self) -> Iterator[int]:
        return iter(self.dims)

    def __getitem__(self, i) -> int:
        return self.dims[i]


@dataclass(frozen=True, eq=False)
class StateOperator:
    """Hermitian positive-semidefinite matrix on a factored space."""

    dims: FactoredDims
    matrix: np.ndarray

    def __post_init__(self) -> None:
        n = self.dims.total
        if n > MAX_AMBIENT_DIM:
            raise DimensionMismatch(f"operator ambient dimension {n} exceeds cap {MAX_AMBIENT_DIM}")
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (n, n):
            raise DimensionMismatch(f"matrix shape {m.shape} does not match ambient dim {n}")
        scale = frobenius(m)
        if frobenius(m - m.conj().T) > HERMITICITY_RTOL * scale:
            raise DegenerateInput("matrix is not Hermitian within tolerance")
        evals = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
        if evals.size and evals[0] < -PSD_RTOL * max(float(evals[-1]), 0.0):
            raise DegenerateInput(
                f"matrix is not positive semidefinite: min eigenvalue {evals[0]!r}"
            )
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def __repr__(self) -> str:
        return f"StateOperator(dims={self.dims.dims}, trace={self.trace:.6g})"


@dataclass(frozen=True, eq=False)
class ProductTerm:
    """One weighted product term w |a><a| (x) |b><b|."""

    weight: float
    a: Ket
    b: Ket

    def __post_init__(self) -> None:
        w = float(self.weight)
        if not math.isfinite(w) or w <= 0.0:
            raise DegenerateInput(f"term weight must be positive and finite, got {self.weight!r}")
        object.__setattr__(self, "weight", w)

    @property
    def kets(self) -> tuple[Ket, Ket]:
        return (self.a, self.b)


@dataclass(frozen=True, eq=False)
class ProductDecomposition:
    """Weighted sum of products of rank-1 projectors on a two-factor space.

    The constructor enforces the structural invariants (positive weights,
    matching dimensions).  The geometric hypotheses behind uniqueness
    (non-collinear ket sets, at least one set linearly independent) are
    tolerance-dependent and are checked by
    :func:`proddecomp.decomp.check_product_hypotheses`.
    """

    dims: FactoredDims
    terms: tuple[ProductTerm, ...]

    def __post_init__(self) -> None:
        terms = tuple(self.terms)
        if len(self.dims) != 2:
            raise DimensionMismatch("a product decomposition needs exactly 2 factors")
        if not terms:
            raise DegenerateInput("a decomposition needs at least one term")
        for i, t in enumerate(terms):
            if t.a.dim != self.dims[0] or t.b.dim != self.dims[1]:
                raise DimensionMismatch(
                    f"term {i} ket dims ({t.a.dim}, {t.b.dim}) do not match factors {self.dims.dims}"
                )
        object.__setattr__(self, "terms", terms)

    @property
    def n(self) -> int:
        return len(self.terms)

    @property
    def weight_sum(self) -> float:
        return float(sum(t.weight for t in self.terms))

    def normalized(self) -> "ProductDecomposition":
        """Rescale weights to sum to 1 (a presentation choice, not required)."""
        s = self.weight_sum
        return ProductDecomposition(
            self.dims, tuple(ProductTerm(t.weight / s, t.a, t.b) for t in self.terms)
        )


@dataclass(frozen=True, eq=False)
class TriTerm:
    """One coefficient-weighted product term coeff |a b c>."""

    coeff: complex
    a: Ket
    b: Ket
    c: Ket

    def __post_init__(self) -> None:
        z = complex(self.coeff)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)) or abs(z) == 0.0:
            raise DegenerateInput(f"term coefficient must be nonzero and finite, got {self.coeff!r}")
        object.__setattr__(self, "coeff", z)

    @property
    def kets(self) -> tuple[Ket, Ket, Ket]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True, eq=False)
class TriDecomposition:
    """Coefficient-weighted sum of product kets on a three-factor space.

    Structural invariants only; the tolerance-dependent hypotheses
    (per-slot non-collinearity, two independent slots) are checked by
    :func:`proddecomp.decomp.check_tri_hypotheses`.
    """

    dims: FactoredDims
    terms: tuple[TriTerm, ...]

    def __post_init__(self) -> None:
        terms = tuple(self.terms)
        if len(self.dims) != 3:
            raise DimensionMismatch("a tridecomposition needs exactly 3 factors")
        if not terms:
            raise DegenerateInput("a decomposition needs at least one term")
        for i, t in enumerate(terms):
            got = (t.a.dim, t.b.dim, t.c.dim)
            if got != self.dims.dims:
                raise DimensionMismatch(
                    f"term {i} ket dims {got} do not match factors {self.dims.dims}"
                )
        object.__setattr__(self, "terms", terms)

    @property
    def n(self) -> int:
        return len(self.terms)


def tensor_product(x: Ket, y: Ket) -> Ket:
    """Kronecker product with row-major convention out[j*dim(y)+k] = x[j]*y[k]."""
    return Ket(np.kron(x.amplitudes, y.amplitudes))


def rho_matrix(d: ProductDecomposition) -> np.ndarray:
    """Bare symmetrized matrix of the weighted sum of product projectors.

    Hermitian PSD by construction; use :func:`build_rho` for the checked
    operator value.
    """
    n = d.dims.total
    m = np.zeros((n, n), dtype=complex)
    for t in d.terms:
        v = np.kron(t.a.amplitudes, t.b.amplitudes)
        m += t.weight * np.outer(v, v.conj())
    return (m + m.conj().T) / 2.0


def build_rho(d: ProductDecomposition) -> StateOperator:
    """Assemble the weighted sum of product projectors as a dense operator.

    The result is symmetrized before construction to suppress rounding
    drift; its trace equals the sum of the weights.
    """
    return StateOperator(d.dims, rho_matrix(d))


def partial_trace(rho: StateOperator, keep: Sequence[int]) -> StateOperator:
    """Trace out all factors not listed in ``keep`` (kept factors stay in order).

    ``keep`` must be a nonempty proper subset of the factor indices.
    """
    dims = rho.dims.dims
    nfac = len(dims)
    kept = tuple(sorted({int(k) for k in keep}))
    if not kept or len(kept) >= nfac:
        raise DimensionMismatch(f"keep must be a nonempty proper subset of factors, got {keep}")
    if any(k < 0 or k >= nfac for k in kept):
        raise DimensionMismatch(f"invalid subsystem indices {keep} for {nfac} factors")

    letters = "abcdef"
    row = list(letters[:nfac])
    col = [letters[nfac + i] if i in kept else row[i] for i in range(nfac)]
    out = [row[i] for i in kept] + [col[i] for i in kept]
    subscripts = "".join(row) + "".join(col) + "->" + "".join(out)

    t = rho.matrix.reshape(*dims, *dims)
    kept_dims = tuple(dims[i] for i in kept)
    size = math.prod(kept_dims)
    reduced = np.einsum(subscripts, t).reshape(size, size)
    reduced = (reduced + reduced.conj().T) / 2.0
    return StateOperator(FactoredDims(kept_dims), reduced)


def build_tri_vector(t: TriDecomposition, zero_eps: float = 1e-8) -> tuple[Ket, float]:
    """Sum coeff_j * a_j (x) b_j (x) c_j; return the normalized ket and the raw norm.

    Callers needing the unnormalized vector multiply the ket amplitudes by
    the returned raw norm.  A sum that cancels below ``zero_eps`` relative
    to the total coefficient weight signals degenerate input.
    """
    v = np.zeros(t.dims.total, dtype=complex)
    for term in t.terms:
        v += term.coeff * np.kron(np.kron(term.a.amplitudes, term.b.amplitudes), term.c.amplitudes)
    raw = float(np.linalg.norm(v))
    scale = float(sum(abs(term.coeff) for term in t.terms))
    if raw <= zero_eps * scale:
        raise DegenerateInput(f"tri vector cancels to norm {raw!r}; degenerate input")
    return Ket(v / raw), raw


def bipartite_matrix(x: Ket, split: FactoredDims) -> np.ndarray:
    """Reshape a ket on a two-factor space to its d1 x d2 coefficient matrix."""
    if len(split) != 2 or split.total != x.dim:
        raise DimensionMismatch(f"split {split.dims} does not factor a dim-{x.dim} ket")
    return x.amplitudes.reshape(split[0], split[1])
