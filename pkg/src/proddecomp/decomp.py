"""Factorability testing, decomposition matching, blind extraction, instance
generation, and the degenerate-eigenbasis demonstration."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateInput,
    DimensionMismatch,
    HypothesisViolation,
    NotExtractable,
    OperatorMismatch,
)
from .purification import purify, relating_unitary
from .subspace import (
    DEFAULT_TOL,
    ToleranceConfig,
    collinear_pairs,
    column_stack,
    fix_phase,
    rank_and_independence,
)
from .tensor import (
    FactoredDims,
    Ket,
    ProductDecomposition,
    ProductTerm,
    StateOperator,
    TriDecomposition,
    TriTerm,
    build_rho,
    build_tri_vector,
    frobenius,
    rho_matrix,
    tensor_product,
)

#: Absolute tolerance for matched weights / coefficient magnitudes
#: (applied on the normalized-weight scale).
WEIGHT_ATOL = 1e-6

#: Relative reconstruction error required for a successful extraction.
RECONSTRUCTION_RTOL = 1e-6

#: Probe redraws per side before the factor roles are swapped.
EXTRACTION_RETRIES = 8

_SLOT_NAMES = ("a", "b", "c")


@dataclass(frozen=True)
class TermCertificate:
    """Per-term evidence for a matched pair of decomposition terms.

    ``overlap_*`` are the inner products between the paired kets in each
    factor slot (unit magnitude up to tolerance when the match holds);
    ``overlap_c`` is None for bipartite matches.  Weights are the raw
    weights (or coefficient magnitudes) of the paired terms.
    """

    overlap_a: complex
    overlap_b: complex
    overlap_c: complex | None
    weight_first: float
    weight_second: float


@dataclass(frozen=True)
class MatchResult:
    """Certified equivalence between two decompositions.

    ``permutation[j]`` is the index of the first decomposition's term that
    the second decomposition's term ``j`` matches.  ``residual`` is the
    largest constraint violation observed while certifying.
    """

    n: int
    permutation: tuple[int, ...]
    per_term: tuple[TermCertificate, ...]
    residual: float

    def __post_init__(self) -> None:
        if sorted(self.permutation) != list(range(self.n)):
            raise HypothesisViolation(f"permutation {self.permutation} is not a bijection on 0..{self.n - 1}")
        if len(self.per_term) != self.n:
            raise DimensionMismatch("per-term certificates do not match the term count")


@dataclass(frozen=True)
class ExtractionReport:
    """Outcome of a successful blind extraction."""

    decomposition: ProductDecomposition
    reconstruction_error: float
    probes_used: int
    side: int  # factor index whose ket set came out linearly independent


@dataclass(frozen=True)
class DegeneracyReport:
    """Numbers behind the degenerate-eigenbasis demonstration."""

    eigenvalues: tuple[float, float, float, float]
    qform_residual: float
    q1_schmidt: tuple[float, float]
    q2_schmidt: tuple[float, float]
    q1_factorable: bool
    q2_factorable: bool
    tri_qform_residual: float
    notes: tuple[str, ...]


# ---------------------------------------------------------------------------
# hypothesis checks


def check_product_hypotheses(
    d: ProductDecomposition, tol: ToleranceConfig = DEFAULT_TOL, label: str = "decomposition"
) -> tuple[bool, bool]:
    """Check the uniqueness hypotheses of a weighted product decomposition.

    Each ket set must be non-collinear and at least one of them linearly
    independent.  Returns the (a_independent, b_independent) flags; raises
    HypothesisViolation naming the offending set and pair otherwise.
    """
    a_kets = [t.a for t in d.terms]
    b_kets = [t.b for t in d.terms]
    for name, kets in (("a", a_kets), ("b", b_kets)):
        pairs = collinear_pairs(kets, tol)
        if pairs:
            i, j = pairs[0]
            raise HypothesisViolation(f"{label}: {name}-set collinear pair ({i}, {j})")
    _, a_ind = rank_and_independence(a_kets, tol)
    _, b_ind = rank_and_independence(b_kets, tol)
    if not (a_ind or b_ind):
        raise HypothesisViolation(f"{label}: neither ket set is linearly independent")
    return a_ind, b_ind


def check_tri_hypotheses(
    t: TriDecomposition, tol: ToleranceConfig = DEFAULT_TOL, label: str = "tridecomposition"
) -> tuple[bool, bool, bool]:
    """Check the tridecomposition hypotheses.

    Every slot's ket set must be non-collinear and at least two of the
    three sets linearly independent.  Returns per-slot independence flags.
    """
    slot_sets = [[term.kets[s] for term in t.terms] for s in range(3)]
    for s, kets in enumerate(slot_sets):
        pairs = collinear_pairs(kets, tol)
        if pairs:
            i, j = pairs[0]
            raise HypothesisViolation(f"{label}: {_SLOT_NAMES[s]}-set collinear pair ({i}, {j})")
    flags = tuple(rank_and_independence(kets, tol)[1] for kets in slot_sets)
    if sum(flags) < 2:
        independent = [_SLOT_NAMES[s] for s in range(3) if flags[s]]
        raise HypothesisViolation(
            f"{label}: fewer than two linearly independent ket sets (independent: {independent})"
        )
    return flags  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# factorability (Schmidt rank 1)


def schmidt_values(x: Ket, split: FactoredDims) -> np.ndarray:
    """Singular values of the ket's coefficient matrix under the split."""
    if len(split) != 2 or split.total != x.dim:
        raise DimensionMismatch(f"split {split.dims} does not factor a dim-{x.dim} ket")
    return np.linalg.svd(x.amplitudes.reshape(split[0], split[1]), compute_uv=False)


def is_factorable(
    x: Ket, split: FactoredDims, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[bool, tuple[Ket, Ket] | None]:
    """Decide whether a bipartite ket is a single tensor product.

    The ket is factorable when its second Schmidt value is below
    eps_rank times the first.  On success the principal left/right
    singular vectors are returned as the factors, each phased so that its
    first significant component is real positive.
    """
    if len(split) != 2 or split.total != x.dim:
        raise DimensionMismatch(f"split {split.dims} does not factor a dim-{x.dim} ket")
    u, s, vh = np.linalg.svd(x.amplitudes.reshape(split[0], split[1]))
    second = float(s[1]) if s.size > 1 else 0.0
    if second >= tol.eps_rank * float(s[0]):
        return False, None
    left = Ket(fix_phase(u[:, 0], tol.eps_rank))
    right = Ket(fix_phase(vh[0, :], tol.eps_rank))
    return True, (left, right)


def split_pair_terms(
    coeffs: Sequence[complex],
    pair_kets: Sequence[Ket],
    third_kets: Sequence[Ket],
    split: FactoredDims,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> TriDecomposition:
    """Recast sum_k coeff_k |q_k d_k> with q_k on a two-factor space into a
    tridecomposition by factoring each q_k across ``split``.

    A non-factorable q_k is a hypothesis violation: the expansion cannot
    be compared term-by-term against genuine product-ket decompositions.
    """
    if not (len(coeffs) == len(pair_kets) == len(third_kets)):
        raise DimensionMismatch("coeffs, pair kets, and third kets must have equal lengths")
    terms = []
    for k, (z, q, d) in enumerate(zip(coeffs, pair_kets, third_kets)):
        ok, factors = is_factorable(q, split, tol)
        if not ok:
            sv = schmidt_values(q, split)
            raise HypothesisViolation(
                f"factorability hypothesis violated: term {k} first-slot ket is not a product "
                f"across factors {split.dims} (schmidt values {sv[0]:.6g}, {sv[1]:.6g})"
            )
        a, b = factors
        lam = complex(np.vdot(np.kron(a.amplitudes, b.amplitudes), q.amplitudes))
        terms.append(TriTerm(complex(z) * lam, a, b, d))
    dims = FactoredDims((split[0], split[1], third_kets[0].dim))
    return TriDecomposition(dims, tuple(terms))


# ---------------------------------------------------------------------------
# matching


def match_tridecomposition(
    t1: TriDecomposition, t2: TriDecomposition, tol: ToleranceConfig = DEFAULT_TOL
) -> MatchResult:
    """Certify that two tridecompositions of the same vector are term-wise
    collinear up to a permutation, with equal coefficient magnitudes.

    Pipeline: verify hypotheses on both inputs and that the two global
    vectors agree (including coefficient phases); pick a factor slot whose
    ket sets are independent in both inputs (search order c, a, b); expand
    the first decomposition's kets in that slot over the second's by least
    squares; threshold each expansion column to its single significant
    coefficient, which defines the permutation; then certify per-slot
    collinearity and coefficient-magnitude equality.  The residual is the
    largest violation observed across all certified constraints.
    """
    if t1.dims != t2.dims:
        raise DimensionMismatch(f"factor dims differ: {t1.dims.dims} vs {t2.dims.dims}")
    ind1 = check_tri_hypotheses(t1, tol, label="first tridecomposition")
    ind2 = check_tri_hypotheses(t2, tol, label="second tridecomposition")

    ket1, norm1 = build_tri_vector(t1)
    ket2, norm2 = build_tri_vector(t2)
    v1 = norm1 * ket1.amplitudes
    v2 = norm2 * ket2.amplitudes
    gap = float(np.linalg.norm(v1 - v2))
    if gap > tol.eps_eq * max(1.0, norm1, norm2):
        raise OperatorMismatch(
            f"tripartite vectors differ by {gap:.3e} (coefficient phases included)"
        )

    slot = next((s for s in (2, 0, 1) if ind1[s] and ind2[s]), None)
    if slot is None:
        raise HypothesisViolation("no factor slot is linearly independent in both tridecompositions")
    if t1.n != t2.n:
        raise HypothesisViolation(f"term-count mismatch after rank analysis: {t1.n} vs {t2.n}")
    n = t1.n

    first = column_stack([term.kets[slot] for term in t1.terms])
    second = column_stack([term.kets[slot] for term in t2.terms])
    sol, *_ = np.linalg.lstsq(second, first, rcond=None)
    gamma = sol.T  # gamma[j, k]: first_j = sum_k gamma[j, k] second_k
    residual = float(np.linalg.norm(second @ sol - first))

    perm: list[int] = []
    for k in range(n):
        col = np.abs(gamma[:, k])
        j = int(np.argmax(col))
        if col[j] == 0.0:
            raise HypothesisViolation(
                f"factorability hypothesis violated: {_SLOT_NAMES[slot]}-slot expansion column {k} vanishes"
            )
        significant = int(np.count_nonzero(col >= tol.eps_rank * col[j]))
        if significant != 1:
            raise HypothesisViolation(
                f"factorability hypothesis violated: {_SLOT_NAMES[slot]}-slot expansion column {k} "
                f"has {significant} significant coefficients"
            )
        rest = np.delete(col, j)
        if rest.size:
            residual = max(residual, float(rest.max()))
        perm.append(j)
    if len(set(perm)) != n:
        raise HypothesisViolation(f"candidate permutation {perm} is not a bijection")

    certs = []
    for k in range(n):
        j = perm[k]
        gdev = abs(abs(complex(gamma[j, k])) - 1.0)
        if gdev > tol.eps_col:
            raise HypothesisViolation(
                f"{_SLOT_NAMES[slot]}-slot expansion coefficient for term pair ({j}, {k}) "
                f"has magnitude {abs(complex(gamma[j, k])):.12g}, expected 1"
            )
        residual = max(residual, gdev)
        overlaps = []
        for s in range(3):
            o = t1.terms[j].kets[s].overlap(t2.terms[k].kets[s])
            deviation = abs(abs(o) - 1.0)
            if deviation > tol.eps_col:
                raise HypothesisViolation(
                    f"collinearity certificate failed in slot {_SLOT_NAMES[s]} for term pair "
                    f"({j}, {k}): overlap magnitude {abs(o):.12g}"
                )
            residual = max(residual, deviation)
            overlaps.append(o)
        w1 = abs(t1.terms[j].coeff)
        w2 = abs(t2.terms[k].coeff)
        dw = abs(w1 - w2)
        if dw > WEIGHT_ATOL * max(1.0, w1, w2):
            raise HypothesisViolation(
                f"coefficient magnitude mismatch for term pair ({j}, {k}): {w1!r} vs {w2!r}"
            )
        residual = max(residual, dw)
        certs.append(TermCertificate(overlaps[0], overlaps[1], overlaps[2], w1, w2))
    return MatchResult(n, tuple(perm), tuple(certs), residual)


def match_bidecomposition(
    d1: ProductDecomposition, d2: ProductDecomposition, tol: ToleranceConfig = DEFAULT_TOL
) -> MatchResult:
    """Certify that two weighted product decompositions of the same operator
    are term-wise collinear up to a permutation, with equal weights.

    Pipeline: check hypotheses and operator equality, lift both inputs to
    tripartite vectors over an auxiliary factor, construct the unitary
    relating the two purifications, map the second decomposition's
    auxiliary kets through it, and certify with the tridecomposition
    matcher.  The reported certificates carry the a/b-slot overlaps and
    the raw weights; the auxiliary slot is construction detail and is not
    reported.
    """
    if d1.dims != d2.dims:
        raise DimensionMismatch(f"factor dims differ: {d1.dims.dims} vs {d2.dims.dims}")
    check_product_hypotheses(d1, tol, label="first decomposition")
    check_product_hypotheses(d2, tol, label="second decomposition")

    # Hermitian PSD by construction once the hypotheses hold, so the bare
    # matrices suffice for the equality gate
    m1 = rho_matrix(d1)
    m2 = rho_matrix(d2)
    gap = frobenius(m1 - m2)
    if gap > tol.eps_eq * max(1.0, frobenius(m1), frobenius(m2)):
        raise OperatorMismatch(f"operators differ by {gap:.3e} in Frobenius norm")

    dim3 = max(d1.n, d2.n)
    p1 = purify(d1, dim3)
    p2 = purify(d2, dim3)
    psi, _ = build_tri_vector(p1)
    phi, _ = build_tri_vector(p2)
    split = FactoredDims((d1.dims.total, dim3))
    u = relating_unitary(psi, phi, split, tol)
    mapped = TriDecomposition(
        p2.dims,
        tuple(
            TriTerm(term.coeff, term.a, term.b, Ket.normalize(u.matrix @ term.c.amplitudes))
            for term in p2.terms
        ),
    )
    tri = match_tridecomposition(p1, mapped, tol)

    wscale = max(1.0, d1.weight_sum, d2.weight_sum)
    residual = tri.residual
    certs = []
    for k, cert in enumerate(tri.per_term):
        j = tri.permutation[k]
        w1 = d1.terms[j].weight
        w2 = d2.terms[k].weight
        dw = abs(w1 - w2)
        if dw > WEIGHT_ATOL * wscale:
            raise HypothesisViolation(f"weight mismatch for term pair ({j}, {k}): {w1!r} vs {w2!r}")
        residual = max(residual, dw)
        certs.append(TermCertificate(cert.overlap_a, cert.overlap_b, None, w1, w2))
    return MatchResult(tri.n, tri.permutation, tuple(certs), residual)


# ---------------------------------------------------------------------------
# blind extraction


def _hermitian_probe(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2.0


def _try_extract_side(
    matrix: np.ndarray,
    d1: int,
    d2: int,
    rng: np.random.Generator,
    tol: ToleranceConfig,
    max_error: float,
) -> tuple[list[tuple[float, Ket, Ket]] | None, float, int]:
    """One-sided extraction assuming the first factor's kets are independent.

    Returns (terms, relative error, probes drawn); terms is None when all
    probe draws failed.
    """
    rho4 = matrix.reshape(d1, d2, d1, d2)
    # support of the reduced operator on the first factor, computed directly
    # (the input operator was validated once by the caller)
    red = np.einsum("jkJk->jJ", rho4)
    red = (red + red.conj().T) / 2.0
    evals, evecs = np.linalg.eigh(red)
    lam_max = max(float(evals[-1]), 0.0)
    s = evecs[:, evals >= tol.eps_rank * lam_max]
    r = s.shape[1]
    probes = 0
    if r == 0:
        return None, np.inf, probes
    scale = frobenius(matrix)

    for _ in range(EXTRACTION_RETRIES):
        x1 = _hermitian_probe(rng, d2)
        x2 = _hermitian_probe(rng, d2)
        probes += 2

        m1 = np.einsum("jkJK,Kk->jJ", rho4, x1)
        m2 = np.einsum("jkJK,Kk->jJ", rho4, x2)
        mt1 = s.conj().T @ m1 @ s
        mt2 = s.conj().T @ m2 @ s

        sv = np.linalg.svd(mt2, compute_uv=False)
        if sv[0] == 0.0 or sv[-1] < 1e-10 * sv[0]:
            continue  # unlucky probe: second contraction nearly singular
        ratios, directions = np.linalg.eig(mt1 @ np.linalg.inv(mt2))

        if r > 1:
            gaps = [abs(ratios[i] - ratios[j]) for i in range(r) for j in range(i + 1, r)]
            if min(gaps) < 1e3 * tol.eps_rank * max(1.0, float(np.abs(ratios).max())):
                continue  # nearly degenerate probe responses: redraw

        a_cols = s @ directions
        a_cols /= np.linalg.norm(a_cols, axis=0, keepdims=True)
        asv = np.linalg.svd(a_cols, compute_uv=False)
        if asv[-1] < tol.eps_rank * asv[0]:
            continue
        duals = np.linalg.pinv(a_cols).conj().T

        terms: list[tuple[float, Ket, Ket]] = []
        ok = True
        for t in range(r):
            rt = np.einsum("j,jkJK,J->kK", duals[:, t].conj(), rho4, duals[:, t])
            rt = (rt + rt.conj().T) / 2.0
            w = float(np.trace(rt).real)
            if w <= 0.0:
                ok = False
                break
            _, bvecs = np.linalg.eigh(rt)
            a_ket = Ket.normalize(fix_phase(a_cols[:, t], tol.eps_rank))
            b_ket = Ket.normalize(fix_phase(bvecs[:, -1], tol.eps_rank))
            terms.append((w, a_ket, b_ket))
        if not ok:
            continue

        recon = np.zeros_like(matrix)
        for w, a_ket, b_ket in terms:
            v = np.kron(a_ket.amplitudes, b_ket.amplitudes)
            recon += w * np.outer(v, v.conj())
        err = frobenius(recon - matrix) / scale
        if err <= max_error:
            return terms, err, probes
    return None, np.inf, probes


def extract_decomposition(
    rho: StateOperator,
    tol: ToleranceConfig = DEFAULT_TOL,
    seed: int = 0,
    max_error: float = RECONSTRUCTION_RTOL,
) -> ExtractionReport:
    """Recover a weighted product decomposition from the operator alone.

    Simultaneous-diagonalization scheme: draw two random Hermitian probes
    X1, X2 on the second factor, contract M_i = Tr_2[rho (I (x) X_i)]
    (each equals A diag(w_j <b_j|X_i|b_j>) A^dagger when the first
    factor's kets are independent), and eigendecompose M1 M2^{-1} on the
    first factor's support to recover the a-directions.  The dual basis
    then isolates each w_j |b_j><b_j| slice of rho.  Unlucky or degenerate
    probes are redrawn up to a cap; if the side fails the factor roles are
    swapped.  Success requires relative Frobenius reconstruction error at
    most ``max_error`` and a hypothesis-clean decomposition.
    """
    if len(rho.dims) != 2:
        raise DimensionMismatch("extraction needs an operator on exactly 2 factors")
    d1, d2 = rho.dims
    rng = np.random.default_rng(seed)
    matrix = (rho.matrix + rho.matrix.conj().T) / 2.0
    probes_total = 0

    for side in (0, 1):
        if side == 0:
            mat, da, db = matrix, d1, d2
        else:
            mat = matrix.reshape(d1, d2, d1, d2).transpose(1, 0, 3, 2).reshape(d1 * d2, d1 * d2)
            da, db = d2, d1
        terms, err, probes = _try_extract_side(mat, da, db, rng, tol, max_error)
        probes_total += probes
        if terms is None:
            continue
        if side == 1:
            terms = [(w, b_ket, a_ket) for w, a_ket, b_ket in terms]
        terms.sort(key=lambda t: -t[0])
        dec = ProductDecomposition(rho.dims, tuple(ProductTerm(w, a, b) for w, a, b in terms))
        try:
            check_product_hypotheses(dec, tol, label="extracted decomposition")
        except HypothesisViolation:
            continue
        return ExtractionReport(dec, err, probes_total, side)
    raise NotExtractable(
        "not extractable under hypotheses: no side produced a reconstruction within "
        f"{max_error:g} after {probes_total} probes"
    )


# ---------------------------------------------------------------------------
# instance generation

_GEN_MAX_OVERLAP = 1e-3  # pairwise |<x|y>| <= 1 - this margin
_GEN_MAX_COND = 1e4  # condition number bound for independent sets
_GEN_ATTEMPTS = 200


def _random_unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def _independent_kets(rng: np.random.Generator, dim: int, count: int) -> list[Ket]:
    """Well-conditioned, well-separated linearly independent unit kets."""
    for _ in range(_GEN_ATTEMPTS):
        g = rng.standard_normal((dim, count)) + 1j * rng.standard_normal((dim, count))
        q, _ = np.linalg.qr(g)
        mix = np.eye(count) + 0.3 * (
            rng.standard_normal((count, count)) + 1j * rng.standard_normal((count, count))
        )
        a = q[:, :count] @ mix
        a /= np.linalg.norm(a, axis=0, keepdims=True)
        sv = np.linalg.svd(a, compute_uv=False)
        if sv[-1] <= 0 or sv[0] / sv[-1] > _GEN_MAX_COND:
            continue
        gram = np.abs(a.conj().T @ a - np.eye(count))
        if count > 1 and gram.max() > 1.0 - _GEN_MAX_OVERLAP:
            continue
        return [Ket(a[:, i]) for i in range(count)]
    raise DegenerateInput(f"failed to generate {count} independent kets in dim {dim}")


def _dependent_noncollinear_kets(rng: np.random.Generator, dim: int, count: int) -> list[Ket]:
    """Non-collinear unit kets that are necessarily linearly dependent.

    The kets span a subspace of dimension min(dim, count - 1) >= 2, so
    dependence is forced while every pair stays well separated.
    """
    span = min(dim, count - 1)
    if count < 3 or span < 2:
        raise DegenerateInput(
            f"cannot build {count} dependent non-collinear kets in dim {dim} "
            "(a dependent pair of unit kets is collinear)"
        )
    basis, _ = np.linalg.qr(rng.standard_normal((dim, span)) + 1j * rng.standard_normal((dim, span)))
    for _ in range(_GEN_ATTEMPTS):
        cols = []
        for _ in range(count):
            cols.append(basis[:, :span] @ _random_unit(rng, span))
        a = np.column_stack(cols)
        a /= np.linalg.norm(a, axis=0, keepdims=True)
        gram = np.abs(a.conj().T @ a - np.eye(count))
        if gram.max() > 1.0 - _GEN_MAX_OVERLAP:
            continue
        return [Ket(a[:, i]) for i in range(count)]
    raise DegenerateInput(f"failed to generate {count} dependent non-collinear kets in dim {dim}")


BI_PROFILES = ("both-independent", "a-independent-only", "b-independent-only")
TRI_PROFILES = ("all-independent", "a-dependent", "b-dependent", "c-dependent")


def generate_instance(
    n: int,
    d1: int,
    d2: int,
    seed: int = 0,
    profile: str = "both-independent",
    tol: ToleranceConfig = DEFAULT_TOL,
) -> ProductDecomposition:
    """Random hypothesis-satisfying product decomposition, deterministic under seed.

    Profiles pin which ket sets are linearly independent; a
    "...-independent-only" profile makes the other set non-collinear but
    necessarily dependent (requires n >= 3).  Weights are positive and
    normalized to sum 1.  Generated sets keep safety margins (pairwise
    overlap and conditioning) well inside the default tolerances.
    """
    if profile not in BI_PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {BI_PROFILES}")
    if n < 1:
        raise ValueError(f"term count must be positive, got {n}")
    rng = np.random.default_rng(seed)

    if profile == "both-independent":
        if n > min(d1, d2):
            raise ValueError(f"infeasible: {n} independent kets do not fit dims ({d1}, {d2})")
        a_kets = _independent_kets(rng, d1, n)
        b_kets = _independent_kets(rng, d2, n)
    elif profile == "a-independent-only":
        if n > d1:
            raise ValueError(f"infeasible: {n} independent kets do not fit dim {d1}")
        if n < 3 or d2 < 2:
            raise ValueError(
                f"infeasible: a dependent non-collinear b-set needs n >= 3 and d2 >= 2, got n={n}, d2={d2}"
            )
        a_kets = _independent_kets(rng, d1, n)
        b_kets = _dependent_noncollinear_kets(rng, d2, n)
    else:  # b-independent-only
        if n > d2:
            raise ValueError(f"infeasible: {n} independent kets do not fit dim {d2}")
        if n < 3 or d1 < 2:
            raise ValueError(
                f"infeasible: a dependent non-collinear a-set needs n >= 3 and d1 >= 2, got n={n}, d1={d1}"
            )
        a_kets = _dependent_noncollinear_kets(rng, d1, n)
        b_kets = _independent_kets(rng, d2, n)

    weights = rng.uniform(0.5, 1.5, n)
    weights /= weights.sum()
    dec = ProductDecomposition(
        FactoredDims((d1, d2)),
        tuple(ProductTerm(float(w), a, b) for w, a, b in zip(weights, a_kets, b_kets)),
    )
    check_product_hypotheses(dec, tol, label="generated decomposition")
    return dec


def generate_tri_instance(
    n: int,
    d1: int,
    d2: int,
    d3: int,
    seed: int = 0,
    profile: str = "all-independent",
    tol: ToleranceConfig = DEFAULT_TOL,
) -> TriDecomposition:
    """Random hypothesis-satisfying tridecomposition, deterministic under seed.

    A "<slot>-dependent" profile makes that slot's set non-collinear but
    dependent (requires n >= 3) while the other two stay independent.
    Coefficients are nonzero complex with random phases.
    """
    if profile not in TRI_PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {TRI_PROFILES}")
    if n < 1:
        raise ValueError(f"term count must be positive, got {n}")
    rng = np.random.default_rng(seed)
    dims = (d1, d2, d3)
    dep_slot = {"all-independent": None, "a-dependent": 0, "b-dependent": 1, "c-dependent": 2}[profile]

    slot_kets: list[list[Ket]] = []
    for s in range(3):
        if s == dep_slot:
            if n < 3 or dims[s] < 2:
                raise ValueError(
                    f"infeasible: a dependent non-collinear {_SLOT_NAMES[s]}-set needs n >= 3 and dim >= 2"
                )
            slot_kets.append(_dependent_noncollinear_kets(rng, dims[s], n))
        else:
            if n > dims[s]:
                raise ValueError(
                    f"infeasible: {n} independent kets do not fit {_SLOT_NAMES[s]}-slot dim {dims[s]}"
                )
            slot_kets.append(_independent_kets(rng, dims[s], n))

    mags = rng.uniform(0.5, 1.2, n)
    phases = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, n))
    tri = TriDecomposition(
        FactoredDims(dims),
        tuple(
            TriTerm(complex(m * p), slot_kets[0][j], slot_kets[1][j], slot_kets[2][j])
            for j, (m, p) in enumerate(zip(mags, phases))
        ),
    )
    check_tri_hypotheses(tri, tol, label="generated tridecomposition")
    return tri


def phase_permuted_twin(
    dec: ProductDecomposition | TriDecomposition, seed: int = 0
) -> tuple[ProductDecomposition | TriDecomposition, tuple[int, ...]]:
    """Equivalent twin: terms permuted and each ket multiplied by a random phase.

    Returns (twin, perm) with twin.terms[j] built from dec.terms[perm[j]],
    so matching the twin (second) against the original (first) recovers
    exactly ``perm``.  For tridecompositions the coefficient absorbs the
    inverse of the product of ket phases, keeping the global vector fixed
    including its phase.
    """
    rng = np.random.default_rng(seed)
    n = dec.n
    perm = tuple(int(i) for i in rng.permutation(n))
    if isinstance(dec, ProductDecomposition):
        terms = []
        for j in range(n):
            src = dec.terms[perm[j]]
            pa, pb = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, 2))
            terms.append(ProductTerm(src.weight, src.a.phased(pa), src.b.phased(pb)))
        return ProductDecomposition(dec.dims, tuple(terms)), perm
    terms = []
    for j in range(n):
        src = dec.terms[perm[j]]
        pa, pb, pc = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, 3))
        terms.append(TriTerm(src.coeff / (pa * pb * pc), src.a.phased(pa), src.b.phased(pb), src.c.phased(pc)))
    return TriDecomposition(dec.dims, tuple(terms)), perm


# ---------------------------------------------------------------------------
# degenerate-eigenbasis demonstration


def demo_degeneracy(tol: ToleranceConfig = DEFAULT_TOL) -> DegeneracyReport:
    """Why a degenerate eigenbasis does not break uniqueness.

    Build the two-term half/half operator over orthonormal pairs, whose
    eigenvalues are (1/2, 1/2, 0, 0).  The degenerate eigenvectors can be
    rotated into q_{1,2} = (|a1 b1> +/- |a2 b2>)/sqrt(2), which reproduce
    the operator exactly, but both q kets fail factorability (Schmidt
    values 1/sqrt(2) each), so the rotated form is not a competing
    weighted product decomposition.  The same rotation applied to the
    tripartite lift hits the same obstruction.
    """
    a = [Ket.basis(2, 0), Ket.basis(2, 1)]
    b = [Ket.basis(2, 0), Ket.basis(2, 1)]
    dims = FactoredDims((2, 2))
    dec = ProductDecomposition(
        dims, (ProductTerm(0.5, a[0], b[0]), ProductTerm(0.5, a[1], b[1]))
    )
    rho = build_rho(dec)
    evals = tuple(float(v) for v in sorted(np.linalg.eigvalsh(rho.matrix), reverse=True))

    ab1 = tensor_product(a[0], b[0])
    ab2 = tensor_product(a[1], b[1])
    q1 = Ket.normalize(ab1.amplitudes + ab2.amplitudes)
    q2 = Ket.normalize(ab1.amplitudes - ab2.amplitudes)
    qform = 0.5 * q1.projector() + 0.5 * q2.projector()
    qform_residual = frobenius(qform - rho.matrix)

    q1_fact, _ = is_factorable(q1, dims, tol)
    q2_fact, _ = is_factorable(q2, dims, tol)
    q1_schmidt = tuple(float(v) for v in schmidt_values(q1, dims))
    q2_schmidt = tuple(float(v) for v in schmidt_values(q2, dims))

    c = [Ket.basis(2, 0), Ket.basis(2, 1)]
    psi = Ket.normalize(
        np.kron(ab1.amplitudes, c[0].amplitudes) + np.kron(ab2.amplitudes, c[1].amplitudes)
    )
    dplus = Ket.normalize(c[0].amplitudes + c[1].amplitudes)
    dminus = Ket.normalize(c[0].amplitudes - c[1].amplitudes)
    psi_q = Ket.normalize(
        np.kron(q1.amplitudes, dplus.amplitudes) + np.kron(q2.amplitudes, dminus.amplitudes)
    )
    tri_qform_residual = float(np.linalg.norm(psi.amplitudes - psi_q.amplitudes))

    notes = (
        "the rotated eigenvectors q1, q2 reproduce the operator but are entangled across "
        "the fixed factoring, so the q-form is not a competing weighted product decomposition",
        "the tripartite rotation onto (q1 d1, q2 d2) meets the same factorability obstruction; "
        "uniqueness is always relative to the chosen factoring",
    )
    return DegeneracyReport(
        eigenvalues=evals,  # type: ignore[arg-type]
        qform_residual=qform_residual,
        q1_schmidt=q1_schmidt,  # type: ignore[arg-type]
        q2_schmidt=q2_schmidt,  # type: ignore[arg-type]
        q1_factorable=q1_fact,
        q2_factorable=q2_fact,
        tri_qform_residual=tri_qform_residual,
        notes=notes,
    )
