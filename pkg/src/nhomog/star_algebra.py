"""Generated matrix *-algebras: word spans, commutants, irreducibility.

A ``MatTuple`` is a concrete system of generators (T_1, ..., T_k) in M_d;
the operations here compute the *-algebra it generates, its commutant,
and derived verdicts.  Subspaces of matrices (or of matrix-valued
functions) are carried as orthonormal bases in the trace inner product
<X, Y> = tr(Y* X).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np

from .errors import DimensionMismatch, NumericalFailure
from .matrix_core import DEFAULT_TOL, Tolerance, adj, as_matrix, fnorm, opnorm

# Rank decisions require this ratio between the smallest kept and largest
# dropped singular value; anything closer is an error, never a guess.
RANK_GAP_RATIO = 10.0

# Products that are mathematically zero compute as ~1e-16 garbage; rows
# below this floor (relative to the factors' scales) are noise, and
# normalizing them would inject random directions into a span.
NOISE_FLOOR = 1e-13


def _rank_with_gap(s: np.ndarray, rank_cut: float, context: str, scale: float = 0.0) -> int:
    """Rank at a relative singular-value cutoff.

    ``scale`` sets a floor for the reference magnitude: nullspace-style
    decisions pass the natural scale of their constraint rows so that an
    all-noise matrix (no actual constraints) has rank 0 instead of full
    rank."""
    if s.size == 0:
        return 0
    top = max(float(s[0]), float(scale))
    if top <= 0.0:
        return 0
    cut = rank_cut * top
    rank = int(np.sum(s > cut))
    if 0 < rank < s.size:
        dropped = float(s[rank])
        if dropped > 0.0 and float(s[rank - 1]) / dropped < RANK_GAP_RATIO:
            raise NumericalFailure(
                f"ambiguous rank in {context}: singular values "
                f"{s[rank - 1]:.3e} / {dropped:.3e} straddle the cutoff with gap < {RANK_GAP_RATIO}"
            )
    return rank


@dataclass(frozen=True)
class MatTuple:
    """A k-tuple of d x d complex matrices."""

    gens: tuple[np.ndarray, ...]

    def __init__(self, gens) -> None:
        mats = tuple(as_matrix(g, f"generator {i}") for i, g in enumerate(gens))
        if not mats:
            raise DimensionMismatch("a MatTuple needs at least one generator")
        d = mats[0].shape[0]
        for i, g in enumerate(mats):
            if g.shape != (d, d):
                raise DimensionMismatch(f"generator {i} has shape {g.shape}, expected ({d}, {d})")
        for g in mats:
            g.setflags(write=False)
        object.__setattr__(self, "gens", mats)

    @property
    def d(self) -> int:
        return self.gens[0].shape[0]

    @property
    def k(self) -> int:
        return len(self.gens)

    @property
    def scale(self) -> float:
        return max(opnorm(g) for g in self.gens)

    def with_adjoints(self) -> list[np.ndarray]:
        return list(self.gens) + [adj(g) for g in self.gens]

    def conjugated(self, u: np.ndarray) -> "MatTuple":
        u = as_matrix(u, "u")
        return MatTuple([u @ g @ adj(u) for g in self.gens])

    def with_extra(self, extra) -> "MatTuple":
        return MatTuple(list(self.gens) + [extra])

    def allclose(self, other: "MatTuple", atol: float) -> bool:
        if self.d != other.d or self.k != other.k:
            return False
        return all(opnorm(a - b) <= atol * (1.0 + opnorm(a)) for a, b in zip(self.gens, other.gens))


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of a subspace of matrices or matrix-valued
    functions, stored as flattened row vectors."""

    element_shape: tuple[int, ...]
    vectors: np.ndarray = field(repr=False)  # (dim, prod(shape)), orthonormal rows

    @classmethod
    def from_elements(cls, elements, element_shape=None, tol: Tolerance = DEFAULT_TOL,
                      context: str = "subspace") -> "SubspaceBasis":
        elements = [np.asarray(e, dtype=complex) for e in elements]
        if element_shape is None:
            if not elements:
                raise DimensionMismatch("cannot infer element shape from an empty family")
            element_shape = elements[0].shape
        shape = tuple(element_shape)
        ambient = prod(shape)
        rows = []
        for e in elements:
            if e.shape != shape:
                raise DimensionMismatch(f"element shape {e.shape} != {shape} in {context}")
            v = e.ravel()
            nrm = np.linalg.norm(v)
            if nrm > 0.0:
                rows.append(v / nrm)  # normalized: rank decisions see directions, not scales
        if not rows:
            return cls(shape, np.zeros((0, ambient), dtype=complex))
        stack = np.vstack(rows)
        _, s, vh = np.linalg.svd(stack, full_matrices=False)
        rank = _rank_with_gap(s, tol.rank_cut, context)
        return cls(shape, np.ascontiguousarray(vh[:rank]))

    @classmethod
    def from_orthonormal(cls, elements, element_shape=None) -> "SubspaceBasis":
        """Trust the caller that the family is already orthonormal."""
        elements = [np.asarray(e, dtype=complex) for e in elements]
        if element_shape is None:
            element_shape = elements[0].shape
        shape = tuple(element_shape)
        if not elements:
            return cls(shape, np.zeros((0, prod(shape)), dtype=complex))
        return cls(shape, np.vstack([e.ravel() for e in elements]))

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.vectors.shape[1]

    def elements(self) -> list[np.ndarray]:
        return [self.vectors[i].reshape(self.element_shape) for i in range(self.dim)]

    def coefficients(self, x) -> np.ndarray:
        return self.vectors.conj() @ np.asarray(x, dtype=complex).ravel()

    def project(self, x) -> np.ndarray:
        if self.dim == 0:
            return np.zeros(self.element_shape, dtype=complex)
        return (self.coefficients(x) @ self.vectors).reshape(self.element_shape)

    def residual(self, x) -> float:
        return fnorm(np.asarray(x, dtype=complex) - self.project(x))

    def contains(self, x, atol: float) -> bool:
        return self.residual(x) <= atol * (1.0 + fnorm(np.asarray(x, dtype=complex)))

    def gram(self) -> np.ndarray:
        return self.vectors @ self.vectors.conj().T


def word_span(t: MatTuple, tol: Tolerance = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal basis of the *-algebra generated by the tuple
    (non-unital: span of words of length >= 1 in generators and adjoints).

    Iterates S <- S + S.G until the dimension is stable for a full round.
    """
    gens = t.with_adjoints()
    shape = (t.d, t.d)
    floors = [NOISE_FLOOR * fnorm(g) for g in gens]
    basis = SubspaceBasis.from_elements(gens, shape, tol, "word_span seed")
    while True:
        elems = basis.elements()
        # basis elements have unit norm, so a product below the floor is
        # a mathematically-zero product seen through roundoff
        products = [
            p
            for e in elems
            for g, floor in zip(gens, floors)
            if fnorm(p := e @ g) > floor
        ]
        grown = SubspaceBasis.from_elements(elems + products, shape, tol, "word_span closure")
        if grown.dim == basis.dim:
            return grown
        basis = grown


def intertwiner_space(a: MatTuple, b: MatTuple, tol: Tolerance = DEFAULT_TOL) -> SubspaceBasis:
    """Solutions X of X a_j = b_j X and X a_j* = b_j* X for all j."""
    if a.d != b.d or a.k != b.k:
        raise DimensionMismatch("intertwiner_space needs matching dimensions and arities")
    d = a.d
    eye = np.eye(d, dtype=complex)
    blocks = []
    for ga, gb in zip(a.with_adjoints(), b.with_adjoints()):
        scale = max(opnorm(ga), opnorm(gb))
        if scale <= NOISE_FLOOR:
            continue  # a zero generator constrains nothing
        # row-major vec: vec(X g) = (I (x) g^T) vec X, vec(g X) = (g (x) I) vec X
        blocks.append((np.kron(eye, ga.T) - np.kron(gb, eye)) / scale)
    if not blocks:
        return SubspaceBasis(element_shape=(d, d), vectors=np.eye(d * d, dtype=complex))
    stacked = np.vstack(blocks)
    _, s, vh = np.linalg.svd(stacked)
    rank = _rank_with_gap(s, tol.rank_cut, "intertwiner nullspace", scale=1.0)
    null = vh[rank:].conj()
    return SubspaceBasis(element_shape=(d, d), vectors=np.ascontiguousarray(null))


def commutant(t: MatTuple, tol: Tolerance = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal basis of {X : X T_j = T_j X and X T_j* = T_j* X}.

    Always contains the identity, so the dimension is at least 1.  Basis
    elements are re-verified to commute with every generator.
    """
    basis = intertwiner_space(t, t, tol)
    for x in basis.elements():
        for g in t.gens:
            if opnorm(x @ g - g @ x) > 1e-7 * (1.0 + opnorm(g)):
                raise NumericalFailure("commutant basis element fails to commute with a generator")
    return basis


def is_irreducible(t: MatTuple, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff the commutant is trivial; cross-checked against the word
    span filling all of M_d.  The all-zero tuple is not irreducible (the
    zero representation does not count)."""
    if t.scale <= tol.eq_tol:
        return False
    by_commutant = commutant(t, tol).dim == 1
    by_span = word_span(t, tol).dim == t.d ** 2
    if by_commutant != by_span:
        raise NumericalFailure(
            f"irreducibility cross-check disagreement: commutant says {by_commutant}, "
            f"word span says {by_span}"
        )
    return by_commutant


def contains_identity(t: MatTuple, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff I_d lies in the generated (non-unital) *-algebra."""
    span = word_span(t, tol)
    eye = np.eye(t.d, dtype=complex)
    return span.residual(eye) <= tol.eq_tol * np.sqrt(t.d)


def hermitian_basis(basis: SubspaceBasis, tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """Real-orthonormal basis of the Hermitian part of a *-closed
    subspace (works for function-valued elements with shape (..., n, n))."""
    candidates = []
    for b in basis.elements():
        candidates.append((b + adj(b)) / 2.0)
        candidates.append((b - adj(b)) / 2.0j)
    rows = []
    for c in candidates:
        v = c.ravel()
        nrm = np.linalg.norm(v)
        if nrm > NOISE_FLOOR:  # basis elements are unit-norm
            rows.append(np.concatenate([v.real, v.imag]) / nrm)
    if not rows:
        return []
    stack = np.vstack(rows)
    _, s, vh = np.linalg.svd(stack, full_matrices=False)
    rank = _rank_with_gap(s, tol.rank_cut, "hermitian basis")
    out = []
    half = basis.vectors.shape[1]
    for i in range(rank):
        v = vh[i, :half] + 1j * vh[i, half:]
        m = v.reshape(basis.element_shape)
        out.append((m + adj(m)) / 2.0)
    return out
