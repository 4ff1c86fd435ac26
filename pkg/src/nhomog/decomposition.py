"""Irreducible block decomposition and unitary-equivalence classification.

``decompose`` splits the carrier space of a MatTuple into irreducible
invariant blocks with a seeded random commutant element, groups the
blocks into unitary-equivalence classes with multiplicities, and flags
common null blocks.  ``homogeneity_verdict`` and ``n_spectrum`` are the
derived verdicts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotIrreducible, NotNHomogeneous, NumericalFailure
from .matrix_core import DEFAULT_TOL, Tolerance, adj, fix_phase, opnorm
from .star_algebra import MatTuple, commutant, hermitian_basis, intertwiner_space, is_irreducible

_SPLITTER_RESEEDS = 5
_FINGERPRINT_ATOL = 1e-6
_MAX_FINGERPRINT_WORDS = 400_000


@dataclass(frozen=True)
class Block:
    """One invariant block: a d x m isometry onto the subspace, the m x m
    compressed tuple, the class it belongs to, and the unitary aligning
    the class representative with this block's compression."""

    isometry: np.ndarray = field(repr=False)
    rep: MatTuple
    class_id: int | None
    aligner: np.ndarray | None = field(repr=False)
    is_zero: bool

    @property
    def dim(self) -> int:
        return self.rep.d


@dataclass(frozen=True)
class Decomposition:
    source: MatTuple
    v: np.ndarray = field(repr=False)
    blocks: tuple[Block, ...]
    classes: tuple[MatTuple, ...]
    multiplicities: tuple[int, ...]
    seed: int

    @property
    def zero_dim(self) -> int:
        return sum(b.dim for b in self.blocks if b.is_zero)

    @property
    def nonzero_dims(self) -> tuple[int, ...]:
        return tuple(b.dim for b in self.blocks if not b.is_zero)


@dataclass(frozen=True)
class NSpectrum:
    """Unitary-orbit representatives of the irreducible n-dimensional
    blocks, with multiplicities.  ``zero_in_closure`` records whether the
    zero representation is adjoined when taking the closure (at finite
    dimension: exactly when null blocks exist)."""

    n: int
    points: tuple[MatTuple, ...]
    multiplicities: tuple[int, ...]
    zero_in_closure: bool


@dataclass(frozen=True)
class HomogeneityReport:
    is_n_homogeneous: bool
    n: int
    block_dims: tuple[int, ...]
    zero_dim: int
    reason: str
    decomposition: Decomposition

    def to_json(self) -> dict:
        from .jsonio import encode_matrix

        return {
            "is_n_homogeneous": self.is_n_homogeneous,
            "n": self.n,
            "classes": [
                {
                    "dim": cls.d,
                    "multiplicity": mult,
                    "generators": [encode_matrix(g) for g in cls.gens],
                }
                for cls, mult in zip(self.decomposition.classes, self.decomposition.multiplicities)
            ],
            "zero_dim": self.zero_dim,
            "reason": self.reason,
        }


def word_trace_fingerprint(t: MatTuple, max_len: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Sorted traces of all words in generators/adjoints up to length
    min(6, 2 d^2): a unitary-invariant filter for tuple equivalence.

    Real and imaginary parts are sorted separately per word length, which
    keeps the elementwise comparison stable under tiny perturbations.
    """
    d = t.d
    length = max_len if max_len is not None else min(6, 2 * d * d)
    letters = np.stack(t.with_adjoints())
    level = letters
    reals, imags = [], []
    for step in range(length):
        tr = np.einsum("wii->w", level)
        reals.append(np.sort(tr.real))
        imags.append(np.sort(tr.imag))
        if step + 1 < length:
            if level.shape[0] * letters.shape[0] > _MAX_FINGERPRINT_WORDS:
                break  # filter only; truncation depends only on (k, d)
            level = np.einsum("wij,ljk->wlik", level, letters).reshape(-1, d, d)
    return np.concatenate(reals), np.concatenate(imags)


def fingerprints_match(fa, fb, atol: float = _FINGERPRINT_ATOL) -> bool:
    return (
        fa[0].shape == fb[0].shape
        and np.allclose(fa[0], fb[0], rtol=1e-9, atol=atol)
        and np.allclose(fa[1], fb[1], rtol=1e-9, atol=atol)
    )


def unitarily_equivalent(a: MatTuple, b: MatTuple, tol: Tolerance = DEFAULT_TOL) -> np.ndarray | None:
    """Return a unitary U with U A_j U* = B_j for all j, or None.

    Fast-rejects on mismatched word-trace fingerprints, then solves the
    intertwiner system; by Schur's lemma the solution space of two
    irreducible tuples has dimension 0 or 1.
    """
    if a.d != b.d or a.k != b.k:
        raise DimensionMismatch("tuples must share dimension and arity")
    if not is_irreducible(a, tol) or not is_irreducible(b, tol):
        raise NotIrreducible("unitarily_equivalent requires irreducible tuples")
    if not fingerprints_match(word_trace_fingerprint(a), word_trace_fingerprint(b)):
        return None
    space = intertwiner_space(a, b, tol)
    if space.dim == 0:
        return None
    if space.dim > 1:
        raise NumericalFailure(
            f"intertwiner space of two irreducibles has dimension {space.dim} (Schur violation)"
        )
    w = space.elements()[0]
    d = a.d
    gram = adj(w) @ w
    lam = float(np.trace(gram).real) / d
    if lam <= 0.0 or opnorm(gram - lam * np.eye(d)) > tol.eq_tol * (1.0 + lam):
        return None
    u = fix_phase(w / np.sqrt(lam))
    residual = max(opnorm(u @ ga @ adj(u) - gb) for ga, gb in zip(a.gens, b.gens))
    if residual > 1e-7 * (1.0 + a.scale):
        raise NumericalFailure(f"intertwiner residual {residual:.3e} exceeds 1e-7")
    return u


def _split_clusters(w: np.ndarray, gap: float) -> list[tuple[int, int]]:
    """Group ascending eigenvalues into clusters separated by more than
    ``gap``; returns [start, stop) index ranges."""
    bounds = [0]
    for i in range(1, w.size):
        if w[i] - w[i - 1] > gap:
            bounds.append(i)
    bounds.append(w.size)
    return [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]


def decompose(t: MatTuple, tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> Decomposition:
    """Decompose the carrier space into irreducible invariant blocks.

    Recursive: when the commutant of the compressed tuple is nontrivial,
    a seeded random Hermitian commutant element (real Gaussian
    coefficients over a Hermitian basis) is eigendecomposed and each
    eigenspace, invariant for all generators and adjoints, is recursed
    on.  Blocks are then grouped into unitary-equivalence classes, and
    common null blocks are flagged separately.
    """
    rng = np.random.default_rng(seed)
    d = t.d
    scale = t.scale
    raw: list[tuple[np.ndarray, MatTuple]] = []

    def recurse(iso: np.ndarray) -> None:
        rep = MatTuple([adj(iso) @ g @ iso for g in t.gens])
        comm = commutant(rep, tol)
        if comm.dim <= 1:
            raw.append((iso, rep))
            return
        herm = hermitian_basis(comm, tol)
        clusters = None
        vecs = None
        for _ in range(_SPLITTER_RESEEDS):
            coeffs = rng.standard_normal(len(herm))
            h = sum(c * m for c, m in zip(coeffs, herm))
            h = (h + adj(h)) / 2.0
            nrm = opnorm(h)
            if nrm == 0.0:
                continue
            h = h / nrm
            w, u = np.linalg.eigh(h)
            parts = _split_clusters(w, tol.psd_slack)
            if len(parts) >= 2:
                clusters, vecs = parts, u
                break
        if clusters is None:
            raise NumericalFailure(
                f"random splitter stayed degenerate after {_SPLITTER_RESEEDS} reseeds"
            )
        for lo, hi in clusters:
            recurse(iso @ vecs[:, lo:hi])

    recurse(np.eye(d, dtype=complex))

    zero_cut = tol.eq_tol * (1.0 + scale)
    entries = []
    for iso, rep in raw:
        is_zero = rep.scale <= zero_cut
        if is_zero:
            key = (True, rep.d, (), ())
        else:
            fp = word_trace_fingerprint(rep, max_len=3)
            key = (False, rep.d, tuple(np.round(fp[0], 6)), tuple(np.round(fp[1], 6)))
        entries.append((key, iso, rep, is_zero))
    entries.sort(key=lambda e: e[0])

    classes: list[MatTuple] = []
    multiplicities: list[int] = []
    blocks: list[Block] = []
    for _, iso, rep, is_zero in entries:
        if is_zero:
            blocks.append(Block(iso, rep, None, None, True))
            continue
        aligner = None
        class_id = None
        for ci, crep in enumerate(classes):
            if crep.d != rep.d:
                continue
            u = unitarily_equivalent(crep, rep, tol)
            if u is not None:
                class_id, aligner = ci, u
                break
        if class_id is None:
            classes.append(rep)
            multiplicities.append(1)
            class_id = len(classes) - 1
            aligner = np.eye(rep.d, dtype=complex)
        else:
            multiplicities[class_id] += 1
        blocks.append(Block(iso, rep, class_id, aligner, False))

    v = np.hstack([b.isometry for b in blocks]) if blocks else np.zeros((d, 0), dtype=complex)
    if v.shape != (d, d):
        raise NumericalFailure(f"block isometries assemble to shape {v.shape}, expected ({d}, {d})")
    if opnorm(adj(v) @ v - np.eye(d)) > 1e-8:
        raise NumericalFailure("assembled change of basis is not unitary")
    for j, g in enumerate(t.gens):
        recon = sum(b.isometry @ b.rep.gens[j] @ adj(b.isometry) for b in blocks)
        if opnorm(recon - g) > 1e-7 * (1.0 + opnorm(g)):
            raise NumericalFailure(f"block reconstruction of generator {j} failed")
    covered = sum(b.dim for b in blocks)
    if covered != d:
        raise NumericalFailure(f"block dimensions sum to {covered}, expected {d}")
    for crep in classes:
        if not is_irreducible(crep, tol):
            raise NumericalFailure("a class representative failed the irreducibility cross-check")

    return Decomposition(
        source=t,
        v=v,
        blocks=tuple(blocks),
        classes=tuple(classes),
        multiplicities=tuple(multiplicities),
        seed=seed,
    )


def homogeneity_verdict(t: MatTuple, n: int, tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> HomogeneityReport:
    """Decide whether every nonzero irreducible block is n-dimensional.

    Null blocks do not count: the zero representation is excluded.  The
    trivial (all-zero) tuple is n-homogeneous for every n, with an empty
    spectrum.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    dec = decompose(t, tol, seed)
    dims = tuple(sorted(dec.nonzero_dims))
    offending = [m for m in dims if m != n]
    if offending:
        verdict, reason = False, f"block of dim {offending[0]} != {n}"
    elif not dims:
        verdict, reason = True, "zero algebra; empty spectrum"
    else:
        verdict, reason = True, f"all {len(dims)} nonzero blocks are {n}-dimensional"
    return HomogeneityReport(
        is_n_homogeneous=verdict,
        n=n,
        block_dims=dims,
        zero_dim=dec.zero_dim,
        reason=reason,
        decomposition=dec,
    )


def n_spectrum(t: MatTuple, n: int, tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> NSpectrum:
    """Class representatives and multiplicities of an n-homogeneous tuple."""
    report = homogeneity_verdict(t, n, tol, seed)
    if not report.is_n_homogeneous:
        raise NotNHomogeneous(report.reason)
    dec = report.decomposition
    return NSpectrum(
        n=n,
        points=dec.classes,
        multiplicities=dec.multiplicities,
        zero_in_closure=dec.zero_dim > 0,
    )
