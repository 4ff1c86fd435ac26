"""Dense complex-matrix kernel.

Hermitian eigendecomposition, matrix functions, the positive-semidefinite
order, and spectral utilities used by every other module.  Matrices are
plain complex numpy arrays; every public entry point validates its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    NotHermitian,
    NotSquare,
    NumericalFailure,
)


@dataclass(frozen=True)
class Tolerance:
    """Numerical policy shared by every operation.

    rank_cut   relative singular-value threshold for rank decisions
    psd_slack  eigenvalue slack for positive-semidefinite order checks
    eq_tol     operator-norm comparison tolerance
    """

    rank_cut: float = 1e-9
    psd_slack: float = 1e-8
    eq_tol: float = 1e-8

    def __post_init__(self) -> None:
        for name in ("rank_cut", "psd_slack", "eq_tol"):
            value = getattr(self, name)
            if not (0.0 < value < 1e-2):
                raise ValueError(f"{name} must lie in (0, 1e-2), got {value!r}")

    def to_json(self) -> dict:
        return {"rank_cut": self.rank_cut, "psd_slack": self.psd_slack, "eq_tol": self.eq_tol}


DEFAULT_TOL = Tolerance()


class Ordering(Enum):
    """Verdict of a positive-semidefinite order comparison."""

    LEQ = "LEQ"
    LT = "LT"
    INCOMPARABLE = "INCOMPARABLE"


class SpectralSeparation(NamedTuple):
    """Outcome of a normal-spectra disjointness test.

    ``reason`` explains a negative verdict (``NonNormal``, ``NotSquare``,
    ``SpectraOverlap``); ``gap`` is the smallest distance between the two
    spectra when both inputs are normal.
    """

    disjoint: bool
    reason: str
    gap: float

    def __bool__(self) -> bool:
        return self.disjoint


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-d complex array, rejecting non-finite entries."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-dimensional, got shape {m.shape}")
    if m.size and not np.all(np.isfinite(m.real) & np.isfinite(m.imag)):
        raise DomainError(f"{name} contains non-finite entries")
    return m


def require_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise NotSquare(f"{name} must be square, got shape {a.shape}")
    return a


def adj(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose (also works on stacked (..., n, n) arrays)."""
    return np.conj(np.swapaxes(a, -1, -2))


def opnorm(a: np.ndarray) -> float:
    """Operator (spectral) norm."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def fnorm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a.ravel()))


def hermitian_defect(a: np.ndarray) -> float:
    return opnorm(a - adj(a))


def require_hermitian(a: np.ndarray, tol: Tolerance = DEFAULT_TOL, name: str = "matrix") -> np.ndarray:
    if hermitian_defect(a) > tol.eq_tol * (1.0 + opnorm(a)):
        raise NotHermitian(f"{name} is not Hermitian within eq_tol")
    return a


def normality_defect(a: np.ndarray) -> float:
    return opnorm(a @ adj(a) - adj(a) @ a)


def fix_phase(u: np.ndarray) -> np.ndarray:
    """Rescale by a unit scalar so the first nonzero entry (scanning
    column by column) is real positive.  Phase-normalized unitaries make
    outputs reproducible."""
    m = np.array(u, dtype=complex)
    scale = np.abs(m).max() if m.size else 0.0
    if scale == 0.0:
        return m
    for col in range(m.shape[1]):
        for row in range(m.shape[0]):
            v = m[row, col]
            if abs(v) > 1e-7 * scale:
                return m * (v.conjugate() / abs(v))
    return m


def herm_eig(a, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, u)`` with eigenvalues ``w`` ascending and ``u`` unitary
    such that ``a = u @ diag(w) @ u*`` within eq_tol.
    """
    m = require_hermitian(require_square(as_matrix(a)), tol)
    try:
        w, u = np.linalg.eigh((m + adj(m)) / 2.0)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - eigh rarely fails
        raise NumericalFailure(f"Hermitian eigensolver did not converge: {exc}") from exc
    return w, u


def herm_fun(a, f: Callable[[np.ndarray], np.ndarray], tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Apply a real scalar function to a Hermitian matrix through its
    eigenvalues.  ``f`` receives the eigenvalue vector; a scalar-only
    callable is applied elementwise."""
    w, u = herm_eig(a, tol)
    with np.errstate(all="ignore"):  # out-of-domain values surface as DomainError below
        try:
            fw = np.asarray(f(w), dtype=float)
            if fw.shape != w.shape:
                raise TypeError
        except (TypeError, ValueError):
            fw = np.array([float(f(x)) for x in w])
    if fw.size and not np.all(np.isfinite(fw)):
        raise DomainError("scalar function is undefined on part of the spectrum")
    out = (u * fw) @ adj(u)
    return (out + adj(out)) / 2.0


def psd_power(a, s: float, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Fractional power of a positive-semidefinite matrix.

    Eigenvalues in [-psd_slack, 0] are clamped to 0; anything below the
    slack is a domain error.
    """
    w, u = herm_eig(a, tol)
    if w.size and w[0] < -tol.psd_slack * (1.0 + float(np.abs(w).max())):
        raise DomainError(f"matrix is not PSD within psd_slack (min eigenvalue {w[0]:.3e})")
    w = np.clip(w, 0.0, None)
    out = (u * np.power(w, s)) @ adj(u)
    return (out + adj(out)) / 2.0


def herm_abs(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """|a| = sqrt(a* a) for Hermitian a."""
    m = require_hermitian(require_square(as_matrix(a)), tol)
    return psd_power(m @ m, 0.5, tol)


def max_spec(a, tol: Tolerance = DEFAULT_TOL) -> float:
    """Largest eigenvalue of a Hermitian matrix."""
    w, _ = herm_eig(a, tol)
    return float(w[-1])


def psd_order(a, b, tol: Tolerance = DEFAULT_TOL) -> Ordering:
    """Compare two Hermitian matrices in the positive-semidefinite order.

    LT when b - a is positive definite beyond psd_slack, LEQ when it is
    PSD within psd_slack, INCOMPARABLE otherwise.
    """
    ma = as_matrix(a, "a")
    mb = as_matrix(b, "b")
    if ma.shape != mb.shape:
        raise DimensionMismatch(f"shapes {ma.shape} and {mb.shape} differ")
    require_hermitian(require_square(ma, "a"), tol, "a")
    require_hermitian(require_square(mb, "b"), tol, "b")
    diff = mb - ma
    w = np.linalg.eigvalsh((diff + adj(diff)) / 2.0)
    lo = float(w[0]) if w.size else 0.0
    if lo > tol.psd_slack:
        return Ordering.LT
    if lo >= -tol.psd_slack:
        return Ordering.LEQ
    return Ordering.INCOMPARABLE


def normal_spectra_disjoint(a, b, tol: Tolerance = DEFAULT_TOL) -> SpectralSeparation:
    """Check that a and b are both normal with disjoint spectra.

    Non-normal (or non-square) input yields a negative verdict with a
    reason rather than an error.  Spectra of verified-normal matrices are
    taken from the general complex eigensolver, where they are
    well-conditioned.
    """
    ma = as_matrix(a, "a")
    mb = as_matrix(b, "b")
    if ma.shape[0] != ma.shape[1] or mb.shape[0] != mb.shape[1]:
        return SpectralSeparation(False, "NotSquare", float("nan"))
    for name, m in (("a", ma), ("b", mb)):
        if normality_defect(m) > tol.eq_tol * (1.0 + opnorm(m) ** 2):
            return SpectralSeparation(False, f"NonNormal:{name}", float("nan"))
    sa = np.linalg.eigvals(ma)
    sb = np.linalg.eigvals(mb)
    gap = float(np.abs(sa[:, None] - sb[None, :]).min())
    if gap > 2.0 * tol.psd_slack:
        return SpectralSeparation(True, "Disjoint", gap)
    return SpectralSeparation(False, "SpectraOverlap", gap)
