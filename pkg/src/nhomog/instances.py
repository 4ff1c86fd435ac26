"""Seeded random instance generators for experiments and test suites.

Everything takes an explicit numpy Generator so suites stay reproducible.
"""

from __future__ import annotations

import numpy as np

from .calculus import OrbitTable, StarPolynomial
from .decomposition import Decomposition, unitarily_equivalent
from .matrix_core import DEFAULT_TOL, Tolerance, adj
from .star_algebra import MatTuple, is_irreducible


def ginibre(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(rng, n))
    d = np.diagonal(r)
    phases = d / np.abs(d)
    return q * phases


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    g = ginibre(rng, n)
    return scale * (g + adj(g)) / 2.0


def random_psd(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    g = ginibre(rng, n)
    return scale * (g @ adj(g)) / n


def random_irreducible_tuple(rng: np.random.Generator, n: int, k: int,
                             tol: Tolerance = DEFAULT_TOL) -> MatTuple:
    """Random k-tuple in M_n with trivial commutant (redrawn if a draw is
    accidentally reducible, which has probability zero)."""
    for _ in range(50):
        t = MatTuple([ginibre(rng, n) for _ in range(k)])
        if is_irreducible(t, tol):
            return t
    raise RuntimeError("failed to draw an irreducible tuple")  # pragma: no cover


def distinct_irreducible_tuples(rng: np.random.Generator, n: int, k: int, count: int,
                                tol: Tolerance = DEFAULT_TOL) -> list[MatTuple]:
    """Pairwise unitarily inequivalent irreducible tuples."""
    out: list[MatTuple] = []
    while len(out) < count:
        cand = random_irreducible_tuple(rng, n, k, tol)
        if all(unitarily_equivalent(prev, cand, tol) is None for prev in out):
            out.append(cand)
    return out


def scrambled_direct_sum(rng: np.random.Generator, classes, multiplicities,
                         zero_dim: int = 0) -> MatTuple:
    """Direct sum with the given multiplicities, each copy conjugated by
    an independent random unitary, then globally scrambled."""
    classes = list(classes)
    k = classes[0].k
    blocks_per_gen: list[list[np.ndarray]] = [[] for _ in range(k)]
    total = 0
    for cls, mult in zip(classes, multiplicities):
        for _ in range(mult):
            u = random_unitary(rng, cls.d)
            for j in range(k):
                blocks_per_gen[j].append(u @ cls.gens[j] @ adj(u))
            total += cls.d
    if zero_dim:
        for j in range(k):
            blocks_per_gen[j].append(np.zeros((zero_dim, zero_dim), dtype=complex))
        total += zero_dim
    gens = []
    v = random_unitary(rng, total)
    for j in range(k):
        big = np.zeros((total, total), dtype=complex)
        at = 0
        for blk in blocks_per_gen[j]:
            m = blk.shape[0]
            big[at : at + m, at : at + m] = blk
            at += m
        gens.append(v @ big @ adj(v))
    return MatTuple(gens)


def random_homogeneous_instance(rng: np.random.Generator, n: int, k: int, num_classes: int,
                                max_mult: int = 2, zero_dim: int = 0,
                                tol: Tolerance = DEFAULT_TOL) -> tuple[MatTuple, dict]:
    classes = distinct_irreducible_tuples(rng, n, k, num_classes, tol)
    mults = [int(rng.integers(1, max_mult + 1)) for _ in classes]
    t = scrambled_direct_sum(rng, classes, mults, zero_dim)
    meta = {"classes": classes, "multiplicities": mults, "zero_dim": zero_dim, "n": n, "k": k}
    return t, meta


def random_mixed_instance(rng: np.random.Generator, dims, k: int, zero_dim: int = 0,
                          tol: Tolerance = DEFAULT_TOL) -> tuple[MatTuple, dict]:
    """Scrambled direct sum of irreducibles of the given (possibly mixed)
    dimensions, one class per entry."""
    classes = [random_irreducible_tuple(rng, d, k, tol) for d in dims]
    mults = [1] * len(classes)
    t = scrambled_direct_sum(rng, classes, mults, zero_dim)
    return t, {"classes": classes, "multiplicities": mults, "zero_dim": zero_dim}


def random_star_polynomial(rng: np.random.Generator, k: int, max_terms: int = 4,
                           max_len: int = 3, unital: bool = False) -> StarPolynomial:
    terms = []
    for _ in range(int(rng.integers(1, max_terms + 1))):
        length = int(rng.integers(1, max_len + 1))
        word = tuple(
            (int(rng.integers(0, k)), bool(rng.integers(0, 2))) for _ in range(length)
        )
        coeff = complex(rng.standard_normal(), rng.standard_normal())
        terms.append((coeff, word))
    return StarPolynomial(k=k, terms=tuple(terms), unital=unital)


def random_orbit_table(rng: np.random.Generator, dec: Decomposition, scale: float = 1.0) -> OrbitTable:
    return OrbitTable([scale * ginibre(rng, c.d) for c in dec.classes], dec.classes)


def ordered_psd_pair(rng: np.random.Generator, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Pair a <= b of PSD matrices: a = b - tau c c* with tau scaled so a
    stays strictly PSD."""
    b = random_psd(rng, d) + 0.05 * np.eye(d)
    c = ginibre(rng, d)
    bump = c @ adj(c)
    lam_b = float(np.linalg.eigvalsh(b)[0])
    lam_c = float(np.linalg.eigvalsh(bump)[-1])
    tau = 0.9 * lam_b / lam_c
    a = b - tau * bump
    return (a + adj(a)) / 2.0, (b + adj(b)) / 2.0


def commuting_dominated_family(rng: np.random.Generator, d: int, k: int
                               ) -> tuple[list[np.ndarray], np.ndarray]:
    """Family 0 <= a_j <= b commuting with b: a_j are monotone functions
    of b bounded by the identity function."""
    from .matrix_core import herm_fun

    b = random_psd(rng, d) + 0.1 * np.eye(d)
    top = float(np.linalg.eigvalsh(b)[-1])
    family = []
    for _ in range(k):
        c = float(rng.uniform(0.2, 1.0))
        q = float(rng.uniform(0.0, 2.0))
        family.append(herm_fun(b, lambda w: c * w * np.power(w / top, q)))
    return family, b


FIBER_KINDS = ("full", "diag", "scalar")


def grouped_function_algebra(rng: np.random.Generator, n: int, group_sizes,
                             fibers=None, vanish_groups=(),
                             ) -> tuple[list[np.ndarray], dict]:
    """Generators of a grouped function algebra on sum(group_sizes) points.

    Points inside one group carry unitarily twisted copies of a common
    fibre algebra (full M_n, the diagonal algebra, or scalars); distinct
    groups are independent.  Groups listed in ``vanish_groups`` get no
    generators at all, so every algebra element vanishes there.
    """
    group_sizes = list(group_sizes)
    points = sum(group_sizes)
    groups: list[list[int]] = []
    at = 0
    for size in group_sizes:
        groups.append(list(range(at, at + size)))
        at += size
    if fibers is None:
        fibers = [FIBER_KINDS[int(rng.integers(0, len(FIBER_KINDS)))] for _ in groups]
    twists: dict[int, np.ndarray] = {}
    for gi, grp in enumerate(groups):
        for pos, z in enumerate(grp):
            twists[z] = np.eye(n, dtype=complex) if pos == 0 else random_unitary(rng, n)
    gens: list[np.ndarray] = []
    for gi, grp in enumerate(groups):
        if gi in vanish_groups:
            continue
        kind = fibers[gi]
        if kind == "full":
            seeds = [ginibre(rng, n), ginibre(rng, n), np.eye(n, dtype=complex)]
        elif kind == "diag":
            seeds = [
                np.diag(rng.uniform(0.5, 2.0, size=n)).astype(complex),
                np.diag(rng.uniform(-2.0, -0.5, size=n)).astype(complex),
                np.eye(n, dtype=complex),
            ]
        elif kind == "scalar":
            seeds = [np.eye(n, dtype=complex)]
        else:
            raise ValueError(f"unknown fibre kind {kind!r}")
        for seed_mat in seeds:
            fn = np.zeros((points, n, n), dtype=complex)
            for z in grp:
                fn[z] = twists[z] @ seed_mat @ adj(twists[z])
            gens.append(fn)
    meta = {
        "groups": groups,
        "fibers": list(fibers),
        "twists": twists,
        "vanish_groups": list(vanish_groups),
        "points": points,
    }
    return gens, meta


def equivariant_target(rng: np.random.Generator, meta: dict, n: int) -> np.ndarray:
    """A function inside the grouped algebra's two-point approximable
    subspace: one free fibre value per non-vanishing group, spread along
    the twists."""
    points = meta["points"]
    out = np.zeros((points, n, n), dtype=complex)
    for gi, grp in enumerate(meta["groups"]):
        if gi in meta["vanish_groups"]:
            continue
        kind = meta["fibers"][gi]
        if kind == "full":
            val = ginibre(rng, n)
        elif kind == "diag":
            val = np.diag(rng.standard_normal(n)).astype(complex)
        else:
            val = complex(rng.standard_normal()) * np.eye(n, dtype=complex)
        for z in grp:
            u = meta["twists"][z]
            out[z] = u @ val @ adj(u)
    return out
