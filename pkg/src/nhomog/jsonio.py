"""JSON encoding shared by the CLI and file interfaces.

Complex numbers serialize as two-element arrays [re, im]; matrices as
row-major arrays of rows.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import ParseError, SchemaError
from .n_space import EquivariantElement, FiniteNSpace, NMeasure
from .star_algebra import MatTuple


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(a) -> list[list[list[float]]]:
    m = np.asarray(a, dtype=complex)
    return [[encode_complex(v) for v in row] for row in m]


def decode_complex(obj, where: str) -> complex:
    if (
        not isinstance(obj, (list, tuple))
        or len(obj) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj)
    ):
        raise SchemaError(f"{where}: a complex number must be a [re, im] pair, got {obj!r}")
    re, im = float(obj[0]), float(obj[1])
    if not (math.isfinite(re) and math.isfinite(im)):
        raise SchemaError(f"{where}: non-finite entry {obj!r}")
    return complex(re, im)


def decode_matrix(obj, where: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise SchemaError(f"{where}: a matrix must be a nonempty list of rows")
    rows = []
    width = None
    for r, row in enumerate(obj):
        if not isinstance(row, list) or not row:
            raise SchemaError(f"{where}: row {r} must be a nonempty list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise SchemaError(f"{where}: ragged rows (row {r} has {len(row)} entries, expected {width})")
        rows.append([decode_complex(v, f"{where}[{r}]") for v in row])
    return np.array(rows, dtype=complex)


def load_json(path) -> dict:
    p = Path(path)
    if not p.exists():
        raise ParseError(f"input file {p} does not exist")
    try:
        with p.open() as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def decode_tuple(obj, where: str = "tuple") -> MatTuple:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object with a 'generators' field")
    gens = obj.get("generators")
    if not isinstance(gens, list) or not gens:
        raise SchemaError(f"{where}.generators must be a nonempty list of matrices")
    mats = [decode_matrix(g, f"{where}.generators[{i}]") for i, g in enumerate(gens)]
    d = mats[0].shape[0]
    for i, m in enumerate(mats):
        if m.shape != (d, d):
            raise SchemaError(f"{where}.generators[{i}] has shape {m.shape}, expected ({d}, {d})")
    if "d" in obj and int(obj["d"]) != d:
        raise SchemaError(f"{where}.d = {obj['d']} does not match matrix size {d}")
    if "k" in obj and int(obj["k"]) != len(mats):
        raise SchemaError(f"{where}.k = {obj['k']} does not match generator count {len(mats)}")
    return MatTuple(mats)


def decode_space(obj, where: str = "space") -> FiniteNSpace:
    if not isinstance(obj, dict) or "n" not in obj or "orbits" not in obj:
        raise SchemaError(f"{where}: expected an object with 'n' and 'orbits'")
    try:
        return FiniteNSpace(n=int(obj["n"]), orbits=int(obj["orbits"]))
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def decode_element(obj, space: FiniteNSpace, where: str = "element") -> EquivariantElement:
    if not isinstance(obj, dict) or "values" not in obj:
        raise SchemaError(f"{where}: expected an object with a 'values' field")
    vals = obj["values"]
    if not isinstance(vals, list) or len(vals) != space.orbits:
        raise SchemaError(f"{where}.values must list one matrix per orbit ({space.orbits})")
    mats = [decode_matrix(v, f"{where}.values[{i}]") for i, v in enumerate(vals)]
    for i, m in enumerate(mats):
        if m.shape != (space.n, space.n):
            raise SchemaError(f"{where}.values[{i}] has shape {m.shape}, expected ({space.n}, {space.n})")
    return EquivariantElement(space, mats)


def encode_element(f: EquivariantElement) -> dict:
    return {"values": [encode_matrix(v) for v in f.values]}


def encode_measure(mu: NMeasure) -> dict:
    return {"pairing": [encode_matrix(m) for m in mu.pairing]}


def decode_measure(obj, space: FiniteNSpace, where: str = "measure") -> NMeasure:
    if not isinstance(obj, dict) or "pairing" not in obj:
        raise SchemaError(f"{where}: expected an object with a 'pairing' field")
    mats = obj["pairing"]
    if not isinstance(mats, list) or len(mats) != space.orbits:
        raise SchemaError(f"{where}.pairing must list one matrix per orbit ({space.orbits})")
    pairing = [decode_matrix(m, f"{where}.pairing[{i}]") for i, m in enumerate(mats)]
    for i, m in enumerate(pairing):
        if m.shape != (space.n, space.n):
            raise SchemaError(f"{where}.pairing[{i}] has shape {m.shape}")
    return NMeasure(space, pairing)


def decode_fn_algebra_input(obj) -> tuple[int, int, list[np.ndarray]]:
    """The sw-check payload: {"points": int, "n": int, "generators":
    [[matrix per point], ...]} -> (points, n, generator functions)."""
    if not isinstance(obj, dict):
        raise SchemaError("sw-check input must be a JSON object")
    for key in ("points", "n", "generators"):
        if key not in obj:
            raise SchemaError(f"sw-check input is missing the '{key}' field")
    points, n = int(obj["points"]), int(obj["n"])
    if points < 1 or n < 1:
        raise SchemaError("'points' and 'n' must be positive")
    gens_obj = obj["generators"]
    if not isinstance(gens_obj, list):
        raise SchemaError("'generators' must be a list of functions")
    gens = []
    for gi, fn in enumerate(gens_obj):
        if not isinstance(fn, list) or len(fn) != points:
            raise SchemaError(f"generators[{gi}] must list one matrix per point ({points})")
        mats = [decode_matrix(m, f"generators[{gi}][{p}]") for p, m in enumerate(fn)]
        for p, m in enumerate(mats):
            if m.shape != (n, n):
                raise SchemaError(f"generators[{gi}][{p}] has shape {m.shape}, expected ({n}, {n})")
        gens.append(np.stack(mats))
    return points, n, gens


def decode_rep_images(obj, space: FiniteNSpace, where: str = "rep") -> np.ndarray:
    """Representation payload: images[i][j][k] is the image matrix of the
    (j, k) matrix unit supported on orbit i."""
    n, m = space.n, space.orbits
    if not isinstance(obj, list) or len(obj) != m:
        raise SchemaError(f"{where} must list one unit table per orbit ({m})")
    images = np.zeros((m, n, n, n, n), dtype=complex)
    for i, per_orbit in enumerate(obj):
        if not isinstance(per_orbit, list) or len(per_orbit) != n:
            raise SchemaError(f"{where}[{i}] must have {n} rows of unit images")
        for j, row in enumerate(per_orbit):
            if not isinstance(row, list) or len(row) != n:
                raise SchemaError(f"{where}[{i}][{j}] must have {n} unit images")
            for k, mat in enumerate(row):
                img = decode_matrix(mat, f"{where}[{i}][{j}][{k}]")
                if img.shape != (n, n):
                    raise SchemaError(f"{where}[{i}][{j}][{k}] has shape {img.shape}")
                images[i, j, k] = img
    return images


def dump_report(report: dict) -> str:
    """Canonical JSON: sorted keys, no whitespace variance, so identical
    inputs produce byte-identical reports."""
    return json.dumps(report, sort_keys=True, separators=(",", ":"))
