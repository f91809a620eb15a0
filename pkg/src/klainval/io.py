"""File formats: polytopes, subspaces, valuation specs, atomic measures, JSON and CSV output.

JSON floats are written with 17 significant digits, CSV floats with 12.
Polytope references inside specs may be inline objects, names of bundled
bodies (``cube``, ``octahedron``, ...) or paths relative to the referring file.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
import os
from importlib import resources
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from .errors import ParseError
from .polytope import Polytope, ball_approximant, cross_polytope, cube, octahedron, zonotope
from .subspace import Subspace, orthonormalize
from .transforms import AtomicGrassMeasure
from .valuations import ConstantTerm, HIntegralTerm, IntrinsicTerm, MixedVolumeTerm, ValuationSpec

CANONICAL = {
    "cube": lambda: cube(3),
    "cube4": lambda: cube(4),
    "octahedron": octahedron,
    "crosspolytope4": lambda: cross_polytope(4),
    "ball2": lambda: ball_approximant(2),
    "ball3": lambda: ball_approximant(3),
    "ball4": lambda: ball_approximant(4),
}


# --- JSON -----------------------------------------------------------------------------------

def _float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x + 0.0, ".17g")


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," + pad if indent else ", "
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if hasattr(obj, "to_json"):
        return _encode(obj.to_json(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(str(k)) + ": " + _encode(v, indent, level + 1) for k, v in obj.items()]
        return "{" + pad + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, 0, 0) for v in obj) + "]"
        return "[" + pad + sep.join(_encode(v, indent, level + 1) for v in obj) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def write_json(path: str, obj: Any) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def loads(text: str, source: str = "<string>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def load_json(path: str) -> Any:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return loads(text, path)


def _require(obj: dict, key: str, what: str):
    if not isinstance(obj, dict):
        raise ParseError(f"{what}: expected an object")
    if key not in obj:
        raise ParseError(f"{what}: missing field '{key}'")
    return obj[key]


# --- polytopes, subspaces, measures ----------------------------------------------------------------

def data_path(name: str) -> str:
    return str(resources.files("klainval") / "data" / name)


def polytope_from_json(obj: dict) -> Polytope:
    if isinstance(obj, dict) and "generators" in obj:
        gens = obj["generators"]
        try:
            return zonotope(gens, center=obj.get("center"))
        except ValueError as exc:
            raise ParseError(f"polytope: malformed field 'generators' ({exc})") from exc
    n = _require(obj, "n", "polytope")
    verts = _require(obj, "vertices", "polytope")
    if not isinstance(verts, list) or not verts:
        raise ParseError("polytope: field 'vertices' must be a nonempty list")
    for k, v in enumerate(verts):
        if not isinstance(v, list) or len(v) != n:
            raise ParseError(f"polytope: field 'vertices' entry {k} does not have length n={n}")
    return Polytope(verts)


def load_polytope(ref, base_dir: Optional[str] = None) -> Polytope:
    """Polytope from an inline object, a bundled name or a JSON file path."""
    if isinstance(ref, Polytope):
        return ref
    if isinstance(ref, dict):
        return polytope_from_json(ref)
    if not isinstance(ref, str):
        raise ParseError(f"polytope reference of unsupported type {type(ref).__name__}")
    stem = os.path.splitext(os.path.basename(ref))[0]
    path = ref if base_dir is None or os.path.isabs(ref) else os.path.join(base_dir, ref)
    if os.path.exists(path):
        return polytope_from_json(load_json(path))
    if stem in CANONICAL and not os.path.dirname(ref):
        return CANONICAL[stem]()
    bundled = data_path(os.path.basename(ref) if ref.endswith(".json") else ref + ".json")
    if os.path.exists(bundled):
        return polytope_from_json(load_json(bundled))
    raise ParseError(f"cannot resolve polytope reference '{ref}'")


def subspace_from_json(obj: dict) -> Subspace:
    n = _require(obj, "n", "subspace")
    dim = _require(obj, "dim", "subspace")
    frame = _require(obj, "frame", "subspace")
    if not isinstance(frame, list) or len(frame) != dim or any(len(r) != n for r in frame):
        raise ParseError(f"subspace: field 'frame' must be {dim} rows of length {n}")
    return orthonormalize(frame)


def load_subspace(ref, base_dir: Optional[str] = None) -> Subspace:
    if isinstance(ref, dict):
        return subspace_from_json(ref)
    path = ref if base_dir is None or os.path.isabs(ref) else os.path.join(base_dir, ref)
    if not os.path.exists(path):
        bundled = data_path(os.path.basename(ref))
        path = bundled if os.path.exists(bundled) else path
    return subspace_from_json(load_json(path))


def measure_from_json(obj: dict) -> AtomicGrassMeasure:
    atoms = _require(obj, "atoms", "measure")
    out = []
    for k, a in enumerate(atoms):
        frame = _require(a, "frame", f"measure atom {k}")
        w = _require(a, "w", f"measure atom {k}")
        out.append((orthonormalize(frame), float(w)))
    return AtomicGrassMeasure(out)


# --- valuation specs -----------------------------------------------------------------------------

def spec_to_json(phi: ValuationSpec) -> dict:
    terms = []
    for t in phi.terms:
        if isinstance(t, MixedVolumeTerm):
            terms.append({"kind": "mixed", "degree": t.degree, "coeff": t.coeff, "bodies": [L.to_json() for L in t.bodies]})
        elif isinstance(t, HIntegralTerm):
            terms.append({"kind": "hintegral", "atoms": [[u.tolist(), float(w)] for u, w in zip(t.directions, t.weights)]})
        elif isinstance(t, IntrinsicTerm):
            terms.append({"kind": "intrinsic", "i": t.i, "coeff": t.coeff})
        else:
            terms.append({"kind": "const", "value": t.value_})
    return {"n": phi.n, "degree": phi.degree, "terms": terms}


def spec_from_json(obj: dict, base_dir: Optional[str] = None) -> ValuationSpec:
    terms_json = _require(obj, "terms", "spec")
    if not isinstance(terms_json, list):
        raise ParseError("spec: field 'terms' must be a list")
    degree = obj.get("degree")
    n = obj.get("n")
    terms = []
    for k, tj in enumerate(terms_json):
        kind = _require(tj, "kind", f"spec term {k}")
        where = f"spec term {k} ({kind})"
        if kind == "mixed":
            bodies = [load_polytope(b, base_dir) for b in _require(tj, "bodies", where)]
            if not bodies:
                raise ParseError(f"{where}: field 'bodies' is empty")
            d = tj.get("degree", degree)
            if d is None:
                d = bodies[0].n - len(bodies)
            terms.append(MixedVolumeTerm(int(d), bodies, float(tj.get("coeff", 1.0))))
            n = n or bodies[0].n
        elif kind == "hintegral":
            atoms = _require(tj, "atoms", where)
            try:
                U = np.array([a[0] for a in atoms], dtype=float)
                w = np.array([a[1] for a in atoms], dtype=float)
            except (TypeError, IndexError, ValueError) as exc:
                raise ParseError(f"{where}: field 'atoms' must be a list of [u, w] pairs") from exc
            try:
                terms.append(HIntegralTerm(U, w))
            except ValueError as exc:
                raise ParseError(f"{where}: {exc}") from exc
            n = n or U.shape[1]
        elif kind == "intrinsic":
            terms.append(IntrinsicTerm(int(_require(tj, "i", where)), float(tj.get("coeff", 1.0))))
        elif kind == "const":
            terms.append(ConstantTerm(float(_require(tj, "value", where))))
        else:
            raise ParseError(f"{where}: unknown term kind '{kind}'")
    if n is None:
        raise ParseError("spec: field 'n' is required when no term fixes the dimension")
    for t in terms:
        if isinstance(t, (IntrinsicTerm, ConstantTerm)):
            t.n = int(n)
    return ValuationSpec(int(n), terms)


def load_spec(path: str) -> ValuationSpec:
    if not os.path.exists(path) and os.path.exists(data_path(os.path.basename(path))):
        path = data_path(os.path.basename(path))
    return spec_from_json(load_json(path), os.path.dirname(os.path.abspath(path)))


# --- CSV ------------------------------------------------------------------------------------------

def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def emit_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(csv_text(header, rows))
