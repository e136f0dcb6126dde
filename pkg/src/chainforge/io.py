"""File formats: OFF meshes, CSV distance matrices, JSON chains, functions,
complexes and reports.

All numbers are read as exact rationals ("3/4", "0.25", 2) and written as
exact rationals plus a decimal rendering, so golden files stay stable.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from chainforge.complexes import Chain, WeightedComplex
from chainforge.metric import FiniteMetricSpace
from chainforge.rationals import rat_json, rat_str, to_fraction


class ParseError(ValueError):
    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


# ---------------------------------------------------------------------------
# OFF meshes


def read_off(path) -> WeightedComplex:
    """Vertices + triangle faces; coordinates become exact decimals and
    weights come from the Cayley-Menger volume."""
    with open(path) as fh:
        lines = fh.readlines()
    rows = [
        (i + 1, ln.strip())
        for i, ln in enumerate(lines)
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not rows or rows[0][1].upper() not in ("OFF", "NOFF"):
        raise ParseError(path, rows[0][0] if rows else 1, "missing OFF header")
    try:
        nv, nf, _ = (int(x) for x in rows[1][1].split()[:3])
    except (ValueError, IndexError):
        raise ParseError(path, rows[1][0], "expected 'nv nf ne' counts") from None
    if len(rows) < 2 + nv + nf:
        raise ParseError(path, rows[-1][0], "truncated OFF file")
    coords = {}
    for i in range(nv):
        line_no, text = rows[2 + i]
        try:
            coords[i] = tuple(to_fraction(x) for x in text.split())
        except (ValueError, TypeError):
            raise ParseError(path, line_no, f"bad vertex line {text!r}") from None
    faces = []
    for i in range(nf):
        line_no, text = rows[2 + nv + i]
        parts = text.split()
        try:
            cnt = int(parts[0])
            face = tuple(sorted(int(v) for v in parts[1 : 1 + cnt]))
        except (ValueError, IndexError):
            raise ParseError(path, line_no, f"bad face line {text!r}") from None
        if cnt != 3:
            raise ParseError(path, line_no, "only triangle faces are supported")
        if len(set(face)) != 3 or any(v < 0 or v >= nv for v in face):
            raise ParseError(path, line_no, f"invalid face {face}")
        faces.append(face)
    return WeightedComplex.from_simplices(faces + [(v,) for v in range(nv)], coords=coords)


def write_off(path, complex: WeightedComplex) -> None:
    if complex.coords is None:
        raise ValueError("complex has no coordinates; use the JSON complex format")
    verts = complex.vertices()
    faces = complex.simplices(2)
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{len(verts)} {len(faces)} {len(complex.simplices(1))}\n")
        for v in verts:
            fh.write(" ".join(repr(float(x)) for x in complex.coords[v]) + "\n")
        for f in faces:
            fh.write("3 " + " ".join(str(v) for v in f) + "\n")


# ---------------------------------------------------------------------------
# CSV distance matrices


def read_metric_csv(path) -> FiniteMetricSpace:
    rows = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rows.append([to_fraction(x) for x in line.split(",")])
            except (ValueError, TypeError):
                raise ParseError(path, line_no, f"bad distance row {line!r}") from None
    try:
        return FiniteMetricSpace(rows)
    except ValueError as exc:
        raise ParseError(path, 1, str(exc)) from None


def write_metric_csv(path, space: FiniteMetricSpace) -> None:
    with open(path, "w") as fh:
        for row in space.dist:
            fh.write(",".join(rat_str(x) for x in row) + "\n")


# ---------------------------------------------------------------------------
# JSON chains, vertex functions, complexes


def chain_to_json(chain: Chain) -> dict:
    return {
        "dim": chain.dim,
        "modulus": chain.modulus,
        "coeffs": [
            [list(s), c if isinstance(c, int) else rat_str(c)]
            for s, c in sorted(chain.coeffs.items())
        ],
    }


def chain_from_json(data: dict, complex: WeightedComplex) -> Chain:
    coeffs = {}
    for pair in data["coeffs"]:
        simplex, c = pair
        c = int(c) if isinstance(c, int) else to_fraction(c)
        coeffs[tuple(simplex)] = c
    return Chain(complex, int(data["dim"]), coeffs, data.get("modulus"))


def read_chain(path, complex: WeightedComplex) -> Chain:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(path, exc.lineno, exc.msg) from None
    try:
        return chain_from_json(data, complex)
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(path, 1, f"bad chain: {exc}") from None


def function_from_json(data: dict) -> dict:
    return {int(v): to_fraction(x) for v, x in data.items()}


def read_function(path) -> dict:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(path, exc.lineno, exc.msg) from None
    try:
        return function_from_json(data)
    except (ValueError, TypeError) as exc:
        raise ParseError(path, 1, f"bad vertex function: {exc}") from None


def complex_to_json(complex: WeightedComplex) -> dict:
    data = {"format": "complex", "vertices": complex.n_vertices, "simplices": {}}
    for k in range(complex.dim + 1):
        data["simplices"][str(k)] = [
            {"v": list(s), "w": rat_str(complex.weight(s))}
            for s in complex.simplices(k)
        ]
    if complex.coords is not None:
        data["coords"] = {
            str(v): [rat_str(x) for x in pt] for v, pt in sorted(complex.coords.items())
        }
    if complex.metric is not None:
        data["metric"] = [[rat_str(x) for x in row] for row in complex.metric.dist]
    return data


def complex_from_json(data: dict) -> WeightedComplex:
    simplices = {}
    weights = {}
    for k, entries in data["simplices"].items():
        sims = []
        for entry in entries:
            s = tuple(entry["v"])
            sims.append(s)
            if "w" in entry:
                weights[s] = to_fraction(entry["w"])
        simplices[int(k)] = sims
    coords = None
    if data.get("coords"):
        coords = {int(v): tuple(to_fraction(x) for x in pt) for v, pt in data["coords"].items()}
    metric = None
    if data.get("metric"):
        metric = FiniteMetricSpace([[to_fraction(x) for x in row] for row in data["metric"]])
    return WeightedComplex(simplices, weights=weights, coords=coords, metric=metric)


def read_complex(path) -> WeightedComplex:
    """A mesh: .off or the JSON complex format."""
    if str(path).endswith(".off"):
        return read_off(path)
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(path, exc.lineno, exc.msg) from None
    try:
        return complex_from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(path, 1, f"bad complex: {exc}") from None


# ---------------------------------------------------------------------------
# Reports


def json_ready(value):
    """Recursively render Fractions as exact-plus-decimal pairs."""
    if isinstance(value, Fraction):
        return rat_json(value)
    if isinstance(value, Chain):
        return chain_to_json(value)
    if isinstance(value, dict):
        return {str(k): json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_ready(v) for v in value]
    return value


def write_report(path, report: dict) -> None:
    text = json.dumps(json_ready(report), indent=2, sort_keys=True)
    with open(path, "w") as fh:
        fh.write(text + "\n")
