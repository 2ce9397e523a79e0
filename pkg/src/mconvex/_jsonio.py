"""JSON encodings for the CLI, plus a small SVG writer.

Pinned wire formats: a complex scalar is ``[re, im]`` (plain reals are
accepted on input), a matrix is a row-major list of rows, a tuple is
``{"n", "d", "hermitian", "mats"}``, a convex body is a tagged union on
``"type"``, and a diagonal-tuple presentation spells atoms as
``[point, multiplicity]`` with ``null`` multiplicity meaning infinite.
"""

from __future__ import annotations

import dataclasses
import enum
import json
from typing import IO

import numpy as np

from .geometry import Box, ConvexBody, Disc, Polytope, Sampled
from .linalg import OperatorTuple
from .models import DiagonalTuple


class SchemaError(ValueError):
    """Input JSON does not match the documented shape."""


def _decode_scalar(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(
        isinstance(x, (int, float)) for x in v
    ):
        return complex(v[0], v[1])
    raise SchemaError(f"expected a real or [re, im] pair, got {v!r}")


def decode_matrix(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise SchemaError("matrix must be a nonempty list of rows")
    try:
        return np.array([[_decode_scalar(v) for v in row] for row in rows])
    except TypeError as exc:
        raise SchemaError(f"malformed matrix: {exc}") from exc


def encode_complex(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def encode_matrix(m: np.ndarray) -> list[list[list[float]]]:
    return [[encode_complex(v) for v in row] for row in np.asarray(m)]


def decode_tuple(doc) -> OperatorTuple:
    if not isinstance(doc, dict) or "mats" not in doc:
        raise SchemaError('tuple document needs a "mats" field')
    mats = tuple(decode_matrix(rows) for rows in doc["mats"])
    hermitian = bool(doc.get("hermitian", True))
    t = OperatorTuple(mats, hermitian)
    for field in ("n", "d"):
        if field in doc and int(doc[field]) != getattr(t, field):
            raise SchemaError(
                f'"{field}" is {doc[field]} but the matrices say {getattr(t, field)}'
            )
    return t


def encode_tuple(t: OperatorTuple) -> dict:
    return {
        "n": t.n,
        "d": t.d,
        "hermitian": t.hermitian,
        "mats": [encode_matrix(m) for m in t.mats],
    }


def decode_body(doc) -> ConvexBody:
    if not isinstance(doc, dict) or "type" not in doc:
        raise SchemaError('body document needs a "type" tag')
    kind = doc["type"]
    try:
        if kind == "polytope":
            return Polytope(np.array(doc["vertices"], dtype=float))
        if kind == "box":
            return Box(
                np.array(doc["lo"], dtype=float), np.array(doc["hi"], dtype=float)
            )
        if kind == "disc":
            return Disc(np.array(doc["center"], dtype=float), float(doc["radius"]))
        if kind == "sampled":
            return Sampled(
                np.array(doc["directions"], dtype=float),
                np.array(doc["support_values"], dtype=float),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed {kind} body: {exc}") from exc
    raise SchemaError(f"unknown body type {kind!r}")


def encode_body(body: ConvexBody) -> dict:
    if isinstance(body, Polytope):
        return {"type": "polytope", "vertices": body.vertices.tolist()}
    if isinstance(body, Box):
        return {"type": "box", "lo": body.lo.tolist(), "hi": body.hi.tolist()}
    if isinstance(body, Disc):
        return {"type": "disc", "center": body.center.tolist(), "radius": body.radius}
    if isinstance(body, Sampled):
        return {
            "type": "sampled",
            "directions": body.directions.tolist(),
            "support_values": body.support_values.tolist(),
        }
    raise SchemaError(f"unknown body type {type(body)!r}")


def decode_diagonal(doc) -> DiagonalTuple:
    if not isinstance(doc, dict) or "d" not in doc:
        raise SchemaError('diagonal document needs a "d" field')
    try:
        atoms = tuple(
            (tuple(point), None if mult is None else int(mult))
            for point, mult in doc.get("atoms", [])
        )
        sequences = tuple(
            (tuple(limit), tuple(tuple(p) for p in prefix))
            for limit, prefix in doc.get("sequences", [])
        )
        return DiagonalTuple(d=int(doc["d"]), atoms=atoms, sequences=sequences)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"malformed diagonal presentation: {exc}") from exc


def encode_diagonal(t: DiagonalTuple) -> dict:
    return {
        "d": t.d,
        "atoms": [[list(p), m] for p, m in t.atoms],
        "sequences": [
            [list(lim), [list(p) for p in prefix]] for lim, prefix in t.sequences
        ],
    }


def to_jsonable(obj):
    """Best-effort recursive conversion of report payloads to JSON types."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj if np.isfinite(obj) else repr(obj)
    if isinstance(obj, complex):
        return encode_complex(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, OperatorTuple):
        return encode_tuple(obj)
    if isinstance(obj, DiagonalTuple):
        return encode_diagonal(obj)
    if isinstance(obj, (Polytope, Box, Disc, Sampled)):
        return encode_body(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: to_jsonable(getattr(obj, f.name))
            for f in dataclasses.fields(obj)
        }
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2 and np.iscomplexobj(obj):
            return encode_matrix(obj)
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return to_jsonable(float(obj))
    if isinstance(obj, (np.complexfloating,)):
        return encode_complex(complex(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        return [to_jsonable(v) for v in obj]
    return repr(obj)


def dump_report(report: dict, fp: IO[str]) -> None:
    json.dump(to_jsonable(report), fp, indent=2, sort_keys=True)
    fp.write("\n")


# ---------------------------------------------------------------------------
# SVG output (planar polygons and bisection traces)
# ---------------------------------------------------------------------------


def _svg_header(width: int, height: int) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]


def _fit(points: list[np.ndarray], width: int, height: int, pad: int):
    allpts = np.vstack(points)
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    s = min((width - 2 * pad) / span[0], (height - 2 * pad) / span[1])

    def tx(p: np.ndarray) -> tuple[float, float]:
        return (
            pad + (p[0] - lo[0]) * s,
            height - pad - (p[1] - lo[1]) * s,
        )

    return tx


def polygon_svg(
    polygons: list[tuple[np.ndarray, str]],
    path: str,
    width: int = 480,
    height: int = 480,
) -> None:
    """Write closed planar polygons, one ``(vertices, color)`` per entry."""
    filled = [v for v, _ in polygons if len(v)]
    if not filled:
        raise SchemaError("nothing to draw")
    tx = _fit(filled, width, height, pad=20)
    lines = _svg_header(width, height)
    for verts, color in polygons:
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(tx, verts))
        lines.append(
            f'<polygon points="{pts}" fill="none" stroke="{color}" '
            'stroke-width="1.5"/>'
        )
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8") as fp:
        fp.write("\n".join(lines) + "\n")


def trace_svg(
    values: list[tuple[float, float]],
    path: str,
    width: int = 480,
    height: int = 320,
) -> None:
    """Line plot of (step, value) pairs, e.g. a bisection bracket trace."""
    if not values:
        raise SchemaError("nothing to draw")
    pts = np.array(values, dtype=float)
    tx = _fit([pts], width, height, pad=24)
    lines = _svg_header(width, height)
    coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(tx, pts))
    lines.append(
        f'<polyline points="{coords}" fill="none" stroke="#1f77b4" '
        'stroke-width="1.5"/>'
    )
    for p in pts:
        x, y = tx(p)
        lines.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2.5" fill="#1f77b4"/>')
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8") as fp:
        fp.write("\n".join(lines) + "\n")
