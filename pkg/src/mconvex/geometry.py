"""Convex bodies in R^d and joint numerical range geometry.

Bodies come in four flavours: explicit polytopes (vertex lists), coordinate
boxes, planar discs, and support-sampled bodies (direction/value pairs).
Planar hull work is done by a small Graham scan and half-plane clipping;
extreme-point and hull-membership questions in any dimension go through
per-point linear programs (``scipy.optimize.linprog``) rather than a hull
library, so each answer carries an explicit margin.
"""

from __future__ import annotations

import dataclasses
from typing import Sequence, Union

import numpy as np
import scipy.optimize
from scipy.optimize import linprog

from .errors import DimensionMismatch, NoInteriorZero
from .linalg import OperatorTuple, herm_eig

#: default slack used when classifying a point as extreme
EXTREME_TOL = 1e-9


@dataclasses.dataclass(frozen=True)
class Polytope:
    """Convex hull of a finite vertex list, stored as a (k, d) array."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.ndim != 2 or v.shape[0] == 0:
            raise DimensionMismatch("polytope needs a (k, d) vertex array")
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]


@dataclasses.dataclass(frozen=True)
class Box:
    """Axis-aligned product of intervals [lo_j, hi_j]."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape or np.any(lo > hi):
            raise DimensionMismatch("box needs lo <= hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.shape[0]


@dataclasses.dataclass(frozen=True)
class Disc:
    """Planar disc with given center and radius."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        if c.shape != (2,):
            raise DimensionMismatch("disc center must live in R^2")
        if self.radius < 0:
            raise DimensionMismatch("disc radius must be nonnegative")
        object.__setattr__(self, "center", c)

    @property
    def dim(self) -> int:
        return 2


@dataclasses.dataclass(frozen=True)
class Sampled:
    """Outer description by support values along sampled unit directions."""

    directions: np.ndarray
    support_values: np.ndarray

    def __post_init__(self):
        d = np.atleast_2d(np.asarray(self.directions, dtype=float))
        s = np.atleast_1d(np.asarray(self.support_values, dtype=float))
        if d.shape[0] != s.shape[0] or d.shape[0] == 0:
            raise DimensionMismatch("need one support value per direction")
        norms = np.linalg.norm(d, axis=1)
        if np.any(norms <= 0):
            raise DimensionMismatch("directions must be nonzero")
        object.__setattr__(self, "directions", d / norms[:, None])
        object.__setattr__(self, "support_values", s / norms)

    @property
    def dim(self) -> int:
        return self.directions.shape[1]


ConvexBody = Union[Polytope, Box, Disc, Sampled]


@dataclasses.dataclass(frozen=True)
class PolygonSandwich:
    """Inner and outer polygonal approximations of a planar convex set."""

    inner: Polytope
    outer: Polytope
    hausdorff_bound: float


def support_value(t: OperatorTuple, c: Sequence[float]) -> float:
    """Support function of the joint numerical range of a Hermitian tuple.

    Returns ``lambda_max(sum_j c_j a_j)``, which equals
    ``max { <c, x> : x in W_1(t) }``.
    """
    c = np.asarray(c, dtype=float)
    if c.shape != (t.d,):
        raise DimensionMismatch("direction length must match tuple length")
    acc = sum(cj * m for cj, m in zip(c, t.mats))
    vals, _ = herm_eig(acc)
    return float(vals[-1])


def body_support(body: ConvexBody, c: np.ndarray) -> float:
    """Support function h_K(c) of a body.  Sampled bodies only answer at
    their own directions (within 1e-12), anything else raises."""
    c = np.asarray(c, dtype=float)
    if isinstance(body, Polytope):
        return float(np.max(body.vertices @ c))
    if isinstance(body, Box):
        return float(np.sum(np.where(c >= 0, body.hi * c, body.lo * c)))
    if isinstance(body, Disc):
        return float(body.center @ c + body.radius * np.linalg.norm(c))
    if isinstance(body, Sampled):
        nrm = np.linalg.norm(c)
        if nrm == 0:
            return 0.0
        u = c / nrm
        gaps = np.linalg.norm(body.directions - u[None, :], axis=1)
        k = int(np.argmin(gaps))
        if gaps[k] > 1e-12:
            raise DimensionMismatch(
                "sampled body evaluated off its direction grid"
            )
        return float(body.support_values[k] * nrm)
    raise DimensionMismatch(f"unknown body type {type(body)!r}")


def body_dim(body: ConvexBody) -> int:
    return body.dim


def scale_body(body: ConvexBody, factor: float, center=None) -> ConvexBody:
    """Dilate a body by ``factor`` about ``center`` (default: the origin)."""
    if isinstance(body, Polytope):
        c = np.zeros(body.dim) if center is None else np.asarray(center, float)
        return Polytope(c + factor * (body.vertices - c))
    if isinstance(body, Box):
        c = np.zeros(body.dim) if center is None else np.asarray(center, float)
        return Box(c + factor * (body.lo - c), c + factor * (body.hi - c))
    if isinstance(body, Disc):
        c = np.zeros(2) if center is None else np.asarray(center, float)
        return Disc(c + factor * (body.center - c), factor * body.radius)
    if isinstance(body, Sampled):
        if center is not None and np.any(np.asarray(center) != 0):
            raise DimensionMismatch("sampled bodies only scale about 0")
        return Sampled(body.directions, factor * body.support_values)
    raise DimensionMismatch(f"unknown body type {type(body)!r}")


def body_center(body: ConvexBody) -> np.ndarray:
    """A canonical interior-ish point: vertex centroid, box middle, center."""
    if isinstance(body, Polytope):
        return body.vertices.mean(axis=0)
    if isinstance(body, Box):
        return 0.5 * (body.lo + body.hi)
    if isinstance(body, Disc):
        return body.center.copy()
    if isinstance(body, Sampled):
        return np.zeros(body.dim)
    raise DimensionMismatch(f"unknown body type {type(body)!r}")


def hull_distance(points: np.ndarray, p: np.ndarray) -> float:
    """Upper bound on the Euclidean distance from ``p`` to conv(points).

    A nonnegative least squares fit with a homogenized sum-to-one row
    produces near-optimal convex weights; normalizing them gives a point
    of the hull whose distance to ``p`` certifies the bound, and a few
    line-search polish steps tighten it.  Inside the hull the bound is 0
    to machine precision.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    p = np.asarray(p, dtype=float)
    scale = max(1.0, float(np.abs(pts).max()), float(np.abs(p).max()))
    s = 1e4 * scale
    a = np.vstack([pts.T, s * np.ones((1, pts.shape[0]))])
    b = np.concatenate([p, [s]])
    w, _ = scipy.optimize.nnls(a, b)
    total = float(w.sum())
    if total <= 0:
        x = pts[0].astype(float).copy()
    else:
        x = pts.T @ (w / total)
    # polish the feasible point with exact line searches toward vertices
    for _ in range(64):
        g = x - p
        k = int(np.argmin(pts @ g))
        dvec = pts[k] - x
        denom = float(dvec @ dvec)
        if denom <= 1e-30:
            break
        gamma = float(np.clip(-(g @ dvec) / denom, 0.0, 1.0))
        if gamma <= 1e-16:
            break
        x = x + gamma * dvec
    return float(np.linalg.norm(x - p))


def point_in_hull(points: np.ndarray, p: np.ndarray, tol: float = 1e-9) -> bool:
    """Membership of ``p`` in conv(points) via a feasibility LP."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    p = np.asarray(p, dtype=float)
    k = pts.shape[0]
    a_eq = np.vstack([pts.T, np.ones((1, k))])
    b_eq = np.concatenate([p, [1.0]])
    res = linprog(
        np.zeros(k), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * k,
        method="highs",
    )
    if res.status == 0:
        return True
    return hull_distance(pts, p) <= tol


def hull2d(points: np.ndarray) -> np.ndarray:
    """Graham scan returning hull vertices in counterclockwise order.

    Collinear inputs collapse to segment endpoints; a single repeated
    point collapses to one vertex.
    """
    pts = np.unique(np.round(np.atleast_2d(points), 14), axis=0)
    if pts.shape[0] <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[np.ndarray] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 1e-14:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 1e-14:
            upper.pop()
        upper.append(p)
    hull = np.array(lower[:-1] + upper[:-1])
    if hull.shape[0] == 0:
        return pts[:1]
    return hull


def clip_by_halfplanes(
    normals: np.ndarray, offsets: np.ndarray, radius: float
) -> np.ndarray:
    """Intersect ``{x : <n_i, x> <= o_i}`` starting from a big square.

    Sutherland-Hodgman clipping; ``radius`` sizes the starting square and
    must dominate the result.  Returns polygon vertices (possibly a thin
    sliver or a single point after rounding).
    """
    poly = np.array(
        [[-radius, -radius], [radius, -radius], [radius, radius], [-radius, radius]],
        dtype=float,
    )
    for nrm, off in zip(normals, offsets):
        if poly.shape[0] == 0:
            break
        keep: list[np.ndarray] = []
        vals = poly @ nrm - off
        m = poly.shape[0]
        for i in range(m):
            j = (i + 1) % m
            pi, pj = poly[i], poly[j]
            vi, vj = vals[i], vals[j]
            if vi <= 1e-12:
                keep.append(pi)
            if (vi < -1e-12 and vj > 1e-12) or (vi > 1e-12 and vj < -1e-12):
                s = vi / (vi - vj)
                keep.append(pi + s * (pj - pi))
        poly = np.array(keep) if keep else np.zeros((0, 2))
    if poly.shape[0] > 2:
        poly = hull2d(poly)
    return poly


def jnr_sandwich(t: OperatorTuple, m: int = 64) -> PolygonSandwich:
    """Polygonal inner/outer approximation of a planar joint numerical range.

    For a Hermitian pair, ``m`` support directions give supporting
    half-planes (outer polygon) and top-eigenvector expectation points
    (inner polygon).  The Hausdorff gap between the two bounds the
    approximation error of either polygon against the true range.
    """
    if t.d != 2:
        raise DimensionMismatch("sandwich approximation needs a pair (d = 2)")
    if not t.hermitian:
        raise DimensionMismatch("sandwich approximation needs Hermitian entries")
    if m < 8:
        raise DimensionMismatch("need at least 8 directions")
    thetas = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
    normals = np.column_stack([np.cos(thetas), np.sin(thetas)])
    offsets = np.empty(m)
    inner_pts = np.empty((m, 2))
    for i, (cth, sth) in enumerate(normals):
        h = cth * t.mats[0] + sth * t.mats[1]
        vals, vecs = herm_eig(h)
        offsets[i] = vals[-1]
        psi = vecs[:, -1]
        inner_pts[i, 0] = float(np.real(psi.conj() @ t.mats[0] @ psi))
        inner_pts[i, 1] = float(np.real(psi.conj() @ t.mats[1] @ psi))
    radius = float(np.abs(offsets).max() + 1.0)
    outer_poly = clip_by_halfplanes(normals, offsets, radius)
    inner_poly = hull2d(inner_pts)
    bound = 0.0
    if outer_poly.shape[0]:
        bound = max(
            hull_distance(inner_poly, q) for q in outer_poly
        )
    return PolygonSandwich(Polytope(inner_poly), Polytope(outer_poly), float(bound))


def extreme_points(
    points: np.ndarray | Polytope, tol: float = EXTREME_TOL
) -> np.ndarray:
    """Extreme points of the convex hull of a point list.

    Each point is tested against the hull of the others by a small linear
    program minimizing the infinity-norm reconstruction error; the point is
    extreme exactly when the best error exceeds ``tol``.  Works in any
    dimension, no hull library involved.
    """
    pts = points.vertices if isinstance(points, Polytope) else np.atleast_2d(points)
    pts = np.asarray(pts, dtype=float)
    # collapse exact duplicates first so they do not shadow one another
    _, uniq_idx = np.unique(np.round(pts, 12), axis=0, return_index=True)
    pts = pts[sorted(uniq_idx)]
    k, d = pts.shape
    if k == 1:
        return pts.copy()
    keep = []
    for i in range(k):
        others = np.delete(pts, i, axis=0)
        if _hull_reconstruction_gap(others, pts[i]) > tol:
            keep.append(i)
    return pts[keep]


def hull_membership_gap(points: np.ndarray, p: np.ndarray) -> float:
    """Exact LP gap for membership of ``p`` in conv(points).

    Zero (up to LP tolerance) when the point lies in the hull; otherwise
    the smallest infinity-norm reconstruction error over convex weights,
    which lower-bounds the Euclidean distance to the hull.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return _hull_reconstruction_gap(pts, np.asarray(p, dtype=float))


def _hull_reconstruction_gap(others: np.ndarray, p: np.ndarray) -> float:
    """Best infinity-norm error writing ``p`` as a convex combination."""
    k, d = others.shape
    # variables: weights w (k), epigraph t (1); minimize t
    cost = np.zeros(k + 1)
    cost[-1] = 1.0
    a_ub = np.zeros((2 * d, k + 1))
    b_ub = np.zeros(2 * d)
    a_ub[:d, :k] = others.T
    a_ub[:d, -1] = -1.0
    b_ub[:d] = p
    a_ub[d:, :k] = -others.T
    a_ub[d:, -1] = -1.0
    b_ub[d:] = -p
    a_eq = np.zeros((1, k + 1))
    a_eq[0, :k] = 1.0
    res = linprog(
        cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
        bounds=[(0, None)] * k + [(0, None)], method="highs",
    )
    if res.status != 0:
        return float("inf")
    return float(res.fun)


def is_simplex(points: np.ndarray, tol: float = 1e-9) -> tuple[bool, dict]:
    """Whether the hull of ``points`` is a simplex.

    The hull is a simplex when its extreme points are affinely
    independent (differences from any one of them are linearly
    independent).  Single points and segments count.  The certificate
    reports the extreme set, the affine rank, and, when dependent, a null
    combination of the differences.
    """
    ext = extreme_points(np.atleast_2d(points), tol=max(tol, EXTREME_TOL))
    k = ext.shape[0]
    cert: dict = {"extreme_points": ext, "count": k}
    if k == 1:
        cert["rank"] = 0
        return True, cert
    diffs = ext[1:] - ext[0]
    svals = np.linalg.svd(diffs, compute_uv=False)
    scale = max(float(svals[0]), 1.0)
    rank = int(np.sum(svals > tol * scale))
    cert["rank"] = rank
    if rank == k - 1:
        return True, cert
    # expose one dependency among the differences
    _, _, vt = np.linalg.svd(diffs.T, full_matrices=True)
    cert["dependency"] = vt[-1]
    return False, cert


def essential_range_hull(samples: Sequence[complex]) -> tuple[np.ndarray, np.ndarray]:
    """Hull and extreme points of complex symbol samples, as R^2 data.

    Accepts at least one sample; fewer than three produce the degenerate
    hull directly (point or segment).
    """
    z = np.asarray(samples, dtype=complex).ravel()
    if z.size == 0:
        raise DimensionMismatch("need at least one sample")
    pts = np.column_stack([z.real, z.imag])
    hull = hull2d(pts)
    ext = extreme_points(hull) if hull.shape[0] > 2 else hull
    return hull, ext


def polytope_facets_2d(poly: Polytope) -> tuple[np.ndarray, np.ndarray]:
    """Outward unit edge normals and offsets of a planar polytope."""
    if poly.dim != 2:
        raise DimensionMismatch("facet enumeration implemented for d = 2 only")
    hull = hull2d(poly.vertices)
    k = hull.shape[0]
    if k == 1:
        # degenerate: a point, represent as four boxing halfplanes
        normals = np.array([[1.0, 0], [-1.0, 0], [0, 1.0], [0, -1.0]])
        offsets = normals @ hull[0]
        return normals, offsets
    if k == 2:
        e = hull[1] - hull[0]
        e = e / np.linalg.norm(e)
        n1 = np.array([-e[1], e[0]])
        normals = np.array([n1, -n1, e, -e])
        offsets = np.array(
            [n1 @ hull[0], -(n1 @ hull[0]), e @ hull[1], -(e @ hull[0])]
        )
        return normals, offsets
    normals = []
    offsets = []
    for i in range(k):
        a, b = hull[i], hull[(i + 1) % k]
        e = b - a
        nrm = np.array([e[1], -e[0]])
        ln = np.linalg.norm(nrm)
        if ln <= 1e-15:
            continue
        nrm = nrm / ln
        # hull2d is counterclockwise, so this normal points outward
        normals.append(nrm)
        offsets.append(nrm @ a)
    return np.array(normals), np.array(offsets)


def box_vertices(box: Box) -> np.ndarray:
    """All 2^d corner points of a box (d is small here)."""
    d = box.dim
    if d > 16:
        raise DimensionMismatch("box vertex enumeration capped at d = 16")
    corners = np.empty((1 << d, d))
    for i in range(1 << d):
        for j in range(d):
            corners[i, j] = box.hi[j] if (i >> j) & 1 else box.lo[j]
    return corners


def body_contains_point(body: ConvexBody, p: np.ndarray, tol: float = 1e-9) -> bool:
    """Closed membership test for a point, exact per body type."""
    p = np.asarray(p, dtype=float)
    if isinstance(body, Polytope):
        return hull_distance(body.vertices, p) <= tol
    if isinstance(body, Box):
        return bool(np.all(p >= body.lo - tol) and np.all(p <= body.hi + tol))
    if isinstance(body, Disc):
        return float(np.linalg.norm(p - body.center)) <= body.radius + tol
    if isinstance(body, Sampled):
        return bool(
            np.all(body.directions @ p <= body.support_values + tol)
        )
    raise DimensionMismatch(f"unknown body type {type(body)!r}")


def require_interior_zero(body: ConvexBody, tol: float = 1e-9) -> float:
    """Return a positive inradius bound at 0, or raise ``NoInteriorZero``."""
    if isinstance(body, Polytope):
        if body.dim == 2:
            normals, offsets = polytope_facets_2d(body)
            slack = float(np.min(offsets))
        else:
            # affine hull must be full and 0 strictly inside: probe support
            rng = np.random.default_rng(7)
            slack = float("inf")
            for _ in range(64 * body.dim):
                c = rng.standard_normal(body.dim)
                c /= np.linalg.norm(c)
                slack = min(slack, float(np.max(body.vertices @ c)))
        if slack <= tol:
            raise NoInteriorZero("0 is not interior to the polytope")
        return slack
    if isinstance(body, Box):
        slack = float(min(np.min(body.hi), np.min(-body.lo)))
        if slack <= tol:
            raise NoInteriorZero("0 is not interior to the box")
        return slack
    if isinstance(body, Disc):
        slack = body.radius - float(np.linalg.norm(body.center))
        if slack <= tol:
            raise NoInteriorZero("0 is not interior to the disc")
        return slack
    if isinstance(body, Sampled):
        slack = float(np.min(body.support_values))
        if slack <= tol:
            raise NoInteriorZero("0 is not interior to the sampled body")
        return slack
    raise DimensionMismatch(f"unknown body type {type(body)!r}")
