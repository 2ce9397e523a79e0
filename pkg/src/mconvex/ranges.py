"""Membership and scaling for matrix convex sets over convex bodies.

For a compact convex K in R^d, two canonical matrix convex sets share K
as their scalar level: the minimal one, whose level-n points decompose
as sums ``a_l = sum_j lambda_jl h_j`` with positive ``h_j`` summing to
the identity and atoms ``lambda_j`` in K, and the maximal one, the
tuples whose joint numerical range lies inside K.  This module decides
membership in both (SDP for the minimal set, support inequalities for
the maximal), bisects the scaling constant between them, decides
membership in matrix ranges ``W_n(x)`` through Choi-matrix feasibility,
probes matrix-range equality, tests extremality of free symmetric or
unitary tuples, and houses the square-to-disc numerical radius
transform together with its calibration.
"""

from __future__ import annotations

import dataclasses
import enum
from typing import Sequence

import numpy as np

from .errors import (
    BadProblem,
    DimensionMismatch,
    NoInteriorZero,
    NonHermitianInput,
    NotInKmax,
    TupleMismatch,
)
from .geometry import (
    Box,
    ConvexBody,
    Disc,
    Polytope,
    Sampled,
    body_center,
    box_vertices,
    clip_by_halfplanes,
    hull_membership_gap,
    polytope_facets_2d,
    require_interior_zero,
    scale_body,
)
from .linalg import (
    OperatorTuple,
    herm_part,
    numerical_radius,
    op_norm,
    random_isometry,
    simdiag_hermitian,
    skew_part,
)
from .sdp import AffineConstraint, SdpFeasibility, Status, solve_feasibility

#: default membership tolerance; the Boundary band is 10x this
MEMBER_TOL = 1e-7

#: circle discretization for minimal-set membership over a disc
DISC_GRID = 96

#: deviation allowed when testing a_j^2 = I or a_j* a_j = I
EXTREME_DEV = 1e-8

#: commutator size below which a Hermitian tuple is treated as commuting
COMMUTING_TOL = 1e-10

#: a normalization constant sometimes quoted for the square-to-disc
#: transform; it fails the scalar corner check and is kept only so the
#: calibration report can show the discrepancy
CL_REFERENCE_CONSTANT = 1.0 / (1.0 + 1.0j)

#: the calibrated transform normalization (see ``calibrate_choi_li``)
CL_CALIBRATED_CONSTANT = 0.5


class MembershipStatus(enum.Enum):
    IN = "In"
    OUT = "Out"
    BOUNDARY = "Boundary"
    UNKNOWN = "Unknown"


@dataclasses.dataclass(frozen=True)
class MembershipResult:
    """Answer to a membership query.

    ``margin`` measures the strength of the certificate, not a Euclidean
    distance: for In it is the witness slack (smallest eigenvalue of the
    verified decomposition, or the support-inequality slack), for Out the
    verified separation, for Boundary the bracketing half-width.
    """

    status: MembershipStatus
    margin: float
    certificate: object = None
    detail: str = ""


@dataclasses.dataclass(frozen=True)
class ThetaEstimate:
    """Bisection bracket for the minimal alpha with ``a`` in (alpha K)^min.

    ``witness_point`` is ``a`` rescaled by ``1/upper``, a certified point
    of K^min at the upper end of the bracket.
    """

    lower: float
    upper: float
    witness_point: OperatorTuple


def _herm_basis(n: int) -> list[np.ndarray]:
    """Orthonormal basis of Hermitian n x n matrices (Frobenius inner product)."""
    out = []
    for p in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[p, p] = 1.0
        out.append(e)
    inv = 1.0 / np.sqrt(2.0)
    for p in range(n):
        for q in range(p + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[p, q] = e[q, p] = inv
            out.append(e)
            f = np.zeros((n, n), dtype=complex)
            f[p, q] = 1j * inv
            f[q, p] = -1j * inv
            out.append(f)
    return out


def _statuses(violation: float, tol: float) -> MembershipStatus:
    """In / Out / Boundary from a signed support violation."""
    if violation <= tol:
        return MembershipStatus.IN
    if violation > 10.0 * tol:
        return MembershipStatus.OUT
    return MembershipStatus.BOUNDARY


# ---------------------------------------------------------------------------
# maximal set: support inequalities
# ---------------------------------------------------------------------------


def _support_gaps(
    body: ConvexBody, a: OperatorTuple, tol: float
) -> tuple[float, dict]:
    """Worst violation of ``lambda_max(sum c_j a_j) <= h_K(c)`` and a trace."""
    if isinstance(body, Polytope):
        if body.dim == 1:
            vals = np.linalg.eigvalsh(herm_part(a.mats[0]))
            hi = float(body.vertices.max())
            lo = float(body.vertices.min())
            gaps = np.array([float(vals[-1]) - hi, lo - float(vals[0])])
            dirs = np.array([[1.0], [-1.0]])
        elif body.dim == 2:
            dirs, offsets = polytope_facets_2d(body)
            gaps = np.empty(len(dirs))
            for i, c in enumerate(dirs):
                acc = c[0] * a.mats[0] + c[1] * a.mats[1]
                gaps[i] = float(np.linalg.eigvalsh(herm_part(acc))[-1]) - offsets[i]
        else:
            raise DimensionMismatch(
                "maximal-set membership over a polytope needs facet data, "
                "available for d <= 2 only; use Box or Sampled in higher d"
            )
        k = int(np.argmax(gaps))
        return float(gaps[k]), {"direction": dirs[k], "gaps": gaps}
    if isinstance(body, Box):
        gaps = []
        dirs = []
        for j, m in enumerate(a.mats):
            vals = np.linalg.eigvalsh(herm_part(m))
            gaps.append(float(vals[-1]) - float(body.hi[j]))
            gaps.append(float(body.lo[j]) - float(vals[0]))
            e = np.zeros(a.d)
            e[j] = 1.0
            dirs.extend([e, -e])
        gaps = np.asarray(gaps)
        k = int(np.argmax(gaps))
        return float(gaps[k]), {"direction": dirs[k], "gaps": gaps}
    if isinstance(body, Disc):
        m = (a.mats[0] - body.center[0] * np.eye(a.n)) + 1j * (
            a.mats[1] - body.center[1] * np.eye(a.n)
        )
        w = numerical_radius(m, tol=min(tol * 1e-2, 1e-9))
        return w - body.radius, {"radius": w}
    if isinstance(body, Sampled):
        gaps = np.empty(len(body.directions))
        for i, c in enumerate(body.directions):
            acc = sum(cj * m for cj, m in zip(c, a.mats))
            gaps[i] = (
                float(np.linalg.eigvalsh(herm_part(acc))[-1])
                - body.support_values[i]
            )
        k = int(np.argmax(gaps))
        return float(gaps[k]), {"direction": body.directions[k], "gaps": gaps}
    raise DimensionMismatch(f"unknown body type {type(body)!r}")


def kmax_member(
    K: ConvexBody, a: OperatorTuple, tol: float = MEMBER_TOL
) -> MembershipResult:
    """Is the joint numerical range of ``a`` contained in K?

    Polytopes (planar) and boxes are checked exactly on their facet
    normals; discs through the numerical radius of the recentered
    complex combination; sampled bodies on their own direction grid.
    Status is Boundary when the worst support gap lands in
    ``(tol, 10 tol]``.
    """
    if not a.hermitian:
        raise NonHermitianInput("maximal-set membership needs a Hermitian tuple")
    if K.dim != a.d:
        raise DimensionMismatch(f"body dim {K.dim} != tuple length {a.d}")
    viol, cert = _support_gaps(K, a, tol)
    status = _statuses(viol, tol)
    return MembershipResult(status, abs(viol), cert)


# ---------------------------------------------------------------------------
# minimal set: positive decompositions
# ---------------------------------------------------------------------------


def _kmin_problem(
    vertices: np.ndarray, mats: Sequence[np.ndarray]
) -> SdpFeasibility:
    """Decomposition SDP: blocks ``h_j >= 0``, ``sum h_j = I``,
    ``sum_j vertices[j, l] h_j = mats[l]``."""
    verts = np.atleast_2d(np.asarray(vertices, dtype=float))
    m = verts.shape[0]
    n = mats[0].shape[0]
    basis = _herm_basis(n)
    size = m * n
    cons = []

    def embed(blocks: list[np.ndarray]) -> np.ndarray:
        full = np.zeros((size, size), dtype=complex)
        for j, blk in enumerate(blocks):
            full[j * n:(j + 1) * n, j * n:(j + 1) * n] = blk
        return full

    for zk in basis:
        cons.append(AffineConstraint(embed([zk] * m), float(np.trace(zk).real)))
    for l, al in enumerate(mats):
        for zk in basis:
            coeff = embed([verts[j, l] * zk for j in range(m)])
            cons.append(AffineConstraint(coeff, float(np.trace(zk @ al).real)))
    return SdpFeasibility(size, tuple(cons), block_sizes=(n,) * m)


def _kmin_solve(
    vertices: np.ndarray,
    a: OperatorTuple,
    tol: float,
    max_iter: int,
):
    verdict = solve_feasibility(
        _kmin_problem(vertices, a.mats), tol=min(tol, 1e-7), max_iter=max_iter
    )
    return verdict


def _witness_blocks(witness: np.ndarray, m: int, n: int) -> list[np.ndarray]:
    return [witness[j * n:(j + 1) * n, j * n:(j + 1) * n] for j in range(m)]


def _is_commuting(a: OperatorTuple) -> bool:
    for j in range(a.d):
        for k in range(j + 1, a.d):
            comm = a.mats[j] @ a.mats[k] - a.mats[k] @ a.mats[j]
            if float(np.abs(comm).max(initial=0.0)) > COMMUTING_TOL:
                return False
    return True


def _point_violation(body: ConvexBody, p: np.ndarray) -> float:
    """Nonnegative-ish slack of a scalar point against a body (0 inside)."""
    if isinstance(body, Polytope):
        return hull_membership_gap(body.vertices, p)
    if isinstance(body, Box):
        over = np.maximum(p - body.hi, 0.0)
        under = np.maximum(body.lo - p, 0.0)
        return float(max(over.max(initial=0.0), under.max(initial=0.0)))
    if isinstance(body, Disc):
        return float(np.linalg.norm(p - body.center)) - body.radius
    if isinstance(body, Sampled):
        return float(np.max(body.directions @ p - body.support_values))
    raise DimensionMismatch(f"unknown body type {type(body)!r}")


def _singleton_point(K: ConvexBody) -> np.ndarray | None:
    if isinstance(K, Polytope):
        uniq = np.unique(np.round(K.vertices, 12), axis=0)
        if uniq.shape[0] == 1:
            return uniq[0]
    if isinstance(K, Box) and np.allclose(K.lo, K.hi, rtol=0.0, atol=0.0):
        return K.lo.copy()
    if isinstance(K, Disc) and K.radius == 0.0:
        return K.center.copy()
    return None


def _poly_kmin(
    vertices: np.ndarray,
    a: OperatorTuple,
    tol: float,
    max_iter: int,
    center: np.ndarray,
) -> MembershipResult:
    """Minimal-set membership over an explicit vertex list, with bracketing."""
    n = a.n
    m = vertices.shape[0]
    eps = 10.0 * tol

    def scaled_verts(factor: float) -> np.ndarray:
        return center + factor * (vertices - center)

    verdict = _kmin_solve(vertices, a, tol, max_iter)
    if verdict.status is Status.FEASIBLE:
        h = _witness_blocks(verdict.witness, m, n)
        slack = min(float(np.linalg.eigvalsh(herm_part(b))[0]) for b in h)
        return MembershipResult(
            MembershipStatus.IN,
            max(slack, 0.0),
            {"h": h, "vertices": vertices},
        )
    if verdict.status is Status.INFEASIBLE:
        relaxed = _kmin_solve(scaled_verts(1.0 + eps), a, tol, max_iter)
        if relaxed.status is Status.FEASIBLE:
            return MembershipResult(
                MembershipStatus.BOUNDARY,
                eps,
                verdict.separator,
                "outside at scale 1, inside at scale 1 + 10 tol",
            )
        return MembershipResult(
            MembershipStatus.OUT, verdict.separator.margin, verdict.separator
        )
    # solver budget ran out at the nominal scale: bracket both ways
    tightened = _kmin_solve(scaled_verts(1.0 - eps), a, tol, max_iter)
    if tightened.status is Status.FEASIBLE:
        h = _witness_blocks(tightened.witness, m, n)
        return MembershipResult(
            MembershipStatus.IN,
            eps,
            {"h": h, "vertices": scaled_verts(1.0 - eps)},
            "resolved on the tightened body",
        )
    relaxed = _kmin_solve(scaled_verts(1.0 + eps), a, tol, max_iter)
    if relaxed.status is Status.INFEASIBLE:
        return MembershipResult(
            MembershipStatus.OUT,
            relaxed.separator.margin,
            relaxed.separator,
            "resolved on the relaxed body",
        )
    if (
        tightened.status is Status.INFEASIBLE
        and relaxed.status is Status.FEASIBLE
    ):
        return MembershipResult(
            MembershipStatus.BOUNDARY, eps, None, "bracketing straddles"
        )
    return MembershipResult(
        MembershipStatus.UNKNOWN, 0.0, None, "solver budget exhausted"
    )


def kmin_member(
    K: ConvexBody,
    a: OperatorTuple,
    tol: float = MEMBER_TOL,
    m_grid: int = DISC_GRID,
    max_iter: int = 50000,
) -> MembershipResult:
    """Does ``a`` admit a positive decomposition over points of K?

    Polytopes and boxes run the decomposition SDP on their vertices.  A
    disc is sandwiched between inscribed and circumscribed regular
    ``m_grid``-gons: feasible on the inscribed polygon means In,
    infeasible on the circumscribed one means Out, and a straddle is
    reported as Boundary.  Commuting tuples short-circuit through their
    joint spectrum (the decomposition exists exactly when every joint
    eigenvalue point lies in K).  Sampled bodies (d = 2) are clipped to
    the polygon they describe.

    In answers carry the decomposition ``h_j`` as certificate; Out
    answers carry the verified separating functional.
    """
    if not a.hermitian:
        raise NonHermitianInput("minimal-set membership needs a Hermitian tuple")
    if K.dim != a.d:
        raise DimensionMismatch(f"body dim {K.dim} != tuple length {a.d}")

    point = _singleton_point(K)
    if point is not None:
        eye = np.eye(a.n)
        dev = max(op_norm(m - lam * eye) for m, lam in zip(a.mats, point))
        return MembershipResult(_statuses(dev, tol), dev, {"point": point})

    if _is_commuting(a):
        u, values = simdiag_hermitian(a.mats, tol=1e-9)
        viol = max(_point_violation(K, p) for p in values)
        return MembershipResult(
            _statuses(viol, tol),
            abs(viol),
            {"joint_points": values, "unitary": u},
            "commuting tuple: decided through the joint spectrum",
        )

    if isinstance(K, (Polytope, Box)):
        verts = K.vertices if isinstance(K, Polytope) else box_vertices(K)
        return _poly_kmin(verts, a, tol, max_iter, body_center(K))

    if isinstance(K, Disc):
        angles = 2.0 * np.pi * np.arange(m_grid) / m_grid
        ring = np.column_stack([np.cos(angles), np.sin(angles)])
        inner = K.center + K.radius * ring
        outer = K.center + (K.radius / np.cos(np.pi / m_grid)) * ring
        gap = K.radius * (1.0 / np.cos(np.pi / m_grid) - 1.0)
        v_in = _kmin_solve(inner, a, tol, max_iter)
        if v_in.status is Status.FEASIBLE:
            h = _witness_blocks(v_in.witness, m_grid, a.n)
            slack = min(float(np.linalg.eigvalsh(herm_part(b))[0]) for b in h)
            return MembershipResult(
                MembershipStatus.IN, max(slack, 0.0), {"h": h, "vertices": inner}
            )
        v_out = _kmin_solve(outer, a, tol, max_iter)
        if v_out.status is Status.INFEASIBLE:
            return MembershipResult(
                MembershipStatus.OUT, v_out.separator.margin, v_out.separator
            )
        if v_in.status is Status.INFEASIBLE and v_out.status is Status.FEASIBLE:
            return MembershipResult(
                MembershipStatus.BOUNDARY,
                gap,
                None,
                f"inscribed/circumscribed {m_grid}-gon sandwich straddles",
            )
        return MembershipResult(
            MembershipStatus.UNKNOWN, 0.0, None, "solver budget exhausted"
        )

    if isinstance(K, Sampled):
        if K.dim != 2:
            raise DimensionMismatch(
                "minimal-set membership for sampled bodies is planar only"
            )
        radius = 4.0 * max(1.0, float(np.abs(K.support_values).max()))
        verts = clip_by_halfplanes(K.directions, K.support_values, radius)
        if verts.shape[0] == 0:
            raise BadProblem("sampled body clips to the empty set")
        return _poly_kmin(verts, a, tol, max_iter, verts.mean(axis=0))

    raise DimensionMismatch(f"unknown body type {type(K)!r}")


# ---------------------------------------------------------------------------
# scaling constant
# ---------------------------------------------------------------------------


def theta_min_alpha(
    K: ConvexBody,
    a: OperatorTuple,
    tol: float = 1e-2,
    member_tol: float = MEMBER_TOL,
    trace: list | None = None,
) -> ThetaEstimate:
    """Bisection for the least ``alpha >= 1`` with ``a`` in (alpha K)^min.

    Requires ``a`` to be a maximal-set point of K (raises ``NotInKmax``
    otherwise) and 0 to be interior to K (raises ``NoInteriorZero``), so
    the scaled bodies ``alpha K`` are nested.  Scales the body, not the
    tuple, which keeps the decomposition SDP data conditioned.  Values
    below 1 are reported as the degenerate bracket [1, 1].  Pass a list
    as ``trace`` to collect the (lower, upper) bracket after each step.
    """
    pre = kmax_member(K, a, member_tol)
    if pre.status not in (MembershipStatus.IN, MembershipStatus.BOUNDARY):
        raise NotInKmax(
            f"tuple is not a maximal-set point of the body "
            f"(status {pre.status.value}, margin {pre.margin:.3e})"
        )
    slack = require_interior_zero(K)

    def inside(alpha: float) -> bool:
        res = kmin_member(scale_body(K, alpha), a, member_tol)
        return res.status in (MembershipStatus.IN, MembershipStatus.BOUNDARY)

    def record(lo: float, hi: float) -> None:
        if trace is not None:
            trace.append((lo, hi))

    if inside(1.0):
        record(1.0, 1.0)
        return ThetaEstimate(1.0, 1.0, a)
    lo = 1.0
    hi = max(2.0, 2.0 * a.d * max(op_norm(m) for m in a.mats) / slack)
    while not inside(hi):
        lo = hi
        hi *= 2.0
        if hi > 1e9:
            raise NoInteriorZero(
                "no feasible scale below 1e9; the body is too thin at 0"
            )
    record(lo, hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if inside(mid):
            hi = mid
        else:
            lo = mid
        record(lo, hi)
    return ThetaEstimate(lo, hi, a.scaled(1.0 / hi))


# ---------------------------------------------------------------------------
# matrix ranges through ucp maps
# ---------------------------------------------------------------------------


def _choi_problem(
    x: OperatorTuple, a: OperatorTuple, tol: float
) -> tuple[SdpFeasibility | None, MembershipResult | None]:
    """Feasibility program for a unital completely positive map x -> a.

    The variable is the Choi matrix ``C`` of a map ``M_m -> M_n`` (an
    m x m grid of n x n blocks): complete positivity is ``C >= 0``,
    unitality is ``sum_p C_pp = I``, and each image equation
    ``Phi(x_j) = a_j`` splits into two Hermitian pairings through
    ``tr((conj(x_j) kron Z)* C) = tr(Z a_j)`` over a Hermitian basis Z.
    """
    m, n = x.n, a.n
    basis = _herm_basis(n)
    cons = []
    eye_m = np.eye(m)
    for zk in basis:
        cons.append(
            AffineConstraint(np.kron(eye_m, zk), float(np.trace(zk).real))
        )
    for xj, aj in zip(x.mats, a.mats):
        for zk in basis:
            mfull = np.kron(np.conj(xj), zk)
            rhs = complex(np.trace(zk @ aj))
            for coeff, val in (
                (herm_part(mfull), rhs.real),
                (skew_part(mfull), -rhs.imag),
            ):
                size = float(np.abs(coeff).max(initial=0.0))
                if size <= 1e-14:
                    if abs(val) > 10.0 * tol:
                        return None, MembershipResult(
                            MembershipStatus.OUT,
                            abs(val),
                            None,
                            "image equation with zero coefficient",
                        )
                    continue
                cons.append(AffineConstraint(coeff, val))
    return SdpFeasibility(m * n, tuple(cons)), None


def ucp_member(
    x: OperatorTuple,
    a: OperatorTuple,
    tol: float = MEMBER_TOL,
    max_iter: int = 50000,
) -> MembershipResult:
    """Is there a unital completely positive map sending ``x_j`` to ``a_j``?

    This is membership of ``a`` at level ``a.n`` in the matrix range of
    ``x``; the map is asked for on the full matrix algebra, which loses
    nothing since matrix states extend.  Hermiticity of the Choi
    variable makes the map a *-map, so ``x_j* -> a_j*`` comes for free.
    When the solver budget runs out, the query is bracketed by pulling
    ``a`` toward the scalar tuple ``tr(x_j)/m`` (always a member) and
    pushing it outward; a certified straddle reports Boundary.
    """
    if x.d != a.d:
        raise TupleMismatch(f"tuple lengths differ: {x.d} vs {a.d}")
    problem, early = _choi_problem(x, a, tol)
    if early is not None:
        return early
    verdict = solve_feasibility(problem, tol=min(tol, 1e-7), max_iter=max_iter)
    if verdict.status is Status.FEASIBLE:
        slack = float(np.linalg.eigvalsh(herm_part(verdict.witness))[0])
        return MembershipResult(
            MembershipStatus.IN, max(slack, 0.0), {"choi": verdict.witness}
        )
    if verdict.status is Status.INFEASIBLE:
        return MembershipResult(
            MembershipStatus.OUT, verdict.separator.margin, verdict.separator
        )

    eps = 10.0 * tol
    center = np.array([np.trace(m) / x.n for m in x.mats])
    eye = np.eye(a.n)

    def pulled(factor: float) -> OperatorTuple:
        mats = tuple(
            c * eye + factor * (m - c * eye)
            for c, m in zip(center, a.mats)
        )
        return OperatorTuple(mats, a.hermitian and bool(
            np.allclose(center.imag, 0.0, atol=1e-12)
        ))

    prob_r, early_r = _choi_problem(x, pulled(1.0 + eps), tol)
    relaxed = (
        solve_feasibility(prob_r, tol=min(tol, 1e-7), max_iter=max_iter)
        if early_r is None
        else None
    )
    if relaxed is not None and relaxed.status is Status.FEASIBLE:
        return MembershipResult(
            MembershipStatus.IN,
            eps,
            {"choi": relaxed.witness},
            "resolved by outward bracketing",
        )
    prob_t, early_t = _choi_problem(x, pulled(1.0 - eps), tol)
    tightened = (
        solve_feasibility(prob_t, tol=min(tol, 1e-7), max_iter=max_iter)
        if early_t is None
        else None
    )
    if tightened is not None and tightened.status is Status.INFEASIBLE:
        return MembershipResult(
            MembershipStatus.OUT,
            tightened.separator.margin,
            tightened.separator,
            "resolved by inward bracketing",
        )
    if (
        tightened is not None
        and relaxed is not None
        and tightened.status is Status.FEASIBLE
        and relaxed.status is Status.INFEASIBLE
    ):
        return MembershipResult(
            MembershipStatus.BOUNDARY, eps, None, "bracketing straddles"
        )
    return MembershipResult(
        MembershipStatus.UNKNOWN, 0.0, None, "solver budget exhausted"
    )


def _range_probe(x: OperatorTuple, n: int, rng: np.random.Generator) -> OperatorTuple:
    """A guaranteed level-n member of the matrix range of ``x``:
    compress an ampliation by a random isometry."""
    r = -(-n // x.n)
    eye = np.eye(r)
    v = random_isometry(x.n * r, n, rng)
    mats = tuple(v.conj().T @ np.kron(m, eye) @ v for m in x.mats)
    return OperatorTuple(mats, x.hermitian)


def mrange_equal(
    x: OperatorTuple,
    y: OperatorTuple,
    levels: Sequence[int] = (1, 2, 3),
    tol: float = MEMBER_TOL,
    probes: int = 50,
    seed: int = 0,
) -> tuple[bool, list[dict]]:
    """Probe equality of the matrix ranges of two tuples.

    Mutual membership of the defining tuples already forces equality
    (a ucp image of an image is an image), so that pair of checks runs
    first; the per-level random probes are belt and braces, each one a
    certified member of one range tested in the other.  Any Out answer
    refutes equality; Unknown answers are counted as failures too, so a
    True verdict never rests on an unresolved solve.
    """
    if x.d != y.d:
        raise TupleMismatch(f"tuple lengths differ: {x.d} vs {y.d}")
    rng = np.random.default_rng(seed)
    reports: list[dict] = []
    ok = True

    defining = {
        "level": 0,
        "y_in_range_x": ucp_member(x, y, tol).status.value,
        "x_in_range_y": ucp_member(y, x, tol).status.value,
    }
    if (
        defining["y_in_range_x"] != "In"
        or defining["x_in_range_y"] != "In"
    ):
        ok = False
    reports.append(defining)

    for n in levels:
        fail_xy = 0
        fail_yx = 0
        unknown = 0
        for _ in range(probes):
            b = _range_probe(x, n, rng)
            res = ucp_member(y, b, tol)
            if res.status is MembershipStatus.OUT:
                fail_xy += 1
            elif res.status is MembershipStatus.UNKNOWN:
                unknown += 1
            c = _range_probe(y, n, rng)
            res = ucp_member(x, c, tol)
            if res.status is MembershipStatus.OUT:
                fail_yx += 1
            elif res.status is MembershipStatus.UNKNOWN:
                unknown += 1
        if fail_xy or fail_yx or unknown:
            ok = False
        reports.append(
            {
                "level": int(n),
                "probes": probes,
                "x_probes_outside_y": fail_xy,
                "y_probes_outside_x": fail_yx,
                "unresolved": unknown,
            }
        )
    return ok, reports


# ---------------------------------------------------------------------------
# extremality of free tuples
# ---------------------------------------------------------------------------


def _irreducibility_reason(a: OperatorTuple) -> str | None:
    from .linalg import commutant_dimension

    dim = commutant_dimension(a)
    if dim != 1:
        return f"tuple is reducible: commutant dimension {dim}"
    return None


def is_matrix_extreme_free_symmetric(a: OperatorTuple) -> tuple[bool, str]:
    """Matrix extremality test for tuples of selfadjoint contractions.

    A Hermitian tuple is accepted exactly when every entry is a symmetry
    (``a_j^2 = I`` within 1e-8) and the tuple is irreducible (commutant
    dimension 1).
    """
    if not a.hermitian:
        raise NonHermitianInput("extremality test needs a Hermitian tuple")
    eye = np.eye(a.n)
    for j, m in enumerate(a.mats):
        dev = op_norm(m @ m - eye)
        if dev > EXTREME_DEV:
            return False, f"entry {j} is not a symmetry: ||a_j^2 - I|| = {dev:.2e}"
    reason = _irreducibility_reason(a)
    if reason is not None:
        return False, reason
    return True, (
        "all entries square to the identity and the tuple is irreducible "
        "(commutant dimension 1)"
    )


def is_matrix_extreme_free_unitary(a: OperatorTuple) -> tuple[bool, str]:
    """Matrix extremality test for tuples of unitaries (isometry + irreducible)."""
    eye = np.eye(a.n)
    for j, m in enumerate(a.mats):
        dev = op_norm(m.conj().T @ m - eye)
        if dev > EXTREME_DEV:
            return False, f"entry {j} is not unitary: ||a_j* a_j - I|| = {dev:.2e}"
    reason = _irreducibility_reason(a)
    if reason is not None:
        return False, reason
    return True, (
        "all entries are unitary and the tuple is irreducible "
        "(commutant dimension 1)"
    )


# ---------------------------------------------------------------------------
# square <-> disc transform
# ---------------------------------------------------------------------------


def choi_li_transform(y, normalization: complex | None = None) -> np.ndarray:
    """Anti-diagonal 2n x 2n block matrix tying square membership to the disc.

    With ``S = y* + y`` and ``T = i(y* - y)`` (twice the Hermitian and
    skew parts of ``y``), returns::

        normalization * [[0, S + T], [S - T, 0]]

    The default normalization is the calibrated constant 1/2, under which

        (Re y, Im y) lies in square^min
            <=>  numerical_radius(choi_li_transform(y)) <= 1

    holds: for scalars the radius is ``max(|Re y|, |Im y|)`` on the nose,
    and square corners land exactly on radius 1.  A tempting alternative
    constant 1/(1+i) fails that corner check (the corner 1+i maps to
    radius sqrt(2)); ``calibrate_choi_li`` measures and records the
    discrepancy rather than trusting either constant.
    """
    a = np.asarray(y, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if normalization is None:
        normalization = CL_CALIBRATED_CONSTANT
    n = a.shape[0]
    s = a.conj().T + a
    t = 1j * (a.conj().T - a)
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[:n, n:] = normalization * (s + t)
    out[n:, :n] = normalization * (s - t)
    return out


def calibrate_choi_li(tol: float = 1e-9) -> dict:
    """Fix the transform normalization from the scalar corner check.

    The corner ``y = 1 + i`` of the square is a scalar point of the
    square, so its transform must have numerical radius exactly 1.  The
    radius is homogeneous in the constant's modulus, so one measurement
    at normalization 1 determines the calibrated value.  The report also
    records the radius produced by the reference constant 1/(1+i), which
    misses the corner target.
    """
    corner = np.array([[1.0 + 1.0j]])
    base = numerical_radius(choi_li_transform(corner, 1.0), tol=tol)
    calibrated = 1.0 / base
    return {
        "corner": 1.0 + 1.0j,
        "calibrated_constant": calibrated,
        "calibrated_corner_radius": numerical_radius(
            choi_li_transform(corner, calibrated), tol=tol
        ),
        "reference_constant": CL_REFERENCE_CONSTANT,
        "reference_corner_radius": numerical_radius(
            choi_li_transform(corner, CL_REFERENCE_CONSTANT), tol=tol
        ),
    }


def choi_li_equiv_check(y, tol: float = 1e-6) -> dict:
    """Cross-check square^min membership against the transform's radius.

    Computes both sides independently: the decomposition SDP for
    ``(Re y, Im y)`` over the square ``[-1, 1]^2``, and the numerical
    radius of the calibrated transform against 1.  ``consistent`` is
    True when the two statuses agree; Boundary or Unknown on either side
    excludes the probe from the comparison (``excluded`` is then True).
    """
    a = np.asarray(y, dtype=complex)
    tup = OperatorTuple((herm_part(a), skew_part(a)), hermitian=True)
    square = Polytope(
        np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
    )
    square_min = kmin_member(square, tup, tol=tol)
    radius = numerical_radius(choi_li_transform(a), tol=min(tol * 1e-2, 1e-9))
    disc_max = MembershipResult(
        _statuses(radius - 1.0, tol), abs(radius - 1.0), {"radius": radius}
    )
    decisive = (MembershipStatus.IN, MembershipStatus.OUT)
    excluded = (
        square_min.status not in decisive or disc_max.status not in decisive
    )
    consistent = True if excluded else square_min.status is disc_max.status
    return {
        "square_min": square_min,
        "disc_max": disc_max,
        "radius": radius,
        "consistent": consistent,
        "excluded": excluded,
        "calibration": calibrate_choi_li(),
    }
