"""Spectral and block-diagonal models, and diagonal-tuple perturbations.

Three families of finite models live here.  For commuting normal
tuples, the restriction to joint eigenspaces at extreme points of the
joint numerical range reproduces every matrix pencil norm of the full
tuple; ``extreme_spectral_compression`` builds that restriction and
``verify_complete_isometry`` samples pencils to confirm it.  For lists
of irreducible tuples, ``block_diagonal_model`` deduplicates up to
unitary equivalence and assembles the direct sum.  For infinite
diagonal tuples given by a finite presentation (atoms with
multiplicities plus convergent sequences), ``sw_perturbation`` snaps
every non-essential entry to the nearest essential-spectrum point,
the presentation-level analogue of absorbing a compact perturbation,
and ``verify_local_sw`` cross-checks the matrix ranges of the snapped
tuple against the essential model up to a requested level.
"""

from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyEssentialSpectrum,
    NotCommuting,
    ReducibleCandidate,
    TupleMismatch,
)
from .geometry import Polytope, extreme_points, hull_membership_gap
from .linalg import (
    OperatorTuple,
    commutant_dimension,
    direct_sum,
    herm_part,
    op_norm,
    random_isometry,
    simdiag_hermitian,
    skew_part,
    words_equivalent,
)
from .ranges import MembershipStatus, kmin_member

#: commutator size above which a tuple is rejected as non-commuting
NORMAL_COMMUTE_TOL = 1e-10

#: joint eigenvalues closer than this are treated as one spectrum point
POINT_DEDUP_TOL = 1e-9


def _dedup_points(points: np.ndarray, tol: float = POINT_DEDUP_TOL) -> np.ndarray:
    """Greedy representative selection: keep points pairwise > tol apart."""
    reps: list[np.ndarray] = []
    for p in points:
        if all(np.abs(p - r).max(initial=0.0) > tol for r in reps):
            reps.append(p)
    out = np.array(reps)
    order = np.lexsort(np.real(out).T[::-1])
    return out[order]


@dataclasses.dataclass(frozen=True)
class NormalTuple:
    """A tuple of pairwise commuting normal matrices, jointly diagonalized.

    Construction verifies ``[a_j, a_k] = 0`` and ``[a_j, a_k*] = 0``
    (the j = k case of the latter is normality of each entry) and then
    diagonalizes everything in one joint eigenbasis.  ``column_values``
    holds the joint eigenvalue of each basis column; ``joint_points``
    the deduplicated spectrum.
    """

    base: OperatorTuple
    unitary: np.ndarray = dataclasses.field(repr=False, compare=False, default=None)
    column_values: np.ndarray = dataclasses.field(repr=False, compare=False, default=None)
    joint_points: np.ndarray = dataclasses.field(repr=False, compare=False, default=None)

    def __post_init__(self) -> None:
        t = self.base
        scale = max(1.0, max(op_norm(m) for m in t.mats))
        for j in range(t.d):
            for k in range(j, t.d):
                a, b = t.mats[j], t.mats[k]
                if op_norm(a @ b - b @ a) > NORMAL_COMMUTE_TOL * scale:
                    raise NotCommuting(f"entries {j} and {k} do not commute")
                bs = b.conj().T
                if op_norm(a @ bs - bs @ a) > NORMAL_COMMUTE_TOL * scale:
                    raise NotCommuting(
                        f"entry {j} does not commute with the adjoint of {k}"
                    )
        family: list[np.ndarray] = []
        for m in t.mats:
            family.append(herm_part(m))
            family.append(skew_part(m))
        u, vals = simdiag_hermitian(family, tol=POINT_DEDUP_TOL)
        if t.hermitian:
            column = vals[:, 0::2]
        else:
            column = vals[:, 0::2] + 1j * vals[:, 1::2]
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "column_values", column)
        object.__setattr__(self, "joint_points", _dedup_points(column))

    @property
    def d(self) -> int:
        return self.base.d

    @property
    def n(self) -> int:
        return self.base.n


@dataclasses.dataclass(frozen=True)
class SpectralModel:
    """Restriction of a normal tuple to eigenspaces at extreme spectrum points."""

    extreme_set: np.ndarray
    compressed: OperatorTuple
    projector_rank: int


def joint_spectrum(t: NormalTuple) -> np.ndarray:
    """Deduplicated joint eigenvalues, one row per spectrum point.

    Rows are real for Hermitian tuples and complex otherwise (a single
    normal matrix gives its eigenvalues as points of the plane).
    """
    return t.joint_points.copy()


def _embed_real(points: np.ndarray) -> np.ndarray:
    """Points of C^d as points of R^(2d) (interleaved re/im); real pass through."""
    if np.isrealobj(points):
        return np.asarray(points, dtype=float)
    out = np.empty((points.shape[0], 2 * points.shape[1]))
    out[:, 0::2] = points.real
    out[:, 1::2] = points.imag
    return out


def extreme_spectral_compression(t: NormalTuple) -> SpectralModel:
    """Compress onto the joint eigenspaces at extreme spectrum points.

    The extreme points are those of the convex hull of the joint
    spectrum (embedded in R^(2d) for non-Hermitian tuples).  Every
    matrix pencil built on the tuple attains its norm at one of them,
    so the compression is a complete isometry onto the model; the
    operation is idempotent because extreme points of a hull of extreme
    points are themselves.
    """
    pts = t.joint_points
    ext = extreme_points(_embed_real(pts))
    keep = []
    for row in ext:
        emb = _embed_real(pts)
        dist = np.abs(emb - row).max(axis=1)
        keep.append(int(np.argmin(dist)))
    targets = pts[sorted(set(keep))]
    sel = []
    for i, val in enumerate(t.column_values):
        if np.abs(targets - val).max(axis=1).min() <= 10 * POINT_DEDUP_TOL:
            sel.append(i)
    v = t.unitary[:, sel]
    mats = tuple(v.conj().T @ m @ v for m in t.base.mats)
    return SpectralModel(
        extreme_set=targets,
        compressed=OperatorTuple(mats, t.base.hermitian),
        projector_rank=len(sel),
    )


def verify_complete_isometry(
    full: NormalTuple,
    model: SpectralModel,
    p: int = 2,
    trials: int = 100,
    seed: int = 0,
) -> dict:
    """Sample matrix pencils and compare their norms on full vs compressed.

    For random coefficients A, B_k, C_k in M_p(C) the pencil
    ``A (x) 1 + sum_k B_k (x) N_k + C_k (x) N_k*`` must have the same
    norm on the full tuple and on the model; the norm of a pencil on a
    normal tuple is a maximum over the joint spectrum, a convex function
    of the spectrum point, so only extreme points can attain it.
    Returns the largest relative gap seen.
    """
    if p < 1:
        raise DimensionMismatch("pencil coefficient size must be >= 1")
    rng = np.random.default_rng(seed)
    d = full.d
    max_gap = 0.0
    for _ in range(trials):
        coeff_a = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
        pencil_full = np.kron(coeff_a, np.eye(full.n))
        pencil_model = np.kron(coeff_a, np.eye(model.compressed.n))
        for k in range(d):
            b = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
            c = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
            nf, nm = full.base.mats[k], model.compressed.mats[k]
            pencil_full += np.kron(b, nf) + np.kron(c, nf.conj().T)
            pencil_model += np.kron(b, nm) + np.kron(c, nm.conj().T)
        x, y = op_norm(pencil_full), op_norm(pencil_model)
        gap = abs(x - y) / max(x, y, 1e-15)
        max_gap = max(max_gap, gap)
    return {"max_gap": max_gap, "trials": trials, "p": p, "seed": seed}


@dataclasses.dataclass(frozen=True)
class BlockModel:
    """Direct sum of pairwise inequivalent irreducible tuples."""

    summands: tuple[OperatorTuple, ...]
    direct_sum: OperatorTuple
    report: dict = dataclasses.field(default_factory=dict, compare=False)


def block_diagonal_model(candidates: Sequence[OperatorTuple]) -> BlockModel:
    """Assemble a block-diagonal tuple from irreducible candidates.

    Rejects any candidate whose commutant has dimension above 1 (a
    reducible block can be split further and never belongs in the
    model), deduplicates the rest up to unitary equivalence through
    word-norm comparison, and returns the direct sum of the survivors.
    """
    if not candidates:
        raise TupleMismatch("need at least one candidate tuple")
    d = candidates[0].d
    for i, c in enumerate(candidates):
        if c.d != d:
            raise TupleMismatch(f"candidate {i} has {c.d} entries, expected {d}")
        dim = commutant_dimension(c)
        if dim != 1:
            raise ReducibleCandidate(i, dim)
    survivors: list[OperatorTuple] = []
    dropped: list[int] = []
    for i, c in enumerate(candidates):
        dup = any(
            s.n == c.n and words_equivalent(s, c) for s in survivors
        )
        if dup:
            dropped.append(i)
        else:
            survivors.append(c)
    total = survivors[0]
    for s in survivors[1:]:
        total = direct_sum(total, s)
    return BlockModel(
        summands=tuple(survivors),
        direct_sum=total,
        report={
            "candidates": len(candidates),
            "summands": len(survivors),
            "sizes": [s.n for s in survivors],
            "dropped_duplicates": dropped,
            # every summand is one of the accepted candidates by construction
            "summands_from_candidates": True,
        },
    )


# ---------------------------------------------------------------------------
# diagonal tuples and the snapping perturbation
# ---------------------------------------------------------------------------


def _as_point(p, d: int) -> tuple[float, ...]:
    out = tuple(float(v) for v in np.atleast_1d(np.asarray(p, dtype=float)))
    if len(out) != d:
        raise DimensionMismatch(f"point {out} has {len(out)} coordinates, expected {d}")
    return out


@dataclasses.dataclass(frozen=True)
class DiagonalTuple:
    """Finite presentation of an infinite commuting diagonal tuple.

    ``atoms`` lists repeated diagonal entries as ``(point, multiplicity)``
    with ``None`` standing for infinite multiplicity; ``sequences`` lists
    convergent entry families as ``(limit, prefix)`` where the prefix
    shows the first explicitly known entries, ordered so their distance
    to the limit never increases.  All claims about the presented
    operator (essential spectrum, compact perturbations) are statements
    about this data.
    """

    d: int
    atoms: tuple = ()
    sequences: tuple = ()

    def __post_init__(self) -> None:
        atoms = []
        for point, mult in self.atoms:
            pt = _as_point(point, self.d)
            if mult is not None:
                mult = int(mult)
                if mult < 1:
                    raise ValueError(f"atom {pt} has non-positive multiplicity")
            atoms.append((pt, mult))
        for i in range(len(atoms)):
            for j in range(i + 1, len(atoms)):
                if atoms[i][0] == atoms[j][0]:
                    raise ValueError(f"atom {atoms[i][0]} listed twice")
        seqs = []
        for limit, prefix in self.sequences:
            lim = _as_point(limit, self.d)
            pref = tuple(_as_point(p, self.d) for p in prefix)
            dists = [
                float(np.linalg.norm(np.subtract(p, lim))) for p in pref
            ]
            for a, b in zip(dists, dists[1:]):
                if b > a + 1e-12:
                    raise ValueError(
                        "sequence prefix moves away from its limit "
                        f"({a:.3e} then {b:.3e})"
                    )
            seqs.append((lim, pref))
        object.__setattr__(self, "atoms", tuple(atoms))
        object.__setattr__(self, "sequences", tuple(seqs))


@dataclasses.dataclass(frozen=True)
class PerturbationReport:
    """Displacement ledger for a snapping perturbation.

    ``displacements`` follows presentation order (atoms first, then each
    sequence's prefix); ``sup_tail_norm[k]`` is the largest displacement
    at prefix position >= k, which must shrink to zero for the
    perturbation to be compact in the presented sense.
    """

    displacements: tuple[float, ...]
    sup_tail_norm: tuple[float, ...]
    verified_levels: int


def essential_spectrum_diag(t: DiagonalTuple, tol: float = POINT_DEDUP_TOL) -> np.ndarray:
    """Essential spectrum of the presented tuple, one row per point.

    Exactly the infinite-multiplicity atoms and the sequence limits;
    a finite-multiplicity atom is an isolated eigenvalue of finite
    multiplicity whenever it sits farther than ``tol`` from that set,
    and so never contributes a point of its own.
    """
    pts = [np.asarray(p) for p, mult in t.atoms if mult is None]
    pts.extend(np.asarray(lim) for lim, _ in t.sequences)
    if not pts:
        return np.empty((0, t.d))
    return _dedup_points(np.array(pts), tol)


def cluster_essential_candidates(
    points, radius: float, min_count: int = 10
) -> np.ndarray:
    """Accumulation-point candidates in raw diagonal data, by ball density.

    A candidate is reported wherever at least ``min_count`` samples fall
    inside one ball of the given ``radius``, and is placed at the mean of
    that ball's members.  Extraction is greedy from the densest ball down,
    removing members as it goes, so overlapping clusters are reported
    once.  Presentations carry their limits explicitly and never need
    this; it exists for eyeballing raw numeric prefixes and is openly
    heuristic: a slowly converging tail can smear into several balls.
    """
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise DimensionMismatch("points must be a nonempty 1d or 2d array")
    if radius <= 0:
        raise ValueError("radius must be positive")
    if min_count < 2:
        raise ValueError("min_count must be at least 2")
    remaining = arr
    centers: list[np.ndarray] = []
    while remaining.shape[0] >= min_count:
        gaps = np.linalg.norm(
            remaining[:, None, :] - remaining[None, :, :], axis=2
        )
        counts = (gaps <= radius).sum(axis=1)
        k = int(np.argmax(counts))
        if counts[k] < min_count:
            break
        members = gaps[k] <= radius
        centers.append(remaining[members].mean(axis=0))
        remaining = remaining[~members]
    if not centers:
        return np.empty((0, arr.shape[1]))
    return _dedup_points(np.array(centers))


def _nearest(points: np.ndarray, p) -> tuple[np.ndarray, float]:
    dists = np.linalg.norm(points - np.asarray(p), axis=1)
    k = int(np.argmin(dists))
    return points[k], float(dists[k])


def sw_perturbation(t: DiagonalTuple) -> tuple[DiagonalTuple, PerturbationReport]:
    """Snap every non-essential entry to its nearest essential point.

    The snapped tuple differs from the input entry-wise by exactly
    ``dist(entry, essential spectrum)``, which vanishes along sequence
    tails, so the difference is compact in the presented sense.  All
    surviving entries sit at essential points: each sequence collapses
    onto its limit (its tail lands there anyway), so the result is a
    pure-atom presentation with infinite multiplicity at every
    essential point touched.
    """
    ess = essential_spectrum_diag(t)
    if ess.shape[0] == 0:
        raise EmptyEssentialSpectrum(
            "the presentation has no infinite atoms and no sequence limits"
        )
    displacements: list[float] = []
    mass: dict[tuple[float, ...], int | None] = {}

    def add(point: tuple[float, ...], mult: int | None) -> None:
        if point in mass and (mass[point] is None or mult is None):
            mass[point] = None
        elif point in mass:
            mass[point] += mult
        else:
            mass[point] = mult

    for point, mult in t.atoms:
        if mult is None:
            add(point, None)
            displacements.append(0.0)
        else:
            target, dist = _nearest(ess, point)
            add(tuple(float(v) for v in target), mult)
            displacements.append(dist)
    tail: list[list[float]] = []
    for lim, prefix in t.sequences:
        add(lim, None)
        per = []
        for p in prefix:
            target, dist = _nearest(ess, p)
            # prefix entries join the atom at their snap target
            add(tuple(float(v) for v in target), 1)
            per.append(dist)
            displacements.append(dist)
        tail.append(per)
    depth = max((len(per) for per in tail), default=1)
    sup_tail = []
    for k in range(depth):
        vals = [max(per[k:], default=0.0) for per in tail]
        if k == 0:
            vals.extend(displacements[: len(t.atoms)])
        sup_tail.append(max(vals, default=0.0))
    perturbed = DiagonalTuple(
        d=t.d, atoms=tuple((p, m) for p, m in mass.items()), sequences=()
    )
    report = PerturbationReport(
        displacements=tuple(displacements),
        sup_tail_norm=tuple(sup_tail),
        verified_levels=depth,
    )
    return perturbed, report


def finite_truncation(
    t: DiagonalTuple, q: int, hermitian: bool = True
) -> OperatorTuple:
    """Finite diagonal tuple covering the presentation up to replication q.

    Infinite atoms and sequence limits contribute q copies each, finite
    atoms their multiplicity capped at q, and sequence prefixes appear
    verbatim.  Doubling q past the largest finite multiplicity leaves
    the matrix range at levels <= q unchanged, which is the stabilization
    the local verification relies on.
    """
    if q < 1:
        raise DimensionMismatch("replication must be >= 1")
    entries: list[tuple[float, ...]] = []
    for point, mult in t.atoms:
        entries.extend([point] * (q if mult is None else min(mult, q)))
    for lim, prefix in t.sequences:
        entries.extend(prefix)
        entries.extend([lim] * q)
    if not entries:
        raise EmptyEssentialSpectrum("the presentation has no entries at all")
    diag = np.array(entries, dtype=float)
    mats = tuple(np.diag(diag[:, j]).astype(complex) for j in range(t.d))
    return OperatorTuple(mats, hermitian)


def _diag_probe(
    points: np.ndarray, n: int, rng: np.random.Generator
) -> OperatorTuple:
    """Random level-n member of the matrix range of a diagonal model."""
    s = points.shape[0]
    r = max(1, -(-n // s))
    v = random_isometry(s * r, n, rng)
    mats = []
    for j in range(points.shape[1]):
        big = np.kron(np.diag(points[:, j].astype(complex)), np.eye(r))
        mats.append(v.conj().T @ big @ v)
    return OperatorTuple(tuple(mats), hermitian=True)


def verify_local_sw(
    t: DiagonalTuple,
    perturbed: DiagonalTuple,
    q: int = 2,
    samples: int = 50,
    seed: int = 0,
    tol: float = 1e-7,
) -> dict:
    """Cross-check the essential model against the perturbed truncation.

    Builds the essential model of ``t`` (each essential point replicated
    q times) and the finite truncation of ``perturbed``, then tests
    matrix-range equality up to level q: the diagonal entry points of
    each side must lie in the hull of the other side's (an exact LP
    check, decisive at level 1), and ``samples`` random level-n
    compressions of each side must pass minimal-set membership over the
    other side's hull.  Any certified outside probe marks the ranges
    unequal, with the margin reported.
    """
    if q < 1:
        raise DimensionMismatch("verification level must be >= 1")
    if t.d != perturbed.d:
        raise TupleMismatch(f"dimension mismatch: {t.d} vs {perturbed.d}")
    ess = essential_spectrum_diag(t)
    if ess.shape[0] == 0:
        raise EmptyEssentialSpectrum(
            "the presentation has no infinite atoms and no sequence limits"
        )
    trunc = finite_truncation(perturbed, q)
    trunc_pts = np.column_stack([np.real(np.diag(m)) for m in trunc.mats])
    trunc_pts = _dedup_points(trunc_pts)
    rng = np.random.default_rng(seed)

    gap_ess_in_trunc = max(
        hull_membership_gap(trunc_pts, p) for p in ess
    )
    gap_trunc_in_ess = max(
        hull_membership_gap(ess, p) for p in trunc_pts
    )
    equal = gap_ess_in_trunc <= tol and gap_trunc_in_ess <= tol

    ess_body = Polytope(ess)
    trunc_body = Polytope(trunc_pts)
    ess_model_pts = np.repeat(ess, q, axis=0)
    levels: dict[int, dict] = {}
    for n in range(1, q + 1):
        outside = 0
        unresolved = 0
        worst = 0.0
        for _ in range(samples):
            probe = _diag_probe(ess_model_pts, n, rng)
            res = kmin_member(trunc_body, probe, tol)
            if res.status is MembershipStatus.OUT:
                outside += 1
                worst = max(worst, res.margin)
            elif res.status is MembershipStatus.UNKNOWN:
                unresolved += 1
            probe = _diag_probe(trunc_pts, n, rng)
            res = kmin_member(ess_body, probe, tol)
            if res.status is MembershipStatus.OUT:
                outside += 1
                worst = max(worst, res.margin)
            elif res.status is MembershipStatus.UNKNOWN:
                unresolved += 1
        if outside:
            equal = False
        levels[n] = {
            "samples": 2 * samples,
            "outside": outside,
            "unresolved": unresolved,
            "worst_margin": worst,
        }
    return {
        "equal": equal,
        "point_gap_essential_in_truncation": gap_ess_in_trunc,
        "point_gap_truncation_in_essential": gap_trunc_in_ess,
        "levels": levels,
        "essential_points": int(ess.shape[0]),
        "truncation_size": trunc.n,
        "seed": seed,
    }
