"""Certified semidefinite feasibility at desk scale.

The engine decides whether an affine slice meets the cone of positive
semidefinite block-diagonal Hermitian matrices.  It deliberately solves
nothing more general: no objectives, no second-order cones.  Verdicts are
tri-state and every non-Unknown answer carries a certificate that can be
re-verified from the problem data alone:

* ``Feasible``  -> a witness matrix with min eigenvalue >= -1e-8 whose
  constraint residual is <= 1e-7,
* ``Infeasible`` -> dual coefficients whose constraint pencil is negative
  semidefinite while pairing strictly positively with the right-hand side,
  so no PSD point can satisfy the constraints within the stated margin.

The iteration is Douglas-Rachford splitting between the affine subspace
(exact least-squares projection through a preconditioned Gram matrix) and
the PSD cone (eigenvalue clipping).  Problems feasible only on the cone
boundary stall the plain iteration, so a facial-reduction polish restricts
to the face suggested by the stalled iterate and re-solves there, which
restores Slater-style convergence and yields exact-rank witnesses.
"""

from __future__ import annotations

import dataclasses
import enum
from typing import Sequence

import numpy as np

from .errors import BadProblem, NoCertificate
from .linalg import herm_part, is_hermitian

#: witness acceptance thresholds, fixed across the library
WITNESS_MIN_EIG = -1e-8
WITNESS_RESIDUAL = 1e-7

#: how often (iterations) candidate and certificate checks run
CHECK_EVERY = 16
CERT_EVERY = 64
STALL_WINDOW = 512


class Status(enum.Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    UNKNOWN = "Unknown"


@dataclasses.dataclass(frozen=True)
class AffineConstraint:
    """One real-linear equation ``Re tr(coeff* V) = rhs``, coeff Hermitian."""

    coeff: np.ndarray
    rhs: float


@dataclasses.dataclass(frozen=True)
class SdpFeasibility:
    """Find Hermitian ``V >= 0`` of size ``var_size`` meeting the constraints.

    ``block_sizes``, when given, restricts the variable to a block-diagonal
    structure (the PSD cone becomes a product of smaller cones, which both
    tightens the model and speeds the projections).  ``trace_normalization``
    appends the constraint ``tr V = value``.
    """

    var_size: int
    constraints: tuple[AffineConstraint, ...]
    trace_normalization: float | None = None
    block_sizes: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.block_sizes is not None:
            object.__setattr__(self, "block_sizes", tuple(self.block_sizes))


@dataclasses.dataclass(frozen=True)
class Separator:
    """Infeasibility certificate.

    ``dual`` are coefficients against the original constraints; the pencil
    ``sum_i dual_i coeff_i`` has ``lambda_max <= psd_slack`` (a hair above
    zero at machine scale) while ``sum_i dual_i rhs_i = margin > 0``.  Any
    PSD matrix therefore violates the constraint system by at least
    ``margin`` in the preconditioned 2-norm, up to ``psd_slack`` times its
    trace.
    """

    dual: np.ndarray
    margin: float
    pencil: np.ndarray
    psd_slack: float


@dataclasses.dataclass(frozen=True)
class Verdict:
    status: Status
    witness: np.ndarray | None
    separator: Separator | None
    iterations: int
    residual: float


class _Compiled:
    """Preprocessed problem: grouped blocks, normalized constraints, Gram."""

    def __init__(self, problem: SdpFeasibility):
        n = int(problem.var_size)
        if n <= 0:
            raise BadProblem("variable size must be positive")
        sizes = problem.block_sizes or (n,)
        if sum(sizes) != n or any(s <= 0 for s in sizes):
            raise BadProblem("block sizes must be positive and sum to var_size")
        self.var_size = n
        self.block_sizes = tuple(int(s) for s in sizes)
        offs = np.concatenate([[0], np.cumsum(self.block_sizes)])
        self.block_offsets = offs

        cons = list(problem.constraints)
        if problem.trace_normalization is not None:
            cons.append(
                AffineConstraint(np.eye(n, dtype=complex),
                                 float(problem.trace_normalization))
            )
        m = len(cons)
        self.m = m

        # group equal block sizes so eigendecompositions batch
        order = {}
        for idx, s in enumerate(self.block_sizes):
            order.setdefault(s, []).append(idx)
        self.groups = [(s, idxs) for s, idxs in sorted(order.items())]

        coeff_groups: list[np.ndarray] = []
        b = np.empty(m)
        norms = np.empty(m)
        full_coeffs = []
        for i, c in enumerate(cons):
            a = np.asarray(c.coeff, dtype=complex)
            if a.shape != (n, n):
                raise BadProblem(f"constraint {i} coeff has shape {a.shape}")
            if not np.all(np.isfinite(a.view(float))):
                raise BadProblem(f"constraint {i} coeff is not finite")
            if not is_hermitian(a, rtol=1e-10):
                raise BadProblem(f"constraint {i} coeff is not Hermitian")
            if not np.isfinite(c.rhs):
                raise BadProblem(f"constraint {i} rhs is not finite")
            a = herm_part(a)
            off_mass = 0.0
            for j in range(len(self.block_sizes)):
                lo, hi = offs[j], offs[j + 1]
                off_mass += float(np.abs(a[lo:hi, :lo]).sum())
                off_mass += float(np.abs(a[lo:hi, hi:]).sum())
            if off_mass > 1e-10 * max(1.0, float(np.abs(a).max())):
                raise BadProblem(
                    f"constraint {i} has weight outside the declared blocks"
                )
            full_coeffs.append(a)
            b[i] = float(c.rhs)

        for g, (s, idxs) in enumerate(self.groups):
            tensor = np.empty((m, len(idxs), s, s), dtype=complex)
            for i, a in enumerate(full_coeffs):
                for pos, j in enumerate(idxs):
                    lo, hi = offs[j], offs[j + 1]
                    tensor[i, pos] = a[lo:hi, lo:hi]
            coeff_groups.append(tensor)

        # diagonal preconditioning: unit Frobenius norm per constraint
        sq = np.zeros(m)
        for tensor in coeff_groups:
            sq += np.einsum("mnij,mnij->m", tensor.conj(), tensor).real
        norms = np.sqrt(np.maximum(sq, 1e-300))
        if m and float(norms.min()) <= 1e-14:
            bad = int(np.argmin(norms))
            if abs(b[bad]) > 1e-12:
                raise BadProblem(f"constraint {bad} has zero coeff, nonzero rhs")
        self.norms = norms
        self.coeff_groups = [
            t / norms[:, None, None, None] for t in coeff_groups
        ] if m else coeff_groups
        self.b = b / norms if m else b

        gram = np.zeros((m, m))
        for tensor in self.coeff_groups:
            gram += np.einsum(
                "mnij,knij->mk", tensor.conj(), tensor
            ).real
        self.gram = gram
        self.gram_pinv = np.linalg.pinv(gram, rcond=1e-12) if m else gram

        # can the identity be written as a pencil of the constraints?
        self.ident = [
            np.broadcast_to(np.eye(s, dtype=complex), (len(idxs), s, s)).copy()
            for (s, idxs) in self.groups
        ]
        if m:
            ai = self.apply(self.ident)
            t = self.gram_pinv @ ai
            pencil = self.pencil(t)
            gap = sum(
                float(np.abs(pg - ig).max())
                for pg, ig in zip(pencil, self.ident)
            )
            self.identity_combo = t if gap <= 1e-9 else None
        else:
            self.identity_combo = None

    # --- variable helpers (variables are lists of (count, s, s) arrays) ---

    def zero(self) -> list[np.ndarray]:
        return [
            np.zeros((len(idxs), s, s), dtype=complex)
            for (s, idxs) in self.groups
        ]

    def apply(self, v: list[np.ndarray]) -> np.ndarray:
        """The constraint map A(V), a real m-vector."""
        out = np.zeros(self.m)
        for tensor, vg in zip(self.coeff_groups, v):
            out += np.einsum("mnij,nij->m", tensor.conj(), vg).real
        return out

    def pencil(self, y: np.ndarray) -> list[np.ndarray]:
        """The adjoint map A*(y) = sum_i y_i C_i as a block variable."""
        return [
            np.einsum("m,mnij->nij", y, tensor)
            for tensor in self.coeff_groups
        ]

    def affine_project(self, v: list[np.ndarray]) -> list[np.ndarray]:
        if self.m == 0:
            return [vg.copy() for vg in v]
        y = self.gram_pinv @ (self.apply(v) - self.b)
        corr = self.pencil(y)
        return [vg - cg for vg, cg in zip(v, corr)]

    def psd_project(self, v: list[np.ndarray]) -> list[np.ndarray]:
        out = []
        for vg in v:
            h = 0.5 * (vg + np.conj(np.swapaxes(vg, -1, -2)))
            vals, vecs = np.linalg.eigh(h)
            vals = np.maximum(vals, 0.0)
            out.append(
                np.einsum("nik,nk,njk->nij", vecs, vals, vecs.conj())
            )
        return out

    def min_eig(self, v: list[np.ndarray]) -> float:
        worst = np.inf
        for vg in v:
            h = 0.5 * (vg + np.conj(np.swapaxes(vg, -1, -2)))
            vals = np.linalg.eigvalsh(h)
            worst = min(worst, float(vals[..., 0].min()))
        return worst

    def residual(self, v: list[np.ndarray]) -> float:
        if self.m == 0:
            return 0.0
        return float(np.abs(self.apply(v) - self.b).max())

    def assemble(self, v: list[np.ndarray]) -> np.ndarray:
        full = np.zeros((self.var_size, self.var_size), dtype=complex)
        offs = self.block_offsets
        for (s, idxs), vg in zip(self.groups, v):
            for pos, j in enumerate(idxs):
                lo, hi = offs[j], offs[j + 1]
                full[lo:hi, lo:hi] = herm_part(vg[pos])
        return full

    def max_eig_pencil(self, s_blocks: list[np.ndarray]) -> float:
        worst = -np.inf
        for sg in s_blocks:
            h = 0.5 * (sg + np.conj(np.swapaxes(sg, -1, -2)))
            vals = np.linalg.eigvalsh(h)
            worst = max(worst, float(vals[..., -1].max()))
        return worst

    def pencil_norm(self, s_blocks: list[np.ndarray]) -> float:
        return max(
            (float(np.abs(sg).max()) for sg in s_blocks if sg.size),
            default=0.0,
        )


def _certificate_from_dual(
    comp: _Compiled, coeffs: np.ndarray, tol: float
) -> Separator | None:
    """Verify (possibly after an identity shift) a candidate dual vector."""
    for sign in (1.0, -1.0):
        y = sign * coeffs
        nrm = float(np.linalg.norm(y))
        if nrm <= 1e-14:
            continue
        y = y / nrm
        s_blocks = comp.pencil(y)
        mx = comp.max_eig_pencil(s_blocks)
        if mx > 0 and comp.identity_combo is not None:
            shift = mx + 1e-13 * max(1.0, comp.pencil_norm(s_blocks))
            y = y - shift * comp.identity_combo
            nrm = float(np.linalg.norm(y))
            if nrm <= 1e-14:
                continue
            y = y / nrm
            s_blocks = comp.pencil(y)
            mx = comp.max_eig_pencil(s_blocks)
        slack_cap = 1e-12 * max(1.0, comp.pencil_norm(s_blocks))
        if mx > slack_cap:
            continue
        margin = float(comp.b @ y)
        if margin >= 10.0 * tol:
            return Separator(
                dual=y / comp.norms,
                margin=margin,
                pencil=comp.assemble(s_blocks),
                psd_slack=max(mx, 0.0),
            )
    return None


def _try_certificate(
    comp: _Compiled, gap: list[np.ndarray] | None, tol: float
) -> Separator | None:
    """Try Farkas certificates from a gap vector and from affine residue."""
    if comp.m == 0:
        return None
    if gap is not None:
        sep = _certificate_from_dual(
            comp, comp.gram_pinv @ comp.apply(gap), tol
        )
        if sep is not None:
            return sep
    # inconsistent affine part: the residue of b against range(Gram) pairs
    # to a zero pencil while hitting b, which is the strongest separation
    res_b = comp.b - comp.gram @ (comp.gram_pinv @ comp.b)
    if float(np.linalg.norm(res_b)) > 1e-13:
        return _certificate_from_dual(comp, res_b, tol)
    return None


def _witness_ok(comp: _Compiled, v: list[np.ndarray]) -> tuple[bool, float]:
    resid = comp.residual(v)
    if resid > WITNESS_RESIDUAL:
        return False, resid
    if comp.min_eig(v) < WITNESS_MIN_EIG:
        return False, resid
    return True, resid


def _facial_polish(
    comp: _Compiled,
    v: list[np.ndarray],
    tol: float,
    max_iter: int,
) -> list[np.ndarray] | None:
    """Restrict to the face suggested by ``v`` and re-solve there.

    Returns a lifted exact-PSD witness when the reduced problem closes,
    else None.  Cuts are tried from coarse to fine so a strictly feasible
    face is found even when small eigenvalues are still noisy.
    """
    spectra = []
    for vg in v:
        h = 0.5 * (vg + np.conj(np.swapaxes(vg, -1, -2)))
        vals, vecs = np.linalg.eigh(h)
        spectra.append((vals, vecs))
    top = max(
        (float(vals.max()) for vals, _ in spectra if vals.size), default=0.0
    )
    if top <= 0:
        return None
    for cut in (0.2, 0.05, 0.01, 1e-3, 1e-5):
        thresh = cut * top
        basis: list[list[np.ndarray]] = []
        reduced_sizes: list[int] = []
        for (vals, vecs), (s, idxs) in zip(spectra, comp.groups):
            qs = []
            for pos in range(len(idxs)):
                sel = vals[pos] > thresh
                qs.append(vecs[pos][:, sel])
                reduced_sizes.append(int(sel.sum()))
            basis.append(qs)
        total = sum(reduced_sizes)
        if total == 0 or total == comp.var_size:
            continue
        # rebuild a reduced problem in the face coordinates
        keep_sizes = [s for s in reduced_sizes if s > 0]
        cons = []
        for i in range(comp.m):
            blocks = []
            for tensor, qs in zip(comp.coeff_groups, basis):
                for pos, q in enumerate(qs):
                    if q.shape[1] == 0:
                        continue
                    blocks.append(q.conj().T @ tensor[i, pos] @ q)
            full = _block_diag(blocks, total)
            cons.append(AffineConstraint(full, comp.b[i]))
        try:
            reduced = SdpFeasibility(
                var_size=total,
                constraints=tuple(cons),
                block_sizes=tuple(keep_sizes),
            )
            verdict = solve_feasibility(
                reduced, tol=tol, max_iter=max_iter, _allow_polish=False
            )
        except BadProblem:
            continue
        if verdict.status is not Status.FEASIBLE:
            continue
        # lift back: witness = Q W Q* blockwise
        lifted = comp.zero()
        w = verdict.witness
        pos_in_w = 0
        for gi, ((s, idxs), qs) in enumerate(zip(comp.groups, basis)):
            for pos, q in enumerate(qs):
                r = q.shape[1]
                if r == 0:
                    continue
                wb = w[pos_in_w:pos_in_w + r, pos_in_w:pos_in_w + r]
                lifted[gi][pos] = q @ wb @ q.conj().T
                pos_in_w += r
        ok, _ = _witness_ok(comp, lifted)
        if ok:
            return lifted
    return None


def _block_diag(blocks: list[np.ndarray], total: int) -> np.ndarray:
    out = np.zeros((total, total), dtype=complex)
    at = 0
    for blk in blocks:
        r = blk.shape[0]
        out[at:at + r, at:at + r] = blk
        at += r
    return out


def solve_feasibility(
    problem: SdpFeasibility,
    tol: float = 1e-7,
    max_iter: int = 50000,
    _allow_polish: bool = True,
) -> Verdict:
    """Decide PSD feasibility of an affine slice, with certificates.

    Deterministic: identical problems give bit-identical statuses and
    witnesses matching to 1e-12.  ``Unknown`` only appears when the budget
    runs out without either certificate closing.
    """
    comp = _Compiled(problem)

    if comp.m == 0:
        return Verdict(Status.FEASIBLE, comp.assemble(comp.zero()), None, 0, 0.0)

    # inconsistent affine systems short-circuit with a pencil-free separator
    proj_b = comp.gram @ (comp.gram_pinv @ comp.b)
    res_b = comp.b - proj_b
    res_norm = float(np.linalg.norm(res_b))
    if res_norm > 1e-10 * max(1.0, float(np.linalg.norm(comp.b))):
        sep = _certificate_from_dual(comp, res_b, tol)
        if sep is not None:
            return Verdict(Status.INFEASIBLE, None, sep, 0, res_norm)

    z = comp.zero()
    best_resid = np.inf
    best_v: list[np.ndarray] | None = None
    last_gap: list[np.ndarray] | None = None
    stall_mark = np.inf
    polish_left = 3 if _allow_polish else 0

    it = 0
    while it < max_iter:
        x = comp.affine_project(z)
        refl = [2.0 * xg - zg for xg, zg in zip(x, z)]
        y = comp.psd_project(refl)
        z = [zg + yg - xg for zg, yg, xg in zip(z, y, x)]
        it += 1

        if it % CHECK_EVERY == 0 or it == max_iter:
            # affine-exact candidate
            if comp.min_eig(x) >= WITNESS_MIN_EIG:
                ok, resid = _witness_ok(comp, x)
                if ok:
                    return Verdict(
                        Status.FEASIBLE, comp.assemble(x), None, it, resid
                    )
            # cone-exact candidate
            resid_y = comp.residual(y)
            if resid_y <= WITNESS_RESIDUAL:
                ok, resid = _witness_ok(comp, y)
                if ok:
                    return Verdict(
                        Status.FEASIBLE, comp.assemble(y), None, it, resid
                    )
            if resid_y < best_resid:
                best_resid = resid_y
                best_v = [yg.copy() for yg in y]
            last_gap = [xg - yg for xg, yg in zip(x, y)]

        if it % CERT_EVERY == 0 and last_gap is not None:
            gap_size = max(float(np.abs(g).max()) for g in last_gap)
            if gap_size > tol:
                sep = _try_certificate(comp, last_gap, tol)
                if sep is not None:
                    return Verdict(
                        Status.INFEASIBLE, None, sep, it, best_resid
                    )

        if it % STALL_WINDOW == 0 and polish_left > 0 and best_v is not None:
            if best_resid > WITNESS_RESIDUAL and best_resid > 0.9 * stall_mark:
                polish_left -= 1
                lifted = _facial_polish(
                    comp, best_v, tol, max_iter=min(max_iter, 4000)
                )
                if lifted is not None:
                    ok, resid = _witness_ok(comp, lifted)
                    if ok:
                        return Verdict(
                            Status.FEASIBLE, comp.assemble(lifted), None,
                            it, resid,
                        )
            stall_mark = best_resid

    # budget exhausted: one last certificate attempt on both sides
    if last_gap is not None:
        sep = _try_certificate(comp, last_gap, tol)
        if sep is not None:
            return Verdict(Status.INFEASIBLE, None, sep, it, best_resid)
    if polish_left > 0 and best_v is not None:
        lifted = _facial_polish(comp, best_v, tol, max_iter=4000)
        if lifted is not None:
            ok, resid = _witness_ok(comp, lifted)
            if ok:
                return Verdict(
                    Status.FEASIBLE, comp.assemble(lifted), None, it, resid
                )
    return Verdict(Status.UNKNOWN, None, None, it, best_resid)


def verify_witness(
    problem: SdpFeasibility, witness: np.ndarray
) -> tuple[float, float]:
    """Re-verify a witness: (min eigenvalue, preconditioned residual)."""
    comp = _Compiled(problem)
    offs = comp.block_offsets
    v = []
    w = np.asarray(witness, dtype=complex)
    for (s, idxs) in comp.groups:
        vg = np.empty((len(idxs), s, s), dtype=complex)
        for pos, j in enumerate(idxs):
            lo, hi = offs[j], offs[j + 1]
            vg[pos] = w[lo:hi, lo:hi]
        v.append(vg)
    return comp.min_eig(v), comp.residual(v)


def dual_witness(problem: SdpFeasibility, verdict: Verdict) -> dict:
    """Re-derive and check the separating pencil of an Infeasible verdict.

    Raises ``NoCertificate`` unless the verdict is Infeasible.  Returns a
    report with the recomputed margin and pencil top eigenvalue; the
    recomputation agrees with the stored margin to 1e-9 by construction.
    """
    if verdict.status is not Status.INFEASIBLE or verdict.separator is None:
        raise NoCertificate("verdict carries no separating certificate")
    comp = _Compiled(problem)
    sep = verdict.separator
    y_norm = np.asarray(sep.dual, dtype=float) * comp.norms
    s_blocks = comp.pencil(y_norm)
    margin = float(comp.b @ y_norm)
    mx = comp.max_eig_pencil(s_blocks)
    pencil = comp.assemble(s_blocks)
    return {
        "margin": margin,
        "margin_gap": abs(margin - sep.margin),
        "pencil_max_eig": mx,
        "pencil": pencil,
        "dual": sep.dual.copy(),
    }
