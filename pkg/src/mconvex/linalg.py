"""Dense complex linear algebra for small operator tuples.

Everything here works on plain ``numpy`` arrays at desk scale (matrix sizes
up to roughly 64).  The routines favour certified, re-checkable output over
raw speed: eigendecompositions come from LAPACK via ``numpy.linalg`` and the
few iterative pieces (numerical radius refinement) carry explicit error
bounds.
"""

from __future__ import annotations

import dataclasses
from itertools import product
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NonHermitianInput, NotCommuting

#: relative tolerance for accepting a matrix as Hermitian
HERM_RTOL = 1e-12

#: relative SVD threshold used when counting null directions
NULLITY_RTOL = 1e-8

#: absolute trace tolerance for word-by-word comparison of tuples
WORD_ATOL = 1e-8

#: cap on the number of words enumerated per length before sampling kicks in
WORD_BUDGET = 1 << 17


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a square complex matrix, validating the shape."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(float))):
        raise DimensionMismatch("matrix contains non-finite entries")
    return a


def herm_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def skew_part(m: np.ndarray) -> np.ndarray:
    """Return the Hermitian matrix (m - m*) / 2i."""
    return (m - m.conj().T) / 2j


def is_hermitian(m: np.ndarray, rtol: float = HERM_RTOL) -> bool:
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    return float(np.abs(m - m.conj().T).max(initial=0.0)) <= rtol * scale


def herm_eig(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    h : array_like
        Square matrix, Hermitian within relative tolerance ``1e-12``.

    Returns
    -------
    (values, vectors)
        Eigenvalues in ascending order and a unitary matrix of column
        eigenvectors.  The input is symmetrized before factoring so the
        reconstruction ``vectors @ diag(values) @ vectors*`` matches the
        symmetrized input to machine precision.

    Raises
    ------
    NonHermitianInput
        If ``h`` deviates from its adjoint by more than the tolerance.
    """
    a = as_matrix(h)
    if not is_hermitian(a):
        dev = float(np.abs(a - a.conj().T).max())
        raise NonHermitianInput(f"matrix deviates from Hermitian by {dev:.3e}")
    vals, vecs = np.linalg.eigh(herm_part(a))
    return vals, vecs


def op_norm(m) -> float:
    """Operator (spectral) norm, the largest singular value."""
    a = as_matrix(m)
    if not a.size:
        return 0.0
    return float(np.linalg.norm(a, 2))


def numerical_radius(m, tol: float = 1e-8, grid: int = 64) -> float:
    """Numerical radius ``w(m) = max_theta lambda_max(Re(e^{i theta} m))``.

    A coarse scan over ``grid`` equispaced angles brackets every local
    maximum of the scan, and each bracket is refined by golden-section
    search.  The profile ``theta -> lambda_max`` is smooth on each
    eigenvalue branch, so the scan plus refinement pins the global maximum
    to within ``tol`` in absolute value for desk-scale matrices.
    """
    a = as_matrix(m)
    if a.shape[0] == 0:
        return 0.0
    re = herm_part(a)
    im = skew_part(a)

    def f(theta: float) -> float:
        h = np.cos(theta) * re - np.sin(theta) * im
        return float(np.linalg.eigvalsh(h)[-1])

    thetas = np.linspace(0.0, 2.0 * np.pi, grid, endpoint=False)
    vals = np.array([f(t) for t in thetas])
    step = 2.0 * np.pi / grid

    # refine every local maximum of the periodic scan
    best = float(vals.max())
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    for k in range(grid):
        if vals[k] < vals[(k - 1) % grid] or vals[k] < vals[(k + 1) % grid]:
            continue
        lo, hi = thetas[k] - step, thetas[k] + step
        c = hi - invphi * (hi - lo)
        d = lo + invphi * (hi - lo)
        fc, fd = f(c), f(d)
        # resolve the angle to sqrt(tol); the profile is locally quadratic
        # around a smooth maximum, so the value error is O(width^2)
        width_target = max(np.sqrt(max(tol, 1e-15)) * 1e-2, 1e-12)
        while hi - lo > width_target:
            if fc >= fd:
                hi, d, fd = d, c, fc
                c = hi - invphi * (hi - lo)
                fc = f(c)
            else:
                lo, c, fc = c, d, fd
                d = lo + invphi * (hi - lo)
                fd = f(d)
        best = max(best, fc, fd)
    return best


@dataclasses.dataclass(frozen=True)
class OperatorTuple:
    """A d-tuple of n-by-n complex matrices.

    ``hermitian`` asserts that every entry equals its adjoint within
    relative tolerance ``1e-12``; entries are symmetrized on construction
    when the flag is set.
    """

    mats: tuple[np.ndarray, ...]
    hermitian: bool = False

    def __post_init__(self):
        mats = tuple(as_matrix(m) for m in self.mats)
        if not mats:
            raise DimensionMismatch("operator tuple needs at least one matrix")
        n = mats[0].shape[0]
        for m in mats:
            if m.shape[0] != n:
                raise DimensionMismatch("tuple entries must share one size")
        if self.hermitian:
            for m in mats:
                if not is_hermitian(m):
                    raise NonHermitianInput(
                        "hermitian flag set but an entry is not Hermitian"
                    )
            mats = tuple(herm_part(m) for m in mats)
        object.__setattr__(self, "mats", mats)

    @property
    def d(self) -> int:
        return len(self.mats)

    @property
    def n(self) -> int:
        return self.mats[0].shape[0]

    def scaled(self, factor: float) -> "OperatorTuple":
        return OperatorTuple(tuple(factor * m for m in self.mats), self.hermitian)

    def shifted(self, offsets: Sequence[float]) -> "OperatorTuple":
        """Subtract ``offsets[j] * I`` from the j-th entry."""
        eye = np.eye(self.n)
        return OperatorTuple(
            tuple(m - o * eye for m, o in zip(self.mats, offsets)),
            self.hermitian,
        )

    def conjugated(self, u: np.ndarray) -> "OperatorTuple":
        """Return ``(u* a_j u)_j`` for a unitary or isometry ``u``."""
        return OperatorTuple(
            tuple(u.conj().T @ m @ u for m in self.mats), self.hermitian
        )


def direct_sum(*tuples: OperatorTuple) -> OperatorTuple:
    """Blockwise direct sum of operator tuples (same d)."""
    d = tuples[0].d
    if any(t.d != d for t in tuples):
        raise DimensionMismatch("direct sum requires equal tuple lengths")
    mats = tuple(
        scipy.linalg.block_diag(*(t.mats[j] for t in tuples)).astype(complex)
        for j in range(d)
    )
    return OperatorTuple(mats, all(t.hermitian for t in tuples))


def _commutant_basis_system(t: OperatorTuple) -> np.ndarray:
    """Stack the linear maps S -> [S, a_j] and S -> [S, a_j*]."""
    n = t.n
    eye = np.eye(n)
    rows = []
    for m in t.mats:
        for a in (m, m.conj().T):
            # row-major vec: vec(S a) = (I kron a^T) vec(S), vec(a S) = (a kron I) vec(S)
            rows.append(np.kron(eye, a.T) - np.kron(a, eye))
    return np.vstack(rows)


def commutant_dimension(t: OperatorTuple) -> int:
    """Complex dimension of ``{S : S a_j = a_j S and S a_j* = a_j* S}``.

    Computed as the nullity of the stacked commutator system, with
    singular values below ``1e-8 * sigma_max`` counted as zero.
    """
    sys = _commutant_basis_system(t)
    svals = np.linalg.svd(sys, compute_uv=False)
    if svals.size == 0:
        return t.n * t.n
    cutoff = NULLITY_RTOL * max(float(svals[0]), 1.0)
    rank = int(np.sum(svals > cutoff))
    return t.n * t.n - rank


def words_equivalent(
    t1: OperatorTuple,
    t2: OperatorTuple,
    max_len: int | None = None,
    atol: float = WORD_ATOL,
    word_budget: int = WORD_BUDGET,
    samples: int = 4096,
) -> bool:
    """Compare traces of all words in the letters ``a_j, a_j*``.

    Two tuples of equal size are simultaneously unitarily similar exactly
    when the traces of all words up to length ``2 n^2`` agree, which is the
    default ``max_len``.  Words are enumerated breadth-first; if a length
    level would exceed ``word_budget`` words, that level and deeper ones
    are covered by a fixed-seed random sample of ``samples`` words instead
    of full enumeration.

    Raises
    ------
    DimensionMismatch
        If the tuples have different ``d`` or different ``n``.
    """
    if t1.d != t2.d:
        raise DimensionMismatch("tuples have different lengths d")
    if t1.n != t2.n:
        raise DimensionMismatch("tuples have different matrix sizes n")
    n, d = t1.n, t1.d
    if max_len is None:
        max_len = 2 * n * n
    letters1 = [m for a in t1.mats for m in (a, a.conj().T)]
    letters2 = [m for a in t2.mats for m in (a, a.conj().T)]
    l1 = np.stack(letters1)
    l2 = np.stack(letters2)

    words1 = np.eye(n, dtype=complex)[None, :, :]
    words2 = np.eye(n, dtype=complex)[None, :, :]
    for length in range(1, max_len + 1):
        if words1.shape[0] * l1.shape[0] > word_budget:
            return _sampled_words_agree(
                l1, l2, length, max_len, atol, samples
            )
        # every existing word extended by every letter
        words1 = np.einsum("wij,ljk->wlik", words1, l1).reshape(-1, n, n)
        words2 = np.einsum("wij,ljk->wlik", words2, l2).reshape(-1, n, n)
        tr1 = np.einsum("wii->w", words1)
        tr2 = np.einsum("wii->w", words2)
        if not np.allclose(tr1, tr2, rtol=0.0, atol=atol):
            return False
    return True


def _sampled_words_agree(l1, l2, start_len, max_len, atol, samples) -> bool:
    """Random-word fallback once full enumeration outgrows the budget."""
    rng = np.random.default_rng(0)
    nletters = l1.shape[0]
    n = l1.shape[1]
    for length in range(start_len, max_len + 1):
        idx = rng.integers(0, nletters, size=(samples, length))
        for row in idx:
            w1 = np.eye(n, dtype=complex)
            w2 = np.eye(n, dtype=complex)
            for k in row:
                w1 = w1 @ l1[k]
                w2 = w2 @ l2[k]
            if abs(np.trace(w1) - np.trace(w2)) > atol:
                return False
    return True


def simdiag_hermitian(
    mats: Sequence[np.ndarray], tol: float = 1e-9
) -> tuple[np.ndarray, np.ndarray]:
    """Simultaneously diagonalize a commuting family of Hermitian matrices.

    Classic partition refinement: diagonalize the first matrix, split the
    basis into eigenvalue clusters (gap threshold ``tol`` times the matrix
    scale), then diagonalize each subsequent matrix inside every cluster.

    Returns
    -------
    (u, values)
        ``u`` unitary, ``values`` a real (n, len(mats)) array with
        ``values[k, j]`` the j-th matrix's eigenvalue along column k of
        ``u``.

    Raises
    ------
    NotCommuting
        If some matrix keeps off-diagonal mass above ``1e-7`` times its
        scale in the refined basis, which is the numerical symptom of a
        non-commuting input.
    """
    ms = [as_matrix(m) for m in mats]
    if not ms:
        raise DimensionMismatch("need at least one matrix")
    n = ms[0].shape[0]
    u = np.eye(n, dtype=complex)
    blocks = [(0, n)]
    for m in ms:
        scale = max(1.0, float(np.abs(m).max(initial=0.0)))
        refined: list[tuple[int, int]] = []
        for lo, hi in blocks:
            if hi - lo == 1:
                refined.append((lo, hi))
                continue
            ub = u[:, lo:hi]
            vals, vecs = np.linalg.eigh(herm_part(ub.conj().T @ m @ ub))
            u[:, lo:hi] = ub @ vecs
            start = lo
            for k in range(1, hi - lo):
                if vals[k] - vals[k - 1] > tol * scale:
                    refined.append((start, lo + k))
                    start = lo + k
            refined.append((start, hi))
        blocks = refined
    values = np.empty((n, len(ms)))
    for j, m in enumerate(ms):
        t = u.conj().T @ m @ u
        values[:, j] = np.real(np.diag(t))
        off = t - np.diag(np.diag(t))
        scale = max(1.0, float(np.abs(t).max(initial=0.0)))
        if float(np.abs(off).max(initial=0.0)) > 1e-7 * scale:
            raise NotCommuting(
                f"matrix {j} is not diagonal in the joint eigenbasis "
                f"(off-diagonal mass {float(np.abs(off).max()):.3e})"
            )
    return u, values


@dataclasses.dataclass(frozen=True)
class UnitaryCertificate:
    """A unitary ``u`` together with the residual of the property it attests."""

    u: np.ndarray
    residual: float


def constant_diagonal_form(m) -> tuple[np.ndarray, UnitaryCertificate]:
    """Unitary conjugation of a 2x2 matrix to equal diagonal entries.

    Every 2x2 complex matrix is unitarily similar to one whose two diagonal
    entries both equal ``trace(m) / 2``.  The construction is closed-form:
    after a Schur triangularization of the traceless part, a planar
    rotation with one phase zeroes the diagonal.

    Returns
    -------
    (b, cert)
        The conjugated matrix ``b = u* m u`` and a certificate carrying the
        unitary and the residual ``|b_00 - b_11|``.
    """
    a = as_matrix(m)
    if a.shape != (2, 2):
        raise DimensionMismatch("constant_diagonal_form expects a 2x2 matrix")
    half_tr = np.trace(a) / 2.0
    m0 = a - half_tr * np.eye(2)
    if np.abs(m0).max() <= 1e-15 * max(1.0, abs(half_tr)):
        u = np.eye(2, dtype=complex)
        b = u.conj().T @ a @ u
        return b, UnitaryCertificate(u, float(abs(b[0, 0] - b[1, 1])))

    t, z = scipy.linalg.schur(m0, output="complex")
    lam, beta = t[0, 0], t[0, 1]
    lam_hat = lam / abs(lam) if abs(lam) > 0 else 1.0
    beta_hat = beta / abs(beta) if abs(beta) > 0 else 1.0
    phase = -lam_hat / beta_hat
    s2 = np.arctan2(2.0 * abs(lam), abs(beta))
    c, s = np.cos(s2 / 2.0), np.sin(s2 / 2.0)
    # first column makes the quadratic form vanish, second is orthonormal
    v = np.array([[c, -np.conj(phase) * s], [phase * s, c]], dtype=complex)
    u = z @ v
    b = u.conj().T @ a @ u
    return b, UnitaryCertificate(u, float(abs(b[0, 0] - b[1, 1])))


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Gaussian Hermitian matrix, handy for seeded probes and tests."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * herm_part(g)


def random_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish isometry with ``rows >= cols`` (QR of a Gaussian)."""
    if rows < cols:
        raise DimensionMismatch("an isometry needs rows >= cols")
    g = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(g)
    # fix the phase so the factorization is unique and seeded runs repeat
    ph = np.diagonal(r).copy()
    ph[np.abs(ph) < 1e-12] = 1.0
    return q * (ph / np.abs(ph)).conj()
