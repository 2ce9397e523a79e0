import numpy as np
import pytest

from mconvex.errors import (
    DimensionMismatch,
    NonHermitianInput,
    NotInKmax,
    TupleMismatch,
)
from mconvex.geometry import Box, Disc, Polytope, Sampled
from mconvex.linalg import OperatorTuple, herm_part, numerical_radius, skew_part
from mconvex.ranges import (
    MembershipStatus,
    calibrate_choi_li,
    choi_li_equiv_check,
    choi_li_transform,
    is_matrix_extreme_free_symmetric,
    is_matrix_extreme_free_unitary,
    kmax_member,
    kmin_member,
    mrange_equal,
    theta_min_alpha,
    ucp_member,
)

X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
ROOT2 = np.sqrt(2.0)

SQUARE = Polytope(np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]))
UNIT_BOX = Box(np.array([-1.0, -1.0]), np.array([1.0, 1.0]))
UNIT_DISC = Disc(np.zeros(2), 1.0)


def pauli(scale: float = 1.0) -> OperatorTuple:
    return OperatorTuple((scale * X, scale * Z), hermitian=True)


def nilpotent_pair() -> OperatorTuple:
    s = np.array([[0.0, 2.0], [0.0, 0.0]], dtype=complex)
    return OperatorTuple((herm_part(s), skew_part(s)), hermitian=True)


class TestKmax:
    def test_pauli_in_square(self):
        assert kmax_member(SQUARE, pauli()).status is MembershipStatus.IN

    def test_scaled_pauli_out(self):
        res = kmax_member(SQUARE, OperatorTuple((1.2 * X, Z), hermitian=True))
        assert res.status is MembershipStatus.OUT
        assert res.margin == pytest.approx(0.2, abs=1e-9)

    def test_box_matches_square(self):
        assert kmax_member(UNIT_BOX, pauli()).status is MembershipStatus.IN

    def test_disc_nilpotent_boundary_in(self):
        res = kmax_member(UNIT_DISC, nilpotent_pair())
        assert res.status is MembershipStatus.IN
        assert res.margin <= 1e-9

    def test_disc_outside(self):
        res = kmax_member(UNIT_DISC, nilpotent_pair().scaled(1.1))
        assert res.status is MembershipStatus.OUT

    def test_sampled_body(self):
        dirs = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        body = Sampled(dirs, np.ones(4))
        assert kmax_member(body, pauli()).status is MembershipStatus.IN

    def test_rejects_non_hermitian(self):
        t = OperatorTuple((np.array([[0.0, 1.0], [0.0, 0.0]]), Z), hermitian=False)
        with pytest.raises(NonHermitianInput):
            kmax_member(SQUARE, t)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatch):
            kmax_member(SQUARE, OperatorTuple((X,), hermitian=True))


class TestKmin:
    def test_square_boundary_point(self):
        res = kmin_member(SQUARE, pauli(1.0 / ROOT2))
        assert res.status is MembershipStatus.IN
        h = res.certificate["h"]
        assert len(h) == 4
        total = sum(h)
        np.testing.assert_allclose(total, np.eye(2), atol=1e-7)

    def test_square_interior(self):
        res = kmin_member(SQUARE, pauli(0.5))
        assert res.status is MembershipStatus.IN
        assert res.margin > 0.01

    def test_square_outside(self):
        res = kmin_member(SQUARE, pauli())
        assert res.status is MembershipStatus.OUT
        assert res.margin > 0.1

    def test_commuting_fast_path(self):
        t = OperatorTuple((Z, Z), hermitian=True)
        res = kmin_member(SQUARE, t)
        assert res.status is MembershipStatus.IN
        assert "joint spectrum" in res.detail

    def test_commuting_outside(self):
        t = OperatorTuple((2.0 * Z, Z), hermitian=True)
        res = kmin_member(SQUARE, t)
        assert res.status is MembershipStatus.OUT

    def test_singleton_body(self):
        point = Polytope(np.array([[0.5, -0.5]]))
        eye = np.eye(2, dtype=complex)
        good = OperatorTuple((0.5 * eye, -0.5 * eye), hermitian=True)
        assert kmin_member(point, good).status is MembershipStatus.IN
        assert kmin_member(point, pauli()).status is MembershipStatus.OUT

    def test_disc_sandwich(self):
        inside = nilpotent_pair().scaled(0.45)
        res = kmin_member(UNIT_DISC, inside)
        assert res.status is MembershipStatus.IN
        outside = nilpotent_pair().scaled(0.55)
        res = kmin_member(UNIT_DISC, outside)
        assert res.status is MembershipStatus.OUT

    def test_box_body(self):
        res = kmin_member(UNIT_BOX, pauli(1.0 / ROOT2))
        assert res.status is MembershipStatus.IN

    def test_sampled_clips_to_polygon(self):
        dirs = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        body = Sampled(dirs, np.ones(4))
        res = kmin_member(body, pauli(1.0 / ROOT2))
        assert res.status is MembershipStatus.IN


class TestTheta:
    def test_square_brackets_root2(self):
        est = theta_min_alpha(SQUARE, pauli(), tol=0.02)
        assert est.lower <= ROOT2 <= est.upper + 0.02
        assert est.upper - est.lower <= 0.02 + 1e-12
        res = kmin_member(
            Polytope(SQUARE.vertices * est.upper), est.witness_point.scaled(est.upper)
        )
        assert res.status in (MembershipStatus.IN, MembershipStatus.BOUNDARY)

    def test_disc_brackets_two(self):
        est = theta_min_alpha(UNIT_DISC, nilpotent_pair(), tol=0.02)
        assert est.lower <= 2.0 <= est.upper + 0.02

    def test_inside_returns_unit(self):
        est = theta_min_alpha(SQUARE, pauli(0.5), tol=0.02)
        assert est.lower == est.upper == 1.0

    def test_requires_kmax(self):
        with pytest.raises(NotInKmax):
            theta_min_alpha(SQUARE, pauli(3.0))

    def test_trace_collects_brackets(self):
        trace = []
        theta_min_alpha(SQUARE, pauli(), tol=0.05, trace=trace)
        assert len(trace) >= 3
        widths = [hi - lo for lo, hi in trace]
        assert all(b <= a + 1e-12 for a, b in zip(widths, widths[1:]))


class TestUcp:
    def test_projection_out_of_interval(self):
        x = OperatorTuple((Z,), hermitian=True)
        bad = OperatorTuple((np.array([[2.0 + 0j]]),), hermitian=True)
        res = ucp_member(x, bad)
        assert res.status is MembershipStatus.OUT
        assert res.margin == pytest.approx(0.5, abs=1e-6)

    def test_scalar_in_interval(self):
        x = OperatorTuple((Z,), hermitian=True)
        good = OperatorTuple((np.array([[0.3 + 0j]]),), hermitian=True)
        res = ucp_member(x, good)
        assert res.status is MembershipStatus.IN

    def test_identity_map(self):
        x = pauli()
        assert ucp_member(x, x).status is MembershipStatus.IN

    def test_compression_is_member(self):
        rng = np.random.default_rng(2)
        x = pauli()
        g = rng.standard_normal((2, 1)) + 1j * rng.standard_normal((2, 1))
        v = g / np.linalg.norm(g)
        comp = OperatorTuple(
            tuple(v.conj().T @ m @ v for m in x.mats), hermitian=True
        )
        assert ucp_member(x, comp).status is MembershipStatus.IN

    def test_tuple_mismatch(self):
        with pytest.raises(TupleMismatch):
            ucp_member(pauli(), OperatorTuple((X,), hermitian=True))


class TestMrangeEqual:
    def test_tuple_equals_itself(self):
        ok, reports = mrange_equal(pauli(), pauli(), levels=(1,), probes=5)
        assert ok
        assert reports[0]["y_in_range_x"] == "In"

    def test_unitary_conjugate_equal(self):
        h = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / ROOT2
        other = OperatorTuple(
            (h @ X @ h.conj().T, h @ Z @ h.conj().T), hermitian=True
        )
        ok, _ = mrange_equal(pauli(), other, levels=(1, 2), probes=10)
        assert ok

    def test_strict_inclusion_detected(self):
        ok, reports = mrange_equal(pauli(), pauli(0.5), levels=(1,), probes=5)
        assert not ok
        assert reports[0]["x_in_range_y"] == "Out"


class TestExtremality:
    def test_accepts_irreducible_symmetries(self):
        ok, why = is_matrix_extreme_free_symmetric(pauli())
        assert ok and "irreducible" in why

    def test_rejects_non_symmetry(self):
        ok, why = is_matrix_extreme_free_symmetric(pauli(0.5))
        assert not ok and "symmetry" in why

    def test_rejects_reducible(self):
        t = OperatorTuple(
            (np.kron(np.eye(2), X), np.kron(np.eye(2), Z)), hermitian=True
        )
        ok, why = is_matrix_extreme_free_symmetric(t)
        assert not ok and "reducible" in why

    def test_unitary_variant(self):
        w = np.exp(2j * np.pi / 3)
        u1 = np.diag([1.0, w, w * w])
        u2 = np.roll(np.eye(3), 1, axis=0).astype(complex)
        ok, why = is_matrix_extreme_free_unitary(
            OperatorTuple((u1, u2), hermitian=False)
        )
        assert ok

    def test_unitary_rejects_contraction(self):
        ok, why = is_matrix_extreme_free_unitary(
            OperatorTuple((X / 2,), hermitian=False)
        )
        assert not ok and "unitary" in why


class TestChoiLi:
    def test_scalar_transforms(self):
        m = choi_li_transform(np.array([[1.0 + 0j]]))
        np.testing.assert_allclose(m, np.array([[0.0, 1.0], [1.0, 0.0]]))
        corner = choi_li_transform(np.array([[1.0 + 1.0j]]))
        np.testing.assert_allclose(corner, np.array([[0.0, 2.0], [0.0, 0.0]]))
        assert numerical_radius(corner) == pytest.approx(1.0, abs=1e-9)

    def test_calibration_report(self):
        cal = calibrate_choi_li()
        assert cal["calibrated_constant"] == pytest.approx(0.5, abs=1e-9)
        assert cal["calibrated_corner_radius"] == pytest.approx(1.0, abs=1e-9)
        # the tempting reference constant overshoots the corner by sqrt(2)
        assert cal["reference_corner_radius"] == pytest.approx(ROOT2, abs=1e-9)

    @pytest.mark.parametrize(
        "y,expected",
        [
            (1.0, "In"),
            (1.0j, "In"),
            (1.05, "Out"),
            (1.0 + 1.0j, "In"),
            (1.2 + 1.2j, "Out"),
            (0.3 - 0.8j, "In"),
        ],
    )
    def test_scalar_consistency(self, y, expected):
        rep = choi_li_equiv_check(np.array([[y]]))
        assert rep["consistent"]
        assert rep["square_min"].status.value == expected

    def test_matrix_consistency(self):
        y = (X + 1j * Z) / ROOT2
        rep = choi_li_equiv_check(y)
        assert rep["consistent"]
        assert rep["radius"] == pytest.approx(1.0, abs=1e-6)

    def test_rejects_nonsquare(self):
        with pytest.raises(DimensionMismatch):
            choi_li_transform(np.zeros((2, 3)))
