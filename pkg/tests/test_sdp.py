import numpy as np
import pytest

from mconvex.errors import BadProblem
from mconvex.linalg import random_hermitian
from mconvex.sdp import (
    AffineConstraint,
    SdpFeasibility,
    Status,
    dual_witness,
    solve_feasibility,
    verify_witness,
)


def _trace_one(size: int, extra=()) -> SdpFeasibility:
    cons = [AffineConstraint(np.eye(size, dtype=complex), 1.0)]
    cons.extend(extra)
    return SdpFeasibility(size, tuple(cons))


def test_feasible_trace_one():
    verdict = solve_feasibility(_trace_one(3))
    assert verdict.status is Status.FEASIBLE
    min_eig, residual = verify_witness(_trace_one(3), verdict.witness)
    assert min_eig >= -1e-9
    assert residual <= 1e-7


def test_infeasible_negative_trace():
    problem = SdpFeasibility(
        3, (AffineConstraint(np.eye(3, dtype=complex), -0.5),)
    )
    verdict = solve_feasibility(problem)
    assert verdict.status is Status.INFEASIBLE
    cert = dual_witness(problem, verdict)
    assert cert["margin"] > 0
    assert cert["margin_gap"] <= 1e-8
    assert cert["pencil_max_eig"] <= 1e-8


def test_infeasible_duplicate_functionals():
    rng = np.random.default_rng(0)
    coeff = random_hermitian(4, rng)
    problem = SdpFeasibility(
        4,
        (
            AffineConstraint(coeff, 0.3),
            AffineConstraint(coeff.copy(), 0.9),
        ),
    )
    verdict = solve_feasibility(problem)
    assert verdict.status is Status.INFEASIBLE
    cert = dual_witness(problem, verdict)
    assert cert["margin"] > 0


def test_infeasible_entry_exceeds_trace():
    e = np.zeros((3, 3), dtype=complex)
    e[0, 0] = 1.0
    problem = _trace_one(3, extra=(AffineConstraint(e, 1.7),))
    verdict = solve_feasibility(problem)
    assert verdict.status is Status.INFEASIBLE


def test_planted_feasible_random_batch():
    rng = np.random.default_rng(1)
    for _ in range(25):
        size = int(rng.integers(2, 6))
        g = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
        c0 = g @ g.conj().T
        c0 /= np.trace(c0).real
        cons = []
        for _ in range(int(rng.integers(3, 8))):
            coeff = random_hermitian(size, rng)
            cons.append(AffineConstraint(coeff, float(np.trace(coeff @ c0).real)))
        problem = SdpFeasibility(size, tuple(cons))
        verdict = solve_feasibility(problem)
        assert verdict.status is Status.FEASIBLE
        min_eig, residual = verify_witness(problem, verdict.witness)
        assert min_eig >= -1e-8
        assert residual <= 1e-6


def test_block_structure_rejects_coupling():
    coeff = np.ones((4, 4), dtype=complex)
    problem = SdpFeasibility(
        4,
        (AffineConstraint(coeff, 1.0),),
        block_sizes=(2, 2),
    )
    with pytest.raises(BadProblem):
        solve_feasibility(problem)


def test_block_structure_solves_blockwise():
    z1 = np.zeros((4, 4), dtype=complex)
    z1[:2, :2] = np.eye(2)
    z2 = np.zeros((4, 4), dtype=complex)
    z2[2:, 2:] = np.eye(2)
    problem = SdpFeasibility(
        4,
        (AffineConstraint(z1, 1.0), AffineConstraint(z2, 0.5)),
        block_sizes=(2, 2),
    )
    verdict = solve_feasibility(problem)
    assert verdict.status is Status.FEASIBLE
    w = verdict.witness
    assert np.abs(w[:2, 2:]).max() <= 1e-12
    assert np.trace(w[:2, :2]).real == pytest.approx(1.0, abs=1e-6)


def test_trace_normalization_field():
    problem = SdpFeasibility(
        3,
        (AffineConstraint(np.diag([1.0, 0.0, 0.0]).astype(complex), 0.4),),
        trace_normalization=1.0,
    )
    verdict = solve_feasibility(problem)
    assert verdict.status is Status.FEASIBLE
    assert np.trace(verdict.witness).real == pytest.approx(1.0, abs=1e-6)
