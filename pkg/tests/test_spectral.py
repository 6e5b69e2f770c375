import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cfdim.assembly import SparseRowMatrix, assemble_sandwich
from cfdim.errors import NoConvergence, OscillationDetected
from cfdim.maps import Alphabet
from cfdim.mesh import build_mesh_domain
from cfdim.spectral import Direction, dominant_eigen_general, power_method, verify_certificate


def test_power_method_examples():
    r = power_method(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert r.eigenvalue == pytest.approx(3.0)
    assert r.vector.tolist() == pytest.approx([1.0, 1.0])
    assert power_method(np.diag([2.0, 1.0])).eigenvalue == pytest.approx(2.0)
    r = power_method(np.eye(4))
    assert r.eigenvalue == 1.0 and r.cw_lower == r.cw_upper == 1.0 and r.iterations == 1


def test_power_method_no_convergence():
    with pytest.raises(NoConvergence):
        power_method(np.array([[0.0, 1.0], [1.0, 0.0]]) + np.diag([0.0, 1e-9]), max_iter=50)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(0.01, 5.0)))
def test_collatz_wielandt_contains_radius_at_every_iteration(a):
    r = power_method(a, tol=1e-12, record=True)
    rho = max(abs(np.linalg.eigvals(a)))
    lows = [lo for lo, _ in r.history]
    highs = [hi for _, hi in r.history]
    for lo, hi in r.history:
        assert lo <= rho * (1 + 1e-12) and rho <= hi * (1 + 1e-12)
    assert all(b >= a_ - 1e-12 * rho for a_, b in zip(lows, lows[1:]))
    assert all(b <= a_ + 1e-12 * rho for a_, b in zip(highs, highs[1:]))
    assert r.cw_lower <= r.eigenvalue <= r.cw_upper
    assert (r.vector > 0).all() and r.vector.max() == 1.0


def test_collatz_wielandt_on_assembled_matrix():
    A, B = assemble_sandwich(build_mesh_domain(16), Alphabet.i3(), 1.5)
    for m in (A, B):
        r = power_method(m, record=True)
        lows, highs = zip(*r.history)
        assert np.all(np.diff(lows) >= -1e-15) and np.all(np.diff(highs) <= 1e-15)
        rho = max(abs(np.linalg.eigvals(m.toarray())))
        assert lows[-1] <= rho * (1 + 1e-13) and rho <= highs[-1] * (1 + 1e-13)


def test_general_examples():
    lam, v = dominant_eigen_general(np.array([[2.0, -0.1], [0.0, 1.0]]))
    assert lam == pytest.approx(2.0, rel=1e-12)
    with pytest.raises(OscillationDetected):
        dominant_eigen_general(np.array([[0.0, 1.0], [1.0, 0.0]]))


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (5, 5), elements=st.floats(0.05, 3.0)))
def test_general_agrees_with_power_method_on_positive_matrices(a):
    lam, _ = dominant_eigen_general(a, tol=1e-12)
    assert lam == pytest.approx(power_method(a, tol=1e-12).eigenvalue, rel=1e-10)


def test_verify_certificate_examples():
    for d in Direction:
        assert verify_certificate(np.eye(3), [1.0, 2.0, 3.0], d)
    assert not verify_certificate(2 * np.eye(2), [1.0, 1.0], Direction.UPPER_DOMINATES)
    assert verify_certificate(2 * np.eye(2), [1.0, 1.0], Direction.LOWER_DOMINATES)
    assert verify_certificate(1.05 * np.eye(2), [1.0, 1.0], Direction.UPPER_DOMINATES, slack=0.1)
    assert not verify_certificate(np.eye(2), [1.0, 0.0], Direction.UPPER_DOMINATES)


def test_certificate_consistency_with_radius():
    m = SparseRowMatrix.from_dense(np.array([[0.5, 0.2], [0.1, 0.6]]))
    v = np.array([1.0, 1.0])
    assert verify_certificate(m, v, Direction.UPPER_DOMINATES)
    r = power_method(m)
    assert r.eigenvalue <= max(m.apply(v) / v) <= 1


def test_sandwich_radius_gap_shrinks_like_h2():
    # N=24 and N=48 stand in for the odd N=25
    def ratio(n):
        A, B = assemble_sandwich(build_mesh_domain(n), Alphabet.i3(), 1.5377)
        return power_method(B).eigenvalue / power_method(A).eigenvalue - 1

    g1, g2 = ratio(24), ratio(48)
    assert g1 > 0 and g2 > 0
    assert 4 / 1.3 <= g1 / g2 <= 4 * 1.3
