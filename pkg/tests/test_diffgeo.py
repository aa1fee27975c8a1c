import numpy as np
import pytest
from hypothesis import given

from qmobius import diffgeo as dg
from qmobius.errors import BadParameter
from qmobius.groups import MatH2, diag, frobenius
from qmobius.quaternion import I, J, K, ONE, ZERO, Quaternion, make_rng, qmul, random_quat
from qmobius.regular import lift_matrix

from conftest import ball_quats, qclose, unit_quats

ZERO_MAT = MatH2(ZERO, ZERO, ZERO, ZERO)


def gram_rank(rows, tol=1e-12):
    """Rank from eigenvalues of the Gram matrix, independent of the SVD path."""
    M = np.asarray(rows)
    ev = np.linalg.eigvalsh(M @ M.T)
    return int(np.sum(ev > tol * ev.max()))


def base(rng):
    return random_quat(rng, "ball", 0.9), random_quat(rng, "unit")


def test_zero_tangent():
    u0 = Quaternion(0.5, 0.5, 0.5, 0.5)
    t = dg.TangentPair(ZERO, ZERO)
    assert dg.dlift_closed(0.3, u0, t) == ZERO_MAT
    assert frobenius(dg.dlift_fd(0.3, u0, t)) <= 1e-12


def test_closed_form_at_origin(rng):
    # with a0 = 0 the scalar s vanishes and the formula reduces to its m-terms
    for _ in range(10):
        u0 = random_quat(rng, "unit")
        b = Quaternion(*rng.standard_normal(4))
        M = dg.dlift_closed(ZERO, u0, dg.TangentPair(b, ZERO))
        assert M.m00 == ZERO and M.m11 == ZERO
        assert qclose(M.m10, b, 1e-15)
        assert qclose(M.m01, qmul(b, u0).conj(), 1e-15)


def test_hand_differentiated_example():
    # lift(s, 1) = (1 - s^2)^{-1/2} [[1, s], [s, 1]] has derivative [[0, 1], [1, 0]] at s = 0
    M = dg.dlift_closed(ZERO, ONE, dg.TangentPair(ONE, ZERO))
    assert M == MatH2(ZERO, ONE, ONE, ZERO)
    assert frobenius(dg.dlift_fd(ZERO, ONE, dg.TangentPair(ONE, ZERO)) - M) <= 1e-9


def test_rotation_direction():
    # lift(0, exp(s xi)) = diag(exp(-s xi), 1): derivative diag(-xi, 0)
    M = dg.dlift_closed(ZERO, ONE, dg.TangentPair(ZERO, J))
    assert M == diag(-J, ZERO)


def test_closed_matches_fd(rng):
    for _ in range(200):
        a0, u0 = base(rng)
        assert dg.fd_relative_deviation(a0, u0, dg.random_tangent(rng, u0), 1e-5) <= 1e-5


def test_fd_converges_quadratically(rng):
    for _ in range(20):
        a0, u0 = random_quat(rng, "ball", 0.7), random_quat(rng, "unit")
        t = dg.random_tangent(rng, u0)
        d1 = dg.fd_relative_deviation(a0, u0, t, 1e-3)
        d2 = dg.fd_relative_deviation(a0, u0, t, 5e-4)
        assert 3.5 <= d1 / d2 <= 4.5


def test_linearity(rng):
    for _ in range(50):
        a0, u0 = base(rng)
        t1, t2 = dg.random_tangent(rng, u0), dg.random_tangent(rng, u0)
        al, be = rng.standard_normal(2)
        comb = dg.TangentPair(t1.b * al + t2.b * be, t1.v * al + t2.v * be)
        lhs = dg.dlift_closed(a0, u0, comb)
        rhs = dg.dlift_closed(a0, u0, t1).scale(al) + dg.dlift_closed(a0, u0, t2).scale(be)
        assert frobenius(lhs - rhs) <= 1e-12


def test_fiber_entry_is_real(rng):
    for _ in range(50):
        a0, u0 = base(rng)
        M = dg.dlift_closed(a0, u0, dg.random_tangent(rng, u0))
        assert M.m11.imag.norm() <= 1e-12


def test_non_tangent_rejected():
    with pytest.raises(BadParameter):
        dg.dlift_closed(0.2, ONE, dg.TangentPair(ZERO, ONE))
    with pytest.raises(BadParameter):
        dg.dlift_closed(0.95, ONE, dg.TangentPair(ZERO, I))


def test_kernel_basis():
    rows = dg.dpi_kernel_basis(ZERO, ONE)
    expected = [diag(w, w).flat() for w in (I, J, K)]
    assert all(np.array_equal(r, e) for r, e in zip(rows, expected))
    rng = make_rng(4)
    for _ in range(20):
        a0, u0 = base(rng)
        lam = (1 - a0.norm2()) ** -0.5
        rows = dg.dpi_kernel_basis(a0, u0)
        assert gram_rank(rows) == 3
        for w, r in zip((I, J, K), rows):
            m11 = Quaternion(*r[12:])
            assert m11.w == 0.0 and qclose(m11, w * lam, 1e-14)


def test_numerical_rank_examples(rng):
    eye3 = np.eye(16)[:3]
    assert dg.numerical_rank(eye3) == 3
    assert dg.numerical_rank(np.vstack([eye3, eye3[1]])) == 3
    M = rng.standard_normal((10, 6)) @ rng.standard_normal((6, 16))
    assert dg.numerical_rank(M) == 6
    assert dg.numerical_rank(rng.standard_normal((10, 16))) == 10
    assert dg.numerical_rank(np.zeros((2, 16))) == 0


def test_rank_certificate(rng):
    assert dg.transversality_rank(ZERO, ONE) == 10
    for _ in range(100):
        a0, u0 = base(rng)
        rows = dg.image_rows(a0, u0)
        assert dg.transversality_rank(a0, u0) == 10
        assert dg.image_rank(a0, u0) == 7
        assert gram_rank(rows + dg.dpi_kernel_basis(a0, u0)) == 10
        assert gram_rank(rows) == 7


@given(ball_quats(), unit_quats())
def test_canonical_tangents_are_tangent(a0, u0):
    for t in dg.canonical_tangents(u0):
        t.check(u0)
    assert dg.transversality_rank(a0, u0) == 10
