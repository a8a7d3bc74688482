import math

import numpy as np
import pytest

from yamabeflow.analysis import (
    angle_monotonicity_scan,
    classify_operator,
    degeneration_probe,
    hessian_spectrum,
    jacobi_eigh,
    minor_determinant_check,
    minor_determinant_closed_form,
    minor_determinants,
    monotonicity_check,
    omega_sign_audit,
    random_tetrahedra,
)
from yamabeflow.complex import preset
from yamabeflow.geometry import DegenerateTetrahedronError, dalpha_matrix, face_geometry, relative_q, volume


def test_jacobi_matches_numpy():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = rng.integers(2, 7)
        B = rng.normal(size=(n, n)) * 10.0 ** rng.uniform(-3, 3)
        A = B + B.T
        w, V = jacobi_eigh(A)
        assert np.allclose(w, np.linalg.eigvalsh(A), rtol=1e-12, atol=1e-12 * np.abs(w).max())
        assert np.allclose(A @ V, V * w, atol=1e-11 * np.abs(w).max())
        assert np.allclose(V.T @ V, np.eye(n), atol=1e-12)


def test_jacobi_diagonal_and_degenerate_input():
    w, V = jacobi_eigh(np.diag([3.0, -1.0, 2.0]))
    assert w.tolist() == [-1.0, 2.0, 3.0]
    w, _ = jacobi_eigh(np.ones((4, 4)))
    assert np.allclose(w, [0, 0, 0, 4], atol=1e-14)


def test_regular_spectrum():
    rep = hessian_spectrum((1, 1, 1, 1))
    assert np.allclose(rep.eigenvalues, [-2 * math.sqrt(2) / 3] * 3 + [0], atol=1e-12)
    assert rep.null_vector_angle < 1e-12
    assert rep.minor_check < 1e-12


def test_regular_minor_value():
    M = minor_determinants(dalpha_matrix((1, 1, 1, 1)))
    mag = 288 * (2 * math.sqrt(2) / 3) / 6**4
    for i in range(4):
        for j in range(4):
            assert M[i, j] == pytest.approx((-1) ** (i + j + 1) * mag, rel=1e-12)


def test_minor_structure_from_rank_three(sample_tetrahedra):
    # for a symmetric rank-3 matrix with kernel r, cof(A)_ij = c r_i r_j;
    # this pins the weight dependence of the closed form independently of its constant
    for r in sample_tetrahedra[:100]:
        cof = minor_determinants(dalpha_matrix(r)) * (-1.0) ** np.add.outer(np.arange(4), np.arange(4))
        c = cof / np.outer(r, r)
        assert np.allclose(c, c[0, 0], rtol=1e-7)
    assert minor_determinant_check(sample_tetrahedra).max() <= 1e-8


def test_closed_form_constant():
    r = np.array([0.7, 1.3, 2.1, 0.9])
    P, _ = face_geometry(r)
    exact = minor_determinant_closed_form(r)
    assert exact[0, 1] == pytest.approx(288 * volume(r) / (r[2] * r[3] * P.prod()), rel=1e-14)
    assert exact[0, 1] > 0 and exact[0, 0] < 0


def test_spectrum_on_sample(sample_tetrahedra):
    for r in sample_tetrahedra:
        rep = hessian_spectrum(r)
        rho = rep.spectral_radius
        assert rep.eigenvalues[-1] <= 1e-9 * rho
        assert rep.eigenvalues[-2] < -1e-12 * rho
        assert 0 <= rep.null_vector_angle <= 1e-7
        assert rep.det_residual <= 1e-12


def test_spectrum_rejects_degenerate():
    with pytest.raises(DegenerateTetrahedronError):
        hessian_spectrum((1, 1, 1, 0.01))


def test_sign_audit_counterexample():
    rep = omega_sign_audit((1, 1, 1, 0.2))
    assert {(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)} == set(rep.negative_pairs)
    assert rep.min_slots == [3]
    assert rep.ok
    assert omega_sign_audit((1, 1, 1, 1)).negative_pairs == []


def test_sign_audit_sample(sample_tetrahedra):
    n_neg = 0
    for r in sample_tetrahedra:
        rep = omega_sign_audit(r)
        assert rep.ok, r.tolist()
        n_neg += len(rep.negative_pairs)
    assert n_neg > 0  # the sample does reach the regime with negative weights


def test_classify_operator():
    c, m = preset("double_tetrahedron")
    cls = classify_operator(c, m)
    assert cls.parabolic and cls.negative_edges == [] and cls.parabolic_like_for_K
    cls = classify_operator(c, m.with_radii({4: 0.2}))
    assert not cls.parabolic
    assert (1, 2) in cls.negative_edges
    assert cls.parabolic_like_for_K


def test_monotonicity_check_presets():
    rng = np.random.default_rng(5)
    for name in ("double_tetrahedron", "boundary_4_simplex"):
        c, m = preset(name)
        assert monotonicity_check(c, m).holds  # all ties
        done = 0
        while done < 30:
            r = np.exp(rng.uniform(-1.5, 1.5, len(c.vertices)))
            if relative_q(r[c.tet_array]).min() <= 1e-6:
                continue
            m2 = m.from_array(c.vertices, r)
            rep = monotonicity_check(c, m2)
            assert rep.holds and rep.per_tetrahedron.shape == (len(c.tetrahedra),)
            done += 1


def test_angle_scan_and_ties():
    rep = angle_monotonicity_scan(2000, seed=9)
    assert rep.samples == 2000 and rep.violations == 0 and rep.face_area_violations == 0
    tied = angle_monotonicity_scan(1, weights=[[0.7, 0.7, 1.9, 0.4]])
    assert tied.violations == 0 and tied.equal_weight_max_gap <= 1e-12
    with pytest.raises(ValueError):
        angle_monotonicity_scan(0)


def test_random_tetrahedra_reproducible():
    a, b = random_tetrahedra(50, seed=3), random_tetrahedra(50, seed=3)
    assert np.array_equal(a, b)
    assert np.all((a >= 0.1) & (a <= 10)) and np.all(relative_q(a) > 0)


def test_degeneration_probe():
    rep = degeneration_probe((1, 1, 1, 0.3), (0, 0, 0, -1))
    # Q(1,1,1,x) = 0 at 1/x = 3 + 2 sqrt(3)
    assert rep.boundary_weights[3] == pytest.approx(1 / (3 + 2 * math.sqrt(3)), rel=1e-12)
    assert rep.min_slot == 3
    assert rep.monotone
    assert rep.final_min_alpha > 2 * math.pi - 1e-3
    assert rep.final_other_alpha < 1e-3
    assert rep.alpha_sum[-1] == pytest.approx(2 * math.pi, abs=1e-3)
    assert np.all(np.diff(rep.alpha_sum) > 0)


def test_probe_errors():
    with pytest.raises(ValueError, match="never degenerates"):
        degeneration_probe((1, 1, 1, 0.3), (1, 1, 1, 1))
    with pytest.raises(ValueError, match="collapse"):
        degeneration_probe((1, 1, 1, 1), (-1, -1, -1, -1))
    with pytest.raises(ValueError):
        degeneration_probe((1, 1, 1, 0.3), (0, 0, 0, 0))
