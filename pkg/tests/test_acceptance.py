"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records a PASS/FAIL line; the lines are printed in the pytest
terminal summary, or directly when this file is run as a script.
"""

import math
import time

import numpy as np
import pytest

from yamabeflow.analysis import (
    angle_monotonicity_scan,
    degeneration_probe,
    finite_difference_errors,
    hessian_spectrum,
    minor_determinant_check,
    random_tetrahedra,
    schlafli_residual,
)
from yamabeflow.complex import preset
from yamabeflow.flow import FlowConfig, curvature_array, run_flow
from yamabeflow.geometry import dalpha_matrix, face_geometry, nondegeneracy_q, omega_block, volume

SEED = 2024
RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str):
    RESULTS[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, RESULTS[n]


@pytest.fixture(scope="module")
def sample():
    return random_tetrahedra(1000, seed=SEED)


def _flow_run(name, radii, t_end):
    c, m = preset(name)
    m = m.with_radii(radii)
    r0 = m.array(c.vertices)
    assert np.all(nondegeneracy_q(r0[c.tet_array]) > 0)
    t0 = time.perf_counter()
    trace = run_flow(c, m, FlowConfig(t_end=t_end))
    return trace, time.perf_counter() - t0


@pytest.fixture(scope="module")
def flows():
    return {
        "double_tetrahedron": _flow_run("double_tetrahedron", {4: 2.0}, 1.0),
        "boundary_4_simplex": _flow_run("boundary_4_simplex", {5: 3.0}, 10.0),
    }


def test_criterion_01_derivative_fidelity(sample):
    t0 = time.perf_counter()
    err = finite_difference_errors(sample, h=1e-6)
    elapsed = time.perf_counter() - t0
    worst = {k: float(v.max()) for k, v in err.items()}
    ok = all(v <= 1e-6 for v in worst.values()) and elapsed < 5.0
    record(1, ok, ", ".join(f"{k} {v:.2e}" for k, v in worst.items()) + f"; {elapsed:.2f} s")


def test_criterion_02_schlafli_and_symmetry(sample):
    res = float(schlafli_residual(sample).max())
    D = dalpha_matrix(sample)
    asym = float((np.abs(D - np.swapaxes(D, 1, 2)).max(axis=(1, 2)) / np.abs(D).max(axis=(1, 2))).max())
    record(2, res <= 1e-12 and asym <= 1e-12, f"row residual {res:.2e}, asymmetry {asym:.2e}")


def test_criterion_03_negative_coefficient_example():
    r = np.array([1.0, 1.0, 1.0, 0.2])
    Q = float(nondegeneracy_q(r))
    om = omega_block(r).omega
    P, _ = face_geometry(r)
    # faces 123 and 124 are opposite slots 3 and 2
    expected = -8.0 / (75.0 * P[3] * P[2] * float(volume(r)))
    rel = max(abs(om[a, b] / expected - 1) for a, b in [(0, 1), (1, 0)])
    ok = abs(Q - 8) <= 1e-12 and om[0, 1] < 0 and rel <= 1e-10
    record(3, ok, f"Q {Q:.15g}, Omega {om[0, 1]:.12g} vs {expected:.12g}, rel err {rel:.1e}")


def test_criterion_04_spectrum_and_minors(sample):
    reg = hessian_spectrum((1, 1, 1, 1)).eigenvalues
    reg_err = float(np.abs(reg - np.array([-2 * math.sqrt(2) / 3] * 3 + [0.0])).max())
    top, third, angle = 0.0, -np.inf, 0.0
    for r in sample:
        rep = hessian_spectrum(r)
        rho = rep.spectral_radius
        top = max(top, rep.eigenvalues[-1] / rho)
        third = max(third, rep.eigenvalues[-2] / rho)
        angle = max(angle, rep.null_vector_angle)
    minors = float(minor_determinant_check(sample).max())
    ok = reg_err <= 1e-9 and top <= 1e-9 and third < 0 and angle <= 1e-7 and minors <= 1e-8
    record(
        4, ok,
        f"regular err {reg_err:.1e}; max eig/rho {top:.1e}; 3rd eig/rho {third:.2e}; "
        f"null angle {angle:.1e}; minors {minors:.1e}",
    )


def test_criterion_05_maximum_principle(flows):
    parts, ok = [], True
    for name, (trace, elapsed) in flows.items():
        K = trace.K
        up = float(np.diff(K.max(axis=1)).max())
        down = float(np.diff(K.min(axis=1)).min())
        mc = all(s.mc for s in trace.samples)
        good = up <= 1e-9 and down >= -1e-9 and mc and elapsed < 2.0 and trace.termination == "reached_t_end"
        ok &= good
        parts.append(f"{name}: max K step {up:.1e}, min K step {down:.1e}, MC {mc}, {elapsed:.2f} s")
    record(5, ok, "; ".join(parts))


def test_criterion_06_convergence_at_desk_scale(flows):
    targets = {"double_tetrahedron": 1.0, "boundary_4_simplex": 10.0}
    parts, ok = [], True
    for name, (trace, _) in flows.items():
        assert trace.t[-1] == targets[name]
        spread = float(trace.spread[-1])
        ok &= spread < 1e-6
        parts.append(f"{name} spread {spread:.3e} at t={targets[name]:g}")
    record(6, ok, "; ".join(parts))


def test_criterion_07_growth_bounds(flows):
    worst = -np.inf
    for trace, _ in flows.values():
        r0, K0 = trace.samples[0].r, trace.samples[0].K
        C = max(K0.max(), -K0.min())
        t = trace.t[:, None]
        lo = r0 * np.exp(-C * t) * (1 - 1e-8)
        hi = r0 * np.exp(C * t) * (1 + 1e-8)
        r = trace.r
        worst = max(worst, float(np.max(lo / r - 1)), float(np.max(r / hi - 1)))
    record(7, worst <= 0, f"worst bound margin {worst:.2e} (<= 0 required)")


def test_criterion_08_angle_order_and_face_area():
    rep = angle_monotonicity_scan(10_000, seed=SEED)
    ok = rep.violations == 0 and rep.face_area_violations == 0 and rep.samples == 10_000
    record(8, ok, f"{rep.violations} order / {rep.face_area_violations} face-area violations in {rep.samples}")


def test_criterion_09_degeneration_limit():
    rep = degeneration_probe((1, 1, 1, 0.3), (0, 0, 0, -1))
    assert rep.deltas[-1] == 1e-10
    a_min, a_other = rep.final_min_alpha, rep.final_other_alpha
    ok = rep.min_slot == 3 and a_min > 2 * math.pi - 1e-3 and a_other < 1e-3
    record(9, ok, f"at relative Q 1e-10: alpha_min {a_min:.6f} (2pi - {2 * math.pi - a_min:.1e}), others <= {a_other:.1e}")


def test_criterion_10_scale_invariance():
    worst_K = worst_O = 0.0
    for name, radii in [("double_tetrahedron", {4: 2.0}), ("boundary_4_simplex", {5: 3.0, 2: 0.6})]:
        c, m = preset(name)
        r = m.with_radii(radii).array(c.vertices)
        K1, _ = curvature_array(c, r)
        for lam in (1e-3, 1.0, 1e3):
            K2, _ = curvature_array(c, lam * r)
            worst_K = max(worst_K, float(np.max(np.abs(K2 - K1) / np.abs(K1))))
    for r in random_tetrahedra(200, seed=SEED):
        O1 = omega_block(r).omega
        for lam in (1e-3, 1.0, 1e3):
            O2 = omega_block(lam * r).omega
            worst_O = max(worst_O, float(np.max(np.abs(O2 - O1)) / np.abs(O1).max()))
    record(10, worst_K <= 1e-12 and worst_O <= 1e-12, f"K rel {worst_K:.1e}, Omega rel {worst_O:.1e}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
